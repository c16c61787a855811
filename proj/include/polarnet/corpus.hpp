#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace polarnet {

using UserId = std::uint64_t;
using TweetId = std::uint64_t;
using Timestamp = std::int64_t; // seconds since epoch, UTC

enum class InteractionKind : std::uint8_t { original, retweet, quote, reply };

std::string_view kind_name(InteractionKind kind);
std::optional<InteractionKind> parse_kind(std::string_view name);

/// One interaction event as stored in the newline-delimited corpus files.
struct TweetRecord {
    TweetId tweet_id = 0;
    UserId user_id = 0;
    Timestamp timestamp = 0;
    InteractionKind kind = InteractionKind::original;
    std::optional<UserId> source_user_id; // present iff kind != original
    std::vector<std::string> urls;
    std::string client;
    std::optional<bool> verified;
    std::optional<std::string> text;

    bool operator==(const TweetRecord&) const = default;
};

struct ParseDiagnostic {
    std::string file;
    std::size_t line = 0; // 1-based
    std::string message;
};

struct Corpus {
    std::vector<TweetRecord> records;
    std::vector<ParseDiagnostic> diagnostics;
    std::size_t lines_read = 0;

    std::size_t size() const { return records.size(); }
};

/// Inclusive timestamp window [start, end].
struct TimeWindow {
    Timestamp start;
    Timestamp end;
};

/// Parses one corpus file, keeping records with start <= timestamp <= end in
/// file order. Malformed lines are recorded as diagnostics, never silently
/// dropped. Throws InputError for an unreadable file or an inverted window.
Corpus parse_corpus(const std::filesystem::path& path, const TimeWindow& window);

/// Multi-file variant; files may be parsed concurrently but the merged corpus
/// is always in (file order, line order).
Corpus parse_corpus_files(const std::vector<std::filesystem::path>& paths, const TimeWindow& window,
                          int threads = 1);

std::string record_to_json_line(const TweetRecord& record);
void write_corpus(const std::filesystem::path& path, std::span<const TweetRecord> records);

enum class ClientClass : std::uint8_t { official, unofficial };

/// Case-insensitive set of client names counted as official Twitter clients.
class OfficialClients {
public:
    OfficialClients() = default;
    explicit OfficialClients(const std::vector<std::string>& names);

    static OfficialClients defaults();

    bool contains(std::string_view client) const;
    bool empty() const { return lowered_.empty(); }
    std::vector<std::string> names() const;

private:
    std::unordered_set<std::string> lowered_;
};

ClientClass classify_client(std::string_view client, const OfficialClients& official);

} // namespace polarnet
