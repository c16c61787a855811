#include "polarnet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <variant>

#include <json.hpp>

#include "polarnet/errors.hpp"

namespace polarnet {

using json = nlohmann::json;

std::string_view kind_name(InteractionKind kind) {
    switch (kind) {
    case InteractionKind::original: return "original";
    case InteractionKind::retweet: return "retweet";
    case InteractionKind::quote: return "quote";
    case InteractionKind::reply: return "reply";
    }
    return "original";
}

std::optional<InteractionKind> parse_kind(std::string_view name) {
    if (name == "original") return InteractionKind::original;
    if (name == "retweet") return InteractionKind::retweet;
    if (name == "quote") return InteractionKind::quote;
    if (name == "reply") return InteractionKind::reply;
    return std::nullopt;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Ids may arrive as JSON integers or as digit strings (64-bit ids are often
// quoted to survive tools that round large numbers).
std::optional<std::uint64_t> read_id(const json& value) {
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    if (value.is_number_integer()) {
        const auto v = value.get<std::int64_t>();
        if (v < 0) return std::nullopt;
        return static_cast<std::uint64_t>(v);
    }
    if (value.is_string()) {
        const auto& s = value.get_ref<const std::string&>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// Returns the parsed record or an error message for the diagnostic.
std::variant<TweetRecord, std::string> parse_record_line(const std::string& line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) return std::string("invalid JSON");
    if (!obj.is_object()) return std::string("record is not an object");

    TweetRecord rec;
    if (!obj.contains("tweet_id")) return std::string("missing field tweet_id");
    if (auto id = read_id(obj["tweet_id"])) rec.tweet_id = *id;
    else return std::string("field tweet_id is not an id");

    if (!obj.contains("user_id")) return std::string("missing field user_id");
    if (auto id = read_id(obj["user_id"])) rec.user_id = *id;
    else return std::string("field user_id is not an id");

    if (!obj.contains("timestamp") || !obj["timestamp"].is_number_integer())
        return std::string("missing or non-integer field timestamp");
    rec.timestamp = obj["timestamp"].get<std::int64_t>();
    if (rec.timestamp < 0) return std::string("timestamp is negative");

    if (!obj.contains("kind") || !obj["kind"].is_string())
        return std::string("missing or non-string field kind");
    const auto kind = parse_kind(obj["kind"].get_ref<const std::string&>());
    if (!kind) return std::string("unknown kind '" + obj["kind"].get<std::string>() + "'");
    rec.kind = *kind;

    const bool has_source = obj.contains("source_user_id") && !obj["source_user_id"].is_null();
    if (rec.kind == InteractionKind::original) {
        if (has_source) return std::string("original record carries source_user_id");
    } else {
        if (!has_source) return std::string("non-original record is missing source_user_id");
        if (auto id = read_id(obj["source_user_id"])) rec.source_user_id = *id;
        else return std::string("field source_user_id is not an id");
    }

    if (obj.contains("urls") && !obj["urls"].is_null()) {
        if (!obj["urls"].is_array()) return std::string("field urls is not an array");
        for (const auto& u : obj["urls"]) {
            if (!u.is_string()) return std::string("urls entry is not a string");
            rec.urls.push_back(u.get<std::string>());
        }
    }
    if (obj.contains("client") && !obj["client"].is_null()) {
        if (!obj["client"].is_string()) return std::string("field client is not a string");
        rec.client = obj["client"].get<std::string>();
    }
    if (obj.contains("verified") && !obj["verified"].is_null()) {
        if (!obj["verified"].is_boolean()) return std::string("field verified is not a boolean");
        rec.verified = obj["verified"].get<bool>();
    }
    if (obj.contains("text") && !obj["text"].is_null()) {
        if (!obj["text"].is_string()) return std::string("field text is not a string");
        rec.text = obj["text"].get<std::string>();
    }
    return rec;
}

} // namespace

Corpus parse_corpus(const std::filesystem::path& path, const TimeWindow& window) {
    if (window.start > window.end) {
        throw InputError("time window is inverted: start " + std::to_string(window.start) +
                         " > end " + std::to_string(window.end));
    }
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open corpus file: " + path.string());
    }

    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parsed = parse_record_line(line);
        if (std::holds_alternative<std::string>(parsed)) {
            corpus.diagnostics.push_back({path.string(), line_no, std::get<std::string>(parsed)});
            continue;
        }
        auto& rec = std::get<TweetRecord>(parsed);
        if (rec.timestamp >= window.start && rec.timestamp <= window.end) {
            corpus.records.push_back(std::move(rec));
        }
    }
    corpus.lines_read = line_no;
    return corpus;
}

Corpus parse_corpus_files(const std::vector<std::filesystem::path>& paths, const TimeWindow& window,
                          int threads) {
    if (window.start > window.end) {
        throw InputError("time window is inverted");
    }
    std::vector<Corpus> parts(paths.size());
    if (threads > 1 && paths.size() > 1) {
        std::vector<std::future<Corpus>> futures;
        futures.reserve(paths.size());
        for (const auto& p : paths) {
            futures.push_back(std::async(std::launch::async,
                                         [&p, &window] { return parse_corpus(p, window); }));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) parts[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < paths.size(); ++i) parts[i] = parse_corpus(paths[i], window);
    }

    Corpus merged;
    for (auto& part : parts) {
        merged.lines_read += part.lines_read;
        std::move(part.records.begin(), part.records.end(), std::back_inserter(merged.records));
        std::move(part.diagnostics.begin(), part.diagnostics.end(), std::back_inserter(merged.diagnostics));
    }
    return merged;
}

std::string record_to_json_line(const TweetRecord& record) {
    json obj;
    obj["tweet_id"] = record.tweet_id;
    obj["user_id"] = record.user_id;
    obj["timestamp"] = record.timestamp;
    obj["kind"] = std::string(kind_name(record.kind));
    if (record.source_user_id) obj["source_user_id"] = *record.source_user_id;
    obj["urls"] = record.urls;
    obj["client"] = record.client;
    if (record.verified) obj["verified"] = *record.verified;
    if (record.text) obj["text"] = *record.text;
    return obj.dump();
}

void write_corpus(const std::filesystem::path& path, std::span<const TweetRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open corpus file for writing: " + path.string());
    }
    for (const auto& rec : records) {
        out << record_to_json_line(rec) << '\n';
    }
}

OfficialClients::OfficialClients(const std::vector<std::string>& names) {
    for (const auto& n : names) lowered_.insert(lower_ascii(n));
}

OfficialClients OfficialClients::defaults() {
    return OfficialClients({"Twitter Web Client", "Twitter Web App", "Twitter for iPhone",
                            "Twitter for Android", "Twitter for iPad", "TweetDeck"});
}

bool OfficialClients::contains(std::string_view client) const {
    return lowered_.count(lower_ascii(client)) > 0;
}

std::vector<std::string> OfficialClients::names() const {
    std::vector<std::string> out(lowered_.begin(), lowered_.end());
    std::sort(out.begin(), out.end());
    return out;
}

ClientClass classify_client(std::string_view client, const OfficialClients& official) {
    return official.contains(client) ? ClientClass::official : ClientClass::unofficial;
}

} // namespace polarnet
