#include "polarnet/media_catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "polarnet/errors.hpp"
#include "polarnet/rng.hpp"

namespace polarnet {

namespace {

constexpr std::array<MediaCategory, kMediaCategoryCount> kAllCategories = {
    MediaCategory::FakeNews,     MediaCategory::ExtremeBiasRight, MediaCategory::Right,
    MediaCategory::RightLeaning, MediaCategory::Center,           MediaCategory::LeftLeaning,
    MediaCategory::Left,         MediaCategory::ExtremeBiasLeft,
};

constexpr std::array<std::string_view, kMediaCategoryCount> kCategoryNames = {
    "FakeNews", "ExtremeBiasRight", "Right", "RightLeaning",
    "Center",   "LeftLeaning",      "Left",  "ExtremeBiasLeft",
};

constexpr std::array<double, kMediaCategoryCount> kCategoryPositions = {
    4.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0, -1.0 / 3.0, -2.0 / 3.0, -1.0,
};

} // namespace

std::span<const MediaCategory> all_media_categories() { return kAllCategories; }

std::string_view category_name(MediaCategory c) {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<MediaCategory> parse_category(std::string_view name) {
    for (std::size_t i = 0; i < kMediaCategoryCount; ++i) {
        if (kCategoryNames[i] == name) return kAllCategories[i];
    }
    return std::nullopt;
}

double category_position(MediaCategory c) {
    return kCategoryPositions[static_cast<std::size_t>(c)];
}

std::optional<MediaCategory> OutletCatalog::lookup(std::string_view hostname) const {
    auto it = entries.find(std::string(hostname));
    if (it == entries.end()) return std::nullopt;
    return it->second.category;
}

OutletCatalog load_catalog(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open catalog file: " + path.string());
    }
    OutletCatalog catalog;
    catalog.label = label.empty() ? path.stem().string() : std::move(label);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string hostname, category_token, count_token;
        if (!std::getline(row, hostname, '\t') || !std::getline(row, category_token, '\t')) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected hostname<TAB>category<TAB>tweet_count");
        }
        std::getline(row, count_token, '\t');
        if (line_no == 1 && hostname == "hostname") continue; // header row

        auto category = parse_category(category_token);
        if (!category) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": unknown category '" + category_token + "'");
        }
        std::uint64_t count = 0;
        if (!count_token.empty()) {
            try {
                count = std::stoull(count_token);
            } catch (const std::exception&) {
                throw InputError(path.string() + ":" + std::to_string(line_no) +
                                 ": bad tweet_count '" + count_token + "'");
            }
        }
        auto host = extract_domain(hostname);
        if (!host) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": unusable hostname '" + hostname + "'");
        }
        if (catalog.entries.count(*host) > 0) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": hostname '" + *host + "' appears twice");
        }
        catalog.entries.emplace(*host, OutletCatalog::Entry{*category, count});
    }
    return catalog;
}

void save_catalog(const std::filesystem::path& path, const OutletCatalog& catalog) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open catalog file for writing: " + path.string());
    }
    out << "hostname\tcategory\ttweet_count\n";
    for (const auto& [host, entry] : catalog.entries) {
        out << host << '\t' << category_name(entry.category) << '\t' << entry.tweet_count << '\n';
    }
}

std::optional<std::string> extract_domain(std::string_view url) {
    std::string_view rest = url;

    if (const auto scheme_end = rest.find("://"); scheme_end != std::string_view::npos) {
        rest = rest.substr(scheme_end + 3);
    }
    // Authority ends at the first path/query/fragment delimiter.
    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
        authority = authority.substr(at + 1);
    }
    if (const auto colon = authority.find(':'); colon != std::string_view::npos) {
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;

    std::string host;
    host.reserve(authority.size());
    for (const char c : authority) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc) || c == '-' || c == '.' || c == '_') {
            host.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            return std::nullopt; // spaces or other junk: not a host
        }
    }
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.rfind("www.", 0) == 0) host.erase(0, 4);
    if (host.empty() || host.find('.') == std::string::npos) return std::nullopt;
    return host;
}

std::optional<MediaCategory> classify_url(std::string_view url, const OutletCatalog& catalog) {
    const auto host = extract_domain(url);
    if (!host) return std::nullopt;
    return catalog.lookup(*host);
}

OutletCatalog prune_insignificant(const OutletCatalog& catalog) {
    // Bucket outlets per category, most popular first.
    std::array<std::vector<std::pair<std::string, OutletCatalog::Entry>>, kMediaCategoryCount> buckets;
    for (const auto& [host, entry] : catalog.entries) {
        buckets[static_cast<std::size_t>(entry.category)].emplace_back(host, entry);
    }

    OutletCatalog pruned;
    pruned.label = catalog.label;
    for (auto& bucket : buckets) {
        std::sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
            if (a.second.tweet_count != b.second.tweet_count)
                return a.second.tweet_count > b.second.tweet_count;
            return a.first < b.first;
        });
        // Walk groups of equal counts so tied outlets share the same base of
        // strictly more popular tweets.
        std::uint64_t cumulative = 0;
        std::size_t i = 0;
        while (i < bucket.size()) {
            std::size_t j = i;
            while (j < bucket.size() && bucket[j].second.tweet_count == bucket[i].second.tweet_count) ++j;
            const auto count = bucket[i].second.tweet_count;
            // The top outlet has no more-popular outlets and is always kept.
            const bool insignificant =
                i > 0 && static_cast<double>(count) < 0.01 * static_cast<double>(cumulative);
            if (!insignificant) {
                for (std::size_t k = i; k < j; ++k) {
                    pruned.entries.emplace(bucket[k].first, bucket[k].second);
                }
            }
            cumulative += count * (j - i);
            i = j;
        }
    }
    return pruned;
}

std::optional<MediaCategory> assign_user_modal_category(const CategoryCounts& counts,
                                                        std::uint64_t rng_seed) {
    std::uint64_t best = 0;
    for (const auto c : counts) best = std::max(best, c);
    if (best == 0) return std::nullopt;

    std::vector<MediaCategory> tied;
    for (std::size_t i = 0; i < kMediaCategoryCount; ++i) {
        if (counts[i] == best) tied.push_back(kAllCategories[i]);
    }
    if (tied.size() == 1) return tied.front();
    auto rng = make_rng(rng_seed);
    return tied[draw_below(rng, tied.size())];
}

FlowMatrix category_flow(const std::unordered_map<UserId, MediaCategory>& assign_1,
                         const std::unordered_map<UserId, MediaCategory>& assign_2) {
    FlowMatrix flow{};
    for (const auto& [user, cat_1] : assign_1) {
        auto it = assign_2.find(user);
        if (it == assign_2.end()) continue;
        flow[static_cast<std::size_t>(cat_1)][static_cast<std::size_t>(it->second)] += 1;
    }
    return flow;
}

} // namespace polarnet
