#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "polarnet/corpus.hpp"

namespace polarnet {

/// The eight news media categories, ordered right-to-left by position on the
/// bias scale (fake news sits beyond the extreme right).
enum class MediaCategory : std::uint8_t {
    FakeNews = 0,
    ExtremeBiasRight,
    Right,
    RightLeaning,
    Center,
    LeftLeaning,
    Left,
    ExtremeBiasLeft,
};

inline constexpr std::size_t kMediaCategoryCount = 8;

std::span<const MediaCategory> all_media_categories();
std::string_view category_name(MediaCategory c);
std::optional<MediaCategory> parse_category(std::string_view name);

/// Numeric position of a category on the bias scale:
/// fake news 4/3, extreme-right 1, right 2/3, right-leaning 1/3, center 0,
/// left-leaning -1/3, left -2/3, extreme-left -1.
double category_position(MediaCategory c);

/// Hostname -> category map for one collection period. Hostnames are stored
/// lowercase, scheme-free, with a single leading "www." label stripped.
struct OutletCatalog {
    struct Entry {
        MediaCategory category;
        std::uint64_t tweet_count = 0;

        bool operator==(const Entry&) const = default;
    };

    std::string label; // period name, e.g. "2016"
    std::map<std::string, Entry> entries;

    std::optional<MediaCategory> lookup(std::string_view hostname) const;
};

OutletCatalog load_catalog(const std::filesystem::path& path, std::string label = {});
void save_catalog(const std::filesystem::path& path, const OutletCatalog& catalog);

/// Lowercased host of a URL with one leading "www." stripped; other subdomain
/// labels are kept (catalogs carry entries like abcnews.go.com). Returns
/// nullopt when no host can be extracted.
std::optional<std::string> extract_domain(std::string_view url);

std::optional<MediaCategory> classify_url(std::string_view url, const OutletCatalog& catalog);

/// Drops outlets that accumulate less than 1% of the cumulative tweet count
/// of the strictly more popular outlets in their category. The most popular
/// outlet of each category is always kept.
OutletCatalog prune_insignificant(const OutletCatalog& catalog);

using CategoryCounts = std::array<std::uint64_t, kMediaCategoryCount>;

/// Category with the strictly largest count; ties are broken uniformly at
/// random but deterministically under rng_seed. All-zero counts give nullopt.
std::optional<MediaCategory> assign_user_modal_category(const CategoryCounts& counts,
                                                        std::uint64_t rng_seed);

using FlowMatrix = std::array<std::array<std::uint64_t, kMediaCategoryCount>, kMediaCategoryCount>;

/// Cell (a, b) counts users assigned category a in the first period and b in
/// the second; users missing from either assignment are excluded.
FlowMatrix category_flow(const std::unordered_map<UserId, MediaCategory>& assign_1,
                         const std::unordered_map<UserId, MediaCategory>& assign_2);

} // namespace polarnet
