#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polarnet/influence.hpp"
#include "polarnet/media_catalog.hpp"

namespace polarnet {

using CategoryRankings = std::map<MediaCategory, CIRanking>;

/// Best rank per period of a user present in any top-n list, along with the
/// category where that best rank was achieved.
struct RankShift {
    UserId user_id = 0;
    std::optional<std::uint32_t> rank_1, rank_2; // 1-based
    std::optional<MediaCategory> category_1, category_2;
};

/// One entry per user ranked in the top-n of any category in either period,
/// ordered by user id.
std::vector<RankShift> rank_shifts(const CategoryRankings& rankings_1,
                                   const CategoryRankings& rankings_2, std::size_t top_n);

/// Fraction of users in period 2's top-n pool that were absent from period
/// 1's pool.
double new_entrant_fraction(const std::vector<RankShift>& shifts);

enum class InfluencerType : std::uint8_t { media, political, independent, other };

std::string_view influencer_type_name(InfluencerType t);
std::optional<InfluencerType> parse_influencer_type(std::string_view name);

struct TypeShare {
    MediaCategory category;
    std::array<double, 4> shares{}; // indexed by InfluencerType, sums to 1
};

/// Per-category composition of the top-n influencers by type. Users missing
/// from the label map count as "other" and are reported through `unlabeled`.
std::vector<TypeShare> type_shares(const std::unordered_map<UserId, InfluencerType>& labels,
                                   const CategoryRankings& rankings, std::size_t top_n,
                                   std::vector<UserId>* unlabeled = nullptr);

std::unordered_map<UserId, InfluencerType> load_labels(const std::filesystem::path& path);

} // namespace polarnet
