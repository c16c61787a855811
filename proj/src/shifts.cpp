#include "polarnet/shifts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "polarnet/errors.hpp"

namespace polarnet {

namespace {

struct BestRank {
    std::uint32_t rank;
    MediaCategory category;
};

// user -> best (lowest) rank across categories within the top-n lists.
std::unordered_map<UserId, BestRank> best_ranks(const CategoryRankings& rankings,
                                                std::size_t top_n) {
    std::unordered_map<UserId, BestRank> best;
    for (const auto& [category, ranking] : rankings) {
        const std::size_t limit = std::min(top_n, ranking.order.size());
        for (std::uint32_t r = 0; r < limit; ++r) {
            const UserId user = ranking.order[r];
            auto it = best.find(user);
            if (it == best.end() || r + 1 < it->second.rank) {
                best[user] = {r + 1, category};
            }
        }
    }
    return best;
}

} // namespace

std::vector<RankShift> rank_shifts(const CategoryRankings& rankings_1,
                                   const CategoryRankings& rankings_2, std::size_t top_n) {
    const auto best_1 = best_ranks(rankings_1, top_n);
    const auto best_2 = best_ranks(rankings_2, top_n);

    std::vector<UserId> users;
    users.reserve(best_1.size() + best_2.size());
    for (const auto& [user, rank] : best_1) {
        (void)rank;
        users.push_back(user);
    }
    for (const auto& [user, rank] : best_2) {
        (void)rank;
        users.push_back(user);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());

    std::vector<RankShift> shifts;
    shifts.reserve(users.size());
    for (const auto user : users) {
        RankShift shift;
        shift.user_id = user;
        if (auto it = best_1.find(user); it != best_1.end()) {
            shift.rank_1 = it->second.rank;
            shift.category_1 = it->second.category;
        }
        if (auto it = best_2.find(user); it != best_2.end()) {
            shift.rank_2 = it->second.rank;
            shift.category_2 = it->second.category;
        }
        shifts.push_back(shift);
    }
    return shifts;
}

double new_entrant_fraction(const std::vector<RankShift>& shifts) {
    std::size_t in_period_2 = 0, new_in_2 = 0;
    for (const auto& s : shifts) {
        if (s.rank_2) {
            ++in_period_2;
            if (!s.rank_1) ++new_in_2;
        }
    }
    if (in_period_2 == 0) return 0;
    return static_cast<double>(new_in_2) / static_cast<double>(in_period_2);
}

std::string_view influencer_type_name(InfluencerType t) {
    switch (t) {
    case InfluencerType::media: return "media";
    case InfluencerType::political: return "political";
    case InfluencerType::independent: return "independent";
    case InfluencerType::other: return "other";
    }
    return "other";
}

std::optional<InfluencerType> parse_influencer_type(std::string_view name) {
    if (name == "media") return InfluencerType::media;
    if (name == "political") return InfluencerType::political;
    if (name == "independent") return InfluencerType::independent;
    if (name == "other") return InfluencerType::other;
    return std::nullopt;
}

std::vector<TypeShare> type_shares(const std::unordered_map<UserId, InfluencerType>& labels,
                                   const CategoryRankings& rankings, std::size_t top_n,
                                   std::vector<UserId>* unlabeled) {
    std::vector<TypeShare> out;
    for (const auto& [category, ranking] : rankings) {
        const std::size_t limit = std::min(top_n, ranking.order.size());
        if (limit == 0) continue;
        TypeShare share;
        share.category = category;
        std::array<std::size_t, 4> counts{};
        for (std::size_t r = 0; r < limit; ++r) {
            const UserId user = ranking.order[r];
            auto it = labels.find(user);
            InfluencerType type = InfluencerType::other;
            if (it != labels.end()) {
                type = it->second;
            } else if (unlabeled != nullptr) {
                unlabeled->push_back(user);
            }
            ++counts[static_cast<std::size_t>(type)];
        }
        for (std::size_t t = 0; t < 4; ++t) {
            share.shares[t] = static_cast<double>(counts[t]) / static_cast<double>(limit);
        }
        out.push_back(share);
    }
    return out;
}

std::unordered_map<UserId, InfluencerType> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open label file: " + path.string());

    std::unordered_map<UserId, InfluencerType> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string id_token, type_token;
        if (!std::getline(row, id_token, '\t') || !std::getline(row, type_token, '\t')) {
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected user_id<TAB>type");
        }
        if (line_no == 1 && id_token == "user_id") continue;
        const auto type = parse_influencer_type(type_token);
        if (!type) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": unknown type '" +
                             type_token + "'");
        }
        try {
            labels[std::stoull(id_token)] = *type;
        } catch (const std::exception&) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad user id '" +
                             id_token + "'");
        }
    }
    return labels;
}

} // namespace polarnet
