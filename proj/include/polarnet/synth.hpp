#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polarnet/corpus.hpp"
#include "polarnet/media_catalog.hpp"

namespace polarnet {

/// Two-echo-chamber corpus generator. Every user is planted on a side and
/// retweets same-side influencers with probability 1 - epsilon; epsilon
/// controls how much the chambers leak into each other.
struct SynthConfig {
    std::size_t n_users = 10000;
    std::size_t n_influencers = 40;
    double epsilon = 0.1;              // cross-side retweet probability, [0, 0.5]
    double side_split = 0.5;           // fraction of users (and influencers) on the right
    double activity_exponent = 2.5;    // per-user retweet count, discrete power law
    std::uint32_t activity_floor = 3;  // matches the ideology min-distinct filter
    double popularity_exponent = 1.0;  // Zipf attractiveness within each side
    double unofficial_fraction = 0.0;
    double quote_fraction = 0.1;
    std::array<double, kMediaCategoryCount> right_mix = {0.15, 0.15, 0.40, 0.20,
                                                         0.08, 0.02, 0.00, 0.00};
    std::array<double, kMediaCategoryCount> left_mix = {0.00, 0.00, 0.02, 0.08,
                                                        0.25, 0.40, 0.20, 0.05};
    std::uint64_t seed = 1;
    int threads = 1;

    static constexpr Timestamp kBaseTimestamp = 1600000000;
};

struct SynthCorpus {
    Corpus corpus;
    std::vector<std::pair<UserId, int>> user_sides;       // +1 right, -1 left
    std::vector<std::pair<UserId, int>> influencer_sides; // +1 right, -1 left
    std::vector<UserId> influencer_ids;
    OutletCatalog catalog; // hostnames used in the generated URLs, with counts
};

/// Deterministic per seed: the corpus is emitted in canonical order
/// (user id, event index) with sequential timestamps and tweet ids, so equal
/// configs produce byte-identical files for any thread count.
SynthCorpus generate_corpus(const SynthConfig& config);

} // namespace polarnet
