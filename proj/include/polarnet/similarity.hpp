#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polarnet/corpus.hpp"
#include "polarnet/retweet_graph.hpp"

namespace polarnet {

/// Sparse per-influencer count vectors over a shared user dimension:
/// vectors[i] holds sorted (user index, count) pairs for influencer i.
struct RetweetCounts {
    std::vector<UserId> influencers;
    std::vector<UserId> users; // index -> user id
    std::vector<std::vector<std::pair<std::uint32_t, double>>> vectors;
};

/// Counts how often each user interacted with each influencer. Non-matching
/// kinds are skipped; when official_only is set, interactions from
/// unofficial clients are skipped too.
RetweetCounts count_interactions(const Corpus& corpus, const std::vector<UserId>& influencers,
                                 const KindSet& kinds, bool official_only,
                                 const OfficialClients& official);

/// Fully connected influencer similarity network: symmetric cosine matrix
/// with a zero diagonal over the influencers that had at least one
/// interaction. user_dimension records the size of the underlying vectors.
struct SimilarityNetwork {
    std::vector<UserId> influencers;
    std::size_t user_dimension = 0;
    std::vector<double> matrix; // I x I, row-major
    std::vector<UserId> excluded_zero_vectors;

    std::size_t size() const { return influencers.size(); }
    double at(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }
    double& at(std::size_t i, std::size_t j) { return matrix[i * size() + j]; }
    double total_weight() const; // sum over unordered pairs
};

/// All-pairs cosine similarity. Influencers whose vectors are all zero are
/// excluded and reported; fewer than two nonzero vectors is an error.
SimilarityNetwork build_similarity(const RetweetCounts& counts, int threads = 1);

/// Node -> community assignment; community ids are dense and numbered by
/// first appearance in influencer order.
struct Partition {
    std::vector<std::uint32_t> community;
    std::size_t community_count = 0;
};

/// Louvain community detection with multi-level aggregation at resolution 1.
/// The node visitation order is shuffled with the seed, making every run a
/// pure function of (network, seed).
Partition louvain(const SimilarityNetwork& net, std::uint64_t seed);

/// Weighted Newman modularity; range [-0.5, 1].
double modularity(const SimilarityNetwork& net, const Partition& part);

/// Inter-community edge weight over total edge weight; range [0, 1].
double normalized_cut(const SimilarityNetwork& net, const Partition& part);

enum class SeparationMetric { modularity, normalized_cut };

struct SubsampleStats {
    double mean = 0;
    double se = 0;
    double fraction = 0;
    std::size_t repetitions = 0;
};

/// Repeatedly subsamples ceil(fraction * I) influencers without replacement,
/// re-runs Louvain on the induced subnetwork, and reports the metric's mean
/// and standard error (sd / sqrt(repetitions)).
SubsampleStats subsample_se(const SimilarityNetwork& net, SeparationMetric metric, double fraction,
                            std::size_t repetitions, std::uint64_t seed, int threads = 1);

SimilarityNetwork induced_subnetwork(const SimilarityNetwork& net,
                                     std::span<const std::uint32_t> keep);

} // namespace polarnet
