#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polarnet/errors.hpp"
#include "polarnet/retweet_graph.hpp"

namespace polarnet {

/// Thrown when power iteration fails to reach tolerance; keeps the last
/// iterate so callers can inspect how far it got.
class PageRankNonConvergence : public NumericalError {
public:
    PageRankNonConvergence(const std::string& what, std::vector<double> iterate, double residual)
        : NumericalError(what), last_iterate(std::move(iterate)), residual(residual) {}

    std::vector<double> last_iterate;
    double residual;
};

/// Adaptive removal order under directed collective influence. ci_values are
/// the scores at the moment of each removal, not the initial scores.
struct CIRanking {
    std::vector<UserId> order;
    std::vector<std::uint64_t> ci_values;
    int radius = 2;
};

/// Directed collective influence with ball radius `radius`:
///   CI(i) = max(k_out(i)-1, 0) * sum over j at outgoing distance exactly
///           `radius` from i of max(k_out(j)-1, 0),
/// evaluated on the unweighted graph. The top node is removed with its
/// incident edges, scores inside the radius+1 reverse ball are recomputed,
/// and the process repeats until top_k removals or all scores hit zero; any
/// remaining slots are filled by (k_out desc, user id asc). Ties break the
/// same way at every step.
CIRanking collective_influence_out(const RetweetGraph& g, int radius, std::size_t top_k);

struct PageRankResult {
    std::vector<double> scores; // aligned with g.nodes, sums to 1
    std::size_t iterations = 0;
};

/// PageRank on the edge-reversed weighted graph, so endorsement flows from
/// retweeter to source. Dangling mass is spread uniformly. Power iteration
/// runs until the L1 step change drops below tol; non-convergence throws
/// NumericalError (message carries the final residual).
PageRankResult pagerank_weighted(const RetweetGraph& g, double damping = 0.85, double tol = 1e-12,
                                 std::size_t max_iter = 100000);

struct RankComparison {
    double rbo = 0;
    double jaccard = 0;
    double p = 0.98;
    std::size_t depth = 100;
};

/// Extrapolated rank-biased overlap (Webber, Moffat & Zobel 2010) truncated
/// at `depth`, plus Jaccard similarity of the top-`depth` sets. Lists must be
/// duplicate-free and non-empty.
RankComparison rank_overlap(std::span<const UserId> list_a, std::span<const UserId> list_b,
                            double p = 0.98, std::size_t depth = 100);

} // namespace polarnet
