#include "polarnet/influence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_set>

#include "polarnet/errors.hpp"

namespace polarnet {

namespace {

// Orders candidates best-first: CI desc, then live out-degree desc, then
// node index asc (node indices follow user id order).
struct RankKey {
    std::uint64_t ci;
    std::uint32_t k_out;
    std::uint32_t node;

    bool operator<(const RankKey& other) const {
        if (ci != other.ci) return ci > other.ci;
        if (k_out != other.k_out) return k_out > other.k_out;
        return node < other.node;
    }
};

class CiEngine {
public:
    CiEngine(const RetweetGraph& g, int radius)
        : g_(g),
          radius_(radius),
          alive_(g.node_count(), 1),
          k_out_(g.node_count()),
          dist_stamp_(g.node_count(), 0) {
        for (std::uint32_t v = 0; v < g.node_count(); ++v) k_out_[v] = g.k_out(v);
    }

    std::uint32_t k_out(std::uint32_t v) const { return k_out_[v]; }
    bool alive(std::uint32_t v) const { return alive_[v] != 0; }

    // CI over the live subgraph. Nodes whose out-degree is 0 or 1 score 0
    // because the leading factor max(k_out - 1, 0) vanishes.
    std::uint64_t compute_ci(std::uint32_t v) {
        if (k_out_[v] <= 1) return 0;
        std::uint64_t frontier_sum = 0;
        ++stamp_;
        dist_stamp_[v] = stamp_;
        queue_.clear();
        queue_.push_back(v);
        std::size_t level_begin = 0;
        for (int depth = 1; depth <= radius_; ++depth) {
            const std::size_t level_end = queue_.size();
            for (std::size_t q = level_begin; q < level_end; ++q) {
                for (const auto w : g_.out_neighbors(queue_[q])) {
                    if (!alive_[w] || dist_stamp_[w] == stamp_) continue;
                    dist_stamp_[w] = stamp_;
                    queue_.push_back(w);
                    if (depth == radius_ && k_out_[w] > 1) {
                        frontier_sum += k_out_[w] - 1;
                    }
                }
            }
            level_begin = level_end;
            if (level_begin == queue_.size()) break;
        }
        return static_cast<std::uint64_t>(k_out_[v] - 1) * frontier_sum;
    }

    // Live nodes whose outgoing ball of the given depth can contain r, i.e.
    // the reverse BFS ball around r. Excludes r itself.
    std::vector<std::uint32_t> reverse_ball(std::uint32_t r, int depth) {
        std::vector<std::uint32_t> ball;
        ++stamp_;
        dist_stamp_[r] = stamp_;
        queue_.clear();
        queue_.push_back(r);
        std::size_t level_begin = 0;
        for (int d = 1; d <= depth; ++d) {
            const std::size_t level_end = queue_.size();
            for (std::size_t q = level_begin; q < level_end; ++q) {
                for (const auto y : g_.in_neighbors(queue_[q])) {
                    if (!alive_[y] || dist_stamp_[y] == stamp_) continue;
                    dist_stamp_[y] = stamp_;
                    queue_.push_back(y);
                    ball.push_back(y);
                }
            }
            level_begin = level_end;
            if (level_begin == queue_.size()) break;
        }
        return ball;
    }

    // Marks r dead and updates live out-degrees of its in-neighbors.
    void remove(std::uint32_t r) {
        alive_[r] = 0;
        for (const auto y : g_.in_neighbors(r)) {
            if (alive_[y]) --k_out_[y];
        }
    }

private:
    const RetweetGraph& g_;
    int radius_;
    std::vector<char> alive_;
    std::vector<std::uint32_t> k_out_;
    std::vector<std::uint32_t> dist_stamp_;
    std::uint32_t stamp_ = 0;
    std::vector<std::uint32_t> queue_;
};

} // namespace

CIRanking collective_influence_out(const RetweetGraph& g, int radius, std::size_t top_k) {
    if (radius < 1) throw InputError("collective influence radius must be >= 1");
    if (top_k < 1) throw InputError("collective influence top_k must be >= 1");

    CIRanking ranking;
    ranking.radius = radius;
    const std::size_t n = g.node_count();
    if (n == 0) return ranking;
    const std::size_t want = std::min(top_k, n);

    CiEngine engine(g, radius);
    std::vector<std::uint64_t> ci(n);
    std::vector<std::uint32_t> key_k_out(n);
    std::set<RankKey> order_set;
    for (std::uint32_t v = 0; v < n; ++v) {
        ci[v] = engine.compute_ci(v);
        key_k_out[v] = engine.k_out(v);
        order_set.insert({ci[v], key_k_out[v], v});
    }

    while (ranking.order.size() < want) {
        const RankKey best = *order_set.begin();
        if (best.ci == 0) break; // adaptive phase over, fall through to degree fill
        order_set.erase(order_set.begin());
        ranking.order.push_back(g.nodes[best.node]);
        ranking.ci_values.push_back(best.ci);

        // Every node whose score or tie-break key can change lives in the
        // reverse ball of radius+1 around the removed node, measured before
        // the removal.
        const auto affected = engine.reverse_ball(best.node, radius + 1);
        engine.remove(best.node);
        for (const auto a : affected) {
            order_set.erase({ci[a], key_k_out[a], a});
            ci[a] = engine.compute_ci(a);
            key_k_out[a] = engine.k_out(a);
            order_set.insert({ci[a], key_k_out[a], a});
        }
    }

    // Residual nodes all score 0: rank by live out-degree, then id.
    while (ranking.order.size() < want && !order_set.empty()) {
        const RankKey best = *order_set.begin();
        order_set.erase(order_set.begin());
        ranking.order.push_back(g.nodes[best.node]);
        ranking.ci_values.push_back(0);
    }
    return ranking;
}

PageRankResult pagerank_weighted(const RetweetGraph& g, double damping, double tol,
                                 std::size_t max_iter) {
    if (damping <= 0.0 || damping >= 1.0) throw InputError("damping must lie in (0, 1)");
    if (tol <= 0.0) throw InputError("tolerance must be positive");

    PageRankResult result;
    const std::size_t n = g.node_count();
    if (n == 0) return result;

    // In the reversed graph a node's out-weight is the total weight of its
    // original in-edges (everything it retweeted).
    std::vector<double> out_weight(n, 0.0);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::size_t e = g.in_offsets[u]; e < g.in_offsets[u + 1]; ++e) {
            out_weight[u] += g.in_weights[e];
        }
    }

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    const double teleport = (1.0 - damping) / static_cast<double>(n);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        double dangling = 0.0;
        for (std::uint32_t u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) dangling += x[u];
        }
        const double base = teleport + damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::uint32_t u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) continue;
            const double share = damping * x[u] / out_weight[u];
            // Original in-edges of u are reversed edges u -> source.
            for (std::size_t e = g.in_offsets[u]; e < g.in_offsets[u + 1]; ++e) {
                next[g.in_sources[e]] += share * g.in_weights[e];
            }
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - x[i]);
        x.swap(next);
        if (delta < tol) {
            result.scores = std::move(x);
            result.iterations = iter;
            return result;
        }
        if (iter == max_iter) {
            throw PageRankNonConvergence("pagerank did not converge after " +
                                             std::to_string(max_iter) + " iterations, last L1 step " +
                                             std::to_string(delta),
                                         std::move(x), delta);
        }
    }
    throw NumericalError("pagerank iteration limit must be positive");
}

RankComparison rank_overlap(std::span<const UserId> list_a, std::span<const UserId> list_b,
                            double p, std::size_t depth) {
    if (list_a.empty() || list_b.empty()) throw InputError("rank overlap requires non-empty lists");
    if (p <= 0.0 || p >= 1.0) throw InputError("rbo persistence must lie in (0, 1)");
    if (depth < 1) throw InputError("rank overlap depth must be >= 1");

    const auto a = list_a.subspan(0, std::min(depth, list_a.size()));
    const auto b = list_b.subspan(0, std::min(depth, list_b.size()));
    {
        std::unordered_set<UserId> dup_a(a.begin(), a.end());
        std::unordered_set<UserId> dup_b(b.begin(), b.end());
        if (dup_a.size() != a.size() || dup_b.size() != b.size()) {
            throw InputError("rank overlap lists must be duplicate-free");
        }
    }

    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    const std::size_t s = shorter.size();
    const std::size_t l = longer.size();

    // Overlap X_d at each depth via the usual seen-set trick: an element is
    // dropped from the set on its second sighting and counted once.
    std::vector<double> overlap(l + 1, 0.0);
    std::unordered_set<UserId> seen;
    double x = 0.0;
    for (std::size_t d = 1; d <= s; ++d) {
        const UserId ea = shorter[d - 1];
        const UserId eb = longer[d - 1];
        if (ea == eb) {
            x += 1.0;
        } else {
            if (seen.erase(ea) == 1) x += 1.0; else seen.insert(ea);
            if (seen.erase(eb) == 1) x += 1.0; else seen.insert(eb);
        }
        overlap[d] = x;
    }
    std::unordered_set<UserId> shorter_set(shorter.begin(), shorter.end());
    for (std::size_t d = s + 1; d <= l; ++d) {
        if (shorter_set.count(longer[d - 1]) > 0) x += 1.0;
        overlap[d] = x;
    }

    // Extrapolated RBO for uneven evaluation depths, eq. (32) of Webber,
    // Moffat & Zobel (2010).
    const double x_s = overlap[s];
    const double x_l = overlap[l];
    double series = 0.0;
    double pd = 1.0;
    for (std::size_t d = 1; d <= l; ++d) {
        pd *= p;
        series += overlap[d] / static_cast<double>(d) * pd;
        if (d > s) {
            series += x_s * static_cast<double>(d - s) /
                      (static_cast<double>(s) * static_cast<double>(d)) * pd;
        }
    }
    const double p_l = std::pow(p, static_cast<double>(l));
    double rbo = (1.0 - p) / p * series +
                 ((x_l - x_s) / static_cast<double>(l) + x_s / static_cast<double>(s)) * p_l;
    rbo = std::clamp(rbo, 0.0, 1.0);

    std::unordered_set<UserId> union_set(a.begin(), a.end());
    union_set.insert(b.begin(), b.end());
    std::size_t intersection = 0;
    std::unordered_set<UserId> b_set(b.begin(), b.end());
    for (const auto id : a) {
        if (b_set.count(id) > 0) ++intersection;
    }
    RankComparison cmp;
    cmp.rbo = rbo;
    cmp.jaccard = static_cast<double>(intersection) / static_cast<double>(union_set.size());
    cmp.p = p;
    cmp.depth = depth;
    return cmp;
}

} // namespace polarnet
