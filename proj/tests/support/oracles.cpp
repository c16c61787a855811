#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace polarnet::oracle {

namespace {

struct NaiveGraph {
    std::vector<UserId> ids; // sorted
    std::vector<std::set<std::uint32_t>> out, in;

    explicit NaiveGraph(std::span<const WeightedEdge> edges) {
        std::map<std::pair<UserId, UserId>, bool> unique_edges;
        for (const auto& [s, t, w] : edges) {
            (void)w;
            if (s != t) unique_edges[{s, t}] = true;
        }
        for (const auto& [edge, flag] : unique_edges) {
            (void)flag;
            ids.push_back(edge.first);
            ids.push_back(edge.second);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        out.resize(ids.size());
        in.resize(ids.size());
        auto index = [&](UserId id) {
            return static_cast<std::uint32_t>(
                std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        };
        for (const auto& [edge, flag] : unique_edges) {
            (void)flag;
            out[index(edge.first)].insert(index(edge.second));
            in[index(edge.second)].insert(index(edge.first));
        }
    }

    void remove(std::uint32_t v) {
        for (const auto t : out[v]) in[t].erase(v);
        for (const auto s : in[v]) out[s].erase(v);
        out[v].clear();
        in[v].clear();
    }
};

std::uint64_t naive_ci(const NaiveGraph& g, const std::vector<char>& alive, std::uint32_t v,
                       int radius) {
    const auto k_out_v = g.out[v].size();
    if (k_out_v <= 1) return 0;
    // Plain BFS over outgoing edges; the frontier is everything first reached
    // at depth exactly `radius`.
    std::vector<int> dist(g.ids.size(), -1);
    dist[v] = 0;
    std::vector<std::uint32_t> frontier = {v};
    for (int depth = 1; depth <= radius; ++depth) {
        std::vector<std::uint32_t> next;
        for (const auto node : frontier) {
            for (const auto w : g.out[node]) {
                if (alive[w] && dist[w] < 0) {
                    dist[w] = depth;
                    next.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::uint64_t sum = 0;
    for (std::uint32_t w = 0; w < g.ids.size(); ++w) {
        if (dist[w] == radius && g.out[w].size() > 1) {
            sum += g.out[w].size() - 1;
        }
    }
    return static_cast<std::uint64_t>(k_out_v - 1) * sum;
}

} // namespace

NaiveCiResult naive_ci_order(std::span<const WeightedEdge> edges, int radius, std::size_t top_k) {
    NaiveGraph g(edges);
    const std::size_t n = g.ids.size();
    std::vector<char> alive(n, 1);
    NaiveCiResult result;
    const std::size_t want = std::min(top_k, n);

    while (result.order.size() < want) {
        // Recompute every live score from scratch.
        std::uint64_t best_ci = 0;
        std::size_t best_k = 0;
        std::int64_t best = -1;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            const auto ci = naive_ci(g, alive, v, radius);
            const auto k = g.out[v].size();
            const bool better = best < 0 || ci > best_ci || (ci == best_ci && k > best_k) ||
                                (ci == best_ci && k == best_k &&
                                 static_cast<std::int64_t>(v) < best);
            if (better) {
                best_ci = ci;
                best_k = k;
                best = v;
            }
        }
        if (best < 0 || best_ci == 0) break;
        result.order.push_back(g.ids[static_cast<std::size_t>(best)]);
        result.ci_values.push_back(best_ci);
        alive[static_cast<std::size_t>(best)] = 0;
        g.remove(static_cast<std::uint32_t>(best));
    }

    // Degree phase: remaining nodes by (k_out desc, id asc).
    std::vector<std::uint32_t> rest;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (alive[v]) rest.push_back(v);
    }
    std::sort(rest.begin(), rest.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (g.out[a].size() != g.out[b].size()) return g.out[a].size() > g.out[b].size();
        return a < b;
    });
    for (const auto v : rest) {
        if (result.order.size() >= want) break;
        result.order.push_back(g.ids[v]);
        result.ci_values.push_back(0);
    }
    return result;
}

std::vector<double> dense_pagerank(const RetweetGraph& g, double damping) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    if (n == 0) return {};

    // Column-stochastic transition matrix of the reversed weighted graph.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
        double w_total = 0;
        for (std::size_t e = g.in_offsets[u]; e < g.in_offsets[u + 1]; ++e) {
            w_total += g.in_weights[e];
        }
        if (w_total == 0) {
            for (Eigen::Index v = 0; v < n; ++v) m(v, u) = 1.0 / static_cast<double>(n);
        } else {
            for (std::size_t e = g.in_offsets[u]; e < g.in_offsets[u + 1]; ++e) {
                m(g.in_sources[e], u) += g.in_weights[e] / w_total;
            }
        }
    }
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - damping * m;
    const Eigen::VectorXd rhs =
        Eigen::VectorXd::Constant(n, (1.0 - damping) / static_cast<double>(n));
    const Eigen::VectorXd x = lhs.partialPivLu().solve(rhs);
    return {x.data(), x.data() + n};
}

double rbo_direct(std::span<const UserId> a, std::span<const UserId> b, double p,
                  std::size_t depth) {
    const auto ta = a.subspan(0, std::min(depth, a.size()));
    const auto tb = b.subspan(0, std::min(depth, b.size()));
    const std::size_t s = std::min(ta.size(), tb.size());
    const std::size_t l = std::max(ta.size(), tb.size());

    auto overlap_at = [&](std::size_t d) {
        std::unordered_set<UserId> sa(ta.begin(), ta.begin() + std::min(d, ta.size()));
        std::size_t x = 0;
        for (std::size_t i = 0; i < std::min(d, tb.size()); ++i) {
            if (sa.count(tb[i])) ++x;
        }
        return static_cast<double>(x);
    };

    const double x_s = overlap_at(s);
    const double x_l = overlap_at(l);
    double sum = 0;
    for (std::size_t d = 1; d <= l; ++d) {
        double term = overlap_at(d) / static_cast<double>(d);
        if (d > s) {
            term += x_s * static_cast<double>(d - s) /
                    (static_cast<double>(s) * static_cast<double>(d));
        }
        sum += term * std::pow(p, static_cast<double>(d));
    }
    return (1.0 - p) / p * sum +
           ((x_l - x_s) / static_cast<double>(l) + x_s / static_cast<double>(s)) *
               std::pow(p, static_cast<double>(l));
}

void for_each_partition(std::size_t n,
                        const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
    // Restricted growth strings: a[i] <= 1 + max(a[0..i-1]).
    std::vector<std::uint32_t> a(n, 0);
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t m) {
        if (i == n) {
            fn(a);
            return;
        }
        for (std::uint32_t v = 0; v <= m; ++v) {
            a[i] = v;
            rec(i + 1, std::max(m, v + 1));
        }
    };
    rec(0, 1);
}

Partition best_modularity_partition(const SimilarityNetwork& net) {
    Partition best;
    double best_q = -2;
    for_each_partition(net.size(), [&](const std::vector<std::uint32_t>& assignment) {
        Partition candidate;
        candidate.community = assignment;
        candidate.community_count =
            *std::max_element(assignment.begin(), assignment.end()) + 1;
        const double q = modularity(net, candidate);
        if (q > best_q) {
            best_q = q;
            best = candidate;
        }
    });
    best.community = canonical_partition(best.community);
    return best;
}

std::vector<std::uint32_t> canonical_partition(std::span<const std::uint32_t> assignment) {
    std::vector<std::uint32_t> out(assignment.size());
    std::map<std::uint32_t, std::uint32_t> relabel;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        auto [it, inserted] = relabel.emplace(assignment[i],
                                              static_cast<std::uint32_t>(relabel.size()));
        (void)inserted;
        out[i] = it->second;
    }
    return out;
}

DenseSvd dense_leading_svd(const std::vector<double>& dense, std::size_t rows, std::size_t cols) {
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dense[i * cols + j];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    DenseSvd out;
    out.sigma1 = svd.singularValues()(0);
    out.u1.resize(rows);
    out.v1.resize(cols);
    for (std::size_t i = 0; i < rows; ++i) out.u1[i] = svd.matrixU()(static_cast<Eigen::Index>(i), 0);
    for (std::size_t j = 0; j < cols; ++j) out.v1[j] = svd.matrixV()(static_cast<Eigen::Index>(j), 0);
    return out;
}

double dense_frobenius(const std::vector<double>& dense) {
    double sum = 0;
    for (const auto v : dense) sum += v * v;
    return std::sqrt(sum);
}

namespace {

// Greatest convex minorant of the points (t_i, y_i); returns hull values at
// every point.
std::vector<double> lower_hull_values(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const auto a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // Drop b when it sits on or above the chord a-i.
            if ((y[b] - y[a]) * (t[i] - t[a]) >= (y[i] - y[a]) * (t[b] - t[a])) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(i);
    }
    std::vector<double> values(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && t[hull[seg + 1]] <= t[i]) ++seg;
        if (seg + 1 >= hull.size()) {
            values[i] = y[hull.back()];
        } else {
            const auto a = hull[seg], b = hull[seg + 1];
            const double frac = (t[i] - t[a]) / (t[b] - t[a]);
            values[i] = y[a] + frac * (y[b] - y[a]);
        }
    }
    return values;
}

std::vector<double> negate(std::vector<double> v) {
    for (auto& x : v) x = -x;
    return v;
}

// Least concave majorant = negated lower hull of the negated values.
std::vector<double> upper_hull_values(const std::vector<double>& t, const std::vector<double>& y) {
    return negate(lower_hull_values(t, negate(y)));
}

constexpr double kFeasEps = 3e-9;

// Is there a nondecreasing convex g on [0..m] with l <= g <= u and
// g(t_m) <= v_cap?
bool convex_feasible(const std::vector<double>& t, std::vector<double> u,
                     const std::vector<double>& l, std::size_t m, double v_cap) {
    u[m] = std::min(u[m], v_cap);
    // Nondecreasing bound: suffix running minimum.
    for (std::size_t i = m; i-- > 0;) u[i] = std::min(u[i], u[i + 1]);
    const std::vector<double> tt(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(m + 1));
    const std::vector<double> uu(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(m + 1));
    const auto hull = lower_hull_values(tt, uu);
    for (std::size_t i = 0; i <= m; ++i) {
        if (hull[i] < l[i] - kFeasEps) return false;
    }
    return true;
}

// Is there a nondecreasing concave h on [m..end] with l <= h <= u and
// h(t_m) >= v_floor?
bool concave_feasible(const std::vector<double>& t, const std::vector<double>& u,
                      std::vector<double> l, std::size_t m, double v_floor) {
    const std::size_t n = t.size();
    l[m] = std::max(l[m], v_floor);
    for (std::size_t i = m + 1; i < n; ++i) l[i] = std::max(l[i], l[i - 1]);
    const std::vector<double> tt(t.begin() + static_cast<std::ptrdiff_t>(m), t.end());
    const std::vector<double> ll(l.begin() + static_cast<std::ptrdiff_t>(m), l.end());
    const auto hull = upper_hull_values(tt, ll);
    for (std::size_t i = m; i < n; ++i) {
        if (hull[i - m] > u[i] + kFeasEps) return false;
    }
    return true;
}

} // namespace

double dip_grid_search(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();

    // Grid: far pads (the CDF is pinned to 0 and 1 there), the sample points,
    // and midpoints of each gap.
    const double range = std::max(sample.back() - sample.front(), 1.0);
    const double pad = 1e9 * range;
    std::vector<double> grid;
    grid.push_back(sample.front() - pad);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && sample[i] > sample[i - 1]) {
            grid.push_back(0.5 * (sample[i - 1] + sample[i]));
        }
        if (grid.back() != sample[i]) grid.push_back(sample[i]);
    }
    grid.push_back(sample.back() + pad);
    const std::size_t g_count = grid.size();

    // Empirical CDF (right-continuous) at the grid points.
    std::vector<double> cdf(g_count);
    for (std::size_t i = 0; i < g_count; ++i) {
        cdf[i] = static_cast<double>(std::upper_bound(sample.begin(), sample.end(), grid[i]) -
                                     sample.begin()) /
                 static_cast<double>(n);
    }

    auto feasible = [&](double d) {
        // Band: G(t_i) >= F(t_i) - d and G(t_i) <= F(t_{i-1}) + d, clipped to
        // [0, 1]; the pads pin G to 0 and 1.
        std::vector<double> lo(g_count), hi(g_count);
        for (std::size_t i = 0; i < g_count; ++i) {
            lo[i] = std::max(cdf[i] - d, 0.0);
            hi[i] = std::min((i == 0 ? 0.0 : cdf[i - 1]) + d, 1.0);
        }
        lo[0] = hi[0] = 0.0;
        lo[g_count - 1] = hi[g_count - 1] = 1.0;

        for (std::size_t m = 0; m < g_count; ++m) {
            // The CDF may jump exactly at the mode, so the convex piece ends
            // under the left-limit band while the concave piece starts inside
            // the point band.
            auto lo_left = lo;
            lo_left[m] = std::min(lo[m], m == 0 ? 0.0 : lo[m - 1]);
            if (m != 0 && m != g_count - 1) lo_left[m] = 0.0;
            auto hi_right = hi;
            hi_right[m] = std::min(cdf[m] + d, 1.0);
            if (m == 0) hi_right[m] = 0.0;
            if (m == g_count - 1) hi_right[m] = 1.0;

            if (!convex_feasible(grid, hi, lo_left, m, hi[m])) continue;
            if (!concave_feasible(grid, hi_right, lo, m, lo[m])) continue;
            // Smallest reachable value at the mode from the convex side.
            double a = 0.0, b = hi[m];
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (a + b);
                if (convex_feasible(grid, hi, lo_left, m, mid)) b = mid;
                else a = mid;
            }
            const double v_min_left = b;
            // Largest reachable value at the mode from the concave side.
            a = lo[m];
            b = hi_right[m];
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (a + b);
                if (concave_feasible(grid, hi_right, lo, m, mid)) a = mid;
                else b = mid;
            }
            const double v_max_right = a;
            if (v_min_left <= v_max_right + kFeasEps) return true;
        }
        return false;
    };

    double lo_d = 0.0, hi_d = 0.5;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo_d + hi_d);
        if (feasible(mid)) hi_d = mid;
        else lo_d = mid;
    }
    // Same convention as the production statistic: the dip never reports
    // below the 1/(2n) discreteness floor.
    return std::max(hi_d, 0.5 / static_cast<double>(n));
}

} // namespace polarnet::oracle
