#include "polarnet/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "polarnet/errors.hpp"
#include "polarnet/parallel.hpp"
#include "polarnet/rng.hpp"

namespace polarnet {

RetweetCounts count_interactions(const Corpus& corpus, const std::vector<UserId>& influencers,
                                 const KindSet& kinds, bool official_only,
                                 const OfficialClients& official) {
    RetweetCounts counts;
    counts.influencers = influencers;

    std::unordered_map<UserId, std::uint32_t> influencer_index;
    influencer_index.reserve(influencers.size());
    for (std::uint32_t i = 0; i < influencers.size(); ++i) influencer_index.emplace(influencers[i], i);

    std::vector<std::unordered_map<UserId, double>> raw(influencers.size());
    for (const auto& rec : corpus.records) {
        if (!kinds.contains(rec.kind) || !rec.source_user_id) continue;
        if (official_only && classify_client(rec.client, official) != ClientClass::official) continue;
        auto it = influencer_index.find(*rec.source_user_id);
        if (it == influencer_index.end()) continue;
        if (*rec.source_user_id == rec.user_id) continue;
        raw[it->second][rec.user_id] += 1.0;
    }

    std::vector<UserId> users;
    for (const auto& m : raw) {
        for (const auto& [user, cnt] : m) {
            (void)cnt;
            users.push_back(user);
        }
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    std::unordered_map<UserId, std::uint32_t> user_index;
    user_index.reserve(users.size());
    for (std::uint32_t i = 0; i < users.size(); ++i) user_index.emplace(users[i], i);

    counts.users = std::move(users);
    counts.vectors.resize(influencers.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& vec = counts.vectors[i];
        vec.reserve(raw[i].size());
        for (const auto& [user, cnt] : raw[i]) vec.emplace_back(user_index.at(user), cnt);
        std::sort(vec.begin(), vec.end());
    }
    return counts;
}

double SimilarityNetwork::total_weight() const {
    double total = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) total += at(i, j);
    }
    return total;
}

namespace {

double sparse_dot(const std::vector<std::pair<std::uint32_t, double>>& a,
                  const std::vector<std::pair<std::uint32_t, double>>& b) {
    double dot = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].first == b[ib].first) {
            dot += a[ia].second * b[ib].second;
            ++ia;
            ++ib;
        } else if (a[ia].first < b[ib].first) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return dot;
}

} // namespace

SimilarityNetwork build_similarity(const RetweetCounts& counts, int threads) {
    SimilarityNetwork net;
    net.user_dimension = counts.users.size();

    std::vector<std::uint32_t> kept;
    std::vector<double> norms;
    for (std::uint32_t i = 0; i < counts.vectors.size(); ++i) {
        double sq = 0;
        for (const auto& [user, cnt] : counts.vectors[i]) {
            (void)user;
            sq += cnt * cnt;
        }
        if (sq > 0) {
            kept.push_back(i);
            norms.push_back(std::sqrt(sq));
        } else {
            net.excluded_zero_vectors.push_back(counts.influencers[i]);
        }
    }
    if (kept.size() < 2) {
        throw InputError("similarity network needs at least 2 influencers with nonzero vectors");
    }

    const std::size_t n = kept.size();
    net.influencers.reserve(n);
    for (const auto i : kept) net.influencers.push_back(counts.influencers[i]);
    net.matrix.assign(n * n, 0.0);

    parallel_for(n, threads, [&](std::size_t row) {
        for (std::size_t col = row + 1; col < n; ++col) {
            const double dot = sparse_dot(counts.vectors[kept[row]], counts.vectors[kept[col]]);
            const double sim = std::clamp(dot / (norms[row] * norms[col]), 0.0, 1.0);
            net.matrix[row * n + col] = sim;
            net.matrix[col * n + row] = sim;
        }
    });
    return net;
}

namespace {

// Aggregated graph for one Louvain level.
struct LevelGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj; // no self entries
    std::vector<double> self_loop; // internal weight, counted twice in degree
    std::vector<double> degree;
    double two_m = 0;

    std::size_t size() const { return adj.size(); }
};

LevelGraph level_from_matrix(const SimilarityNetwork& net) {
    LevelGraph g;
    const std::size_t n = net.size();
    g.adj.resize(n);
    g.self_loop.assign(n, 0.0);
    g.degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = net.at(i, j);
            if (i != j && w > 0) {
                g.adj[i].emplace_back(static_cast<std::uint32_t>(j), w);
                g.degree[i] += w;
            }
        }
        g.two_m += g.degree[i];
    }
    return g;
}

// One pass of greedy local moves; returns whether anything moved. Candidate
// communities are scanned in ascending id so ties resolve deterministically.
bool local_moves(const LevelGraph& g, std::vector<std::uint32_t>& comm, const std::vector<std::uint32_t>& order) {
    const double two_m = g.two_m;
    std::vector<double> sum_tot(g.size(), 0.0);
    for (std::size_t v = 0; v < g.size(); ++v) sum_tot[comm[v]] += g.degree[v];

    bool moved_any = false;
    bool moved_this_pass = true;
    int passes = 0;
    while (moved_this_pass && passes < 128) {
        moved_this_pass = false;
        ++passes;
        for (const auto v : order) {
            const std::uint32_t old_comm = comm[v];
            std::map<std::uint32_t, double> weight_to; // community -> edge weight from v
            for (const auto& [u, w] : g.adj[v]) weight_to[comm[u]] += w;

            sum_tot[old_comm] -= g.degree[v];
            const double w_old = weight_to.count(old_comm) ? weight_to[old_comm] : 0.0;
            double best_gain = w_old - sum_tot[old_comm] * g.degree[v] / two_m;
            std::uint32_t best_comm = old_comm;
            for (const auto& [c, w_vc] : weight_to) {
                if (c == old_comm) continue;
                const double gain = w_vc - sum_tot[c] * g.degree[v] / two_m;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            sum_tot[best_comm] += g.degree[v];
            if (best_comm != old_comm) {
                comm[v] = best_comm;
                moved_this_pass = true;
                moved_any = true;
            }
        }
    }
    return moved_any;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm,
                     std::vector<std::uint32_t>& relabel) {
    // Dense community ids in order of first appearance.
    relabel.assign(g.size(), 0);
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    for (std::size_t v = 0; v < g.size(); ++v) {
        auto [it, inserted] = dense.emplace(comm[v], static_cast<std::uint32_t>(dense.size()));
        relabel[v] = it->second;
        (void)inserted;
    }

    LevelGraph next;
    const std::size_t nc = dense.size();
    next.adj.resize(nc);
    next.self_loop.assign(nc, 0.0);
    next.degree.assign(nc, 0.0);
    std::vector<std::map<std::uint32_t, double>> between(nc);
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto cv = relabel[v];
        next.self_loop[cv] += g.self_loop[v];
        for (const auto& [u, w] : g.adj[v]) {
            const auto cu = relabel[u];
            if (cu == cv) {
                next.self_loop[cv] += w / 2.0; // each internal edge appears twice
            } else {
                between[cv][cu] += w;
            }
        }
    }
    for (std::size_t c = 0; c < nc; ++c) {
        for (const auto& [u, w] : between[c]) next.adj[c].emplace_back(u, w);
        double deg = 2.0 * next.self_loop[c];
        for (const auto& [u, w] : next.adj[c]) {
            (void)u;
            deg += w;
        }
        next.degree[c] = deg;
        next.two_m += deg;
    }
    return next;
}

} // namespace

Partition louvain(const SimilarityNetwork& net, std::uint64_t seed) {
    const std::size_t n = net.size();
    Partition part;
    part.community.assign(n, 0);
    if (n == 0) {
        part.community_count = 0;
        return part;
    }

    LevelGraph level = level_from_matrix(net);
    if (level.two_m <= 0) {
        // No edges: every node is its own community.
        for (std::uint32_t v = 0; v < n; ++v) part.community[v] = v;
        part.community_count = n;
        return part;
    }

    auto rng = make_rng(mix_seed(seed, 0x1007));
    std::vector<std::uint32_t> node_to_comm(n);
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0u);

    for (int depth = 0; depth < 64; ++depth) {
        std::vector<std::uint32_t> comm(level.size());
        std::iota(comm.begin(), comm.end(), 0u);
        std::vector<std::uint32_t> order(level.size());
        std::iota(order.begin(), order.end(), 0u);
        shuffle_vec(order, rng);

        const bool moved = local_moves(level, comm, order);
        if (!moved) break;

        std::vector<std::uint32_t> relabel;
        level = aggregate(level, comm, relabel);
        for (auto& c : node_to_comm) c = relabel[comm[c]];
        if (level.size() == 1) break;
    }

    // Renumber by first appearance in influencer order.
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    for (std::size_t v = 0; v < n; ++v) {
        auto [it, inserted] = dense.emplace(node_to_comm[v], static_cast<std::uint32_t>(dense.size()));
        part.community[v] = it->second;
        (void)inserted;
    }
    part.community_count = dense.size();
    return part;
}

double modularity(const SimilarityNetwork& net, const Partition& part) {
    const std::size_t n = net.size();
    if (part.community.size() != n) throw InputError("partition does not cover the network");
    double two_m = 0;
    for (const auto w : net.matrix) two_m += w;
    if (two_m <= 0) throw NumericalError("modularity is undefined on a zero-weight network");

    const std::size_t nc = part.community_count;
    std::vector<double> internal(nc, 0.0), degree_sum(nc, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = net.at(i, j);
            deg += w;
            if (part.community[i] == part.community[j]) internal[part.community[i]] += w;
        }
        degree_sum[part.community[i]] += deg;
    }
    double q = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        q += internal[c] / two_m - (degree_sum[c] / two_m) * (degree_sum[c] / two_m);
    }
    return q;
}

double normalized_cut(const SimilarityNetwork& net, const Partition& part) {
    const std::size_t n = net.size();
    if (part.community.size() != n) throw InputError("partition does not cover the network");
    double total = 0, cross = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = net.at(i, j);
            total += w;
            if (part.community[i] != part.community[j]) cross += w;
        }
    }
    if (total <= 0) throw NumericalError("normalized cut is undefined on a zero-weight network");
    return cross / total;
}

SimilarityNetwork induced_subnetwork(const SimilarityNetwork& net,
                                     std::span<const std::uint32_t> keep) {
    SimilarityNetwork sub;
    sub.user_dimension = net.user_dimension;
    const std::size_t m = keep.size();
    sub.influencers.reserve(m);
    for (const auto i : keep) sub.influencers.push_back(net.influencers[i]);
    sub.matrix.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            sub.matrix[a * m + b] = net.at(keep[a], keep[b]);
        }
    }
    return sub;
}

SubsampleStats subsample_se(const SimilarityNetwork& net, SeparationMetric metric, double fraction,
                            std::size_t repetitions, std::uint64_t seed, int threads) {
    if (fraction <= 0.0 || fraction >= 1.0) throw InputError("subsample fraction must lie in (0, 1)");
    if (repetitions < 2) throw InputError("subsample repetitions must be >= 2");
    const auto n = static_cast<std::uint32_t>(net.size());
    const auto sample_size =
        static_cast<std::uint32_t>(std::ceil(fraction * static_cast<double>(n)));
    if (sample_size < 2) throw InputError("subsample would have fewer than 2 influencers");

    std::vector<double> values(repetitions);
    parallel_for(repetitions, threads, [&](std::size_t rep) {
        auto rng = make_rng(mix_seed(seed, rep));
        auto keep = sample_without_replacement(n, sample_size, rng);
        std::sort(keep.begin(), keep.end());
        const auto sub = induced_subnetwork(net, keep);
        const auto part = louvain(sub, mix_seed(seed, rep ^ 0xfeedULL));
        values[rep] =
            metric == SeparationMetric::modularity ? modularity(sub, part) : normalized_cut(sub, part);
    });

    SubsampleStats stats;
    stats.fraction = fraction;
    stats.repetitions = repetitions;
    double mean = 0;
    for (const auto v : values) mean += v;
    mean /= static_cast<double>(repetitions);
    double var = 0;
    for (const auto v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(repetitions - 1);
    stats.mean = mean;
    stats.se = std::sqrt(var / static_cast<double>(repetitions));
    return stats;
}

} // namespace polarnet
