#include "polarnet/retweet_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "polarnet/errors.hpp"

namespace polarnet {

namespace {

RetweetGraph freeze(const std::map<std::pair<UserId, UserId>, std::uint32_t>& weights) {
    RetweetGraph g;

    for (const auto& [edge, w] : weights) {
        (void)w;
        g.nodes.push_back(edge.first);
        g.nodes.push_back(edge.second);
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
    g.index.reserve(g.nodes.size());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) g.index.emplace(g.nodes[i], i);

    const std::size_t n = g.nodes.size();
    std::vector<std::size_t> out_deg(n, 0), in_deg(n, 0);
    for (const auto& [edge, w] : weights) {
        (void)w;
        ++out_deg[g.index.at(edge.first)];
        ++in_deg[g.index.at(edge.second)];
    }

    g.out_offsets.assign(n + 1, 0);
    g.in_offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        g.out_offsets[i + 1] = g.out_offsets[i] + out_deg[i];
        g.in_offsets[i + 1] = g.in_offsets[i] + in_deg[i];
    }
    g.out_targets.resize(g.out_offsets[n]);
    g.out_weights.resize(g.out_offsets[n]);
    g.in_sources.resize(g.in_offsets[n]);
    g.in_weights.resize(g.in_offsets[n]);

    std::vector<std::size_t> out_cursor(g.out_offsets.begin(), g.out_offsets.end() - 1);
    std::vector<std::size_t> in_cursor(g.in_offsets.begin(), g.in_offsets.end() - 1);
    // The map iterates edges sorted by (source id, target id); node indices
    // follow id order, so both adjacency lists fill already sorted.
    for (const auto& [edge, w] : weights) {
        const auto s = g.index.at(edge.first);
        const auto t = g.index.at(edge.second);
        g.out_targets[out_cursor[s]] = t;
        g.out_weights[out_cursor[s]] = w;
        ++out_cursor[s];
        g.in_sources[in_cursor[t]] = s;
        g.in_weights[in_cursor[t]] = w;
        ++in_cursor[t];
    }
    return g;
}

} // namespace

RetweetGraph build_graph_from_edges(std::span<const WeightedEdge> edges) {
    std::map<std::pair<UserId, UserId>, std::uint32_t> weights;
    for (const auto& [src, dst, w] : edges) {
        if (src == dst) continue;
        weights[{src, dst}] += w;
    }
    return freeze(weights);
}

RetweetGraph build_category_graph(const Corpus& corpus, const OutletCatalog& catalog,
                                  MediaCategory category, const KindSet& kinds) {
    std::map<std::pair<UserId, UserId>, std::uint32_t> weights;
    for (const auto& rec : corpus.records) {
        if (!kinds.contains(rec.kind) || !rec.source_user_id) continue;
        const UserId source = *rec.source_user_id;
        if (source == rec.user_id) continue; // self-retweet
        // One event per interaction, regardless of how many of its URLs match.
        bool matches = false;
        for (const auto& url : rec.urls) {
            if (classify_url(url, catalog) == category) {
                matches = true;
                break;
            }
        }
        if (matches) {
            weights[{source, rec.user_id}] += 1;
        }
    }
    return freeze(weights);
}

Degrees degrees(const RetweetGraph& g) {
    Degrees d;
    const std::size_t n = g.node_count();
    d.in.resize(n);
    d.out.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        d.in[v] = g.k_in(v);
        d.out[v] = g.k_out(v);
    }
    return d;
}

std::pair<double, double> degree_heterogeneity(const RetweetGraph& g) {
    const std::size_t n = g.node_count();
    if (n == 0 || g.edge_count() == 0) {
        throw InputError("degree heterogeneity requires a graph with edges");
    }
    const double mean = static_cast<double>(g.edge_count()) / static_cast<double>(n);
    double var_in = 0, var_out = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        var_in += (g.k_in(v) - mean) * (g.k_in(v) - mean);
        var_out += (g.k_out(v) - mean) * (g.k_out(v) - mean);
    }
    var_in /= static_cast<double>(n);
    var_out /= static_cast<double>(n);
    return {std::sqrt(var_in) / mean, std::sqrt(var_out) / mean};
}

void write_edge_list(const std::filesystem::path& path, const RetweetGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open edge list for writing: " + path.string());
    }
    out << "source\ttarget\tweight\n";
    for (std::uint32_t v = 0; v < g.node_count(); ++v) {
        for (std::size_t e = g.out_offsets[v]; e < g.out_offsets[v + 1]; ++e) {
            out << g.nodes[v] << '\t' << g.nodes[g.out_targets[e]] << '\t' << g.out_weights[e] << '\n';
        }
    }
}

void write_node_attributes(const std::filesystem::path& path, const RetweetGraph& g,
                           const std::unordered_map<UserId, bool>& verified) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open node attribute file for writing: " + path.string());
    }
    out << "user_id\tverified\n";
    for (const auto id : g.nodes) {
        auto it = verified.find(id);
        out << id << '\t' << (it == verified.end() ? "unknown" : (it->second ? "true" : "false"))
            << '\n';
    }
}

} // namespace polarnet
