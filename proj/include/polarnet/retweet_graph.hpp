#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polarnet/corpus.hpp"
#include "polarnet/media_catalog.hpp"

namespace polarnet {

/// Interaction kinds that contribute edges to a graph or count matrix.
struct KindSet {
    bool retweet = true;
    bool quote = false;

    bool contains(InteractionKind k) const {
        return (k == InteractionKind::retweet && retweet) || (k == InteractionKind::quote && quote);
    }
};

/// Directed simple graph of influence flow: an edge v -> u means u retweeted
/// v at least once. Multiplicities live in the parallel weight arrays; no
/// self-loops. Nodes are sorted by user id and adjacency lists by neighbor
/// index, so equal edge sets always produce identical structures.
struct RetweetGraph {
    std::vector<UserId> nodes; // index -> user id, ascending
    std::unordered_map<UserId, std::uint32_t> index;

    std::vector<std::size_t> out_offsets;
    std::vector<std::uint32_t> out_targets;
    std::vector<std::uint32_t> out_weights;

    std::vector<std::size_t> in_offsets;
    std::vector<std::uint32_t> in_sources;
    std::vector<std::uint32_t> in_weights;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return out_targets.size(); }

    std::uint32_t k_out(std::uint32_t v) const {
        return static_cast<std::uint32_t>(out_offsets[v + 1] - out_offsets[v]);
    }
    std::uint32_t k_in(std::uint32_t v) const {
        return static_cast<std::uint32_t>(in_offsets[v + 1] - in_offsets[v]);
    }

    std::span<const std::uint32_t> out_neighbors(std::uint32_t v) const {
        return {out_targets.data() + out_offsets[v], out_offsets[v + 1] - out_offsets[v]};
    }
    std::span<const std::uint32_t> in_neighbors(std::uint32_t v) const {
        return {in_sources.data() + in_offsets[v], in_offsets[v + 1] - in_offsets[v]};
    }
};

/// Directed weighted edge (source, target, weight) keyed by user ids.
using WeightedEdge = std::tuple<UserId, UserId, std::uint32_t>;

RetweetGraph build_graph_from_edges(std::span<const WeightedEdge> edges);

/// One edge v -> u per (source v, retweeter u) pair with at least one
/// qualifying interaction carrying a URL of the requested category;
/// duplicates collapse into the weight, self-retweets are skipped.
RetweetGraph build_category_graph(const Corpus& corpus, const OutletCatalog& catalog,
                                  MediaCategory category, const KindSet& kinds);

struct Degrees {
    std::vector<std::uint32_t> in;
    std::vector<std::uint32_t> out;
};

Degrees degrees(const RetweetGraph& g);

/// (sigma(k_in)/<k>, sigma(k_out)/<k>) with <k> = |E|/|V|; requires <k> > 0.
std::pair<double, double> degree_heterogeneity(const RetweetGraph& g);

void write_edge_list(const std::filesystem::path& path, const RetweetGraph& g);
void write_node_attributes(const std::filesystem::path& path, const RetweetGraph& g,
                           const std::unordered_map<UserId, bool>& verified);

} // namespace polarnet
