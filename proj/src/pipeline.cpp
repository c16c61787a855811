#include "polarnet/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "polarnet/errors.hpp"
#include "polarnet/ideology.hpp"
#include "polarnet/retweet_graph.hpp"
#include "polarnet/rng.hpp"
#include "polarnet/similarity.hpp"
#include "polarnet/stats.hpp"

namespace polarnet {

using json = nlohmann::json;

const std::vector<std::string> kStageNames = {
    "synth",      "ingest", "classify", "graph",  "rank",  "compare-ranks",
    "similarity", "ideology", "stats",  "shifts", "report"};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("missing artifact: " + path.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

namespace {

std::uint64_t fnv1a_string(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

std::filesystem::path require_artifact(const std::filesystem::path& path,
                                       const std::string& producing_stage) {
    if (!std::filesystem::exists(path)) {
        throw MissingArtifactError("missing artifact: " + path.string() + " (run the '" +
                                   producing_stage + "' stage first)");
    }
    return path;
}

void write_manifest(const PipelineConfig& cfg, const std::string& stage,
                    const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::string>& outputs, json extra = json::object()) {
    json manifest;
    manifest["stage"] = stage;
    manifest["version"] = std::string(kPipelineVersion);
    manifest["seed"] = cfg.seed;
    manifest["params_hash"] = hex64(fnv1a_string(cfg.to_canonical_json()));
    json in = json::object();
    for (const auto& p : inputs) in[p.string()] = hex64(fnv1a_file(p));
    manifest["inputs"] = in;
    manifest["outputs"] = outputs;
    manifest["summary"] = extra;

    std::ofstream out(cfg.output_dir / ("manifest_" + stage + ".json"), std::ios::binary);
    out << manifest.dump(2) << '\n';
}

Corpus load_clean_corpus(const PipelineConfig& cfg) {
    const auto path = require_artifact(cfg.output_dir / "corpus_clean.jsonl", "ingest");
    return parse_corpus(path, cfg.window);
}

OutletCatalog load_pipeline_catalog(const PipelineConfig& cfg) {
    auto catalog = load_catalog(require_artifact(cfg.catalog_file(), "synth"));
    if (cfg.prune_catalog) catalog = prune_insignificant(catalog);
    return catalog;
}

std::string rank_file(MediaCategory c) {
    return "rank_" + std::string(category_name(c)) + ".tsv";
}
std::string pagerank_file(MediaCategory c) {
    return "pagerank_" + std::string(category_name(c)) + ".tsv";
}
std::string edges_file(MediaCategory c) {
    return "graph_" + std::string(category_name(c)) + ".edges.tsv";
}
std::string nodes_file(MediaCategory c) {
    return "graph_" + std::string(category_name(c)) + ".nodes.tsv";
}

RetweetGraph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("missing artifact: " + path.string());
    std::vector<WeightedEdge> edges;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("source", 0) == 0) continue;
        }
        std::istringstream row(line);
        UserId src, dst;
        std::uint32_t w;
        if (!(row >> src >> dst >> w)) {
            throw InputError(path.string() + ": bad edge line '" + line + "'");
        }
        edges.emplace_back(src, dst, w);
    }
    return build_graph_from_edges(edges);
}

CIRanking read_ranking(const std::filesystem::path& path, int radius) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("missing artifact: " + path.string());
    CIRanking ranking;
    ranking.radius = radius;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("rank", 0) == 0) continue;
        }
        std::istringstream row(line);
        std::uint32_t rank, k_out;
        UserId user;
        std::uint64_t ci;
        if (!(row >> rank >> user >> ci >> k_out)) {
            throw InputError(path.string() + ": bad ranking line '" + line + "'");
        }
        ranking.order.push_back(user);
        ranking.ci_values.push_back(ci);
    }
    return ranking;
}

std::vector<std::pair<UserId, double>> read_positions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("missing artifact: " + path.string());
    std::vector<std::pair<UserId, double>> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("user_id", 0) == 0 || line.rfind("influencer_id", 0) == 0) continue;
        }
        std::istringstream row(line);
        UserId id;
        double pos;
        if (!(row >> id >> pos)) throw InputError(path.string() + ": bad position line");
        out.emplace_back(id, pos);
    }
    return out;
}

// Union of the per-category top lists, ascending.
std::vector<UserId> influencer_pool(const PipelineConfig& cfg) {
    std::vector<UserId> pool;
    bool any = false;
    for (const auto c : cfg.category_list()) {
        const auto path = cfg.output_dir / rank_file(c);
        if (!std::filesystem::exists(path)) continue;
        any = true;
        const auto ranking = read_ranking(path, cfg.ci_radius);
        const std::size_t limit = std::min(cfg.top_per_category, ranking.order.size());
        pool.insert(pool.end(), ranking.order.begin(),
                    ranking.order.begin() + static_cast<std::ptrdiff_t>(limit));
    }
    if (!any) {
        throw MissingArtifactError("missing artifact: " + (cfg.output_dir / "rank_*.tsv").string() +
                                   " (run the 'rank' stage first)");
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    return pool;
}

// Per-user URL-category link counts over non-reply records.
std::unordered_map<UserId, CategoryCounts> user_link_counts(const Corpus& corpus,
                                                            const OutletCatalog& catalog) {
    std::unordered_map<UserId, CategoryCounts> counts;
    for (const auto& rec : corpus.records) {
        if (rec.kind == InteractionKind::reply) continue;
        for (const auto& url : rec.urls) {
            const auto category = classify_url(url, catalog);
            if (!category) continue;
            auto [it, inserted] = counts.try_emplace(rec.user_id, CategoryCounts{});
            (void)inserted;
            it->second[static_cast<std::size_t>(*category)] += 1;
        }
    }
    return counts;
}

void stage_synth(const PipelineConfig& cfg) {
    SynthConfig synth_cfg = cfg.synth;
    synth_cfg.threads = cfg.threads;
    const auto generated = generate_corpus(synth_cfg);

    std::filesystem::create_directories(cfg.output_dir);
    const auto corpus_path = cfg.output_dir / "corpus.jsonl";
    write_corpus(corpus_path, generated.corpus.records);
    save_catalog(cfg.output_dir / "catalog.tsv", generated.catalog);

    {
        std::ofstream out(cfg.output_dir / "truth_users.tsv", std::ios::binary);
        out << "user_id\tside\n";
        for (const auto& [id, side] : generated.user_sides) out << id << '\t' << side << '\n';
    }
    {
        std::ofstream out(cfg.output_dir / "truth_influencers.tsv", std::ios::binary);
        out << "influencer_id\tside\n";
        for (const auto& [id, side] : generated.influencer_sides) out << id << '\t' << side << '\n';
    }

    json extra;
    extra["records"] = generated.corpus.records.size();
    extra["users"] = generated.user_sides.size();
    extra["influencers"] = generated.influencer_sides.size();
    extra["epsilon"] = synth_cfg.epsilon;
    write_manifest(cfg, "synth", {},
                   {"corpus.jsonl", "catalog.tsv", "truth_users.tsv", "truth_influencers.tsv"},
                   extra);
}

void stage_ingest(const PipelineConfig& cfg) {
    std::vector<std::filesystem::path> inputs;
    if (!cfg.corpus_paths.empty()) {
        inputs = cfg.corpus_paths;
    } else {
        inputs.push_back(require_artifact(cfg.corpus_file(), "synth"));
    }
    for (const auto& p : inputs) {
        if (!std::filesystem::exists(p)) throw InputError("corpus file does not exist: " + p.string());
    }

    const auto corpus = parse_corpus_files(inputs, cfg.window, cfg.threads);
    for (std::size_t i = 0; i < corpus.diagnostics.size() && i < 20; ++i) {
        const auto& d = corpus.diagnostics[i];
        std::cerr << "ingest: " << d.file << ":" << d.line << ": " << d.message << '\n';
    }
    if (corpus.diagnostics.size() > 20) {
        std::cerr << "ingest: ... " << corpus.diagnostics.size() - 20 << " further diagnostics\n";
    }

    std::filesystem::create_directories(cfg.output_dir);
    write_corpus(cfg.output_dir / "corpus_clean.jsonl", corpus.records);

    json extra;
    extra["records"] = corpus.records.size();
    extra["lines_read"] = corpus.lines_read;
    extra["diagnostics"] = corpus.diagnostics.size();
    extra["window"] = {cfg.window.start, cfg.window.end};
    write_manifest(cfg, "ingest", inputs, {"corpus_clean.jsonl"}, extra);
}

void stage_classify(const PipelineConfig& cfg) {
    const auto corpus = load_clean_corpus(cfg);
    const auto catalog = load_pipeline_catalog(cfg);
    const auto official = cfg.official();

    const auto links = user_link_counts(corpus, catalog);

    std::vector<UserId> users;
    users.reserve(links.size());
    for (const auto& [user, counts] : links) {
        (void)counts;
        users.push_back(user);
    }
    std::sort(users.begin(), users.end());

    std::array<std::uint64_t, kMediaCategoryCount> tweets_per_cat{};
    std::array<std::uint64_t, kMediaCategoryCount> unofficial_per_cat{};
    std::uint64_t tweets_with_news = 0;
    for (const auto& rec : corpus.records) {
        if (rec.kind == InteractionKind::reply) continue;
        std::array<bool, kMediaCategoryCount> seen{};
        for (const auto& url : rec.urls) {
            if (const auto category = classify_url(url, catalog)) {
                seen[static_cast<std::size_t>(*category)] = true;
            }
        }
        bool anything = false;
        const bool unofficial = classify_client(rec.client, official) == ClientClass::unofficial;
        for (std::size_t c = 0; c < kMediaCategoryCount; ++c) {
            if (!seen[c]) continue;
            anything = true;
            tweets_per_cat[c] += 1;
            if (unofficial) unofficial_per_cat[c] += 1;
        }
        if (anything) ++tweets_with_news;
    }

    std::array<std::uint64_t, kMediaCategoryCount> users_per_cat{};
    std::ofstream table(cfg.output_dir / "user_categories.tsv", std::ios::binary);
    table << "user_id\tcategory\tn_links\tleaning\n";
    for (const auto user : users) {
        const auto& counts = links.at(user);
        const auto modal = assign_user_modal_category(counts, mix_seed(cfg.seed, user));
        std::uint64_t n_links = 0;
        for (const auto c : counts) n_links += c;
        const auto leaning = average_leaning(counts, cfg.min_leaning_tweets);
        table << user << '\t' << (modal ? category_name(*modal) : "none") << '\t' << n_links << '\t'
              << (leaning ? format_double(*leaning) : "NA") << '\n';
        if (modal) users_per_cat[static_cast<std::size_t>(*modal)] += 1;
    }
    table.close();

    std::uint64_t users_total = 0;
    for (const auto u : users_per_cat) users_total += u;
    std::ofstream stats_out(cfg.output_dir / "category_stats.tsv", std::ios::binary);
    stats_out << "category\tn_tweets\tp_tweets\tn_users\tp_users\tunofficial_tweet_fraction\n";
    for (const auto c : all_media_categories()) {
        const auto idx = static_cast<std::size_t>(c);
        const double pt = tweets_with_news > 0 ? static_cast<double>(tweets_per_cat[idx]) /
                                                     static_cast<double>(tweets_with_news)
                                               : 0.0;
        const double pu = users_total > 0 ? static_cast<double>(users_per_cat[idx]) /
                                                static_cast<double>(users_total)
                                          : 0.0;
        const double uf = tweets_per_cat[idx] > 0
                              ? static_cast<double>(unofficial_per_cat[idx]) /
                                    static_cast<double>(tweets_per_cat[idx])
                              : 0.0;
        stats_out << category_name(c) << '\t' << tweets_per_cat[idx] << '\t' << format_double(pt)
                  << '\t' << users_per_cat[idx] << '\t' << format_double(pu) << '\t'
                  << format_double(uf) << '\n';
    }
    stats_out.close();

    json extra;
    extra["classified_users"] = users.size();
    extra["tweets_with_news_links"] = tweets_with_news;
    write_manifest(cfg, "classify",
                   {cfg.output_dir / "corpus_clean.jsonl", cfg.catalog_file()},
                   {"user_categories.tsv", "category_stats.tsv"}, extra);
}

void stage_graph(const PipelineConfig& cfg) {
    const auto corpus = load_clean_corpus(cfg);
    const auto catalog = load_pipeline_catalog(cfg);

    std::unordered_map<UserId, bool> verified;
    for (const auto& rec : corpus.records) {
        if (rec.verified) {
            auto [it, inserted] = verified.try_emplace(rec.user_id, *rec.verified);
            if (!inserted) it->second = it->second || *rec.verified;
        }
    }

    json per_category = json::object();
    std::vector<std::string> outputs;
    for (const auto c : cfg.category_list()) {
        const auto g = build_category_graph(corpus, catalog, c, cfg.analysis_kinds());
        write_edge_list(cfg.output_dir / edges_file(c), g);
        write_node_attributes(cfg.output_dir / nodes_file(c), g, verified);
        outputs.push_back(edges_file(c));
        outputs.push_back(nodes_file(c));

        json info;
        info["nodes"] = g.node_count();
        info["edges"] = g.edge_count();
        if (g.edge_count() > 0) {
            const auto [het_in, het_out] = degree_heterogeneity(g);
            info["mean_degree"] =
                static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
            info["degree_heterogeneity_in"] = het_in;
            info["degree_heterogeneity_out"] = het_out;
        }
        per_category[std::string(category_name(c))] = info;
    }

    json extra;
    extra["categories"] = per_category;
    write_manifest(cfg, "graph", {cfg.output_dir / "corpus_clean.jsonl", cfg.catalog_file()},
                   outputs, extra);
}

void stage_rank(const PipelineConfig& cfg) {
    std::vector<std::filesystem::path> inputs;
    std::vector<std::string> outputs;
    json per_category = json::object();

    for (const auto c : cfg.category_list()) {
        const auto edge_path = require_artifact(cfg.output_dir / edges_file(c), "graph");
        inputs.push_back(edge_path);
        const auto g = read_edge_list(edge_path);

        const auto ranking = collective_influence_out(g, cfg.ci_radius, cfg.ci_top_k);
        {
            std::ofstream out(cfg.output_dir / rank_file(c), std::ios::binary);
            out << "rank\tuser_id\tci_value\tk_out\n";
            for (std::size_t r = 0; r < ranking.order.size(); ++r) {
                const auto idx = g.index.at(ranking.order[r]);
                out << (r + 1) << '\t' << ranking.order[r] << '\t' << ranking.ci_values[r] << '\t'
                    << g.k_out(idx) << '\n';
            }
        }
        outputs.push_back(rank_file(c));

        if (g.node_count() > 0) {
            const auto pr = pagerank_weighted(g, cfg.pagerank_damping, cfg.pagerank_tol,
                                              cfg.pagerank_max_iter);
            std::vector<std::uint32_t> order(g.node_count());
            for (std::uint32_t i = 0; i < g.node_count(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                if (pr.scores[a] != pr.scores[b]) return pr.scores[a] > pr.scores[b];
                return g.nodes[a] < g.nodes[b];
            });
            std::ofstream out(cfg.output_dir / pagerank_file(c), std::ios::binary);
            out << "user_id\tscore\n";
            for (const auto idx : order) {
                out << g.nodes[idx] << '\t' << format_double(pr.scores[idx]) << '\n';
            }
        } else {
            std::ofstream out(cfg.output_dir / pagerank_file(c), std::ios::binary);
            out << "user_id\tscore\n";
        }
        outputs.push_back(pagerank_file(c));

        json info;
        info["ranked"] = ranking.order.size();
        per_category[std::string(category_name(c))] = info;
    }

    json extra;
    extra["radius"] = cfg.ci_radius;
    extra["top_k"] = cfg.ci_top_k;
    extra["categories"] = per_category;
    write_manifest(cfg, "rank", inputs, outputs, extra);
}

void stage_compare_ranks(const PipelineConfig& cfg) {
    std::vector<std::filesystem::path> inputs;
    std::ofstream out(cfg.output_dir / "rank_comparison.tsv", std::ios::binary);
    out << "category\trbo\tjaccard\tp\tdepth\n";
    for (const auto c : cfg.category_list()) {
        const auto ci_path = require_artifact(cfg.output_dir / rank_file(c), "rank");
        const auto pr_path = require_artifact(cfg.output_dir / pagerank_file(c), "rank");
        inputs.push_back(ci_path);
        inputs.push_back(pr_path);

        const auto ci_ranking = read_ranking(ci_path, cfg.ci_radius);
        const auto pr_rows = read_positions(pr_path); // (user_id, score), already sorted
        std::vector<UserId> pr_order;
        pr_order.reserve(pr_rows.size());
        for (const auto& [id, score] : pr_rows) {
            (void)score;
            pr_order.push_back(id);
        }
        if (ci_ranking.order.empty() || pr_order.empty()) continue;
        const auto cmp = rank_overlap(ci_ranking.order, pr_order, cfg.rbo_p, cfg.rbo_depth);
        out << category_name(c) << '\t' << format_double(cmp.rbo) << '\t'
            << format_double(cmp.jaccard) << '\t' << format_double(cmp.p) << '\t' << cmp.depth
            << '\n';
    }
    out.close();
    write_manifest(cfg, "compare-ranks", inputs, {"rank_comparison.tsv"});
}

void stage_similarity(const PipelineConfig& cfg) {
    const auto corpus = load_clean_corpus(cfg);
    const auto pool = influencer_pool(cfg);

    KindSet kinds{};
    if (cfg.similarity_kind == "quote") {
        kinds = {false, true};
    } else if (cfg.similarity_kind == "retweet") {
        kinds = cfg.analysis_kinds();
    } else {
        throw InputError("similarity kind must be 'retweet' or 'quote'");
    }

    const auto counts = count_interactions(corpus, pool, kinds, true, cfg.official());
    const auto net = build_similarity(counts, cfg.threads);
    const auto part = louvain(net, mix_seed(cfg.seed, 0x10));

    {
        std::ofstream out(cfg.output_dir / "similarity_edges.tsv", std::ios::binary);
        out << "influencer_a\tinfluencer_b\tsimilarity\n";
        for (std::size_t i = 0; i < net.size(); ++i) {
            for (std::size_t j = i + 1; j < net.size(); ++j) {
                out << net.influencers[i] << '\t' << net.influencers[j] << '\t'
                    << format_double(net.at(i, j)) << '\n';
            }
        }
    }
    {
        std::ofstream out(cfg.output_dir / "partition.tsv", std::ios::binary);
        out << "influencer_id\tcommunity\n";
        for (std::size_t i = 0; i < net.size(); ++i) {
            out << net.influencers[i] << '\t' << part.community[i] << '\n';
        }
    }

    const double q = modularity(net, part);
    const double cut = normalized_cut(net, part);
    const auto q_stats = subsample_se(net, SeparationMetric::modularity, cfg.subsample_fraction,
                                      cfg.subsample_repetitions, mix_seed(cfg.seed, 0x11),
                                      cfg.threads);
    const auto cut_stats = subsample_se(net, SeparationMetric::normalized_cut,
                                        cfg.subsample_fraction, cfg.subsample_repetitions,
                                        mix_seed(cfg.seed, 0x12), cfg.threads);
    {
        std::ofstream out(cfg.output_dir / "separation.tsv", std::ios::binary);
        out << "metric\tvalue\tsubsample_mean\tsubsample_se\tfraction\trepetitions\n";
        out << "modularity\t" << format_double(q) << '\t' << format_double(q_stats.mean) << '\t'
            << format_double(q_stats.se) << '\t' << format_double(cfg.subsample_fraction) << '\t'
            << cfg.subsample_repetitions << '\n';
        out << "normalized_cut\t" << format_double(cut) << '\t' << format_double(cut_stats.mean)
            << '\t' << format_double(cut_stats.se) << '\t' << format_double(cfg.subsample_fraction)
            << '\t' << cfg.subsample_repetitions << '\n';
    }

    json extra;
    extra["influencers"] = net.size();
    extra["user_dimension"] = net.user_dimension;
    extra["communities"] = part.community_count;
    extra["modularity"] = q;
    extra["normalized_cut"] = cut;
    extra["kind"] = cfg.similarity_kind;
    extra["excluded_zero_vectors"] = net.excluded_zero_vectors.size();
    write_manifest(cfg, "similarity", {cfg.output_dir / "corpus_clean.jsonl"},
                   {"similarity_edges.tsv", "partition.tsv", "separation.tsv"}, extra);
}

void stage_ideology(const PipelineConfig& cfg) {
    const auto corpus = load_clean_corpus(cfg);
    const auto pool = influencer_pool(cfg);
    const auto official = cfg.official();

    auto matrix = build_retweet_matrix(corpus, pool, cfg.min_distinct, official,
                                       cfg.analysis_kinds());
    std::string variant = cfg.ideology_variant;
    if (variant == "drop_ones") {
        matrix = robustness_variant(matrix, {VariantSpec::Type::drop_ones, 0, 0});
    } else if (variant == "log_weights") {
        matrix = robustness_variant(matrix, {VariantSpec::Type::log_weights, 0, 0});
    } else if (variant == "subsample") {
        matrix = robustness_variant(matrix, {VariantSpec::Type::subsample, cfg.variant_fraction,
                                             mix_seed(cfg.seed, 0x20)});
    } else if (variant != "none") {
        throw InputError("unknown ideology variant: " + variant);
    }

    const auto residuals = standardized_residuals(matrix);
    const auto axis = leading_axis(residuals, mix_seed(cfg.seed, 0x21));

    // Orientation gauge: non-negative correlation with the users' average
    // leaning, so right ends up positive.
    const auto catalog = load_pipeline_catalog(cfg);
    const auto links = user_link_counts(corpus, catalog);
    std::unordered_map<UserId, double> leanings;
    for (const auto& [user, counts] : links) {
        if (const auto leaning = average_leaning(counts, cfg.min_leaning_tweets)) {
            leanings.emplace(user, *leaning);
        }
    }
    const auto positions = user_positions(matrix, axis, &leanings);
    const auto influencer_pos =
        influencer_positions(matrix, positions.positions, !cfg.unweighted_median);

    {
        std::ofstream out(cfg.output_dir / "user_positions.tsv", std::ios::binary);
        out << "user_id\tposition\n";
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            out << matrix.row_users[i] << '\t' << format_double(positions.positions[i]) << '\n';
        }
    }
    {
        std::ofstream out(cfg.output_dir / "influencer_positions.tsv", std::ios::binary);
        out << "influencer_id\tposition\tn_retweeters\n";
        for (const auto& ip : influencer_pos) {
            out << ip.id << '\t' << format_double(ip.position) << '\t' << ip.n_retweeters << '\n';
        }
    }
    {
        json meta;
        meta["rows"] = matrix.rows();
        meta["cols"] = matrix.cols();
        meta["nnz"] = matrix.nnz();
        meta["total"] = matrix.total;
        meta["min_distinct"] = matrix.min_distinct;
        meta["dropped_empty_columns"] = matrix.dropped_empty_columns.size();
        meta["sigma"] = axis.sigma;
        meta["iterations"] = axis.iterations;
        meta["variant"] = variant;
        meta["orientation_corr"] =
            positions.orientation_corr ? json(*positions.orientation_corr) : json();
        meta["flipped"] = positions.flipped;
        meta["weighted_median"] = !cfg.unweighted_median;
        std::ofstream out(cfg.output_dir / "ideology_meta.json", std::ios::binary);
        out << meta.dump(2) << '\n';
    }

    write_manifest(cfg, "ideology",
                   {cfg.output_dir / "corpus_clean.jsonl", cfg.catalog_file()},
                   {"user_positions.tsv", "influencer_positions.tsv", "ideology_meta.json"});
}

void stage_stats(const PipelineConfig& cfg) {
    const auto corpus = load_clean_corpus(cfg);
    const auto user_rows =
        read_positions(require_artifact(cfg.output_dir / "user_positions.tsv", "ideology"));
    const auto infl_rows = read_positions(
        require_artifact(cfg.output_dir / "influencer_positions.tsv", "ideology"));

    std::vector<double> user_values, infl_values;
    std::unordered_map<UserId, double> user_map, infl_map;
    for (const auto& [id, pos] : user_rows) {
        user_values.push_back(pos);
        user_map.emplace(id, pos);
    }
    for (const auto& [id, pos] : infl_rows) {
        infl_values.push_back(pos);
        infl_map.emplace(id, pos);
    }

    const auto users_test =
        dip_test(user_values, cfg.b_null, mix_seed(cfg.seed, 0x30), cfg.b_boot, 0.95, cfg.threads);
    const auto infl_test =
        dip_test(infl_values, cfg.b_null, mix_seed(cfg.seed, 0x31), cfg.b_boot, 0.95, cfg.threads);

    // Quote/retweet split by side, on the same official-client corpus slice
    // the positions came from.
    Corpus official_corpus;
    const auto official = cfg.official();
    for (const auto& rec : corpus.records) {
        if (classify_client(rec.client, official) == ClientClass::official) {
            official_corpus.records.push_back(rec);
        }
    }
    const auto ratios = quote_retweet_ratio(official_corpus, user_map, infl_map);

    auto cell_json = [](const QuoteRetweetCell& cell) {
        json j;
        j["quotes"] = cell.quotes;
        j["retweets"] = cell.retweets;
        if (const auto r = cell.ratio()) j["ratio"] = *r;
        else j["ratio"] = nullptr;
        return j;
    };
    auto dip_json = [](const DipResult& r) {
        json j;
        j["D"] = r.statistic;
        j["p_value"] = r.p_value;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        j["n"] = r.n;
        j["b_boot"] = r.b_boot;
        j["b_null"] = r.b_null;
        j["seed"] = r.seed;
        return j;
    };

    json stats_doc;
    stats_doc["dip_users"] = dip_json(users_test);
    stats_doc["dip_influencers"] = dip_json(infl_test);
    const char* side_name[2] = {"left", "right"};
    json ratio_doc;
    for (int u = 0; u < 2; ++u) {
        for (int i = 0; i < 2; ++i) {
            ratio_doc[std::string(side_name[u]) + "_to_" + side_name[i]] =
                cell_json(ratios.cells[u][i]);
        }
        ratio_doc[std::string("overall_") + side_name[u]] = cell_json(ratios.overall[u]);
    }
    stats_doc["quote_retweet"] = ratio_doc;
    {
        std::ofstream out(cfg.output_dir / "stats.json", std::ios::binary);
        out << stats_doc.dump(2) << '\n';
    }
    {
        std::ofstream out(cfg.output_dir / "quote_retweet.tsv", std::ios::binary);
        out << "from_side\tto_side\tquotes\tretweets\tratio\n";
        for (int u = 0; u < 2; ++u) {
            for (int i = 0; i < 2; ++i) {
                const auto& cell = ratios.cells[u][i];
                out << side_name[u] << '\t' << side_name[i] << '\t' << cell.quotes << '\t'
                    << cell.retweets << '\t'
                    << (cell.ratio() ? format_double(*cell.ratio()) : "undefined") << '\n';
            }
        }
    }
    {
        char line[256];
        std::ofstream out(cfg.output_dir / "stats_report.txt", std::ios::binary);
        auto print_dip = [&](const char* label, const DipResult& r) {
            std::snprintf(line, sizeof(line),
                          "%-12s D = %.4f (95%% CI: [%.4f,%.4f]), p = %.6g, n = %zu, "
                          "B_boot = %zu, B_null = %zu, seed = %" PRIu64 "\n",
                          label, r.statistic, r.ci_low, r.ci_high, r.p_value, r.n, r.b_boot,
                          r.b_null, r.seed);
            out << line;
        };
        print_dip("users:", users_test);
        print_dip("influencers:", infl_test);
    }

    write_manifest(cfg, "stats",
                   {cfg.output_dir / "user_positions.tsv",
                    cfg.output_dir / "influencer_positions.tsv",
                    cfg.output_dir / "corpus_clean.jsonl"},
                   {"stats.json", "stats_report.txt", "quote_retweet.tsv"});
}

CategoryRankings load_rankings_impl(const std::filesystem::path& dir, int radius) {
    CategoryRankings rankings;
    for (const auto c : all_media_categories()) {
        const auto path = dir / rank_file(c);
        if (std::filesystem::exists(path)) {
            rankings.emplace(c, read_ranking(path, radius));
        }
    }
    if (rankings.empty()) {
        throw MissingArtifactError("missing artifact: " + (dir / "rank_*.tsv").string() +
                                   " (run the 'rank' stage first)");
    }
    return rankings;
}

void stage_shifts(const PipelineConfig& cfg) {
    if (cfg.period_a.empty() || cfg.period_b.empty()) {
        throw InputError("shifts stage needs period_a and period_b directories");
    }
    const auto rankings_a = load_rankings_impl(cfg.period_a, cfg.ci_radius);
    const auto rankings_b = load_rankings_impl(cfg.period_b, cfg.ci_radius);

    const auto shifts = rank_shifts(rankings_a, rankings_b, 10);
    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir / "rank_shifts.tsv", std::ios::binary);
        out << "user_id\trank_1\tcategory_1\trank_2\tcategory_2\n";
        for (const auto& s : shifts) {
            out << s.user_id << '\t' << (s.rank_1 ? std::to_string(*s.rank_1) : "-") << '\t'
                << (s.category_1 ? category_name(*s.category_1) : "-") << '\t'
                << (s.rank_2 ? std::to_string(*s.rank_2) : "-") << '\t'
                << (s.category_2 ? category_name(*s.category_2) : "-") << '\n';
        }
    }

    std::vector<std::string> outputs = {"rank_shifts.tsv"};
    if (!cfg.labels_path.empty()) {
        const auto labels = load_labels(cfg.labels_path);
        std::vector<UserId> unlabeled;
        const auto shares = type_shares(labels, rankings_b, 25, &unlabeled);
        for (std::size_t i = 0; i < unlabeled.size() && i < 20; ++i) {
            std::cerr << "shifts: no label for user " << unlabeled[i] << ", counted as other\n";
        }
        std::ofstream out(cfg.output_dir / "type_shares.tsv", std::ios::binary);
        out << "category\tmedia\tpolitical\tindependent\tother\n";
        for (const auto& share : shares) {
            out << category_name(share.category);
            for (const auto s : share.shares) out << '\t' << format_double(s);
            out << '\n';
        }
        outputs.push_back("type_shares.tsv");
    }

    json extra;
    extra["entries"] = shifts.size();
    extra["new_entrant_fraction"] = new_entrant_fraction(shifts);
    write_manifest(cfg, "shifts", {}, outputs, extra);
}

std::map<std::string, std::string> read_separation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("missing artifact: " + path.string());
    std::map<std::string, std::string> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.emplace(line.substr(0, line.find('\t')), line);
    }
    return rows;
}

PeriodSummary load_period_summary_impl(const std::filesystem::path& dir) {
    PeriodSummary summary;
    std::ifstream stats_in(dir / "stats.json");
    if (!stats_in) throw MissingArtifactError("missing artifact: " + (dir / "stats.json").string());
    json stats_doc = json::parse(stats_in);
    summary.dip_users = stats_doc["dip_users"]["D"].get<double>();
    summary.dip_users_lo = stats_doc["dip_users"]["ci_low"].get<double>();
    summary.dip_users_hi = stats_doc["dip_users"]["ci_high"].get<double>();
    summary.dip_users_p = stats_doc["dip_users"]["p_value"].get<double>();
    summary.n_users = stats_doc["dip_users"]["n"].get<std::size_t>();
    summary.dip_influencers = stats_doc["dip_influencers"]["D"].get<double>();
    summary.dip_influencers_lo = stats_doc["dip_influencers"]["ci_low"].get<double>();
    summary.dip_influencers_hi = stats_doc["dip_influencers"]["ci_high"].get<double>();
    summary.dip_influencers_p = stats_doc["dip_influencers"]["p_value"].get<double>();
    summary.n_influencers = stats_doc["dip_influencers"]["n"].get<std::size_t>();

    const auto separation = read_separation(dir / "separation.tsv");
    auto parse_row = [](const std::string& line, double& value, double& se) {
        std::istringstream row(line);
        std::string metric;
        std::string rest;
        std::getline(row, metric, '\t');
        std::getline(row, rest, '\t');
        value = std::stod(rest);
        std::getline(row, rest, '\t'); // subsample mean
        std::getline(row, rest, '\t');
        se = std::stod(rest);
    };
    if (!separation.count("modularity") || !separation.count("normalized_cut")) {
        throw MissingArtifactError("separation.tsv lacks modularity/normalized_cut rows in " +
                                   dir.string());
    }
    parse_row(separation.at("modularity"), summary.modularity_value, summary.modularity_se);
    parse_row(separation.at("normalized_cut"), summary.cut_value, summary.cut_se);
    return summary;
}

std::string direction(double a, double b) {
    if (b > a) return "increase";
    if (b < a) return "decrease";
    return "unchanged";
}

void stage_report(const PipelineConfig& cfg) {
    if (cfg.period_a.empty() || cfg.period_b.empty()) {
        throw InputError("report stage needs period_a and period_b directories");
    }
    const auto summary_a = load_period_summary_impl(cfg.period_a);
    const auto summary_b = load_period_summary_impl(cfg.period_b);
    const auto rankings_a = load_rankings_impl(cfg.period_a, cfg.ci_radius);
    const auto rankings_b = load_rankings_impl(cfg.period_b, cfg.ci_radius);
    const auto shifts = rank_shifts(rankings_a, rankings_b, 10);

    std::vector<std::string> warnings;
    {
        std::unordered_set<MediaCategory> cats_a, cats_b;
        for (const auto& [c, r] : rankings_a) {
            (void)r;
            cats_a.insert(c);
        }
        for (const auto& [c, r] : rankings_b) {
            (void)r;
            cats_b.insert(c);
        }
        if (cats_a != cats_b) {
            warnings.push_back("periods cover different category sets; comparisons are "
                               "restricted to the intersection");
        }
    }

    // Category flows between the periods, over users classified in both.
    FlowMatrix flows{};
    bool have_flows = false;
    const auto cat_file_a = cfg.period_a / "user_categories.tsv";
    const auto cat_file_b = cfg.period_b / "user_categories.tsv";
    if (std::filesystem::exists(cat_file_a) && std::filesystem::exists(cat_file_b)) {
        auto read_assignments = [](const std::filesystem::path& path) {
            std::unordered_map<UserId, MediaCategory> out;
            std::ifstream in(path);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream row(line);
                std::string id_token, cat_token;
                std::getline(row, id_token, '\t');
                std::getline(row, cat_token, '\t');
                if (const auto c = parse_category(cat_token)) {
                    out.emplace(std::stoull(id_token), *c);
                }
            }
            return out;
        };
        flows = category_flow(read_assignments(cat_file_a), read_assignments(cat_file_b));
        have_flows = true;
    }

    json doc;
    auto summary_json = [](const PeriodSummary& s) {
        json j;
        j["dip_users"] = {{"D", s.dip_users}, {"ci", {s.dip_users_lo, s.dip_users_hi}},
                          {"p", s.dip_users_p}, {"n", s.n_users}};
        j["dip_influencers"] = {{"D", s.dip_influencers},
                                {"ci", {s.dip_influencers_lo, s.dip_influencers_hi}},
                                {"p", s.dip_influencers_p},
                                {"n", s.n_influencers}};
        j["modularity"] = {{"value", s.modularity_value}, {"se", s.modularity_se}};
        j["normalized_cut"] = {{"value", s.cut_value}, {"se", s.cut_se}};
        return j;
    };
    doc["period_a"] = summary_json(summary_a);
    doc["period_b"] = summary_json(summary_b);
    doc["directions"] = {
        {"dip_users", direction(summary_a.dip_users, summary_b.dip_users)},
        {"dip_influencers", direction(summary_a.dip_influencers, summary_b.dip_influencers)},
        {"modularity", direction(summary_a.modularity_value, summary_b.modularity_value)},
        {"normalized_cut", direction(summary_a.cut_value, summary_b.cut_value)},
    };
    doc["deltas"] = {
        {"dip_users", summary_b.dip_users - summary_a.dip_users},
        {"dip_influencers", summary_b.dip_influencers - summary_a.dip_influencers},
        {"modularity", summary_b.modularity_value - summary_a.modularity_value},
        {"normalized_cut", summary_b.cut_value - summary_a.cut_value},
    };
    doc["rank_shift"] = {
        {"entries", shifts.size()},
        {"new_entrant_fraction", new_entrant_fraction(shifts)},
    };
    if (have_flows) {
        json flow_rows = json::array();
        for (std::size_t a = 0; a < kMediaCategoryCount; ++a) {
            json row = json::array();
            for (std::size_t b = 0; b < kMediaCategoryCount; ++b) row.push_back(flows[a][b]);
            flow_rows.push_back(row);
        }
        doc["category_flows"] = flow_rows;
    }
    doc["warnings"] = warnings;

    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir / "report.json", std::ios::binary);
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(cfg.output_dir / "report.txt", std::ios::binary);
        char line[256];
        out << "period comparison (A -> B)\n==========================\n\n";
        auto emit = [&](const char* label, double a, double b) {
            std::snprintf(line, sizeof(line), "%-18s A = %10.4f   B = %10.4f   %s\n", label, a, b,
                          direction(a, b).c_str());
            out << line;
        };
        emit("dip users", summary_a.dip_users, summary_b.dip_users);
        emit("dip influencers", summary_a.dip_influencers, summary_b.dip_influencers);
        emit("modularity", summary_a.modularity_value, summary_b.modularity_value);
        emit("normalized cut", summary_a.cut_value, summary_b.cut_value);
        std::snprintf(line, sizeof(line), "%-18s %.4f\n", "new entrants",
                      new_entrant_fraction(shifts));
        out << line;
        for (const auto& w : warnings) out << "warning: " << w << '\n';
    }

    write_manifest(cfg, "report",
                   {cfg.period_a / "stats.json", cfg.period_b / "stats.json"},
                   {"report.json", "report.txt"});
}

} // namespace

std::filesystem::path PipelineConfig::corpus_file() const {
    return corpus_paths.empty() ? output_dir / "corpus.jsonl" : corpus_paths.front();
}

std::filesystem::path PipelineConfig::catalog_file() const {
    return catalog_path.empty() ? output_dir / "catalog.tsv" : catalog_path;
}

OfficialClients PipelineConfig::official() const {
    return official_clients.empty() ? OfficialClients::defaults()
                                    : OfficialClients(official_clients);
}

std::vector<MediaCategory> PipelineConfig::category_list() const {
    if (!categories.empty()) return categories;
    return {all_media_categories().begin(), all_media_categories().end()};
}

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw InputError("config file is not a JSON object: " + path.string());
    }

    PipelineConfig cfg;
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("corpus")) {
        for (const auto& p : doc["corpus"]) cfg.corpus_paths.emplace_back(p.get<std::string>());
    }
    if (doc.contains("catalog")) cfg.catalog_path = doc["catalog"].get<std::string>();
    if (doc.contains("labels")) cfg.labels_path = doc["labels"].get<std::string>();
    if (doc.contains("window")) {
        cfg.window.start = doc["window"].value("from", cfg.window.start);
        cfg.window.end = doc["window"].value("to", cfg.window.end);
    }
    if (doc.contains("categories")) {
        for (const auto& name : doc["categories"]) {
            const auto c = parse_category(name.get<std::string>());
            if (!c) throw InputError("config lists unknown category: " + name.get<std::string>());
            cfg.categories.push_back(*c);
        }
    }
    if (doc.contains("official_clients")) {
        for (const auto& name : doc["official_clients"]) {
            cfg.official_clients.push_back(name.get<std::string>());
        }
    }
    cfg.merge_quotes = doc.value("merge_quotes", cfg.merge_quotes);
    cfg.prune_catalog = doc.value("prune_catalog", cfg.prune_catalog);
    if (doc.contains("ci")) {
        cfg.ci_radius = doc["ci"].value("radius", cfg.ci_radius);
        cfg.ci_top_k = doc["ci"].value("top_k", cfg.ci_top_k);
    }
    if (doc.contains("rbo")) {
        cfg.rbo_p = doc["rbo"].value("p", cfg.rbo_p);
        cfg.rbo_depth = doc["rbo"].value("depth", cfg.rbo_depth);
    }
    if (doc.contains("pagerank")) {
        cfg.pagerank_damping = doc["pagerank"].value("damping", cfg.pagerank_damping);
        cfg.pagerank_tol = doc["pagerank"].value("tol", cfg.pagerank_tol);
        cfg.pagerank_max_iter = doc["pagerank"].value("max_iter", cfg.pagerank_max_iter);
    }
    if (doc.contains("similarity")) {
        cfg.similarity_kind = doc["similarity"].value("kind", cfg.similarity_kind);
        cfg.subsample_fraction = doc["similarity"].value("fraction", cfg.subsample_fraction);
        cfg.subsample_repetitions =
            doc["similarity"].value("repetitions", cfg.subsample_repetitions);
        cfg.top_per_category = doc["similarity"].value("top_per_category", cfg.top_per_category);
    }
    if (doc.contains("ideology")) {
        cfg.min_distinct = doc["ideology"].value("min_distinct", cfg.min_distinct);
        cfg.ideology_variant = doc["ideology"].value("variant", cfg.ideology_variant);
        cfg.variant_fraction = doc["ideology"].value("variant_fraction", cfg.variant_fraction);
        cfg.min_leaning_tweets =
            doc["ideology"].value("min_leaning_tweets", cfg.min_leaning_tweets);
        cfg.unweighted_median = doc["ideology"].value("unweighted_median", cfg.unweighted_median);
    }
    if (doc.contains("stats")) {
        cfg.b_boot = doc["stats"].value("b_boot", cfg.b_boot);
        cfg.b_null = doc["stats"].value("b_null", cfg.b_null);
    }
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.threads = doc.value("threads", cfg.threads);
    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        cfg.synth.n_users = s.value("n_users", cfg.synth.n_users);
        cfg.synth.n_influencers = s.value("n_influencers", cfg.synth.n_influencers);
        cfg.synth.epsilon = s.value("epsilon", cfg.synth.epsilon);
        cfg.synth.side_split = s.value("side_split", cfg.synth.side_split);
        cfg.synth.activity_exponent = s.value("activity_exponent", cfg.synth.activity_exponent);
        cfg.synth.activity_floor = s.value("activity_floor", cfg.synth.activity_floor);
        cfg.synth.popularity_exponent =
            s.value("popularity_exponent", cfg.synth.popularity_exponent);
        cfg.synth.unofficial_fraction =
            s.value("unofficial_fraction", cfg.synth.unofficial_fraction);
        cfg.synth.quote_fraction = s.value("quote_fraction", cfg.synth.quote_fraction);
        cfg.synth.seed = s.value("seed", cfg.seed);
    } else {
        cfg.synth.seed = cfg.seed;
    }
    if (doc.contains("period_a")) cfg.period_a = doc["period_a"].get<std::string>();
    if (doc.contains("period_b")) cfg.period_b = doc["period_b"].get<std::string>();
    return cfg;
}

std::string PipelineConfig::to_canonical_json() const {
    json doc;
    doc["output_dir"] = output_dir.string();
    json corpus_list = json::array();
    for (const auto& p : corpus_paths) corpus_list.push_back(p.string());
    doc["corpus"] = corpus_list;
    doc["catalog"] = catalog_path.string();
    doc["labels"] = labels_path.string();
    doc["window"] = {{"from", window.start}, {"to", window.end}};
    json cats = json::array();
    for (const auto c : category_list()) cats.push_back(std::string(category_name(c)));
    doc["categories"] = cats;
    doc["official_clients"] = official().names();
    doc["merge_quotes"] = merge_quotes;
    doc["prune_catalog"] = prune_catalog;
    doc["ci"] = {{"radius", ci_radius}, {"top_k", ci_top_k}};
    doc["rbo"] = {{"p", rbo_p}, {"depth", rbo_depth}};
    doc["pagerank"] = {{"damping", pagerank_damping},
                       {"tol", pagerank_tol},
                       {"max_iter", pagerank_max_iter}};
    doc["similarity"] = {{"kind", similarity_kind},
                         {"fraction", subsample_fraction},
                         {"repetitions", subsample_repetitions},
                         {"top_per_category", top_per_category}};
    doc["ideology"] = {{"min_distinct", min_distinct},
                       {"variant", ideology_variant},
                       {"variant_fraction", variant_fraction},
                       {"min_leaning_tweets", min_leaning_tweets},
                       {"unweighted_median", unweighted_median}};
    doc["stats"] = {{"b_boot", b_boot}, {"b_null", b_null}};
    doc["seed"] = seed;
    doc["synth"] = {{"n_users", synth.n_users},
                    {"n_influencers", synth.n_influencers},
                    {"epsilon", synth.epsilon},
                    {"side_split", synth.side_split},
                    {"activity_exponent", synth.activity_exponent},
                    {"activity_floor", synth.activity_floor},
                    {"popularity_exponent", synth.popularity_exponent},
                    {"unofficial_fraction", synth.unofficial_fraction},
                    {"quote_fraction", synth.quote_fraction},
                    {"seed", synth.seed}};
    doc["period_a"] = period_a.string();
    doc["period_b"] = period_b.string();
    // Thread count is intentionally left out: it must never affect outputs.
    return doc.dump();
}

PeriodSummary load_period_summary(const std::filesystem::path& period_dir) {
    return load_period_summary_impl(period_dir);
}

CategoryRankings load_rankings(const std::filesystem::path& period_dir) {
    return load_rankings_impl(period_dir, 2);
}

void run_stage(const std::string& stage, const PipelineConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    if (stage == "synth") stage_synth(cfg);
    else if (stage == "ingest") stage_ingest(cfg);
    else if (stage == "classify") stage_classify(cfg);
    else if (stage == "graph") stage_graph(cfg);
    else if (stage == "rank") stage_rank(cfg);
    else if (stage == "compare-ranks") stage_compare_ranks(cfg);
    else if (stage == "similarity") stage_similarity(cfg);
    else if (stage == "ideology") stage_ideology(cfg);
    else if (stage == "stats") stage_stats(cfg);
    else if (stage == "shifts") stage_shifts(cfg);
    else if (stage == "report") stage_report(cfg);
    else throw InputError("unknown stage: " + stage);
}

} // namespace polarnet
