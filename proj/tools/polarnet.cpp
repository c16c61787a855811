#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polarnet/errors.hpp"
#include "polarnet/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config;
    std::string output_dir;
    std::vector<std::string> inputs;
    std::string catalog;
    std::string labels;
    std::int64_t from = -1, to = -1;
    std::vector<std::string> official_clients;
    std::vector<std::string> categories;
    bool merge_quotes = false;
    bool no_prune = false;
    int radius = -1;
    std::int64_t top_k = -1;
    double damping = -1, rbo_p = -1;
    std::string similarity_kind;
    double fraction = -1;
    std::int64_t reps = -1;
    std::int64_t min_distinct = -1;
    std::string variant;
    bool orientation_check = false;
    double epsilon = -1;
    std::int64_t users = -1, influencers = -1;
    std::int64_t b_boot = -1, b_null = -1;
    std::int64_t seed = -1;
    int threads = 0;
    std::string period_a, period_b;
};

void apply(const CliOverrides& o, polarnet::PipelineConfig& cfg) {
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    if (!o.inputs.empty()) {
        cfg.corpus_paths.clear();
        for (const auto& p : o.inputs) cfg.corpus_paths.emplace_back(p);
    }
    if (!o.catalog.empty()) cfg.catalog_path = o.catalog;
    if (!o.labels.empty()) cfg.labels_path = o.labels;
    if (o.from >= 0) cfg.window.start = o.from;
    if (o.to >= 0) cfg.window.end = o.to;
    if (!o.official_clients.empty()) cfg.official_clients = o.official_clients;
    if (!o.categories.empty()) {
        cfg.categories.clear();
        for (const auto& name : o.categories) {
            const auto c = polarnet::parse_category(name);
            if (!c) throw polarnet::InputError("unknown category: " + name);
            cfg.categories.push_back(*c);
        }
    }
    if (o.merge_quotes) cfg.merge_quotes = true;
    if (o.no_prune) cfg.prune_catalog = false;
    if (o.radius > 0) cfg.ci_radius = o.radius;
    if (o.top_k > 0) cfg.ci_top_k = static_cast<std::size_t>(o.top_k);
    if (o.damping > 0) cfg.pagerank_damping = o.damping;
    if (o.rbo_p > 0) cfg.rbo_p = o.rbo_p;
    if (!o.similarity_kind.empty()) cfg.similarity_kind = o.similarity_kind;
    if (o.fraction > 0) {
        cfg.subsample_fraction = o.fraction;
        cfg.variant_fraction = o.fraction;
    }
    if (o.reps > 0) cfg.subsample_repetitions = static_cast<std::size_t>(o.reps);
    if (o.min_distinct > 0) cfg.min_distinct = static_cast<std::size_t>(o.min_distinct);
    if (!o.variant.empty()) cfg.ideology_variant = o.variant;
    if (o.epsilon >= 0) cfg.synth.epsilon = o.epsilon;
    if (o.users > 0) cfg.synth.n_users = static_cast<std::size_t>(o.users);
    if (o.influencers > 0) cfg.synth.n_influencers = static_cast<std::size_t>(o.influencers);
    if (o.b_boot > 0) cfg.b_boot = static_cast<std::size_t>(o.b_boot);
    if (o.b_null > 0) cfg.b_null = static_cast<std::size_t>(o.b_null);
    if (o.seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(o.seed);
        cfg.synth.seed = cfg.seed;
    }
    if (o.threads > 0) cfg.threads = o.threads;
    if (!o.period_a.empty()) cfg.period_a = o.period_a;
    if (!o.period_b.empty()) cfg.period_b = o.period_b;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarnet: influence ranking and polarization analysis for retweet corpora"};
    app.require_subcommand(1);

    CliOverrides o;
    std::vector<CLI::App*> stages;
    for (const auto& name : polarnet::kStageNames) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' stage");
        sub->add_option("--config", o.config, "JSON config file (flags override it)");
        sub->add_option("--out", o.output_dir, "output directory");
        sub->add_option("--input", o.inputs, "corpus file(s), newline-delimited records");
        sub->add_option("--catalog", o.catalog, "outlet catalog file");
        sub->add_option("--labels", o.labels, "influencer type label file");
        sub->add_option("--from", o.from, "window start (epoch seconds, inclusive)");
        sub->add_option("--to", o.to, "window end (epoch seconds, inclusive)");
        sub->add_option("--official-clients", o.official_clients, "official client names");
        sub->add_option("--category", o.categories, "restrict to these media categories");
        sub->add_flag("--merge-quotes", o.merge_quotes, "count quotes as retweets downstream");
        sub->add_flag("--no-prune", o.no_prune, "skip the 1% catalog pruning rule");
        sub->add_option("--radius", o.radius, "collective influence ball radius");
        sub->add_option("--top-k", o.top_k, "collective influence ranking length");
        sub->add_option("--damping", o.damping, "pagerank damping factor");
        sub->add_option("--rbo-p", o.rbo_p, "rank-biased overlap persistence");
        sub->add_option("--kind", o.similarity_kind, "similarity kind: retweet|quote");
        sub->add_option("--fraction", o.fraction, "subsample fraction");
        sub->add_option("--reps", o.reps, "subsample repetitions");
        sub->add_option("--min-distinct", o.min_distinct, "ideology row filter threshold");
        sub->add_option("--variant", o.variant,
                        "ideology variant: none|drop_ones|log_weights|subsample");
        sub->add_flag("--orientation-check", o.orientation_check,
                      "fail if the ideology orientation gauge cannot be fixed");
        sub->add_option("--epsilon", o.epsilon, "synth cross-side probability");
        sub->add_option("--users", o.users, "synth user count");
        sub->add_option("--influencers", o.influencers, "synth influencer count");
        sub->add_option("--b-boot", o.b_boot, "bootstrap replicate count");
        sub->add_option("--b-null", o.b_null, "dip test null sample count");
        sub->add_option("--seed", o.seed, "global seed");
        sub->add_option("--threads", o.threads, "worker thread count (never changes results)");
        sub->add_option("--period-a", o.period_a, "first period directory (shifts/report)");
        sub->add_option("--period-b", o.period_b, "second period directory (shifts/report)");
        stages.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        polarnet::PipelineConfig cfg;
        if (!o.config.empty()) cfg = polarnet::PipelineConfig::from_json_file(o.config);
        apply(o, cfg);

        std::string stage;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (stages[i]->parsed()) stage = polarnet::kStageNames[i];
        }
        polarnet::run_stage(stage, cfg);

        if (o.orientation_check && stage == "ideology") {
            std::ifstream meta(cfg.output_dir / "ideology_meta.json");
            std::string contents((std::istreambuf_iterator<char>(meta)),
                                 std::istreambuf_iterator<char>());
            if (contents.find("\"orientation_corr\": null") != std::string::npos) {
                throw polarnet::NumericalError(
                    "orientation gauge could not be fixed (no usable leaning reference)");
            }
        }
        return 0;
    } catch (const polarnet::MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const polarnet::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const polarnet::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
