#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polarnet/corpus.hpp"
#include "polarnet/influence.hpp"
#include "polarnet/media_catalog.hpp"
#include "polarnet/shifts.hpp"
#include "polarnet/synth.hpp"

namespace polarnet {

/// Everything a stage run needs, loadable from one JSON config file; CLI
/// flags override individual fields. The global seed is stamped into every
/// manifest so outputs are reproducible byte for byte.
struct PipelineConfig {
    std::filesystem::path output_dir = "out";
    std::vector<std::filesystem::path> corpus_paths; // empty -> output_dir/corpus.jsonl
    std::filesystem::path catalog_path;              // empty -> output_dir/catalog.tsv
    std::filesystem::path labels_path;               // optional
    TimeWindow window{0, 4102444800};                // wide-open default
    std::vector<MediaCategory> categories;           // empty -> all eight
    std::vector<std::string> official_clients;       // empty -> built-in defaults
    bool merge_quotes = false;                       // count quotes as retweets downstream
    bool prune_catalog = true;

    int ci_radius = 2;
    std::size_t ci_top_k = 100;
    double rbo_p = 0.98;
    std::size_t rbo_depth = 100;
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-12;
    std::size_t pagerank_max_iter = 100000;

    std::string similarity_kind = "retweet"; // or "quote"
    double subsample_fraction = 0.8;
    std::size_t subsample_repetitions = 100;
    std::size_t top_per_category = 100; // influencer pool for similarity/ideology

    std::size_t min_distinct = 3;
    std::string ideology_variant = "none"; // none | drop_ones | log_weights | subsample
    double variant_fraction = 0.5;
    std::uint64_t min_leaning_tweets = 3;
    bool unweighted_median = false;

    std::size_t b_boot = 1000;
    std::size_t b_null = 9999;

    std::uint64_t seed = 1;
    int threads = 1;

    SynthConfig synth;

    // Two-period stages (shifts, report).
    std::filesystem::path period_a, period_b;

    static PipelineConfig from_json_file(const std::filesystem::path& path);
    std::string to_canonical_json() const;

    KindSet analysis_kinds() const { return {true, merge_quotes}; }
    std::filesystem::path corpus_file() const;
    std::filesystem::path catalog_file() const;
    OfficialClients official() const;
    std::vector<MediaCategory> category_list() const;
};

inline constexpr std::string_view kPipelineVersion = "polarnet 0.1.0";

extern const std::vector<std::string> kStageNames;

/// Runs one stage end to end, writing artifacts plus a manifest into the
/// output directory. Throws InputError / MissingArtifactError /
/// NumericalError; the CLI maps those to exit codes 2 / 3 / 4.
void run_stage(const std::string& stage, const PipelineConfig& cfg);

/// Per-period headline numbers as consumed by the report stage.
struct PeriodSummary {
    std::size_t n_users = 0, n_influencers = 0;
    double dip_users = 0, dip_users_lo = 0, dip_users_hi = 0, dip_users_p = 1;
    double dip_influencers = 0, dip_influencers_lo = 0, dip_influencers_hi = 0,
           dip_influencers_p = 1;
    double modularity_value = 0, modularity_se = 0;
    double cut_value = 0, cut_se = 0;
};

PeriodSummary load_period_summary(const std::filesystem::path& period_dir);

CategoryRankings load_rankings(const std::filesystem::path& period_dir);

std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string format_double(double v);

} // namespace polarnet
