#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polarnet/corpus.hpp"

namespace polarnet {

/// Hartigans' dip statistic of a sorted sample: the largest deviation between
/// the empirical CDF and the closest unimodal CDF, computed exactly with the
/// greatest-convex-minorant / least-concave-majorant algorithm (Hartigan &
/// Hartigan 1985). Requires n >= 2 and a sorted input.
double dip_statistic(std::span<const double> sorted_sample);

struct DipResult {
    double statistic = 0;
    double p_value = 1;
    double ci_low = 0;
    double ci_high = 0;
    std::size_t n = 0;
    std::size_t b_boot = 0;
    std::size_t b_null = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo dip test: the p-value is the fraction of b_null seeded
/// uniform(0,1) samples of the same size whose dip reaches the observed one,
/// with the usual (k+1)/(B+1) correction. The confidence interval comes from
/// a BCa bootstrap of the dip itself.
DipResult dip_test(std::span<const double> sample, std::size_t b_null, std::uint64_t seed,
                   std::size_t b_boot = 1000, double level = 0.95, int threads = 1);

/// Bias-corrected and accelerated bootstrap interval (Efron 1987).
/// Resamples preserve the element order of `sample`, so order-sensitive
/// statistics (like the dip on a sorted sample) can rely on it. The
/// acceleration uses a leave-one-out jackknife, switching to 200 contiguous
/// groups above n = 100000. The statistic must be pure (it is called
/// concurrently).
std::pair<double, double> bootstrap_bca(std::span<const double> sample,
                                        const std::function<double(std::span<const double>)>& statistic,
                                        std::size_t b, double level, std::uint64_t seed,
                                        int threads = 1);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
double normal_quantile(double p);

/// Sorted uniform(0,1) order statistics in O(n) via exponential spacings.
std::vector<double> sorted_uniform_sample(std::size_t n, std::uint64_t seed);

struct QuoteRetweetCell {
    std::uint64_t quotes = 0;
    std::uint64_t retweets = 0;

    std::optional<double> ratio() const {
        if (retweets == 0) return std::nullopt;
        return static_cast<double>(quotes) / static_cast<double>(retweets);
    }
};

/// Quote-to-retweet ratios split by ideological side. cells[u][i] holds the
/// counts from users on side u to influencers on side i (0 = left, 1 =
/// right); overall[u] aggregates over influencer sides. Entities with
/// position exactly 0 are excluded.
struct QuoteRetweetTable {
    QuoteRetweetCell cells[2][2];
    QuoteRetweetCell overall[2];
};

QuoteRetweetTable quote_retweet_ratio(const Corpus& corpus,
                                      const std::unordered_map<UserId, double>& user_positions,
                                      const std::unordered_map<UserId, double>& influencer_positions);

} // namespace polarnet
