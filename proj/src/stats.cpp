#include "polarnet/stats.hpp"

#include <algorithm>
#include <cmath>

#include "polarnet/errors.hpp"
#include "polarnet/parallel.hpp"
#include "polarnet/rng.hpp"

namespace polarnet {

double dip_statistic(std::span<const double> sorted_sample) {
    const std::size_t n = sorted_sample.size();
    if (n < 2) throw InputError("dip statistic requires at least 2 points");
    for (std::size_t i = 1; i < n; ++i) {
        if (sorted_sample[i] < sorted_sample[i - 1]) {
            throw InputError("dip statistic requires a sorted sample");
        }
    }

    // 1-based working copy; the algorithm is written in the classic AS 217
    // index convention and works in units of 2n * dip.
    std::vector<double> x(n + 1);
    for (std::size_t i = 0; i < n; ++i) x[i + 1] = sorted_sample[i];
    const auto ni = static_cast<std::ptrdiff_t>(n);

    double dip = 1.0; // lower bound; yields D >= 1/(2n)
    if (x[n] == x[1]) return dip / (2.0 * static_cast<double>(n));

    // Predecessor indices for the greatest convex minorant fit and successor
    // indices for the least concave majorant fit, built once over the whole
    // sample by slope comparison (cross-multiplied, no divisions).
    std::vector<std::ptrdiff_t> gcm_prev(n + 1), lcm_next(n + 1);
    gcm_prev[1] = 1;
    for (std::ptrdiff_t j = 2; j <= ni; ++j) {
        gcm_prev[j] = j - 1;
        for (;;) {
            const auto pj = gcm_prev[j];
            const auto ppj = gcm_prev[pj];
            if (pj == 1 || (x[j] - x[pj]) * static_cast<double>(pj - ppj) <
                               (x[pj] - x[ppj]) * static_cast<double>(j - pj)) {
                break;
            }
            gcm_prev[j] = ppj;
        }
    }
    lcm_next[n] = ni;
    for (std::ptrdiff_t k = ni - 1; k >= 1; --k) {
        lcm_next[k] = k + 1;
        for (;;) {
            const auto nk = lcm_next[k];
            const auto nnk = lcm_next[nk];
            if (nk == ni || (x[k] - x[nk]) * static_cast<double>(nk - nnk) <
                                (x[nk] - x[nnk]) * static_cast<double>(k - nk)) {
                break;
            }
            lcm_next[k] = nnk;
        }
    }

    std::vector<std::ptrdiff_t> gcm(n + 2), lcm(n + 2);
    std::ptrdiff_t low = 1, high = ni;

    for (;;) {
        // Change points of both hulls inside the current modal interval.
        gcm[1] = high;
        std::ptrdiff_t i = 1;
        while (gcm[i] > low) {
            gcm[i + 1] = gcm_prev[gcm[i]];
            ++i;
        }
        std::ptrdiff_t ig = i, l_gcm = i; // gcm[l_gcm] == low
        std::ptrdiff_t ix = ig - 1;

        lcm[1] = low;
        i = 1;
        while (lcm[i] < high) {
            lcm[i + 1] = lcm_next[lcm[i]];
            ++i;
        }
        std::ptrdiff_t ih = i, l_lcm = i; // lcm[l_lcm] == high
        std::ptrdiff_t iv = 2;

        // Largest gap between the two hull curves, scanning their change
        // points from the interval ends toward each other.
        long double d = 0.0L;
        if (l_gcm != 2 || l_lcm != 2) {
            do {
                const auto gcm_ix = gcm[ix];
                const auto lcm_iv = lcm[iv];
                long double dx;
                if (gcm_ix > lcm_iv) {
                    const auto gcm_ix1 = gcm[ix + 1];
                    dx = static_cast<long double>(lcm_iv - gcm_ix1 + 1) -
                         (static_cast<long double>(x[lcm_iv]) - x[gcm_ix1]) *
                             static_cast<long double>(gcm_ix - gcm_ix1) / (x[gcm_ix] - x[gcm_ix1]);
                    ++iv;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    const auto lcm_iv1 = lcm[iv - 1];
                    dx = (static_cast<long double>(x[gcm_ix]) - x[lcm_iv1]) *
                             static_cast<long double>(lcm_iv - lcm_iv1) / (x[lcm_iv] - x[lcm_iv1]) -
                         static_cast<long double>(gcm_ix - lcm_iv1 - 1);
                    --ix;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                if (ix < 1) ix = 1;
                if (iv > l_lcm) iv = l_lcm;
            } while (gcm[ix] != lcm[iv]);
        } else {
            d = 1.0L;
        }
        if (static_cast<double>(d) < dip) break;

        // Largest deviation of the empirical CDF below the GCM...
        double dip_l = 0.0;
        for (std::ptrdiff_t j = ig; j < l_gcm; ++j) {
            double max_t = 1.0;
            const auto jb = gcm[j + 1], je = gcm[j];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double slope = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::ptrdiff_t jj = jb; jj <= je; ++jj) {
                    const double t = static_cast<double>(jj - jb + 1) - (x[jj] - x[jb]) * slope;
                    if (max_t < t) max_t = t;
                }
            }
            if (dip_l < max_t) dip_l = max_t;
        }
        // ...and above the LCM.
        double dip_u = 0.0;
        for (std::ptrdiff_t j = ih; j < l_lcm; ++j) {
            double max_t = 1.0;
            const auto jb = lcm[j], je = lcm[j + 1];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double slope = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::ptrdiff_t jj = jb; jj <= je; ++jj) {
                    const double t = (x[jj] - x[jb]) * slope - static_cast<double>(jj - jb - 1);
                    if (max_t < t) max_t = t;
                }
            }
            if (dip_u < max_t) dip_u = max_t;
        }

        const double dip_new = std::max(dip_l, dip_u);
        if (dip < dip_new) dip = dip_new;

        if (low == gcm[ig] && high == lcm[ih]) break;
        low = gcm[ig];
        high = lcm[ih];
    }
    return dip / (2.0 * static_cast<double>(n));
}

std::vector<double> sorted_uniform_sample(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::vector<double> out(n);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += draw_exponential(rng);
        out[i] = acc;
    }
    acc += draw_exponential(rng);
    for (auto& v : out) v /= acc;
    return out;
}

DipResult dip_test(std::span<const double> sample, std::size_t b_null, std::uint64_t seed,
                   std::size_t b_boot, double level, int threads) {
    if (sample.size() < 4) throw InputError("dip test requires at least 4 points");
    if (b_null < 100) throw InputError("dip test requires b_null >= 100");

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    DipResult result;
    result.n = sorted.size();
    result.b_null = b_null;
    result.b_boot = b_boot;
    result.seed = seed;
    result.statistic = dip_statistic(sorted);

    std::vector<double> null_dips(b_null);
    parallel_for(b_null, threads, [&](std::size_t rep) {
        const auto uniform = sorted_uniform_sample(sorted.size(), mix_seed(seed, rep));
        null_dips[rep] = dip_statistic(uniform);
    });
    std::size_t at_least = 0;
    for (const auto d : null_dips) {
        if (d >= result.statistic) ++at_least;
    }
    result.p_value = static_cast<double>(at_least + 1) / static_cast<double>(b_null + 1);

    const auto ci = bootstrap_bca(
        sorted, [](std::span<const double> s) { return dip_statistic(s); }, b_boot, level,
        mix_seed(seed, 0xb0075), threads);
    result.ci_low = ci.first;
    result.ci_high = ci.second;
    return result;
}

namespace {

// Type-7 (linear interpolation) quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0;
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::clamp(std::floor(h), 0.0,
                                                        static_cast<double>(sorted.size() - 1)));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

std::pair<double, double> bootstrap_bca(std::span<const double> sample,
                                        const std::function<double(std::span<const double>)>& statistic,
                                        std::size_t b, double level, std::uint64_t seed,
                                        int threads) {
    const std::size_t n = sample.size();
    if (n < 2) throw InputError("bootstrap requires at least 2 points");
    if (b < 100) throw InputError("bootstrap requires B >= 100");
    if (level <= 0.0 || level >= 1.0) throw InputError("confidence level must lie in (0, 1)");

    const double theta_hat = statistic(sample);

    std::vector<double> theta_star(b);
    parallel_for(b, threads, [&](std::size_t rep) {
        auto rng = make_rng(mix_seed(seed, rep));
        // Multiplicity counts keep the resample in the base sample's order.
        std::vector<std::uint32_t> times(n, 0);
        for (std::size_t k = 0; k < n; ++k) ++times[draw_below(rng, n)];
        std::vector<double> resample;
        resample.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::uint32_t t = 0; t < times[i]; ++t) resample.push_back(sample[i]);
        }
        theta_star[rep] = statistic(resample);
    });

    std::vector<double> sorted_star = theta_star;
    std::sort(sorted_star.begin(), sorted_star.end());
    if (sorted_star.front() == sorted_star.back()) {
        return {sorted_star.front(), sorted_star.front()}; // degenerate resamples
    }

    std::size_t below = 0, equal = 0;
    for (const auto t : theta_star) {
        if (t < theta_hat) ++below;
        else if (t == theta_hat) ++equal;
    }
    double frac = (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
                  static_cast<double>(b);
    frac = std::clamp(frac, 1.0 / static_cast<double>(b + 1),
                      static_cast<double>(b) / static_cast<double>(b + 1));
    const double z0 = normal_quantile(frac);

    // Acceleration from the jackknife skewness; contiguous groups replace
    // leave-one-out for very large samples.
    std::vector<double> jack;
    if (n <= 100000) {
        jack.resize(n);
        parallel_for(n, threads, [&](std::size_t i) {
            std::vector<double> reduced;
            reduced.reserve(n - 1);
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) reduced.push_back(sample[k]);
            }
            jack[i] = statistic(reduced);
        });
    } else {
        const std::size_t groups = 200;
        jack.resize(groups);
        parallel_for(groups, threads, [&](std::size_t gidx) {
            const std::size_t begin = gidx * n / groups;
            const std::size_t end = (gidx + 1) * n / groups;
            std::vector<double> reduced;
            reduced.reserve(n - (end - begin));
            for (std::size_t k = 0; k < n; ++k) {
                if (k < begin || k >= end) reduced.push_back(sample[k]);
            }
            jack[gidx] = statistic(reduced);
        });
    }
    double jack_mean = 0;
    for (const auto j : jack) jack_mean += j;
    jack_mean /= static_cast<double>(jack.size());
    double sum_sq = 0, sum_cu = 0;
    for (const auto j : jack) {
        const double d = jack_mean - j;
        sum_sq += d * d;
        sum_cu += d * d * d;
    }
    const double accel = sum_sq > 0 ? sum_cu / (6.0 * std::pow(sum_sq, 1.5)) : 0.0;

    const double alpha = 1.0 - level;
    auto adjusted = [&](double z_alpha) {
        const double num = z0 + z_alpha;
        const double denom = 1.0 - accel * num;
        // A collapsed denominator pins the endpoint to the distribution tail.
        const double z_adj = denom > 1e-12 ? z0 + num / denom : (num > 0 ? 50.0 : -50.0);
        return std::clamp(normal_cdf(z_adj), 0.0, 1.0);
    };
    const double a_lo = adjusted(normal_quantile(alpha / 2.0));
    const double a_hi = adjusted(normal_quantile(1.0 - alpha / 2.0));
    const double lo = quantile_sorted(sorted_star, a_lo);
    const double hi = quantile_sorted(sorted_star, a_hi);
    return {std::min(lo, hi), std::max(lo, hi)};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("correlation inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw InputError("correlation requires at least 2 points");

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0 || syy <= 0) throw NumericalError("correlation is undefined under zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation of the normal quantile, sharpened with one
// Halley step; good to full double precision over (0, 1).
double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw InputError("normal quantile requires p in (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double bb[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    const double p_low = 0.02425, p_high = 1.0 - p_low;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((bb[0] * r + bb[1]) * r + bb[2]) * r + bb[3]) * r + bb[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

QuoteRetweetTable quote_retweet_ratio(const Corpus& corpus,
                                      const std::unordered_map<UserId, double>& user_positions,
                                      const std::unordered_map<UserId, double>& influencer_positions) {
    QuoteRetweetTable table;
    for (const auto& rec : corpus.records) {
        if (!rec.source_user_id) continue;
        if (rec.kind != InteractionKind::retweet && rec.kind != InteractionKind::quote) continue;
        const auto user_it = user_positions.find(rec.user_id);
        const auto infl_it = influencer_positions.find(*rec.source_user_id);
        if (user_it == user_positions.end() || infl_it == influencer_positions.end()) continue;
        if (user_it->second == 0.0 || infl_it->second == 0.0) continue;
        const int u_side = user_it->second > 0 ? 1 : 0;
        const int i_side = infl_it->second > 0 ? 1 : 0;
        auto& cell = table.cells[u_side][i_side];
        auto& overall = table.overall[u_side];
        if (rec.kind == InteractionKind::quote) {
            ++cell.quotes;
            ++overall.quotes;
        } else {
            ++cell.retweets;
            ++overall.retweets;
        }
    }
    return table;
}

} // namespace polarnet
