#include "polarnet/ideology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "polarnet/errors.hpp"
#include "polarnet/rng.hpp"
#include "polarnet/stats.hpp"

namespace polarnet {

RetweetMatrix matrix_from_triplets(
    const std::vector<UserId>& users, const std::vector<UserId>& influencers,
    const std::unordered_map<UserId, std::unordered_map<UserId, double>>& counts,
    std::size_t min_distinct) {
    std::unordered_map<UserId, std::uint32_t> col_of;
    col_of.reserve(influencers.size());
    for (std::uint32_t j = 0; j < influencers.size(); ++j) col_of.emplace(influencers[j], j);

    // Keep rows with enough distinct influencers, in ascending user order.
    std::vector<UserId> kept_users;
    for (const auto u : users) {
        auto it = counts.find(u);
        if (it == counts.end()) continue;
        std::size_t distinct = 0;
        for (const auto& [influencer, cnt] : it->second) {
            if (cnt > 0 && col_of.count(influencer)) ++distinct;
        }
        if (distinct >= min_distinct) kept_users.push_back(u);
    }
    std::sort(kept_users.begin(), kept_users.end());

    // Mark columns with support among the kept rows.
    std::vector<double> col_support(influencers.size(), 0.0);
    for (const auto u : kept_users) {
        for (const auto& [influencer, cnt] : counts.at(u)) {
            auto jt = col_of.find(influencer);
            if (jt != col_of.end() && cnt > 0) col_support[jt->second] += cnt;
        }
    }

    RetweetMatrix mat;
    mat.min_distinct = min_distinct;
    std::vector<std::int64_t> col_new(influencers.size(), -1);
    for (std::uint32_t j = 0; j < influencers.size(); ++j) {
        if (col_support[j] > 0) {
            col_new[j] = static_cast<std::int64_t>(mat.col_influencers.size());
            mat.col_influencers.push_back(influencers[j]);
        } else {
            mat.dropped_empty_columns.push_back(influencers[j]);
        }
    }

    mat.row_users = std::move(kept_users);
    mat.row_offsets.reserve(mat.row_users.size() + 1);
    mat.row_offsets.push_back(0);
    for (const auto u : mat.row_users) {
        std::map<std::uint32_t, double> row; // sorted column order
        for (const auto& [influencer, cnt] : counts.at(u)) {
            auto jt = col_of.find(influencer);
            if (jt == col_of.end() || cnt <= 0) continue;
            row.emplace(static_cast<std::uint32_t>(col_new[jt->second]), cnt);
        }
        for (const auto& [j, cnt] : row) {
            mat.col_idx.push_back(j);
            mat.values.push_back(cnt);
            mat.total += cnt;
        }
        mat.row_offsets.push_back(mat.col_idx.size());
    }

    if (mat.rows() == 0 || mat.cols() == 0) {
        throw InputError("retweet matrix is empty after filtering");
    }
    return mat;
}

RetweetMatrix build_retweet_matrix(const Corpus& corpus, const std::vector<UserId>& influencer_set,
                                   std::size_t min_distinct, const OfficialClients& official,
                                   const KindSet& kinds) {
    if (influencer_set.empty()) throw InputError("influencer set is empty");
    if (min_distinct < 1) throw InputError("min_distinct must be >= 1");

    std::unordered_map<UserId, std::uint32_t> influencer_index;
    for (std::uint32_t j = 0; j < influencer_set.size(); ++j)
        influencer_index.emplace(influencer_set[j], j);

    std::unordered_map<UserId, std::unordered_map<UserId, double>> counts;
    std::vector<UserId> users;
    for (const auto& rec : corpus.records) {
        if (!kinds.contains(rec.kind) || !rec.source_user_id) continue;
        if (classify_client(rec.client, official) != ClientClass::official) continue;
        if (!influencer_index.count(*rec.source_user_id)) continue;
        if (*rec.source_user_id == rec.user_id) continue;
        auto [it, inserted] = counts.try_emplace(rec.user_id);
        if (inserted) users.push_back(rec.user_id);
        it->second[*rec.source_user_id] += 1.0;
    }
    return matrix_from_triplets(users, influencer_set, counts, min_distinct);
}

void ResidualMatrix::apply(std::span<const double> v, std::span<double> out) const {
    // S v = K v - sqrt(r) * (sqrt(c) . v)
    double rank1 = 0;
    for (std::size_t j = 0; j < n_cols; ++j) rank1 += sqrt_c[j] * v[j];
    for (std::size_t i = 0; i < n_rows; ++i) {
        double acc = 0;
        for (std::size_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            acc += k_values[e] * v[col_idx[e]];
        }
        out[i] = acc - sqrt_r[i] * rank1;
    }
}

void ResidualMatrix::apply_transpose(std::span<const double> u, std::span<double> out) const {
    double rank1 = 0;
    for (std::size_t i = 0; i < n_rows; ++i) rank1 += sqrt_r[i] * u[i];
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double ui = u[i];
        for (std::size_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            out[col_idx[e]] += k_values[e] * ui;
        }
    }
    for (std::size_t j = 0; j < n_cols; ++j) out[j] -= sqrt_c[j] * rank1;
}

double ResidualMatrix::frobenius_norm() const {
    // ||S||_F^2 = sum K^2 - 2 sum_ij K_ij sqrt(r_i c_j) + sum_ij r_i c_j
    //           = sum K^2 - 2 sum_ij P_ij + 1 = sum K^2 - 1,
    // using sum P = 1 and sum r = sum c = 1.
    double sum_sq = 0;
    for (const auto k : k_values) sum_sq += k * k;
    return std::sqrt(std::max(0.0, sum_sq - 1.0));
}

std::vector<double> ResidualMatrix::to_dense() const {
    std::vector<double> dense(n_rows * n_cols, 0.0);
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) dense[i * n_cols + j] = -sqrt_r[i] * sqrt_c[j];
        for (std::size_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            dense[i * n_cols + col_idx[e]] += k_values[e];
        }
    }
    return dense;
}

ResidualMatrix standardized_residuals(const RetweetMatrix& mat) {
    if (mat.total <= 0) throw InputError("retweet matrix has zero total");

    ResidualMatrix s;
    s.n_rows = mat.rows();
    s.n_cols = mat.cols();
    std::vector<double> r(s.n_rows, 0.0), c(s.n_cols, 0.0);
    for (std::size_t i = 0; i < s.n_rows; ++i) {
        for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
            const double p = mat.values[e] / mat.total;
            r[i] += p;
            c[mat.col_idx[e]] += p;
        }
    }
    for (const auto ri : r) {
        if (ri <= 0) throw NumericalError("zero row mass in correspondence matrix");
    }
    for (const auto cj : c) {
        if (cj <= 0) throw NumericalError("zero column mass in correspondence matrix");
    }

    s.sqrt_r.resize(s.n_rows);
    s.sqrt_c.resize(s.n_cols);
    for (std::size_t i = 0; i < s.n_rows; ++i) s.sqrt_r[i] = std::sqrt(r[i]);
    for (std::size_t j = 0; j < s.n_cols; ++j) s.sqrt_c[j] = std::sqrt(c[j]);

    s.row_offsets = mat.row_offsets;
    s.col_idx = mat.col_idx;
    s.k_values.resize(mat.values.size());
    for (std::size_t i = 0; i < s.n_rows; ++i) {
        for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
            const double p = mat.values[e] / mat.total;
            s.k_values[e] = p / (s.sqrt_r[i] * s.sqrt_c[mat.col_idx[e]]);
        }
    }
    return s;
}

LeadingAxis leading_axis(const ResidualMatrix& s, std::uint64_t seed, double tol,
                         std::size_t max_iter) {
    if (s.n_rows == 0 || s.n_cols == 0) throw InputError("residual matrix is empty");
    const double fro = s.frobenius_norm();
    if (fro <= 0) {
        throw NumericalError("residual matrix is zero; no leading axis exists");
    }

    // Power iteration on S^T S. Matrices with fewer than 1e6 cells are
    // densified first; products are cheaper on the flat array.
    std::vector<double> dense;
    const bool use_dense = s.n_rows * s.n_cols < 1000000;
    if (use_dense) dense = s.to_dense();

    auto apply = [&](std::span<const double> v, std::span<double> out) {
        if (!use_dense) {
            s.apply(v, out);
            return;
        }
        for (std::size_t i = 0; i < s.n_rows; ++i) {
            double acc = 0;
            const double* row = dense.data() + i * s.n_cols;
            for (std::size_t j = 0; j < s.n_cols; ++j) acc += row[j] * v[j];
            out[i] = acc;
        }
    };
    auto apply_t = [&](std::span<const double> u, std::span<double> out) {
        if (!use_dense) {
            s.apply_transpose(u, out);
            return;
        }
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < s.n_rows; ++i) {
            const double ui = u[i];
            const double* row = dense.data() + i * s.n_cols;
            for (std::size_t j = 0; j < s.n_cols; ++j) out[j] += row[j] * ui;
        }
    };

    auto rng = make_rng(mix_seed(seed, 0xCA));
    std::vector<double> v(s.n_cols), u(s.n_rows), w(s.n_cols);
    for (auto& x : v) x = draw_normal(rng);
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (auto& x : v) x /= norm;

    double sigma = 0, sigma_prev = -1;
    std::size_t iter = 0;
    for (iter = 1; iter <= max_iter; ++iter) {
        apply(v, u);                            // u = S v
        sigma = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
        if (sigma <= 0) {
            // Unlucky start vector in the null space; redraw.
            for (auto& x : v) x = draw_normal(rng);
            norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
            for (auto& x : v) x /= norm;
            continue;
        }
        apply_t(u, w);                          // w = S^T S v (unnormalized)
        norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        for (std::size_t j = 0; j < s.n_cols; ++j) v[j] = w[j] / norm;
        if (sigma_prev >= 0 && std::abs(sigma - sigma_prev) <= tol * sigma) break;
        sigma_prev = sigma;
    }

    apply(v, u);
    sigma = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    if (sigma <= 0) throw NumericalError("leading singular value collapsed to zero");
    for (auto& x : u) x /= sigma;

    // Residual check of the triplet.
    std::vector<double> sv(s.n_rows);
    apply(v, sv);
    double res = 0;
    for (std::size_t i = 0; i < s.n_rows; ++i) {
        const double d = sv[i] - sigma * u[i];
        res += d * d;
    }
    if (std::sqrt(res) > 1e-8 * fro || iter > max_iter) {
        throw NumericalError("leading axis did not converge after " + std::to_string(iter) +
                             " iterations (residual " + std::to_string(std::sqrt(res)) + ")");
    }

    LeadingAxis axis;
    axis.left = std::move(u);
    axis.right = std::move(v);
    axis.sigma = sigma;
    axis.iterations = iter;
    return axis;
}

UserPositions user_positions(const RetweetMatrix& mat, const LeadingAxis& axis,
                             const std::unordered_map<UserId, double>* orientation_ref) {
    const std::size_t n = mat.rows();
    if (axis.left.size() != n) throw InputError("axis does not match the matrix rows");

    if (n < 2) throw NumericalError("too few users to standardize positions");

    UserPositions result;
    result.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0;
        for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
            r += mat.values[e];
        }
        r /= mat.total;
        result.positions[i] = axis.left[i] / std::sqrt(r);
    }

    double mean = 0;
    for (const auto x : result.positions) mean += x;
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto x : result.positions) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd <= 0) throw NumericalError("user positions are degenerate (zero variance)");
    for (auto& x : result.positions) x = (x - mean) / sd;

    if (orientation_ref != nullptr) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = orientation_ref->find(mat.row_users[i]);
            if (it == orientation_ref->end()) continue;
            xs.push_back(result.positions[i]);
            ys.push_back(it->second);
        }
        if (xs.size() >= 2) {
            try {
                const double corr = pearson_correlation(xs, ys);
                result.orientation_corr = std::abs(corr);
                if (corr < 0) {
                    for (auto& x : result.positions) x = -x;
                    result.flipped = true;
                }
            } catch (const NumericalError&) {
                // Reference has no variance over the matched users; leave the
                // sign gauge as computed.
            }
        }
    }
    return result;
}

std::vector<InfluencerPosition> influencer_positions(const RetweetMatrix& mat,
                                                     std::span<const double> user_pos,
                                                     bool weighted) {
    if (user_pos.size() != mat.rows()) throw InputError("positions do not match the matrix rows");

    std::vector<std::vector<std::pair<double, double>>> per_col(mat.cols()); // (position, weight)
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
            per_col[mat.col_idx[e]].emplace_back(user_pos[i], weighted ? mat.values[e] : 1.0);
        }
    }

    std::vector<InfluencerPosition> out;
    out.reserve(mat.cols());
    for (std::size_t j = 0; j < mat.cols(); ++j) {
        auto& entries = per_col[j];
        std::sort(entries.begin(), entries.end());
        double total = 0;
        for (const auto& [pos, w] : entries) {
            (void)pos;
            total += w;
        }
        // Lower weighted median: first position whose cumulative weight
        // reaches half the total.
        double cum = 0;
        double median = entries.empty() ? 0.0 : entries.back().first;
        for (const auto& [pos, w] : entries) {
            cum += w;
            if (cum >= total / 2.0) {
                median = pos;
                break;
            }
        }
        out.push_back({mat.col_influencers[j], median, entries.size()});
    }
    return out;
}

std::optional<double> average_leaning(const CategoryCounts& user_links, std::uint64_t min_tweets) {
    std::uint64_t total = 0;
    double weighted = 0;
    for (std::size_t i = 0; i < kMediaCategoryCount; ++i) {
        total += user_links[i];
        weighted += static_cast<double>(user_links[i]) *
                    category_position(static_cast<MediaCategory>(i));
    }
    if (total < min_tweets) return std::nullopt;
    return weighted / static_cast<double>(total);
}

RetweetMatrix robustness_variant(const RetweetMatrix& mat, const VariantSpec& variant) {
    // Rebuild triplets, transform, and send them back through the shared
    // filter path so row/column invariants hold for every variant.
    std::unordered_map<UserId, std::unordered_map<UserId, double>> counts;
    std::vector<UserId> users = mat.row_users;
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        auto& row = counts[mat.row_users[i]];
        for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
            row[mat.col_influencers[mat.col_idx[e]]] = mat.values[e];
        }
    }

    switch (variant.type) {
    case VariantSpec::Type::drop_ones:
        for (auto& [user, row] : counts) {
            (void)user;
            for (auto& [influencer, cnt] : row) {
                if (cnt == 1.0) cnt = 0.0;
            }
        }
        break;
    case VariantSpec::Type::log_weights:
        for (auto& [user, row] : counts) {
            (void)user;
            for (auto& [influencer, cnt] : row) cnt = std::log1p(cnt);
        }
        break;
    case VariantSpec::Type::subsample: {
        if (variant.fraction <= 0.0 || variant.fraction > 1.0) {
            throw InputError("subsample fraction must lie in (0, 1]");
        }
        // Treat each unit of count as one event and keep a uniform sample of
        // the events without replacement.
        const auto total_events = static_cast<std::uint64_t>(std::llround(mat.total));
        const auto keep_events =
            static_cast<std::uint64_t>(std::floor(variant.fraction * static_cast<double>(total_events)));
        auto rng = make_rng(mix_seed(variant.seed, 0x50b));
        // Sequential hypergeometric-style thinning: decide each event with
        // probability remaining_keep / remaining_events.
        std::uint64_t remaining = total_events;
        std::uint64_t to_keep = keep_events;
        for (std::size_t i = 0; i < mat.rows(); ++i) {
            for (std::size_t e = mat.row_offsets[i]; e < mat.row_offsets[i + 1]; ++e) {
                const auto cell = static_cast<std::uint64_t>(std::llround(mat.values[e]));
                std::uint64_t kept = 0;
                for (std::uint64_t k = 0; k < cell; ++k) {
                    if (remaining > 0 && draw_below(rng, remaining) < to_keep) {
                        ++kept;
                        --to_keep;
                    }
                    --remaining;
                }
                counts[mat.row_users[i]][mat.col_influencers[mat.col_idx[e]]] =
                    static_cast<double>(kept);
            }
        }
        break;
    }
    }

    try {
        return matrix_from_triplets(users, mat.col_influencers, counts, mat.min_distinct);
    } catch (const InputError&) {
        throw InputError("robustness variant emptied the matrix");
    }
}

} // namespace polarnet
