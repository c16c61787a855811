#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "polarnet/corpus.hpp"
#include "polarnet/media_catalog.hpp"
#include "polarnet/retweet_graph.hpp"

namespace polarnet {

/// Sparse user x influencer interaction-count matrix (CSR rows). After
/// construction every row has at least min_distinct nonzero columns and every
/// column at least one nonzero entry.
struct RetweetMatrix {
    std::vector<UserId> row_users;
    std::vector<UserId> col_influencers;
    std::vector<std::size_t> row_offsets;
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;
    double total = 0;
    std::size_t min_distinct = 3;
    std::vector<UserId> dropped_empty_columns;

    std::size_t rows() const { return row_users.size(); }
    std::size_t cols() const { return col_influencers.size(); }
    std::size_t nnz() const { return values.size(); }
};

/// Builds the matrix from raw (user, influencer, count) triplets, applying
/// the row distinct-count filter and dropping empty columns.
RetweetMatrix matrix_from_triplets(const std::vector<UserId>& users,
                                   const std::vector<UserId>& influencers,
                                   const std::unordered_map<UserId, std::unordered_map<UserId, double>>& counts,
                                   std::size_t min_distinct);

/// Counts every interaction of the requested kinds (all of them, not only
/// URL-carrying ones) from official clients only, then filters as above.
/// Throws InputError when nothing survives.
RetweetMatrix build_retweet_matrix(const Corpus& corpus, const std::vector<UserId>& influencer_set,
                                   std::size_t min_distinct, const OfficialClients& official,
                                   const KindSet& kinds = {});

/// Standardized residuals S = D_r^{-1/2} (P - r c^T) D_c^{-1/2} of the
/// correspondence matrix P = A / total. Stored as the sparse scaled part
/// K_ij = P_ij / sqrt(r_i c_j) minus the rank-one term sqrt(r) sqrt(c)^T, so
/// matrix-vector products stay sparse.
struct ResidualMatrix {
    std::size_t n_rows = 0, n_cols = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<std::uint32_t> col_idx;
    std::vector<double> k_values;
    std::vector<double> sqrt_r, sqrt_c;

    void apply(std::span<const double> v, std::span<double> out) const;           // out = S v
    void apply_transpose(std::span<const double> u, std::span<double> out) const; // out = S^T u
    double frobenius_norm() const;
    std::vector<double> to_dense() const; // row-major
};

ResidualMatrix standardized_residuals(const RetweetMatrix& mat);

struct LeadingAxis {
    std::vector<double> left;  // u1, length rows
    std::vector<double> right; // v1, length cols
    double sigma = 0;
    std::size_t iterations = 0;
};

/// Leading singular triplet via seeded power iteration on S^T S; small
/// matrices are densified first. Residual check ||S v - sigma u|| against
/// 1e-8 ||S||_F; failure to converge throws NumericalError.
LeadingAxis leading_axis(const ResidualMatrix& s, std::uint64_t seed = 12345, double tol = 1e-10,
                         std::size_t max_iter = 10000);

struct UserPositions {
    std::vector<double> positions; // aligned with mat.row_users, mean 0, sd 1
    bool flipped = false;
    std::optional<double> orientation_corr;
};

/// Standard row coordinates D_r^{-1/2} u1, standardized to mean 0 / sd 1.
/// When an orientation reference (user -> leaning) is given, the sign is
/// fixed so the correlation with it is non-negative (right is positive).
UserPositions user_positions(const RetweetMatrix& mat, const LeadingAxis& axis,
                             const std::unordered_map<UserId, double>* orientation_ref = nullptr);

struct InfluencerPosition {
    UserId id;
    double position;
    std::size_t n_retweeters;
};

/// Weighted median of retweeter positions (weights a_ij), lower-median
/// convention on even total weight; `weighted = false` selects the plain
/// median over distinct retweeters.
std::vector<InfluencerPosition> influencer_positions(const RetweetMatrix& mat,
                                                     std::span<const double> user_pos,
                                                     bool weighted = true);

/// Weighted mean of category positions; nullopt below min_tweets classified
/// links.
std::optional<double> average_leaning(const CategoryCounts& user_links, std::uint64_t min_tweets = 3);

struct VariantSpec {
    enum class Type { drop_ones, log_weights, subsample } type = Type::drop_ones;
    double fraction = 0.5;  // subsample only
    std::uint64_t seed = 0; // subsample only
};

/// Robustness variants: drop_ones zeroes unit entries and re-filters,
/// log_weights maps counts through ln(1+a), subsample keeps a seeded fraction
/// of the individual interaction events before re-filtering.
RetweetMatrix robustness_variant(const RetweetMatrix& mat, const VariantSpec& variant);

} // namespace polarnet
