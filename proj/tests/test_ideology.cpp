#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "planted.hpp"
#include "polarnet/errors.hpp"
#include "polarnet/ideology.hpp"
#include "polarnet/rng.hpp"
#include "polarnet/stats.hpp"

using namespace polarnet;

namespace {

TweetRecord interaction(TweetId tweet, UserId user, UserId source, InteractionKind kind,
                        const std::string& client) {
    TweetRecord rec;
    rec.tweet_id = tweet;
    rec.user_id = user;
    rec.timestamp = 10;
    rec.kind = kind;
    rec.source_user_id = source;
    rec.client = client;
    return rec;
}

RetweetMatrix matrix_from_dense(const std::vector<std::vector<double>>& dense,
                                std::size_t min_distinct = 1) {
    std::unordered_map<UserId, std::unordered_map<UserId, double>> counts;
    std::vector<UserId> users, influencers;
    for (std::size_t j = 0; j < dense.front().size(); ++j) influencers.push_back(j + 1);
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const UserId user = 100 + i;
        users.push_back(user);
        for (std::size_t j = 0; j < dense[i].size(); ++j) {
            if (dense[i][j] != 0) counts[user][j + 1] = dense[i][j];
        }
    }
    return matrix_from_triplets(users, influencers, counts, min_distinct);
}

} // namespace

TEST_CASE("matrix construction applies the distinct filter and the client filter") {
    Corpus corpus;
    const auto official = OfficialClients::defaults();
    // User 100 retweets three distinct influencers once each: kept.
    corpus.records.push_back(interaction(1, 100, 1, InteractionKind::retweet, "Twitter Web Client"));
    corpus.records.push_back(interaction(2, 100, 2, InteractionKind::retweet, "Twitter for iPhone"));
    corpus.records.push_back(interaction(3, 100, 3, InteractionKind::retweet, "Twitter Web Client"));
    // User 200 retweets influencer 1 a hundred times: dropped (1 distinct).
    for (TweetId t = 0; t < 100; ++t) {
        corpus.records.push_back(
            interaction(10 + t, 200, 1, InteractionKind::retweet, "Twitter Web Client"));
    }
    // User 300 reaches three distinct influencers only via an unofficial
    // client: the unofficial one is not counted, so the row is dropped.
    corpus.records.push_back(interaction(201, 300, 1, InteractionKind::retweet, "Twitter Web Client"));
    corpus.records.push_back(interaction(202, 300, 2, InteractionKind::retweet, "Twitter Web Client"));
    corpus.records.push_back(interaction(203, 300, 3, InteractionKind::retweet, "SocialFlow"));
    // Quotes do not count under the default kinds.
    corpus.records.push_back(interaction(204, 300, 4, InteractionKind::quote, "Twitter Web Client"));

    const auto matrix = build_retweet_matrix(corpus, {1, 2, 3, 4}, 3, official);
    REQUIRE(matrix.rows() == 1);
    CHECK(matrix.row_users[0] == 100);
    CHECK(matrix.cols() == 3); // influencer 4 had no counted interaction
    CHECK(matrix.dropped_empty_columns.size() == 1);
    CHECK(matrix.total == doctest::Approx(3.0));
}

TEST_CASE("standardized residuals of a constant matrix vanish") {
    const auto matrix = matrix_from_dense({{3, 3, 3}, {3, 3, 3}, {3, 3, 3}});
    const auto s = standardized_residuals(matrix);
    for (const auto v : s.to_dense()) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    // The analytic norm shortcut carries sqrt(eps) absolute error at zero.
    CHECK(s.frobenius_norm() < 1e-7);
}

TEST_CASE("2x2 diagonal pattern gives a rank-1 residual with the right signs") {
    const auto matrix = matrix_from_dense({{5, 0}, {0, 5}});
    const auto s = standardized_residuals(matrix);
    const auto dense = s.to_dense();
    // S = [[.5, -.5], [-.5, .5]]: positive diagonal, negative off-diagonal.
    CHECK(dense[0] == doctest::Approx(0.5));
    CHECK(dense[1] == doctest::Approx(-0.5));
    CHECK(dense[2] == doctest::Approx(-0.5));
    CHECK(dense[3] == doctest::Approx(0.5));
    const auto svd = oracle::dense_leading_svd(dense, 2, 2);
    CHECK(svd.sigma1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frobenius norm of the residuals matches the dense oracle") {
    auto rng = make_rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 4 + draw_below(rng, 20);
        const std::size_t cols = 3 + draw_below(rng, 10);
        std::vector<std::vector<double>> dense(rows, std::vector<double>(cols, 0.0));
        for (auto& row : dense) {
            for (auto& v : row) {
                if (draw_unit(rng) < 0.6) v = 1 + draw_below(rng, 8);
            }
            if (std::accumulate(row.begin(), row.end(), 0.0) == 0) row[0] = 1;
        }
        const auto matrix = matrix_from_dense(dense);
        const auto s = standardized_residuals(matrix);
        CHECK(s.frobenius_norm() ==
              doctest::Approx(oracle::dense_frobenius(s.to_dense())).epsilon(1e-10));
    }
}

TEST_CASE("residuals reject zero rows and columns") {
    RetweetMatrix matrix;
    matrix.row_users = {100};
    matrix.col_influencers = {1};
    matrix.row_offsets = {0, 0};
    matrix.total = 0;
    CHECK_THROWS(standardized_residuals(matrix));
}

TEST_CASE("leading axis recovers an exact rank-1 matrix") {
    // S = sigma * x y^T with unit x, y.
    const std::vector<double> x = {0.6, -0.8};
    const std::vector<double> y = {1.0 / 3.0, 2.0 / 3.0, -2.0 / 3.0};
    const double sigma = 2.5;
    ResidualMatrix s;
    s.n_rows = 2;
    s.n_cols = 3;
    s.sqrt_r.assign(2, 0.0);
    s.sqrt_c.assign(3, 0.0);
    s.row_offsets = {0, 3, 6};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            s.col_idx.push_back(static_cast<std::uint32_t>(j));
            s.k_values.push_back(sigma * x[i] * y[j]);
        }
    }
    const auto axis = leading_axis(s, 7);
    CHECK(axis.sigma == doctest::Approx(sigma).epsilon(1e-10));
    const double align = axis.left[0] * x[0] + axis.left[1] * x[1];
    CHECK(std::abs(align) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("leading singular value matches the dense oracle on random matrices") {
    auto rng = make_rng(456);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t rows = 10 + draw_below(rng, 41); // up to 50
        const std::size_t cols = 5 + draw_below(rng, 26);  // up to 30
        std::vector<std::vector<double>> dense(rows, std::vector<double>(cols, 0.0));
        for (auto& row : dense) {
            for (auto& v : row) {
                if (draw_unit(rng) < 0.5) v = 1 + draw_below(rng, 6);
            }
            if (std::accumulate(row.begin(), row.end(), 0.0) == 0) row[0] = 1;
        }
        const auto matrix = matrix_from_dense(dense);
        const auto s = standardized_residuals(matrix);
        const auto axis = leading_axis(s, mix_seed(1, trial));
        const auto reference = oracle::dense_leading_svd(s.to_dense(), s.n_rows, s.n_cols);
        CHECK(axis.sigma == doctest::Approx(reference.sigma1).epsilon(1e-8));
    }
}

TEST_CASE("block-diagonal residuals split the leading axis by sign") {
    const auto planted = testgen::planted_two_block(60, 10, 0.0, 5, 8);
    const auto s = standardized_residuals(planted.matrix);
    const auto axis = leading_axis(s, 11);
    const auto reference = oracle::dense_leading_svd(s.to_dense(), s.n_rows, s.n_cols);
    CHECK(axis.sigma == doctest::Approx(reference.sigma1).epsilon(1e-8));

    // All rows of one planted side share a sign, the other side the opposite.
    double first_side_sign = 0;
    bool consistent = true;
    for (std::size_t i = 0; i < planted.matrix.rows(); ++i) {
        const int side = planted.user_side.at(planted.matrix.row_users[i]);
        const double v = axis.left[i] * side;
        if (first_side_sign == 0) first_side_sign = v > 0 ? 1 : -1;
        if (v * first_side_sign <= 0) consistent = false;
    }
    CHECK(consistent);
}

TEST_CASE("user positions are standardized and orientation-gauged") {
    const auto planted = testgen::planted_two_block(200, 20, 0.05, 3, 10);
    const auto s = standardized_residuals(planted.matrix);
    const auto axis = leading_axis(s, 17);
    const auto positions = user_positions(planted.matrix, axis, &planted.side_reference);

    const std::size_t n = positions.positions.size();
    double mean = 0;
    for (const auto p : positions.positions) mean += p;
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto p : positions.positions) var += (p - mean) * (p - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

    // Planted side matches the position sign for ~everyone, right positive.
    std::size_t match = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int side = planted.user_side.at(planted.matrix.row_users[i]);
        if ((positions.positions[i] > 0) == (side > 0)) ++match;
    }
    CHECK(static_cast<double>(match) / static_cast<double>(n) >= 0.99);
}

TEST_CASE("flipping the axis sign leaves gauged positions unchanged") {
    const auto planted = testgen::planted_two_block(80, 10, 0.05, 21, 8);
    const auto s = standardized_residuals(planted.matrix);
    auto axis = leading_axis(s, 5);
    const auto base = user_positions(planted.matrix, axis, &planted.side_reference);
    for (auto& v : axis.left) v = -v;
    for (auto& v : axis.right) v = -v;
    const auto flipped = user_positions(planted.matrix, axis, &planted.side_reference);
    for (std::size_t i = 0; i < base.positions.size(); ++i) {
        CHECK(base.positions[i] == doctest::Approx(flipped.positions[i]).epsilon(1e-12));
    }
}

TEST_CASE("influencer positions: medians of retweeter positions") {
    // Three users at positions -1, 0, +1; influencer 1 retweeted once by
    // each; influencer 2 weighted 3:1 toward the -1 user; influencer 3 has a
    // single retweeter.
    const auto matrix = matrix_from_dense({
        {1, 3, 0},
        {1, 0, 0},
        {1, 1, 1},
    });
    const std::vector<double> pos = {-1.0, 0.0, 1.0};
    const auto result = influencer_positions(matrix, pos, true);
    REQUIRE(result.size() == 3);
    CHECK(result[0].position == doctest::Approx(0.0)); // odd unweighted median
    CHECK(result[0].n_retweeters == 3);
    CHECK(result[1].position == doctest::Approx(-1.0)); // weights 3 vs 1, lower median
    CHECK(result[2].position == doctest::Approx(1.0));  // single retweeter
    CHECK(result[2].n_retweeters == 1);

    // Every influencer position sits inside its retweeters' range.
    for (const auto& ip : result) {
        CHECK(ip.position >= -1.0);
        CHECK(ip.position <= 1.0);
    }

    // Weighted and unweighted medians can differ when one retweeter
    // dominates the multiplicity.
    const auto matrix_2 = matrix_from_dense({
        {1, 5, 1},
        {1, 1, 1},
        {1, 1, 1},
    });
    const std::vector<double> pos_2 = {-1.0, 0.5, 1.0};
    CHECK(influencer_positions(matrix_2, pos_2, true)[1].position == doctest::Approx(-1.0));
    CHECK(influencer_positions(matrix_2, pos_2, false)[1].position == doctest::Approx(0.5));
}

TEST_CASE("average leaning") {
    CategoryCounts fake{};
    fake[static_cast<std::size_t>(MediaCategory::FakeNews)] = 3;
    CHECK(average_leaning(fake, 3) == doctest::Approx(4.0 / 3.0));

    CategoryCounts mixed{};
    mixed[static_cast<std::size_t>(MediaCategory::Center)] = 2;
    mixed[static_cast<std::size_t>(MediaCategory::Left)] = 1;
    CHECK(average_leaning(mixed, 3) == doctest::Approx(-2.0 / 9.0));

    CategoryCounts thin{};
    thin[static_cast<std::size_t>(MediaCategory::Right)] = 2;
    CHECK_FALSE(average_leaning(thin, 3).has_value());
}

TEST_CASE("robustness variants") {
    SUBCASE("drop_ones empties an all-ones matrix") {
        const auto matrix = matrix_from_dense({{1, 1, 1}, {1, 1, 1}}, 3);
        CHECK_THROWS_AS(robustness_variant(matrix, {VariantSpec::Type::drop_ones, 0, 0}),
                        InputError);
    }
    SUBCASE("log_weights maps counts through ln(1+a)") {
        const auto matrix = matrix_from_dense({{1, 2, 0}, {3, 0, 1}});
        const auto logged = robustness_variant(matrix, {VariantSpec::Type::log_weights, 0, 0});
        CHECK(logged.values[0] == doctest::Approx(std::log(2.0)));
        CHECK(logged.values[1] == doctest::Approx(std::log(3.0)));
        CHECK(logged.nnz() == matrix.nnz()); // zeros stay zero, support unchanged
    }
    SUBCASE("variant position vectors track the baseline on a planted matrix") {
        const auto planted = testgen::planted_two_block(200, 20, 0.05, 9, 30);
        const auto base_axis = leading_axis(standardized_residuals(planted.matrix), 2);
        const auto base = user_positions(planted.matrix, base_axis, &planted.side_reference);
        std::unordered_map<UserId, double> base_by_user;
        for (std::size_t i = 0; i < planted.matrix.rows(); ++i) {
            base_by_user.emplace(planted.matrix.row_users[i], base.positions[i]);
        }

        const std::vector<VariantSpec> variants = {
            {VariantSpec::Type::drop_ones, 0, 0},
            {VariantSpec::Type::log_weights, 0, 0},
            {VariantSpec::Type::subsample, 0.5, 77},
        };
        for (const auto& variant : variants) {
            const auto changed = robustness_variant(planted.matrix, variant);
            const auto axis = leading_axis(standardized_residuals(changed), 2);
            const auto positions = user_positions(changed, axis, &planted.side_reference);
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < changed.rows(); ++i) {
                auto it = base_by_user.find(changed.row_users[i]);
                if (it == base_by_user.end()) continue;
                xs.push_back(positions.positions[i]);
                ys.push_back(it->second);
            }
            REQUIRE(xs.size() >= 40); // drop_ones sheds sparse rows
            CHECK(pearson_correlation(xs, ys) >= 0.99);
        }
    }
}

TEST_CASE("positions are invariant to integer scaling of the count matrix") {
    const auto planted = testgen::planted_two_block(100, 12, 0.1, 31, 8);
    const auto base_axis = leading_axis(standardized_residuals(planted.matrix), 3);
    const auto base = user_positions(planted.matrix, base_axis, &planted.side_reference);

    auto scaled = planted.matrix;
    for (auto& v : scaled.values) v *= 7;
    scaled.total *= 7;
    const auto scaled_axis = leading_axis(standardized_residuals(scaled), 3);
    const auto scaled_pos = user_positions(scaled, scaled_axis, &planted.side_reference);
    for (std::size_t i = 0; i < base.positions.size(); ++i) {
        CHECK(base.positions[i] == doctest::Approx(scaled_pos.positions[i]).epsilon(1e-8));
    }
}

TEST_CASE("row permutation permutes positions identically") {
    const auto planted = testgen::planted_two_block(60, 10, 0.1, 41, 8);
    const auto axis = leading_axis(standardized_residuals(planted.matrix), 9);
    const auto base = user_positions(planted.matrix, axis, &planted.side_reference);

    // Rebuild the same matrix through the triplet path with shuffled user
    // order: construction sorts rows by user id, so positions line up by id.
    std::unordered_map<UserId, std::unordered_map<UserId, double>> counts;
    for (std::size_t i = 0; i < planted.matrix.rows(); ++i) {
        for (std::size_t e = planted.matrix.row_offsets[i]; e < planted.matrix.row_offsets[i + 1];
             ++e) {
            counts[planted.matrix.row_users[i]]
                  [planted.matrix.col_influencers[planted.matrix.col_idx[e]]] =
                      planted.matrix.values[e];
        }
    }
    std::vector<UserId> shuffled_users = planted.matrix.row_users;
    auto rng = make_rng(1);
    shuffle_vec(shuffled_users, rng);
    const auto rebuilt = matrix_from_triplets(shuffled_users, planted.matrix.col_influencers,
                                              counts, planted.matrix.min_distinct);
    const auto axis_2 = leading_axis(standardized_residuals(rebuilt), 9);
    const auto rebuilt_pos = user_positions(rebuilt, axis_2, &planted.side_reference);
    REQUIRE(rebuilt.row_users == planted.matrix.row_users);
    for (std::size_t i = 0; i < base.positions.size(); ++i) {
        CHECK(base.positions[i] == doctest::Approx(rebuilt_pos.positions[i]).epsilon(1e-8));
    }
}

TEST_CASE("influencer positions ignore users below the distinct filter") {
    const auto planted = testgen::planted_two_block(120, 12, 0.05, 51, 9);
    const auto axis = leading_axis(standardized_residuals(planted.matrix), 13);
    const auto positions = user_positions(planted.matrix, axis, &planted.side_reference);
    const auto base = influencer_positions(planted.matrix, positions.positions, true);

    // Add users who retweeted fewer than min_distinct influencers: the
    // matrix re-filters them away, so nothing downstream moves.
    std::unordered_map<UserId, std::unordered_map<UserId, double>> counts;
    std::vector<UserId> users = planted.matrix.row_users;
    for (std::size_t i = 0; i < planted.matrix.rows(); ++i) {
        for (std::size_t e = planted.matrix.row_offsets[i]; e < planted.matrix.row_offsets[i + 1];
             ++e) {
            counts[planted.matrix.row_users[i]]
                  [planted.matrix.col_influencers[planted.matrix.col_idx[e]]] =
                      planted.matrix.values[e];
        }
    }
    for (UserId extra = 5000; extra < 5020; ++extra) {
        users.push_back(extra);
        counts[extra][planted.matrix.col_influencers[0]] = 50;
        counts[extra][planted.matrix.col_influencers[1]] = 50;
    }
    const auto widened = matrix_from_triplets(users, planted.matrix.col_influencers, counts,
                                              planted.matrix.min_distinct);
    REQUIRE(widened.rows() == planted.matrix.rows());
    const auto axis_2 = leading_axis(standardized_residuals(widened), 13);
    const auto positions_2 = user_positions(widened, axis_2, &planted.side_reference);
    const auto wide = influencer_positions(widened, positions_2.positions, true);
    REQUIRE(wide.size() == base.size());
    for (std::size_t j = 0; j < base.size(); ++j) {
        CHECK(base[j].position == doctest::Approx(wide[j].position).epsilon(1e-8));
        CHECK(base[j].n_retweeters == wide[j].n_retweeters);
    }
}
