#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rankpref/consistency.hpp"
#include "test_support.hpp"

using namespace rankpref;

namespace {

// (0,0)=2, (0,1)=4, (1,0)=3; (1,1) missing.
SparseRatingMatrix two_by_two() { return SparseRatingMatrix(2, 2, {{0, 0, 2}, {0, 1, 4}, {1, 0, 3}}); }

double gauge_mean(const ConsistencyModel& m, std::uint32_t component) {
    double s = 0;
    int n = 0;
    for (std::size_t u = 0; u < m.n_users(); ++u)
        if (m.components().component_of_user[u] == component) {
            s += m.row_param()[u];
            ++n;
        }
    return n ? s / n : 0.0;
}

}  // namespace

TEST_CASE("constant matrix completes to the constant") {
    std::vector<Rating> e;
    for (Index u = 0; u < 4; ++u)
        for (Index i = 0; i < 5; ++i)
            if ((u + i) % 3 != 0) e.push_back({u, i, 3.5});
    SparseRatingMatrix m(4, 5, e);
    auto sc = fit_sc(m);
    auto uc = fit_uc(m);
    for (Index u = 0; u < 4; ++u)
        for (Index i = 0; i < 5; ++i) {
            CHECK(sc.predict(u, i) == doctest::Approx(3.5).epsilon(1e-12));
            CHECK(uc.predict(u, i) == doctest::Approx(3.5).epsilon(1e-12));
        }
}

TEST_CASE("two-by-two completion: additive and multiplicative") {
    auto m = two_by_two();
    auto sc = fit_sc(m);
    auto uc = fit_uc(m);
    CHECK(sc.fit_stats().converged);
    CHECK(uc.fit_stats().converged);
    // 3 + 4 - 2 and 3 * 4 / 2
    CHECK(std::abs(sc.predict(1, 1) - 5.0) < 1e-9);
    CHECK(std::abs(uc.predict(1, 1) - 6.0) < 1e-9);
    // Filled cells are reproduced exactly when the model is exactly identified.
    CHECK(std::abs(sc.predict(0, 0) - 2.0) < 1e-9);
    CHECK(std::abs(uc.predict(1, 0) - 3.0) < 1e-9);
}

TEST_CASE("Alice and Bob") {
    // Items 0..3 rated by both, item 4 by Bob only. Ratings out of 10 / 100.
    SUBCASE("one unit higher") {
        std::vector<Rating> e{{0, 0, 6}, {0, 1, 4}, {0, 2, 9}, {0, 3, 5},   // Alice
                              {1, 0, 5}, {1, 1, 3}, {1, 2, 8}, {1, 3, 4},   // Bob
                              {1, 4, 7}};
        auto sc = fit_sc(SparseRatingMatrix(2, 5, e, RatingScale(0, 10)));
        CHECK(std::abs(sc.predict(0, 4) - 8.0) < 1e-9);
    }
    SUBCASE("ten percent higher") {
        std::vector<Rating> e{{0, 0, 55}, {0, 1, 33}, {0, 2, 88}, {0, 3, 44},
                              {1, 0, 50}, {1, 1, 30}, {1, 2, 80}, {1, 3, 40}, {1, 4, 70}};
        auto uc = fit_uc(SparseRatingMatrix(2, 5, e, RatingScale(0, 100)));
        CHECK(std::abs(uc.predict(0, 4) - 77.0) <= 1e-9 * 77.0);
    }
}

TEST_CASE("cold start and cross-component requests are declined") {
    // Users 0,1 with items 0,1; user 2 with item 2; user 3 empty; item 3 empty.
    SparseRatingMatrix m(4, 4, {{0, 0, 4}, {0, 1, 2}, {1, 0, 5}, {2, 2, 3}});
    auto sc = fit_sc(m);
    CHECK_THROWS_AS(sc.predict(3, 0), PredictionError);
    try {
        sc.predict(0, 3);
        FAIL("expected ColdStart");
    } catch (const PredictionError& e) {
        CHECK(e.kind() == PredictStatus::cold_start);
    }
    try {
        sc.predict(0, 2);
        FAIL("expected CrossComponent");
    } catch (const PredictionError& e) {
        CHECK(e.kind() == PredictStatus::cross_component);
    }
    CHECK(std::abs(sc.predict(1, 1) - 3.0) < 1e-9);
    CHECK(std::abs(sc.predict(2, 2) - 3.0) < 1e-9);
    CHECK_THROWS_AS(sc.predict(9, 0), std::out_of_range);

    SUBCASE("complete_all flags per entry") {
        std::vector<std::pair<Index, Index>> cells{{1, 1}, {0, 2}, {3, 3}, {2, 2}};
        auto out = complete_all(sc, cells);
        REQUIRE(out.size() == 4);
        CHECK(out[0].ok());
        CHECK(out[1].status == PredictStatus::cross_component);
        CHECK(out[2].status == PredictStatus::cold_start);
        CHECK(out[3].ok());
        CHECK(complete_all(sc, std::span<const std::pair<Index, Index>>{}).empty());
    }
}

TEST_CASE("gauge: row parameters average to zero per component") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        // Two disconnected random blocks side by side.
        auto a = testing::random_connected(rng, 4, 5, 0.6);
        auto b = testing::random_connected(rng, 3, 3, 0.7);
        const auto sa = a.to_sparse();
        const auto sb = b.to_sparse();
        std::vector<Rating> e(sa.entries().begin(), sa.entries().end());
        for (const auto& r : sb.entries()) e.push_back({r.user + 4, r.item + 5, r.value});
        SparseRatingMatrix m(7, 8, e);
        for (const auto& model : {fit_sc(m), fit_uc(m)}) {
            REQUIRE(model.components().n_components == 2);
            CHECK(std::abs(gauge_mean(model, 0)) < 1e-9);
            CHECK(std::abs(gauge_mean(model, 1)) < 1e-9);
            CHECK(model.fit_stats().final_residual <= model.fit_stats().tolerance);
        }
    }
}

TEST_CASE("parameters match the normal-equation solution") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        auto d = testing::random_connected(rng, testing::between(rng, 2, 8), testing::between(rng, 2, 8),
                                           0.3 + 0.6 * testing::unit(rng));
        auto model = fit_sc(d.to_sparse());
        auto expected = testing::additive_least_squares(d);
        for (std::size_t u = 0; u < d.n_users; ++u)
            CHECK(std::abs(model.row_param()[u] - expected[static_cast<Eigen::Index>(u)]) < 1e-8);
        for (std::size_t i = 0; i < d.n_items; ++i)
            CHECK(std::abs(model.col_param()[i] - expected[static_cast<Eigen::Index>(d.n_users + i)]) < 1e-8);
    }
}

TEST_CASE("shift and unit equivariance on small random matrices") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto nu = testing::between(rng, 2, 12), ni = testing::between(rng, 2, 12);
        auto d = testing::random_connected(rng, nu, ni, 0.5);
        std::vector<double> s(nu), t(ni), p(nu), q(ni);
        for (auto& x : s) x = -2 + 4 * testing::unit(rng);
        for (auto& x : t) x = -2 + 4 * testing::unit(rng);
        for (auto& x : p) x = 0.5 + 1.5 * testing::unit(rng);
        for (auto& x : q) x = 0.5 + 1.5 * testing::unit(rng);
        auto shifted = d, scaled = d;
        for (std::size_t u = 0; u < nu; ++u)
            for (std::size_t i = 0; i < ni; ++i)
                if (d.at(u, i)) {
                    shifted.at(u, i) = *d.at(u, i) + s[u] + t[i];
                    scaled.at(u, i) = *d.at(u, i) * p[u] * q[i];
                }
        const RatingScale wide(-100, 100);
        auto base_sc = fit_sc(d.to_sparse(wide));
        auto base_uc = fit_uc(d.to_sparse(wide));
        auto sc = fit_sc(shifted.to_sparse(wide));
        auto uc = fit_uc(scaled.to_sparse(wide));
        for (Index u = 0; u < nu; ++u)
            for (Index i = 0; i < ni; ++i) {
                CHECK(std::abs(sc.predict(u, i) - (base_sc.predict(u, i) + s[u] + t[i])) < 1e-9);
                const double want = base_uc.predict(u, i) * p[u] * q[i];
                CHECK(std::abs(uc.predict(u, i) - want) <= 1e-9 * std::abs(want));
            }
    }
}

TEST_CASE("non-convergence is flagged, not thrown") {
    std::mt19937_64 rng(1);
    auto d = testing::random_connected(rng, 10, 10, 0.4);
    auto m = d.to_sparse();
    auto model = fit_sc(m, {1e-10, 1});
    CHECK(model.fit_stats().iterations == 1);
    CHECK_FALSE(model.fit_stats().converged);
    CHECK(model.fit_stats().final_residual > 1e-10);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(fit_sc(SparseRatingMatrix(2, 2, {})), DataError);
    CHECK_THROWS_AS(fit_sc(two_by_two(), {0.0, 10}), std::invalid_argument);
    SparseRatingMatrix signed_ratings(1, 2, {{0, 0, -1}, {0, 1, 2}}, RatingScale(-5, 5));
    CHECK_NOTHROW(fit_sc(signed_ratings));
    CHECK_THROWS_AS(fit_uc(signed_ratings), DataError);
}

TEST_CASE("model text format round trip") {
    SparseRatingMatrix m(4, 4, {{0, 0, 4}, {0, 1, 2}, {1, 0, 5}, {2, 2, 3}});
    for (const auto& model : {fit_sc(m), fit_uc(m)}) {
        std::stringstream ss;
        model.save(ss);
        auto back = ConsistencyModel::load(ss);
        CHECK(back.kind() == model.kind());
        CHECK(back.row_param() == model.row_param());
        CHECK(back.col_param() == model.col_param());
        CHECK(back.fit_stats().iterations == model.fit_stats().iterations);
        for (Index u = 0; u < 4; ++u)
            for (Index i = 0; i < 4; ++i) {
                auto a = model.try_predict(u, i);
                auto b = back.try_predict(u, i);
                CHECK(a.status == b.status);
                if (a.ok()) CHECK(a.value == b.value);
            }
    }
    std::stringstream bad("rankpref-consistency 2\n");
    CHECK_THROWS_AS(ConsistencyModel::load(bad), DataError);
}
