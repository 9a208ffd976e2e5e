#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flash/error.hpp"
#include "flash/metrics.hpp"
#include "oracles.hpp"

using namespace flash;

namespace {
const std::vector<Direction> kMinMin{Direction::Minimize, Direction::Minimize};
}

TEST_CASE("mmre") {
    CHECK(mmre(std::vector<double>{110}, std::vector<double>{100}) == doctest::Approx(10.0));
    CHECK(mmre(std::vector<double>{3, 4}, std::vector<double>{3, 4}) == 0.0);
    CHECK(mmre(std::vector<double>{90, 240}, std::vector<double>{100, 200}) == doctest::Approx(15.0));
    CHECK_THROWS_AS(mmre(std::vector<double>{1}, std::vector<double>{0}), ValidationError);
    CHECK_THROWS_AS(mmre(std::vector<double>{1}, std::vector<double>{-2}), ValidationError);
    CHECK_THROWS_AS(mmre(std::vector<double>{1, 2}, std::vector<double>{1}), ValidationError);
}

TEST_CASE("mean rank difference") {
    CHECK(mean_rank_difference(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == 0.0);
    CHECK(mean_rank_difference(std::vector<double>{4, 3, 2, 1}, std::vector<double>{1, 2, 3, 4}) == 2.0);
    CHECK(mean_rank_difference(std::vector<double>{7, 7, 7}, std::vector<double>{1, 2, 3}) == doctest::Approx(2.0 / 3.0));
    CHECK(average_ranks(std::vector<double>{5, 1, 5, 3}) == std::vector<double>{3.5, 1, 3.5, 2});
    // Only the ordering of the predictions matters.
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> p(10);
        std::vector<double> a(10);
        for (auto& v : p) v = static_cast<double>(rng.below(6));
        for (auto& v : a) v = rng.uniform();
        std::vector<double> q;
        for (double v : p) q.push_back(std::exp(v) * 3.0 + 1.0);
        CHECK(mean_rank_difference(p, a) == mean_rank_difference(q, a));
    }
}

TEST_CASE("rank difference") {
    const std::vector<double> v{5, 3, 9, 3, 7};
    CHECK(rank_difference(v, 1, Direction::Minimize) == 0);
    CHECK(rank_difference(v, 3, Direction::Minimize) == 0);
    CHECK(rank_difference(v, 0, Direction::Minimize) == 2);
    CHECK(rank_difference(v, 2, Direction::Maximize) == 0);
    CHECK(rank_difference(v, 1, Direction::Maximize) == 3);
    std::vector<double> big(1512);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
    CHECK(rank_difference(big, 6, Direction::Minimize) == 6);
    CHECK_THROWS_AS(rank_difference(v, 5, Direction::Minimize), ValidationError);
}

TEST_CASE("dominance") {
    CHECK(dominates(std::vector<double>{1, 2}, std::vector<double>{2, 3}, kMinMin));
    CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 2}, kMinMin));
    CHECK_FALSE(dominates(std::vector<double>{1, 3}, std::vector<double>{2, 2}, kMinMin));
    CHECK_FALSE(dominates(std::vector<double>{2, 2}, std::vector<double>{1, 3}, kMinMin));
    const std::vector<Direction> mixed{Direction::Maximize, Direction::Minimize};
    CHECK(dominates(std::vector<double>{5, 1}, std::vector<double>{4, 1}, mixed));
    CHECK_THROWS_AS(dominates(std::vector<double>{1}, std::vector<double>{1, 2}, kMinMin), ValidationError);

    Rng rng(9);
    for (int t = 0; t < 2000; ++t) {
        std::vector<std::vector<double>> p(3, std::vector<double>(3));
        for (auto& v : p) {
            for (auto& x : v) x = static_cast<double>(rng.below(3));
        }
        const std::vector<Direction> d3{Direction::Minimize, Direction::Maximize, Direction::Minimize};
        CHECK_FALSE((dominates(p[0], p[1], d3) && dominates(p[1], p[0], d3)));
        if (dominates(p[0], p[1], d3) && dominates(p[1], p[2], d3)) CHECK(dominates(p[0], p[2], d3));
    }
}

TEST_CASE("pareto front") {
    CHECK(pareto_front({{3, 3}}, kMinMin) == std::vector<std::size_t>{0});
    CHECK(pareto_front({{1, 1}, {2, 2}, {3, 3}}, kMinMin) == std::vector<std::size_t>{0});
    CHECK(pareto_front({{1, 2}, {1, 2}, {2, 1}, {3, 3}}, kMinMin) == std::vector<std::size_t>{0, 1, 2});
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        std::vector<ObjectiveVector> pts(200, ObjectiveVector(2));
        for (auto& v : pts) {
            for (auto& x : v) x = static_cast<double>(rng.below(40));
        }
        const auto front = pareto_front(pts, kMinMin);
        CHECK(front == oracle::pareto_front(pts, kMinMin));
        std::vector<ObjectiveVector> sub;
        for (auto i : front) sub.push_back(pts[i]);
        CHECK(pareto_front(sub, kMinMin).size() == sub.size());
    }
}

TEST_CASE("GD and IGD") {
    const std::vector<ObjectiveVector> truth{{0, 1}, {1, 0}};
    SUBCASE("identical fronts") {
        const FrontComparison c(truth, truth, kMinMin);
        CHECK(gd(c) == 0.0);
        CHECK(igd(c) == 0.0);
    }
    SUBCASE("subset of the true front") {
        const std::vector<ObjectiveVector> t3{{0, 2}, {1, 1}, {2, 0}};
        const FrontComparison c(t3, {{1, 1}}, kMinMin);
        CHECK(gd(c) == 0.0);
        CHECK(igd(c) > 0.0);
    }
    SUBCASE("midpoint") {
        const FrontComparison c(truth, {{0.5, 0.5}}, kMinMin);
        CHECK(gd(c) == doctest::Approx(std::sqrt(0.5)));
        CHECK(igd(c) == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("normalization by true-front ranges") {
        const FrontComparison c({{0, 100}, {10, 0}}, {{5, 50}}, kMinMin);
        CHECK(gd(c) == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("flat objective is dropped") {
        const std::vector<Direction> three(3, Direction::Minimize);
        const FrontComparison c({{0, 1, 5}, {1, 0, 5}}, {{0.5, 0.5, 9}}, three);
        CHECK(c.active_objectives() == std::vector<std::size_t>{0, 1});
        CHECK(gd(c) == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(FrontComparison({}, truth, kMinMin), ValidationError);
        CHECK_THROWS_AS(FrontComparison(truth, {{0, 0}, {1, 1}}, kMinMin), ValidationError);
        CHECK_THROWS_AS(FrontComparison({{1, 1}}, {{1, 1}}, kMinMin), ValidationError);
    }
    SUBCASE("random fronts against brute force distances") {
        Rng rng(77);
        for (int t = 0; t < 50; ++t) {
            std::vector<ObjectiveVector> a(30, ObjectiveVector(2));
            std::vector<ObjectiveVector> b(30, ObjectiveVector(2));
            for (auto* s : {&a, &b}) {
                for (auto& v : *s) {
                    for (auto& x : v) x = rng.uniform();
                }
            }
            std::vector<ObjectiveVector> ta;
            std::vector<ObjectiveVector> tb;
            for (auto i : oracle::pareto_front(a, kMinMin)) ta.push_back(a[i]);
            for (auto i : oracle::pareto_front(b, kMinMin)) tb.push_back(b[i]);
            if (ta.size() < 2) continue;
            const FrontComparison c(ta, tb, kMinMin);
            std::vector<double> lo{1e9, 1e9};
            std::vector<double> hi{-1e9, -1e9};
            for (const auto& v : ta) {
                for (int j = 0; j < 2; ++j) {
                    lo[j] = std::min(lo[j], v[j]);
                    hi[j] = std::max(hi[j], v[j]);
                }
            }
            auto norm = [&](ObjectiveVector v) {
                for (int j = 0; j < 2; ++j) v[j] = (v[j] - lo[j]) / (hi[j] - lo[j]);
                return v;
            };
            auto mean_nearest = [&](const std::vector<ObjectiveVector>& from, const std::vector<ObjectiveVector>& to) {
                double s = 0.0;
                for (const auto& f : from) {
                    double best = 1e300;
                    for (const auto& g : to) best = std::min(best, oracle::euclid(norm(f), norm(g)));
                    s += best;
                }
                return s / static_cast<double>(from.size());
            };
            CHECK(c.gd() == doctest::Approx(mean_nearest(tb, ta)).epsilon(1e-12));
            CHECK(c.igd() == doctest::Approx(mean_nearest(ta, tb)).epsilon(1e-12));
        }
    }
}
