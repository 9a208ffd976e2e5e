#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flash/error.hpp"
#include "flash/flash.hpp"
#include "flash/metrics.hpp"
#include "flash/synthetic.hpp"
#include "oracles.hpp"

#include <chrono>
#include <set>

using namespace flash;

namespace {

std::vector<RowId> rows_of(const Dataset& d) {
    std::vector<RowId> r(d.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
    return r;
}

Dataset flat(std::size_t n_options) {
    std::vector<OptionSchema> opts;
    for (std::size_t j = 0; j < n_options; ++j) opts.push_back({"o" + std::to_string(j), OptionKind::Boolean, 0, 1});
    std::vector<Configuration> x;
    std::vector<std::vector<double>> y;
    for (std::size_t r = 0; r < (std::size_t{1} << n_options); ++r) {
        Configuration c(n_options);
        for (std::size_t j = 0; j < n_options; ++j) c[j] = static_cast<double>((r >> j) & 1U);
        x.push_back(c);
        y.push_back({7.0});
    }
    return Dataset(opts, {{"perf", Direction::Minimize}}, x, y);
}

} // namespace

TEST_CASE("exhaustive budget finds the optimum") {
    for (auto kind : {SyntheticKind::SinglePeak, SyntheticKind::Interaction}) {
        const auto s = generate_synthetic(kind, 6, 9);
        TableOracle o(s.dataset);
        const auto rows = rows_of(s.dataset);
        const auto run = flash_single(s.dataset.configs(), rows, o, {10, rows.size() - 10, 10, 4}, Direction::Minimize);
        CHECK(run.measurements_used == rows.size());
        CHECK(o.count() == rows.size());
        CHECK(rank_difference(s.dataset.objective_column(0), *run.best, Direction::Minimize) == 0);
    }
}

TEST_CASE("flat landscape uses exactly size + budget") {
    const auto d = flat(6);
    TableOracle o(d);
    const auto run = flash_single(d.configs(), rows_of(d), o, {30, 20, 10, 1}, Direction::Maximize);
    CHECK(run.measurements_used == 50);
    CHECK(d.objective_values(*run.best)[0] == 7.0);
}

TEST_CASE("trace invariants") {
    const auto s = generate_synthetic(SyntheticKind::Interaction, 8, 2);
    const auto rows = rows_of(s.dataset);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TableOracle o(s.dataset);
        const auto run = flash_single(s.dataset.configs(), rows, o, {20, 30, 10, seed}, Direction::Minimize);
        CHECK(run.measurements_used == 50);
        CHECK(run.evaluated.size() == o.count());
        std::set<RowId> seen;
        double best_so_far = std::numeric_limits<double>::infinity();
        std::size_t initial = 0;
        for (const auto& e : run.evaluated) {
            CHECK(seen.insert(e.row).second);
            CHECK(e.objectives == s.dataset.objective_values(e.row));
            const double next = std::min(best_so_far, e.objectives[0]);
            CHECK(next <= best_so_far);
            best_so_far = next;
            if (e.phase == Phase::Initial) ++initial;
        }
        CHECK(initial == 20);
        CHECK(s.dataset.objective_values(*run.best)[0] == best_so_far);

        TableOracle o2(s.dataset);
        const auto again = flash_single(s.dataset.configs(), rows, o2, {20, 30, 10, seed}, Direction::Minimize);
        REQUIRE(again.evaluated.size() == run.evaluated.size());
        for (std::size_t i = 0; i < run.evaluated.size(); ++i) CHECK(again.evaluated[i].row == run.evaluated[i].row);
    }
}

TEST_CASE("pool exhaustion and errors") {
    const auto s = generate_synthetic(SyntheticKind::SinglePeak, 4, 1);
    const auto rows = rows_of(s.dataset);
    TableOracle o(s.dataset);
    const auto run = flash_single(s.dataset.configs(), rows, o, {5, 100, 10, 0}, Direction::Minimize);
    CHECK(run.measurements_used == 16);
    CHECK(run.termination == Termination::PoolExhausted);
    TableOracle o2(s.dataset);
    CHECK_THROWS_AS(flash_single(s.dataset.configs(), rows, o2, {17, 1, 10, 0}, Direction::Minimize), ValidationError);
    CHECK_THROWS_AS(FlashParams({0, 1, 1, 0}).validate(), ValidationError);
    CHECK_THROWS_AS(FlashParams({1, 1, 0, 0}).validate(), ValidationError);
}

TEST_CASE("flash_multi") {
    const std::vector<Direction> dirs{Direction::Minimize, Direction::Minimize};
    SUBCASE("exhaustive budget recovers the true front") {
        std::vector<OptionSchema> opts{{"a", OptionKind::Integer, 0, 63}};
        std::vector<Configuration> x;
        std::vector<std::vector<double>> y;
        Rng rng(8);
        for (int i = 0; i < 64; ++i) {
            x.push_back({static_cast<double>(i)});
            y.push_back({static_cast<double>(rng.below(20)), static_cast<double>(rng.below(20))});
        }
        const Dataset d(opts, {{"f", Direction::Minimize}, {"g", Direction::Minimize}}, x, y);
        TableOracle o(d);
        const auto rows = rows_of(d);
        const auto run = flash_multi(d.configs(), rows, o, {10, 54, 10, 3}, dirs);
        std::set<RowId> got(run.front.begin(), run.front.end());
        std::set<RowId> want;
        for (auto i : oracle::pareto_front(y, dirs)) want.insert(i);
        CHECK(got == want);
    }
    SUBCASE("budget exactness and front validity") {
        const auto s = generate_synthetic(SyntheticKind::BiObjectiveTradeoff, 8, 0);
        TableOracle o(s.dataset);
        const auto run = flash_multi(s.dataset.configs(), rows_of(s.dataset), o, {30, 50, 10, 5}, dirs);
        CHECK(run.measurements_used == 80);
        std::size_t acquired = 0;
        for (const auto& e : run.evaluated) acquired += e.phase == Phase::Acquisition;
        CHECK(acquired == 50);
        for (RowId a : run.front) {
            for (RowId b : run.front) CHECK_FALSE(dominates(s.dataset.objective_values(b), s.dataset.objective_values(a), dirs));
        }
    }
    SUBCASE("single dominating point") {
        std::vector<OptionSchema> opts{{"a", OptionKind::Integer, 0, 9}};
        std::vector<Configuration> x;
        std::vector<std::vector<double>> y;
        for (int i = 0; i < 10; ++i) {
            x.push_back({static_cast<double>(i)});
            y.push_back(i == 4 ? std::vector<double>{0, 0} : std::vector<double>{10.0 + i, 20.0 - i});
        }
        const Dataset d(opts, {{"f", Direction::Minimize}, {"g", Direction::Minimize}}, x, y);
        TableOracle o(d);
        const auto run = flash_multi(d.configs(), rows_of(d), o, {10, 0, 10, 1}, dirs);
        CHECK(run.front == std::vector<RowId>{4});
    }
    SUBCASE("needs two objectives") {
        const auto s = generate_synthetic(SyntheticKind::SinglePeak, 4, 0);
        TableOracle o(s.dataset);
        const std::vector<Direction> one{Direction::Minimize};
        CHECK_THROWS_AS(flash_multi(s.dataset.configs(), rows_of(s.dataset), o, {5, 5, 10, 0}, one), ValidationError);
    }
}

TEST_CASE("bazza_select") {
    Rng rng(99);
    SUBCASE("straight-line recomputation") {
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = 1 + rng.below(12);
            const std::size_t m = 1 + rng.below(4);
            const std::size_t proj = 1 + rng.below(10);
            std::vector<Direction> dirs;
            for (std::size_t j = 0; j < m; ++j) dirs.push_back(rng.below(2) ? Direction::Maximize : Direction::Minimize);
            std::vector<ObjectiveVector> pred(n, ObjectiveVector(m));
            for (auto& p : pred) {
                for (auto& v : p) v = rng.uniform() * 10.0 - 5.0;
            }
            const std::uint64_t seed = rng.next();
            CHECK(bazza_select(pred, proj, dirs, seed) == oracle::bazza(pred, proj, dirs, seed));
        }
    }
    SUBCASE("5 candidates, 2 objectives, 3 projections") {
        const std::vector<ObjectiveVector> pred{{1, 5}, {2, 2}, {4, 1}, {3, 3}, {0, 6}};
        const std::vector<Direction> dirs{Direction::Maximize, Direction::Minimize};
        CHECK(bazza_select(pred, 3, dirs, 42) == oracle::bazza(pred, 3, dirs, 42));
    }
    SUBCASE("single objective collapses to argmax") {
        const std::vector<ObjectiveVector> pred{{3}, {9}, {1}, {9}};
        const std::vector<Direction> max{Direction::Maximize};
        const std::vector<Direction> min{Direction::Minimize};
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            CHECK(bazza_select(pred, 5, max, seed) == 1);
            CHECK(bazza_select(pred, 5, min, seed) == 2);
        }
    }
    SUBCASE("a weakly dominating vector always wins") {
        const std::vector<ObjectiveVector> pred{{1, 1}, {2, 3}, {2, 2}, {0, 3}};
        const std::vector<Direction> dirs{Direction::Maximize, Direction::Maximize};
        for (std::uint64_t seed = 0; seed < 100; ++seed) CHECK(bazza_select(pred, 10, dirs, seed) == 1);
    }
    SUBCASE("scaling the weights keeps the argmax") {
        // Recomputing with weights times c through the kernel gives the same choice.
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<ObjectiveVector> pred(8, ObjectiveVector(3));
            for (auto& p : pred) {
                for (auto& v : p) v = rng.uniform();
            }
            const auto w = bazza_weights(4, 3, static_cast<std::uint64_t>(trial));
            auto pick = [&](double c) {
                std::size_t best = 0;
                double best_s = -1e300;
                for (std::size_t i = 0; i < pred.size(); ++i) {
                    double s = 0.0;
                    for (std::size_t n = 0; n < 4; ++n) {
                        for (std::size_t j = 0; j < 3; ++j) s += c * w[n * 3 + j] * pred[i][j];
                    }
                    if (s > best_s) {
                        best_s = s;
                        best = i;
                    }
                }
                return best;
            };
            const std::vector<Direction> dirs(3, Direction::Maximize);
            const auto chosen = bazza_select(pred, 4, dirs, static_cast<std::uint64_t>(trial));
            CHECK(pick(1.0) == chosen);
            CHECK(pick(1000.0) == chosen);
            CHECK(pick(0.001) == chosen);
        }
    }
    SUBCASE("errors") {
        const std::vector<Direction> dirs{Direction::Maximize};
        CHECK_THROWS_AS(bazza_select({}, 3, dirs, 0), ValidationError);
        CHECK_THROWS_AS(bazza_select({{1.0}}, 0, dirs, 0), ValidationError);
        CHECK_THROWS_AS(bazza_select({{std::nan("")}}, 1, dirs, 0), ValidationError);
    }
}

TEST_CASE("bazza_select runs in linear time") {
    const std::vector<Direction> dirs{Direction::Maximize, Direction::Minimize, Direction::Maximize};
    Rng rng(1);
    auto make = [&](std::size_t n) {
        std::vector<ObjectiveVector> p(n, ObjectiveVector(3));
        for (auto& v : p) {
            for (auto& x : v) x = rng.uniform();
        }
        return p;
    };
    const auto small = make(200000);
    const auto large = make(400000);
    auto time = [&](const std::vector<ObjectiveVector>& p) {
        double best = 1e9;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            volatile auto pick = bazza_select(p, 10, dirs, 7);
            (void)pick;
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    const double t1 = time(small);
    const double t2 = time(large);
    // Twice the candidates should cost about twice the time; allow 3x.
    CHECK(t2 <= 3.0 * t1 + 1e-3);
}
