#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flash/baselines.hpp"
#include "flash/error.hpp"
#include "flash/synthetic.hpp"
#include "oracles.hpp"

#include <set>

using namespace flash;

namespace {

Dataset flat_dataset(std::size_t n) {
    std::vector<Configuration> x;
    std::vector<std::vector<double>> y;
    for (std::size_t i = 0; i < n; ++i) {
        x.push_back({static_cast<double>(i)});
        y.push_back({5.0});
    }
    return Dataset({{"a", OptionKind::Integer, 0, static_cast<std::int64_t>(n)}}, {{"perf", Direction::Minimize}}, x, y);
}

std::vector<RowId> all_rows(const Dataset& d) {
    std::vector<RowId> r(d.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
    return r;
}

std::size_t count_phase(const OptimizationRun& run, Phase p) {
    std::size_t n = 0;
    for (const auto& e : run.evaluated) n += e.phase == p;
    return n;
}

} // namespace

TEST_CASE("flat landscape costs a life on every step after the first") {
    const auto d = flat_dataset(100);
    const auto parts = split(d, {0.4, 0.2, 0.4, 3});
    for (auto* fn : {&progressive_sampling, &rank_based}) {
        TableOracle o(d);
        const auto mr = (*fn)(d.configs(), parts.train_pool, parts.holdout, parts.validation, o, {}, {},
                              Direction::Minimize);
        CHECK(count_phase(mr.run, Phase::Training) == 1 + 3);
        CHECK(count_phase(mr.run, Phase::Holdout) == parts.holdout.size());
        CHECK(count_phase(mr.run, Phase::Validation) == 1);
        CHECK(mr.run.lives_lost == 3);
        CHECK(mr.run.termination == Termination::LivesExhausted);
        CHECK(mr.run.measurements_used == o.count());
        CHECK(o.count() == parts.holdout.size() + 4 + 1);
    }
}

TEST_CASE("an always-improving scorer consumes the whole pool") {
    const auto d = flat_dataset(50);
    const auto parts = split(d, {0.4, 0.2, 0.4, 1});
    double score = 0.0;
    TableOracle o(d);
    LivesParams p;
    p.lives = 1;
    const auto mr = lives_sampling("stub", d.configs(), parts.train_pool, parts.holdout, parts.validation, o, p, {},
                                   Direction::Minimize,
                                   [&](std::span<const double>, std::span<const double>) { return score += 1.0; });
    CHECK(count_phase(mr.run, Phase::Training) == parts.train_pool.size());
    CHECK(mr.run.lives_lost == 0);
    CHECK(mr.run.termination == Termination::PoolExhausted);
}

TEST_CASE("lives accounting on synthetic data") {
    const auto s = generate_synthetic(SyntheticKind::Interaction, 9, 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto parts = split(s.dataset, {0.4, 0.2, 0.4, seed});
        for (bool repl : {false, true}) {
            LivesParams p;
            p.seed = seed;
            p.with_replacement = repl;
            TableOracle o(s.dataset);
            const auto mr = rank_based(s.dataset.configs(), parts.train_pool, parts.holdout, parts.validation, o, p, {},
                                       Direction::Minimize);
            if (mr.run.termination == Termination::LivesExhausted) {
                CHECK(mr.run.lives_lost == p.lives);
            } else {
                CHECK(mr.run.lives_lost < p.lives);
            }
            CHECK(mr.run.measurements_used == o.count());
            const std::set<RowId> validation(parts.validation.begin(), parts.validation.end());
            CHECK(validation.count(*mr.run.best) == 1);
            if (!repl) {
                std::set<RowId> training;
                for (const auto& e : mr.run.evaluated) {
                    if (e.phase == Phase::Training) CHECK(training.insert(e.row).second);
                }
            }
        }
    }
}

TEST_CASE("lives-based errors") {
    const auto d = flat_dataset(10);
    TableOracle o(d);
    const std::vector<RowId> some{0, 1};
    const std::vector<RowId> none;
    CHECK_THROWS_AS(progressive_sampling(d.configs(), none, some, some, o, {}, {}, Direction::Minimize), ValidationError);
    CHECK_THROWS_AS(progressive_sampling(d.configs(), some, none, some, o, {}, {}, Direction::Minimize), ValidationError);
    CHECK_THROWS_AS(LivesParams({0, 1, false, 0}).validate(), ValidationError);
}

TEST_CASE("ePAL discard rule") {
    const std::vector<Direction> mm{Direction::Minimize, Direction::Minimize};
    SUBCASE("epsilon 0, one candidate dominated pessimistically") {
        const std::vector<ObjectiveVector> mu{{1, 1}, {3, 3}};
        const std::vector<ObjectiveVector> sd{{0.5, 0.5}, {0.5, 0.5}};
        // b = 0 pessimistic (1.5, 1.5) beats a = 1 optimistic (2.5, 2.5).
        CHECK(epal_discard(mu, sd, {}, 0.0, mm) == std::vector<bool>{false, true});
    }
    SUBCASE("overlapping intervals keep both") {
        const std::vector<ObjectiveVector> mu{{1, 1}, {2, 2}};
        const std::vector<ObjectiveVector> sd{{1, 1}, {1, 1}};
        CHECK(epal_discard(mu, sd, {}, 0.0, mm) == std::vector<bool>{false, false});
    }
    SUBCASE("evaluated points act with zero uncertainty") {
        const std::vector<ObjectiveVector> mu{{5, 5}};
        const std::vector<ObjectiveVector> sd{{0.1, 0.1}};
        CHECK(epal_discard(mu, sd, {{1, 1}}, 0.0, mm) == std::vector<bool>{true});
        CHECK(epal_discard(mu, sd, {{9, 1}}, 0.0, mm) == std::vector<bool>{false});
    }
    SUBCASE("huge epsilon discards everything dominated after the shift") {
        const std::vector<ObjectiveVector> mu{{0.1, 0.9}, {0.5, 0.5}, {0.9, 0.1}};
        const std::vector<ObjectiveVector> sd(3, ObjectiveVector{0.2, 0.2});
        const auto d = epal_discard(mu, sd, {{0.5, 0.5}}, 1e6, mm);
        CHECK(std::count(d.begin(), d.end(), true) == 3);
    }
    SUBCASE("soundness: with sigma 0 and epsilon 0 no front member is discarded") {
        Rng rng(12);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + rng.below(15);
            const std::size_t ne = rng.below(5);
            std::vector<ObjectiveVector> mu(n, ObjectiveVector(2));
            std::vector<ObjectiveVector> ev(ne, ObjectiveVector(2));
            for (auto* set : {&mu, &ev}) {
                for (auto& v : *set) {
                    for (auto& x : v) x = static_cast<double>(rng.below(6));
                }
            }
            const std::vector<ObjectiveVector> sd(n, ObjectiveVector(2, 0.0));
            const auto discard = epal_discard(mu, sd, ev, 0.0, mm);
            auto all = mu;
            all.insert(all.end(), ev.begin(), ev.end());
            const auto front = oracle::pareto_front(all, mm);
            for (auto i : front) {
                if (i < n) CHECK_FALSE(discard[i]);
            }
        }
    }
}

TEST_CASE("ePAL runs") {
    const auto s = generate_synthetic(SyntheticKind::BiObjectiveTradeoff, 7, 0);
    const std::vector<Direction> dirs{Direction::Minimize, Direction::Minimize};
    std::vector<RowId> rows(s.dataset.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;

    SUBCASE("huge epsilon stops right after the initial sample") {
        TableOracle o(s.dataset);
        EpalParams p;
        p.epsilon = 1e6;
        const auto run = epal(s.dataset.configs(), rows, o, p, dirs);
        CHECK(run.measurements_used == p.init_size);
        CHECK(run.termination == Termination::CandidatesResolved);
    }
    SUBCASE("distinct rows, valid front, deterministic") {
        EpalParams p;
        p.epsilon = 0.1;
        p.seed = 4;
        TableOracle o(s.dataset);
        const auto run = epal(s.dataset.configs(), rows, o, p, dirs);
        CHECK(run.measurements_used == o.count());
        std::set<RowId> seen;
        for (const auto& e : run.evaluated) CHECK(seen.insert(e.row).second);
        for (RowId a : run.front) {
            for (RowId b : run.front) CHECK_FALSE(dominates(s.dataset.objective_values(b), s.dataset.objective_values(a), dirs));
        }
        TableOracle o2(s.dataset);
        const auto again = epal(s.dataset.configs(), rows, o2, p, dirs);
        CHECK(again.measurements_used == run.measurements_used);
        CHECK(again.front == run.front);
    }
    SUBCASE("wall-time abort keeps partial results") {
        TableOracle o(s.dataset);
        EpalParams p;
        p.epsilon = 0.0;
        p.max_wall_time = 1e-9;
        const auto run = epal(s.dataset.configs(), rows, o, p, dirs);
        CHECK(run.termination == Termination::WallTimeExceeded);
        CHECK(run.measurements_used == p.init_size);
        CHECK_FALSE(run.front.empty());
    }
    SUBCASE("errors") {
        TableOracle o(s.dataset);
        EpalParams p;
        p.init_size = 1000;
        CHECK_THROWS_AS(epal(s.dataset.configs(), rows, o, p, dirs), ValidationError);
        const std::vector<Direction> one{Direction::Minimize};
        CHECK_THROWS_AS(epal(s.dataset.configs(), rows, o, {}, one), ValidationError);
        EpalParams neg;
        neg.epsilon = -1.0;
        CHECK_THROWS_AS(neg.validate(), ValidationError);
    }
}

TEST_CASE("random search") {
    const auto s = generate_synthetic(SyntheticKind::SinglePeak, 6, 3);
    std::vector<RowId> rows(s.dataset.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const std::vector<Direction> dirs{Direction::Minimize};
    const auto column = s.dataset.objective_column(0);

    TableOracle all(s.dataset);
    const auto full = random_search(s.dataset.configs(), rows, all, rows.size(), dirs, 1);
    CHECK(rank_difference(column, *full.best, Direction::Minimize) == 0);

    TableOracle one(s.dataset);
    const auto single = random_search(s.dataset.configs(), rows, one, 1, dirs, 1);
    REQUIRE(single.evaluated.size() == 1);
    CHECK(*single.best == single.evaluated.front().row);

    TableOracle a(s.dataset);
    TableOracle b(s.dataset);
    const auto r1 = random_search(s.dataset.configs(), rows, a, 20, dirs, 77);
    const auto r2 = random_search(s.dataset.configs(), rows, b, 20, dirs, 77);
    REQUIRE(r1.evaluated.size() == r2.evaluated.size());
    for (std::size_t i = 0; i < r1.evaluated.size(); ++i) CHECK(r1.evaluated[i].row == r2.evaluated[i].row);
    CHECK(*r1.best == *r2.best);

    TableOracle c(s.dataset);
    CHECK_THROWS_AS(random_search(s.dataset.configs(), rows, c, rows.size() + 1, dirs, 0), ValidationError);
}
