#include "flash/baselines.hpp"

#include "flash/error.hpp"
#include "flash/kernels.hpp"
#include "flash/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace flash {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void check_rows(std::span<const Configuration> space, std::span<const RowId> rows) {
    for (RowId r : rows) {
        if (r >= space.size()) throw ValidationError("row " + std::to_string(r) + " is outside the configuration space");
    }
}

} // namespace

void LivesParams::validate() const {
    if (lives < 1) throw ValidationError("lives must be >= 1");
    if (step < 1) throw ValidationError("step must be >= 1");
}

ModelRun lives_sampling(const char* method, std::span<const Configuration> space,
                        std::span<const RowId> train_pool, std::span<const RowId> holdout,
                        std::span<const RowId> validation, MeasurementOracle& oracle, const LivesParams& params,
                        const CartParams& cart, Direction direction, const HoldoutScorer& scorer) {
    params.validate();
    cart.validate();
    if (train_pool.empty()) throw ValidationError("empty training pool");
    if (holdout.empty()) throw ValidationError("empty holdout set");
    if (validation.empty()) throw ValidationError("empty validation pool");
    check_rows(space, train_pool);
    check_rows(space, holdout);
    check_rows(space, validation);

    const auto started = Clock::now();
    OptimizationRun run;
    run.method = method;

    std::vector<Configuration> holdout_x;
    std::vector<double> holdout_y;
    for (auto r : holdout) {
        auto v = oracle.measure(space[r]);
        holdout_x.push_back(space[r]);
        holdout_y.push_back(v.at(0));
        run.evaluated.push_back({r, Phase::Holdout, std::move(v)});
    }

    Rng rng(params.seed);
    std::vector<RowId> order(train_pool.begin(), train_pool.end());
    rng.shuffle(order);

    std::vector<Configuration> train_x;
    std::vector<double> train_y;
    std::optional<RegressionTree> model;
    double last_score = -std::numeric_limits<double>::infinity();
    std::size_t lives = params.lives;
    std::size_t next = 0;

    run.termination = Termination::PoolExhausted;
    while (next < order.size()) {
        for (std::size_t s = 0; s < params.step && next < order.size(); ++s, ++next) {
            const RowId r = params.with_replacement ? train_pool[rng.below(train_pool.size())] : order[next];
            auto v = oracle.measure(space[r]);
            train_x.push_back(space[r]);
            train_y.push_back(v.at(0));
            run.evaluated.push_back({r, Phase::Training, std::move(v)});
        }
        model = RegressionTree::fit(train_x, train_y, cart);
        const double score = scorer(model->predict_batch(holdout_x), holdout_y);
        if (score <= last_score) {
            --lives;
            ++run.lives_lost;
        }
        last_score = score;
        if (lives == 0) {
            run.termination = Termination::LivesExhausted;
            break;
        }
    }

    std::vector<Configuration> validation_x;
    for (auto r : validation) validation_x.push_back(space[r]);
    const auto predicted = model->predict_batch(validation_x);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < predicted.size(); ++i) {
        if (better(predicted[i], predicted[pick], direction)) pick = i;
    }
    run.evaluated.push_back({validation[pick], Phase::Validation, oracle.measure(space[validation[pick]])});
    run.best = validation[pick];
    run.front = {validation[pick]};
    run.measurements_used = run.evaluated.size();
    run.wall_time = seconds_since(started);
    return {std::move(*model), std::move(run)};
}

ModelRun progressive_sampling(std::span<const Configuration> space, std::span<const RowId> train_pool,
                              std::span<const RowId> holdout, std::span<const RowId> validation,
                              MeasurementOracle& oracle, const LivesParams& params, const CartParams& cart,
                              Direction direction) {
    return lives_sampling("progressive", space, train_pool, holdout, validation, oracle, params, cart, direction,
                          [](std::span<const double> p, std::span<const double> a) { return -mmre(p, a); });
}

ModelRun rank_based(std::span<const Configuration> space, std::span<const RowId> train_pool,
                    std::span<const RowId> holdout, std::span<const RowId> validation, MeasurementOracle& oracle,
                    const LivesParams& params, const CartParams& cart, Direction direction) {
    return lives_sampling("rank", space, train_pool, holdout, validation, oracle, params, cart, direction,
                          [](std::span<const double> p, std::span<const double> a) {
                              return -mean_rank_difference(p, a);
                          });
}

void EpalParams::validate() const {
    if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
    if (init_size < 1) throw ValidationError("init_size must be >= 1");
    if (max_wall_time && !(*max_wall_time > 0.0)) throw ValidationError("max_wall_time must be positive");
    for (double l : length_scale_grid) {
        if (!(l > 0.0)) throw ValidationError("length scales must be positive");
    }
}

std::vector<bool> epal_discard(const std::vector<ObjectiveVector>& mu, const std::vector<ObjectiveVector>& sigma,
                               const std::vector<ObjectiveVector>& evaluated, double epsilon,
                               std::span<const Direction> directions) {
    const std::size_t m = directions.size();
    const std::size_t n = mu.size();
    if (sigma.size() != n) throw ValidationError("mu and sigma differ in length");
    auto mapped = [&](double v, std::size_t j) { return directions[j] == Direction::Minimize ? -v : v; };

    // Bounds in larger-is-better space, row-major.
    std::vector<double> optimistic(n * m);
    std::vector<double> pessimistic(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i].size() != m || sigma[i].size() != m) throw ValidationError("prediction shape mismatch");
        for (std::size_t j = 0; j < m; ++j) {
            optimistic[i * m + j] = mapped(mu[i][j], j) + sigma[i][j];
            pessimistic[i * m + j] = mapped(mu[i][j], j) - sigma[i][j] + epsilon;
        }
    }
    std::vector<double> measured;
    for (const auto& e : evaluated) {
        if (e.size() != m) throw ValidationError("evaluated vector shape mismatch");
        for (std::size_t j = 0; j < m; ++j) measured.push_back(mapped(e[j], j) + epsilon);
    }

    std::vector<bool> discard(n, false);
    for (std::size_t a = 0; a < n; ++a) {
        const double* opt = optimistic.data() + a * m;
        for (std::size_t b = 0; b < evaluated.size() && !discard[a]; ++b) {
            if (kernels::dominates_mapped(measured.data() + b * m, opt, m)) discard[a] = true;
        }
        for (std::size_t b = 0; b < n && !discard[a]; ++b) {
            if (b != a && kernels::dominates_mapped(pessimistic.data() + b * m, opt, m)) discard[a] = true;
        }
    }
    return discard;
}

OptimizationRun epal(std::span<const Configuration> space, std::span<const RowId> candidates,
                     MeasurementOracle& oracle, const EpalParams& params, std::span<const Direction> directions) {
    params.validate();
    const std::size_t m = directions.size();
    if (m < 2) throw ValidationError("ePAL needs at least two objectives");
    if (oracle.objective_count() != m) throw ValidationError("oracle objective count does not match the directions");
    if (candidates.size() < params.init_size) {
        throw ValidationError("candidate pool (" + std::to_string(candidates.size()) +
                              ") is smaller than init_size (" + std::to_string(params.init_size) + ")");
    }
    check_rows(space, candidates);

    const auto started = Clock::now();
    OptimizationRun run;
    run.method = "epal";

    std::vector<Configuration> candidate_x;
    for (auto r : candidates) candidate_x.push_back(space[r]);
    const InputScaler scale(candidate_x);

    Rng rng(params.seed);
    std::vector<bool> taken(candidates.size(), false);
    for (auto pos : rng.sample_positions(candidates.size(), params.init_size)) {
        taken[pos] = true;
        run.evaluated.push_back({candidates[pos], Phase::Initial, oracle.measure(space[candidates[pos]])});
    }

    // Objective scaling fixed by the initial sample.
    std::vector<double> lo(m, std::numeric_limits<double>::infinity());
    std::vector<double> range(m, -std::numeric_limits<double>::infinity());
    for (const auto& e : run.evaluated) {
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] = std::min(lo[j], e.objectives[j]);
            range[j] = std::max(range[j], e.objectives[j]);
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        range[j] -= lo[j];
        if (!(range[j] > 0.0)) range[j] = 1.0;
    }
    auto normalize = [&](const std::vector<double>& y) {
        ObjectiveVector out(m);
        for (std::size_t j = 0; j < m; ++j) out[j] = (y[j] - lo[j]) / range[j];
        return out;
    };

    std::vector<RowId> pool;
    std::vector<std::vector<double>> pool_x;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!taken[i]) {
            pool.push_back(candidates[i]);
            pool_x.push_back(scale(space[candidates[i]]));
        }
    }

    run.termination = Termination::CandidatesResolved;
    while (!pool.empty()) {
        if (params.max_wall_time && seconds_since(started) > *params.max_wall_time) {
            run.termination = Termination::WallTimeExceeded;
            break;
        }
        std::vector<std::vector<double>> train_x;
        std::vector<ObjectiveVector> train_y;
        for (const auto& e : run.evaluated) {
            train_x.push_back(scale(space[e.row]));
            train_y.push_back(normalize(e.objectives));
        }

        std::vector<ObjectiveVector> mu(pool.size(), ObjectiveVector(m));
        std::vector<ObjectiveVector> sd(pool.size(), ObjectiveVector(m));
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> y;
            for (const auto& t : train_y) y.push_back(t[j]);
            const auto gp = fit_gp_with_length_search(train_x, y, params.kernel, params.length_scale_grid);
            const auto pred = gp.predict_batch(pool_x);
            for (std::size_t i = 0; i < pool.size(); ++i) {
                mu[i][j] = pred[i].mean;
                sd[i][j] = pred[i].sd;
            }
        }

        const auto discard = epal_discard(mu, sd, train_y, params.epsilon, directions);
        std::vector<RowId> kept;
        std::vector<std::vector<double>> kept_x;
        std::vector<double> uncertainty;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (discard[i]) continue;
            kept.push_back(pool[i]);
            kept_x.push_back(std::move(pool_x[i]));
            double sq = 0.0;
            for (double s : sd[i]) sq += s * s;
            uncertainty.push_back(std::sqrt(sq));
        }
        pool = std::move(kept);
        pool_x = std::move(kept_x);
        if (pool.empty()) break;

        std::size_t pick = 0;
        for (std::size_t i = 1; i < uncertainty.size(); ++i) {
            if (uncertainty[i] > uncertainty[pick]) pick = i;
        }
        run.evaluated.push_back({pool[pick], Phase::Acquisition, oracle.measure(space[pool[pick]])});
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        pool_x.erase(pool_x.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    run.front = evaluated_front(run, directions);
    run.measurements_used = run.evaluated.size();
    run.wall_time = seconds_since(started);
    return run;
}

OptimizationRun random_search(std::span<const Configuration> space, std::span<const RowId> candidates,
                              MeasurementOracle& oracle, std::size_t n, std::span<const Direction> directions,
                              std::uint64_t seed) {
    if (n > candidates.size()) {
        throw ValidationError("random search budget (" + std::to_string(n) + ") exceeds the candidate pool (" +
                              std::to_string(candidates.size()) + ")");
    }
    if (n == 0) throw ValidationError("random search needs a budget of at least 1");
    if (directions.empty()) throw ValidationError("random search needs at least one objective");
    check_rows(space, candidates);

    const auto started = Clock::now();
    OptimizationRun run;
    run.method = "random";
    Rng rng(seed);
    for (auto pos : rng.sample_positions(candidates.size(), n)) {
        const RowId r = candidates[pos];
        run.evaluated.push_back({r, Phase::Initial, oracle.measure(space[r])});
        if (run.evaluated.back().objectives.size() < directions.size()) {
            throw MeasurementError("oracle returned too few objectives");
        }
    }
    if (directions.size() == 1) {
        run.best = best_evaluated(run, directions.front());
        run.front = {*run.best};
    } else {
        run.front = evaluated_front(run, directions);
    }
    run.termination = Termination::BudgetSpent;
    run.measurements_used = run.evaluated.size();
    run.wall_time = seconds_since(started);
    return run;
}

} // namespace flash
