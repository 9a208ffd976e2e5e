#include "flash/flash.hpp"

#include "flash/error.hpp"
#include "flash/kernels.hpp"
#include "flash/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace flash {

namespace {

using Clock = std::chrono::steady_clock;

// Picks a pool position from per-objective predictions (one column per
// objective, one entry per pool member).
using Acquisition = std::function<std::size_t(const std::vector<std::vector<double>>& predictions)>;

void check_candidates(std::span<const Configuration> space, std::span<const RowId> candidates,
                      std::size_t size) {
    if (candidates.size() < size) {
        throw ValidationError("candidate pool (" + std::to_string(candidates.size()) +
                              ") is smaller than the initial sample size (" + std::to_string(size) + ")");
    }
    for (auto r : candidates) {
        if (r >= space.size()) throw ValidationError("candidate row out of range");
    }
}

OptimizationRun smbo_loop(const char* method, std::span<const Configuration> space,
                          std::span<const RowId> candidates, MeasurementOracle& oracle, const FlashParams& params,
                          std::size_t n_objectives, const CartParams& cart, Rng& rng, const Acquisition& acquire) {
    const auto started = Clock::now();
    OptimizationRun run;
    run.method = method;

    auto measure = [&](RowId row) {
        auto values = oracle.measure(space[row]);
        if (values.size() < n_objectives) {
            throw MeasurementError("oracle returned " + std::to_string(values.size()) + " objectives, expected " +
                                   std::to_string(n_objectives));
        }
        return values;
    };

    std::vector<RowId> pool(candidates.begin(), candidates.end());
    std::vector<bool> taken(pool.size(), false);
    for (auto pos : rng.sample_positions(pool.size(), params.size)) {
        taken[pos] = true;
        run.evaluated.push_back({pool[pos], Phase::Initial, measure(pool[pos])});
    }
    std::vector<RowId> remaining;
    std::vector<Configuration> remaining_configs;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!taken[i]) {
            remaining.push_back(pool[i]);
            remaining_configs.push_back(space[pool[i]]);
        }
    }

    std::vector<Configuration> train_x;
    for (const auto& e : run.evaluated) train_x.push_back(space[e.row]);

    run.termination = Termination::BudgetSpent;
    for (std::size_t step = 0; step < params.budget; ++step) {
        if (remaining.empty()) {
            run.termination = Termination::PoolExhausted;
            break;
        }
        std::vector<std::vector<double>> predictions(n_objectives);
        for (std::size_t k = 0; k < n_objectives; ++k) {
            std::vector<double> y;
            y.reserve(run.evaluated.size());
            for (const auto& e : run.evaluated) y.push_back(e.objectives[k]);
            const auto tree = RegressionTree::fit(train_x, y, cart);
            predictions[k] = tree.predict_batch(remaining_configs);
        }
        const std::size_t pick = acquire(predictions);
        const RowId row = remaining[pick];
        run.evaluated.push_back({row, Phase::Acquisition, measure(row)});
        train_x.push_back(space[row]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        remaining_configs.erase(remaining_configs.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    run.measurements_used = run.evaluated.size();
    run.wall_time = std::chrono::duration<double>(Clock::now() - started).count();
    return run;
}

} // namespace

void FlashParams::validate() const {
    if (size < 1) throw ValidationError("size must be >= 1");
    if (n_projections < 1) throw ValidationError("n_projections must be >= 1");
}

OptimizationRun flash_single(std::span<const Configuration> space, std::span<const RowId> candidates,
                             MeasurementOracle& oracle, const FlashParams& params, Direction direction,
                             const CartParams& cart) {
    params.validate();
    cart.validate();
    check_candidates(space, candidates, params.size);
    if (oracle.objective_count() < 1) throw ValidationError("oracle reports no objectives");

    Rng rng(params.seed);
    // Only objective 0 is modelled; the remaining values are kept in the trace.
    auto run = smbo_loop("flash", space, candidates, oracle, params, 1, cart, rng,
                         [direction](const std::vector<std::vector<double>>& p) {
                             const auto& pred = p.front();
                             std::size_t best = 0;
                             for (std::size_t i = 1; i < pred.size(); ++i) {
                                 if (better(pred[i], pred[best], direction)) best = i;
                             }
                             return best;
                         });
    run.best = best_evaluated(run, direction);
    run.front = {*run.best};
    return run;
}

OptimizationRun flash_multi(std::span<const Configuration> space, std::span<const RowId> candidates,
                            MeasurementOracle& oracle, const FlashParams& params,
                            std::span<const Direction> directions, const CartParams& cart) {
    params.validate();
    cart.validate();
    check_candidates(space, candidates, params.size);
    if (directions.size() < 2) throw ValidationError("flash_multi needs at least two objectives");
    if (oracle.objective_count() != directions.size()) {
        throw ValidationError("oracle objective count does not match the directions");
    }

    Rng rng(params.seed);
    const std::vector<Direction> dirs(directions.begin(), directions.end());
    auto run = smbo_loop("flash", space, candidates, oracle, params, dirs.size(), cart, rng,
                         [&](const std::vector<std::vector<double>>& p) {
                             const std::size_t n = p.front().size();
                             std::vector<ObjectiveVector> scaled(n, ObjectiveVector(p.size()));
                             for (std::size_t k = 0; k < p.size(); ++k) {
                                 const auto [lo, hi] = std::minmax_element(p[k].begin(), p[k].end());
                                 const double range = *hi - *lo;
                                 for (std::size_t i = 0; i < n; ++i) {
                                     scaled[i][k] = range > 0.0 ? (p[k][i] - *lo) / range : 0.0;
                                 }
                             }
                             return bazza_select(scaled, params.n_projections, dirs, rng.next());
                         });
    run.front = evaluated_front(run, dirs);
    return run;
}

std::vector<double> bazza_weights(std::size_t n_projections, std::size_t objectives, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w(n_projections * objectives);
    for (auto& v : w) v = rng.uniform();
    return w;
}

std::size_t bazza_select(const std::vector<ObjectiveVector>& predicted, std::size_t n_projections,
                         std::span<const Direction> directions, std::uint64_t seed) {
    if (predicted.empty()) throw ValidationError("bazza_select needs at least one candidate");
    if (n_projections < 1) throw ValidationError("n_projections must be >= 1");
    const std::size_t m = directions.size();
    if (m == 0) throw ValidationError("bazza_select needs at least one objective");

    std::vector<double> mapped;
    mapped.reserve(predicted.size() * m);
    for (const auto& p : predicted) {
        if (p.size() != m) throw ValidationError("predicted vector has the wrong number of objectives");
        for (std::size_t j = 0; j < m; ++j) {
            if (!std::isfinite(p[j])) throw ValidationError("non-finite prediction");
            mapped.push_back(directions[j] == Direction::Minimize ? -p[j] : p[j]);
        }
    }
    const auto weights = bazza_weights(n_projections, m, seed);
    std::vector<double> score(predicted.size());
    kernels::parallel::weighted_means(weights, mapped, m, score);

    std::size_t best = 0;
    for (std::size_t i = 1; i < score.size(); ++i) {
        if (score[i] > score[best]) best = i;
    }
    return best;
}

} // namespace flash
