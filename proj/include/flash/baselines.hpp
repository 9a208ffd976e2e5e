#pragma once

// Optimizers FLASH is compared against.
//
// Progressive sampling and the rank-based method grow a CART model one
// random training configuration at a time and score it on a pre-measured
// holdout set; both stop once `lives` iterations failed to improve the
// score, then measure the validation configuration the final model ranks
// best. ePAL is a GP-based SMBO that discards candidates which are
// epsilon-dominated with high probability and measures the most uncertain
// survivor. Random search is the control.

#include "flash/cart.hpp"
#include "flash/config_space.hpp"
#include "flash/gp.hpp"
#include "flash/metrics.hpp"
#include "flash/run.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace flash {

struct LivesParams {
    std::size_t lives = 3;
    std::size_t step = 1;          // configurations added per iteration
    bool with_replacement = false; // draw training rows with replacement
    std::uint64_t seed = 0;

    void validate() const;
};

// Holdout score of a model, higher is better.
using HoldoutScorer = std::function<double(std::span<const double> predicted, std::span<const double> actual)>;

struct ModelRun {
    RegressionTree model;
    OptimizationRun run;
};

// Shared loop of the two lives-based methods. The holdout is measured
// once up front and charged to the run. The previous score starts at minus
// infinity, so the first model never costs a life; afterwards any score
// <= the previous one does. Training rows are taken from the shuffled pool
// (or drawn uniformly with replacement), `step` per iteration.
ModelRun lives_sampling(const char* method, std::span<const Configuration> space,
                        std::span<const RowId> train_pool, std::span<const RowId> holdout,
                        std::span<const RowId> validation, MeasurementOracle& oracle, const LivesParams& params,
                        const CartParams& cart, Direction direction, const HoldoutScorer& scorer);

// Scores models by -MMRE on the holdout.
ModelRun progressive_sampling(std::span<const Configuration> space, std::span<const RowId> train_pool,
                              std::span<const RowId> holdout, std::span<const RowId> validation,
                              MeasurementOracle& oracle, const LivesParams& params, const CartParams& cart,
                              Direction direction);

// Scores models by minus the mean rank difference on the holdout.
ModelRun rank_based(std::span<const Configuration> space, std::span<const RowId> train_pool,
                    std::span<const RowId> holdout, std::span<const RowId> validation, MeasurementOracle& oracle,
                    const LivesParams& params, const CartParams& cart, Direction direction);

struct EpalParams {
    double epsilon = 0.01;
    std::size_t init_size = 20;
    std::optional<double> max_wall_time; // seconds
    GpKernel kernel{};
    // Length scales tried by log-marginal-likelihood selection at every
    // refit; empty keeps kernel.length_scale fixed.
    std::vector<double> length_scale_grid{0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::uint64_t seed = 0;

    void validate() const;
};

// Discard rule on larger-is-better values. Candidate a is discarded when
// some b, either another candidate or an evaluated point (sigma 0), has a
// pessimistic bound mu_b - sigma_b that, raised by epsilon, dominates a's
// optimistic bound mu_a + sigma_a. For minimized objectives in the original
// units these bounds are mu + sigma and mu - sigma respectively.
std::vector<bool> epal_discard(const std::vector<ObjectiveVector>& mu, const std::vector<ObjectiveVector>& sigma,
                               const std::vector<ObjectiveVector>& evaluated, double epsilon,
                               std::span<const Direction> directions);

// Objectives are min-max scaled by the ranges seen in the initial sample so
// that epsilon is relative to a unit range. Inputs are scaled over the
// candidate set. Stops when every candidate is measured or discarded, or
// with partial results at max_wall_time.
OptimizationRun epal(std::span<const Configuration> space, std::span<const RowId> candidates,
                     MeasurementOracle& oracle, const EpalParams& params, std::span<const Direction> directions);

// Measures n distinct uniformly drawn candidates. `best` is set for a single
// direction, `front` always.
OptimizationRun random_search(std::span<const Configuration> space, std::span<const RowId> candidates,
                              MeasurementOracle& oracle, std::size_t n, std::span<const Direction> directions,
                              std::uint64_t seed);

} // namespace flash
