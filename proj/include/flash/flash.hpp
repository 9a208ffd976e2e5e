#pragma once

// FLASH: sequential model-based optimization with CART surrogates.
//
// A run measures `size` random candidates, then spends `budget` acquisition
// steps. Each step fits one regression tree per objective on everything
// measured so far, predicts every unmeasured candidate, and measures the one
// the acquisition function picks: the best prediction for one objective
// (Maximum Mean), Bazza for several. Acquired candidates leave the pool, so
// no configuration is measured twice.

#include "flash/cart.hpp"
#include "flash/config_space.hpp"
#include "flash/metrics.hpp"
#include "flash/run.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flash {

struct FlashParams {
    std::size_t size = 30;         // initial random sample
    std::size_t budget = 50;       // acquisition steps
    std::size_t n_projections = 10; // random weight vectors per Bazza call
    std::uint64_t seed = 0;

    void validate() const;
};

// `space` holds every configuration, indexed by RowId; `candidates` names
// the rows the optimizer may measure. Tie-breaks favour the earliest
// position in `candidates`. Single-objective runs optimize the first value
// the oracle reports.
OptimizationRun flash_single(std::span<const Configuration> space, std::span<const RowId> candidates,
                             MeasurementOracle& oracle, const FlashParams& params, Direction direction,
                             const CartParams& cart = {});

// Predictions are min-max normalized per objective over the current pool
// before Bazza weighs them; `front` is the non-dominated subset of the
// measured rows.
OptimizationRun flash_multi(std::span<const Configuration> space, std::span<const RowId> candidates,
                            MeasurementOracle& oracle, const FlashParams& params,
                            std::span<const Direction> directions, const CartParams& cart = {});

// Draws n_projections weight vectors with entries uniform in [0, 1), maps
// each predicted vector to larger-is-better (minimized objectives negated),
// scores candidate i as
//   mean_i = 1/N * sum_n sum_j V[n][j] * g[i][j]
// and returns the index of the highest score, lowest index on ties.
std::size_t bazza_select(const std::vector<ObjectiveVector>& predicted, std::size_t n_projections,
                         std::span<const Direction> directions, std::uint64_t seed);

// The N x m weight matrix bazza_select uses for `seed`, row-major.
std::vector<double> bazza_weights(std::size_t n_projections, std::size_t objectives, std::uint64_t seed);

} // namespace flash
