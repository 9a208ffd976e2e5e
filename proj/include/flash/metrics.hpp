#pragma once

// Evaluation measures: model accuracy (MMRE, mean rank difference), the
// rank difference of a returned configuration, binary dominance, Pareto
// front extraction, and the GD / IGD front indicators.

#include "flash/config_space.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace flash {

using ObjectiveVector = std::vector<double>;

// Mean magnitude of relative error, in percent:
//   100/n * sum |predicted_i - actual_i| / actual_i
// The denominator is the actual value itself, so actuals must be positive;
// zero or negative actuals throw ValidationError.
double mmre(std::span<const double> predicted, std::span<const double> actual);

// Ascending 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Mean over i of |rank(actual_i) - rank(predicted_i)| using average ranks.
double mean_rank_difference(std::span<const double> predicted, std::span<const double> actual);

// 1-based rank of values[index] where rank 1 is the best value under `d`;
// tied values all receive the smallest rank among them.
std::size_t rank_of(std::span<const double> values, std::size_t index, Direction d);

// |rank(actual best) - rank(chosen)| over all values. Since the actual best
// has rank 1 this is rank_of(chosen) - 1, and any tied optimum scores 0.
std::size_t rank_difference(std::span<const double> values, RowId chosen, Direction d);

// Binary dominance: a is no worse than b in every objective and strictly
// better in at least one.
bool dominates(std::span<const double> a, std::span<const double> b, std::span<const Direction> directions);

// Indices of the points no other point dominates, ascending. Duplicates of
// a non-dominated point are all kept.
std::vector<std::size_t> pareto_front(const std::vector<ObjectiveVector>& points,
                                      std::span<const Direction> directions);

// Points mapped so that larger is better in every objective, row-major.
std::vector<double> to_maximize(const std::vector<ObjectiveVector>& points, std::span<const Direction> directions);

// Inputs of GD / IGD. Distances are Euclidean after min-max normalizing each
// objective by the true front's range; objectives on which the true front is
// flat are left out of the distance.
class FrontComparison {
public:
    // Throws ValidationError when either front is empty or contains a
    // dominated point, or when every objective is flat on the true front.
    FrontComparison(std::vector<ObjectiveVector> true_front, std::vector<ObjectiveVector> approx_front,
                    std::vector<Direction> directions);

    const std::vector<ObjectiveVector>& true_front() const noexcept { return true_; }
    const std::vector<ObjectiveVector>& approx_front() const noexcept { return approx_; }
    const std::vector<std::size_t>& active_objectives() const noexcept { return active_; }

    // Mean distance from each approximate point to its nearest true point.
    double gd() const;
    // Mean distance from each true point to its nearest approximate point.
    double igd() const;

private:
    std::vector<double> normalized(const std::vector<ObjectiveVector>& points) const;

    std::vector<ObjectiveVector> true_;
    std::vector<ObjectiveVector> approx_;
    std::vector<Direction> directions_;
    std::vector<std::size_t> active_;
    std::vector<double> lo_;
    std::vector<double> span_;
};

inline double gd(const FrontComparison& c) { return c.gd(); }
inline double igd(const FrontComparison& c) { return c.igd(); }

} // namespace flash
