#pragma once

#include "flash/config_space.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flash {

// Why a measurement was taken.
enum class Phase {
    Initial,     // random initial sample
    Acquisition, // chosen by an acquisition function
    Holdout,     // holdout set measured to score a model
    Training,    // randomly added training row (lives-based baselines)
    Validation,  // predicted-best validation row measured at the end
};

enum class Termination {
    BudgetSpent,
    PoolExhausted,      // candidates ran out before the budget did
    LivesExhausted,
    CandidatesResolved, // every candidate measured or discarded (ePAL)
    WallTimeExceeded,
};

std::string to_string(Phase p);
std::string to_string(Termination t);

struct Evaluation {
    RowId row = 0;
    Phase phase = Phase::Initial;
    std::vector<double> objectives;
};

// Trace of one optimizer run. Every oracle call appears in `evaluated`, in
// call order, so measurements_used == evaluated.size() == oracle count.
struct OptimizationRun {
    std::string method;
    std::vector<Evaluation> evaluated;
    std::optional<RowId> best;  // single-objective runs
    std::vector<RowId> front;   // non-dominated evaluated rows, in trace order
    std::size_t measurements_used = 0;
    double wall_time = 0.0;     // seconds
    Termination termination = Termination::BudgetSpent;
    std::size_t lives_lost = 0; // lives-based baselines only
};

// Evaluated row with the best value of objective 0; ties go to the earliest.
RowId best_evaluated(const OptimizationRun& run, Direction direction);

// Distinct evaluated rows whose measured vectors no other evaluated row
// dominates. Order follows first appearance in the trace.
std::vector<RowId> evaluated_front(const OptimizationRun& run, std::span<const Direction> directions);

// CSV columns: step,row,phase,<option names...>,<objective names...>
void write_trace_csv(std::ostream& out, const OptimizationRun& run, std::span<const Configuration> space,
                     std::span<const std::string> option_names, std::span<const std::string> objective_names);

} // namespace flash
