#include "flash/run.hpp"

#include "flash/error.hpp"
#include "flash/metrics.hpp"

#include <ostream>
#include <unordered_set>

namespace flash {

std::string to_string(Phase p) {
    switch (p) {
    case Phase::Initial: return "initial";
    case Phase::Acquisition: return "acquisition";
    case Phase::Holdout: return "holdout";
    case Phase::Training: return "training";
    case Phase::Validation: return "validation";
    }
    return "unknown";
}

std::string to_string(Termination t) {
    switch (t) {
    case Termination::BudgetSpent: return "budget-spent";
    case Termination::PoolExhausted: return "pool-exhausted";
    case Termination::LivesExhausted: return "lives-exhausted";
    case Termination::CandidatesResolved: return "candidates-resolved";
    case Termination::WallTimeExceeded: return "wall-time-exceeded";
    }
    return "unknown";
}

RowId best_evaluated(const OptimizationRun& run, Direction direction) {
    if (run.evaluated.empty()) throw Error("run has no evaluations");
    const Evaluation* best = &run.evaluated.front();
    for (const auto& e : run.evaluated) {
        if (better(e.objectives.at(0), best->objectives.at(0), direction)) best = &e;
    }
    return best->row;
}

std::vector<RowId> evaluated_front(const OptimizationRun& run, std::span<const Direction> directions) {
    std::vector<RowId> rows;
    std::vector<ObjectiveVector> points;
    std::unordered_set<RowId> seen;
    for (const auto& e : run.evaluated) {
        if (seen.insert(e.row).second) {
            rows.push_back(e.row);
            points.push_back(e.objectives);
        }
    }
    std::vector<RowId> front;
    for (auto i : pareto_front(points, directions)) front.push_back(rows[i]);
    return front;
}

void write_trace_csv(std::ostream& out, const OptimizationRun& run, std::span<const Configuration> space,
                     std::span<const std::string> option_names, std::span<const std::string> objective_names) {
    out << "step,row,phase";
    for (const auto& n : option_names) out << ',' << n;
    for (const auto& n : objective_names) out << ',' << n;
    out << '\n';
    for (std::size_t s = 0; s < run.evaluated.size(); ++s) {
        const auto& e = run.evaluated[s];
        out << s << ',' << e.row << ',' << to_string(e.phase);
        for (double v : space[e.row]) out << ',' << format_number(v);
        for (double v : e.objectives) out << ',' << format_number(v);
        out << '\n';
    }
}

} // namespace flash
