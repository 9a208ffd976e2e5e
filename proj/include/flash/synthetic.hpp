#pragma once

// Enumerated boolean configuration spaces with closed-form objectives, used
// as small stand-ins for measured systems. Row r sets option j to bit j of r.
//
//   single-peak   perf = 1 + sum_j w_j * d_j
//   interaction   perf = 1 + sum_j w_j * d_j + sum_j u_j * d_j * d_{(j+1) mod n}
//   bi-objective  f1 = sum_j x_j, f2 = sum_j (1 - x_j)
//
// where d_j = [x_j != t_j] against a hidden target t drawn from the seed and
// w, u are drawn uniformly from [1, 10). Every objective is minimized, so the
// first two kinds have the unique optimum x = t.

#include "flash/config_space.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace flash {

enum class SyntheticKind { SinglePeak, Interaction, BiObjectiveTradeoff };

std::string to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(const std::string& text);

struct SyntheticDataset {
    Dataset dataset;
    std::vector<RowId> optimum; // rows attaining the best value (single objective)
    std::vector<RowId> front;   // Pareto-optimal rows, ascending
};

inline constexpr std::size_t kSyntheticRowLimit = std::size_t{1} << 20;

// Throws ValidationError for n_options < 2 or 2^n_options above row_limit.
SyntheticDataset generate_synthetic(SyntheticKind kind, std::size_t n_options, std::uint64_t seed,
                                    std::size_t row_limit = kSyntheticRowLimit);

} // namespace flash
