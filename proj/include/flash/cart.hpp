#pragma once

// CART regression trees: the surrogate FLASH fits once per objective.

#include "flash/config_space.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flash {

struct CartParams {
    std::size_t min_samples_split = 4;
    std::size_t min_samples_leaf = 2;
    std::optional<std::size_t> max_depth; // unlimited when empty

    // Throws ValidationError unless min_samples_split >= 2 * min_samples_leaf,
    // min_samples_split >= 2 and min_samples_leaf >= 1.
    void validate() const;
};

// Flat node. Rows with x[option] <= threshold descend left.
struct TreeNode {
    std::int32_t option = -1; // -1 marks a leaf
    double threshold = 0.0;
    double prediction = 0.0;  // mean training target of the node
    std::size_t count = 0;    // training rows reaching the node
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const noexcept { return option < 0; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
public:
    // Greedy top-down fit maximizing the decrease in sum of squared errors.
    // Candidate thresholds are midpoints between consecutive distinct values
    // of an option within the node; equal gains resolve to the lowest option
    // index, then the lowest threshold. A node stays a leaf when it has fewer
    // than min_samples_split rows, sits at max_depth, has constant targets,
    // or no admissible split lowers the SSE.
    static RegressionTree fit(std::span<const Configuration> inputs, std::span<const double> targets,
                              const CartParams& params = {});

    double predict(std::span<const double> config) const;
    std::vector<double> predict_batch(std::span<const Configuration> configs) const;

    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }
    std::size_t dimensions() const noexcept { return dimensions_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    // Indented text, one node per line, left child before right:
    //   split <name> <= <threshold> n=<count>
    //     leaf value=<prediction> n=<count>
    // Options print as x<index> when no names are given.
    void dump(std::ostream& out, std::span<const std::string> option_names = {}) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
    std::size_t dimensions_ = 0;
};

} // namespace flash
