#include "flash/cart.hpp"

#include "flash/error.hpp"
#include "flash/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace flash {

namespace {

struct SplitChoice {
    std::size_t option = 0;
    double threshold = 0.0;
    double gain = 0.0;
    std::uint32_t right_rank = 0; // smallest rank sent right
};

// Each option's values are replaced by their rank among the option's
// distinct values, and every option's rows are sorted by (rank, row) once
// at the root. A node owns the same range [begin, end) of each list, and
// splitting it partitions that range stably into the other of two buffers
// (alternating with depth). Options that are constant within a node can
// never split its subtree, so their lists are dropped from then on.
class Builder {
public:
    Builder(std::span<const Configuration> x, std::span<const double> y, const CartParams& p)
        : n_(y.size()), dims_(x.front().size()), x_(x), y_(y), params_(p) {}

    std::vector<TreeNode> build() {
        // Scratch is reused across fits on the same thread; the FLASH loop
        // fits thousands of trees and fresh buffers cost page faults.
        thread_local Scratch scratch;
        scratch_ = &scratch;
        for (auto& buffer : scratch.buffers) {
            if (buffer.size() < dims_ * n_) buffer.resize(dims_ * n_);
        }
        if (scratch.goes_left.size() < n_) scratch.goes_left.resize(n_);
        if (scratch.columns.size() < dims_ * n_) scratch.columns.resize(dims_ * n_);
        if (scratch.ranks.size() < n_) scratch.ranks.resize(n_);
        scratch.values.resize(dims_);
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t j = 0; j < dims_; ++j) scratch.columns[j * n_ + r] = x_[r][j];
        }

        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < dims_; ++j) {
            if (sort_option(j)) active.push_back(j);
        }
        double sum = 0.0;
        for (double v : y_) sum += v;
        grow(0, n_, 0, active, sum);
        return std::move(nodes_);
    }

private:
    struct Entry {
        double y;
        std::uint32_t rank;
        std::uint32_t row;
    };

    struct Scratch {
        std::vector<Entry> buffers[2];
        std::vector<std::uint8_t> goes_left;
        std::vector<double> columns;             // column-major inputs
        std::vector<std::uint32_t> ranks;
        std::vector<std::vector<double>> values; // per option, sorted distinct values
    };

    // Counting sort of the rows by rank; ties keep row order. Returns false
    // when the option is constant.
    bool sort_option(std::size_t j) {
        const double* col = &scratch_->columns[j * n_];
        auto& values = scratch_->values[j];
        // Configuration options rarely take many values; collect them by a
        // linear scan and fall back to sorting the column when there are.
        constexpr std::size_t kScanLimit = 64;
        values.assign(1, col[0]);
        for (std::size_t r = 1; r < n_ && values.size() <= kScanLimit; ++r) {
            if (col[r] != col[r - 1] && std::find(values.begin(), values.end(), col[r]) == values.end()) {
                values.push_back(col[r]);
            }
        }
        if (values.size() > kScanLimit) values.assign(col, col + n_);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        auto& ranks = scratch_->ranks;
        std::vector<std::size_t> start(values.size() + 1, 0);
        for (std::size_t r = 0; r < n_; ++r) {
            ranks[r] = static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), col[r]) - values.begin());
            ++start[ranks[r] + 1];
        }
        std::partial_sum(start.begin(), start.end(), start.begin());
        Entry* e = list(0, j);
        for (std::size_t r = 0; r < n_; ++r) e[start[ranks[r]]++] = {y_[r], ranks[r], static_cast<std::uint32_t>(r)};
        return values.size() > 1;
    }

    Entry* list(std::size_t depth, std::size_t option) { return &scratch_->buffers[depth % 2][option * n_]; }
    const Entry* list(std::size_t depth, std::size_t option) const {
        return &scratch_->buffers[depth % 2][option * n_];
    }

    std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth, const std::vector<std::size_t>& active,
                      double sum) {
        const std::size_t n = end - begin;
        const double mean = sum / static_cast<double>(n);
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(TreeNode{-1, 0.0, mean, n, -1, -1});

        if (n < params_.min_samples_split || active.empty()) return id;
        if (params_.max_depth && depth >= *params_.max_depth) return id;

        const Entry* rows = list(depth, active.front()) + begin;
        double lo = rows[0].y;
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, rows[i].y);
            hi = std::max(hi, rows[i].y);
        }
        if (lo == hi) return id;

        std::vector<std::size_t> varying;
        varying.reserve(active.size());
        for (std::size_t j : active) {
            const Entry* order = list(depth, j) + begin;
            if (order[0].rank != order[n - 1].rank) varying.push_back(j);
        }
        const auto best = best_split(begin, end, depth, varying, mean);
        if (!best) return id;

        std::size_t n_left = 0;
        double sum_left = 0.0;
        double sum_right = 0.0;
        auto& goes_left = scratch_->goes_left;
        for (const Entry* e = list(depth, best->option) + begin; e != list(depth, best->option) + end; ++e) {
            const bool left = e->rank < best->right_rank;
            goes_left[e->row] = left;
            n_left += left;
            (left ? sum_left : sum_right) += e->y;
        }
        for (std::size_t j : varying) {
            const Entry* seg = list(depth, j) + begin;
            Entry* out = list(depth + 1, j) + begin;
            std::size_t l = 0;
            std::size_t r = n_left;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t g = goes_left[seg[i].row];
                out[g ? l : r] = seg[i];
                l += g;
                r += 1 - g;
            }
        }

        nodes_[static_cast<std::size_t>(id)].option = static_cast<std::int32_t>(best->option);
        nodes_[static_cast<std::size_t>(id)].threshold = best->threshold;
        const auto l = grow(begin, begin + n_left, depth + 1, varying, sum_left);
        const auto r = grow(begin + n_left, end, depth + 1, varying, sum_right);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    std::optional<SplitChoice> best_split(std::size_t begin, std::size_t end, std::size_t depth,
                                          const std::vector<std::size_t>& options, double mean) const {
        if (options.empty()) return std::nullopt;
        const std::size_t n = end - begin;
        // Targets are centered on the node mean so the running-sum SSE
        // formula does not cancel catastrophically on large raw values.
        double total_sq = 0.0;
        const Entry* rows = list(depth, options.front()) + begin;
        for (std::size_t i = 0; i < n; ++i) total_sq += (rows[i].y - mean) * (rows[i].y - mean);
        const double tolerance = 1e-12 * total_sq;

        std::optional<SplitChoice> best;
        for (std::size_t j : options) {
            const Entry* order = list(depth, j) + begin;
            double sum_left = 0.0;
            double sq_left = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                const double c = order[k - 1].y - mean;
                sum_left += c;
                sq_left += c * c;
                if (order[k - 1].rank == order[k].rank) continue;
                if (k < params_.min_samples_leaf || n - k < params_.min_samples_leaf) continue;
                const auto nl = static_cast<double>(k);
                const auto nr = static_cast<double>(n - k);
                const double sum_right = -sum_left; // centered targets sum to zero
                const double sse_left = sq_left - sum_left * sum_left / nl;
                const double sse_right = (total_sq - sq_left) - sum_right * sum_right / nr;
                const double gain = total_sq - sse_left - sse_right;
                if (gain <= tolerance) continue;
                if (!best || gain > best->gain + tolerance) {
                    const auto& v = scratch_->values[j];
                    const double a = v[order[k - 1].rank];
                    const double b = v[order[k].rank];
                    best = SplitChoice{j, a + (b - a) / 2.0, gain, order[k].rank};
                }
            }
        }
        return best;
    }

    std::size_t n_;
    std::size_t dims_;
    std::span<const Configuration> x_;
    std::span<const double> y_;
    const CartParams& params_;
    Scratch* scratch_ = nullptr;
    std::vector<TreeNode> nodes_;
};

} // namespace

void CartParams::validate() const {
    if (min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
    if (min_samples_split < 2) throw ValidationError("min_samples_split must be >= 2");
    if (min_samples_split < 2 * min_samples_leaf) {
        throw ValidationError("min_samples_split must be >= 2 * min_samples_leaf");
    }
}

RegressionTree RegressionTree::fit(std::span<const Configuration> inputs, std::span<const double> targets,
                                   const CartParams& params) {
    params.validate();
    if (inputs.empty()) throw ValidationError("cannot fit a tree on zero rows");
    if (inputs.size() != targets.size()) throw ValidationError("inputs and targets differ in length");
    if (inputs.size() > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("too many training rows");
    const std::size_t dims = inputs.front().size();
    for (const auto& c : inputs) {
        if (c.size() != dims) throw ValidationError("inconsistent configuration dimensionality");
        for (double v : c) {
            if (!std::isfinite(v)) throw ValidationError("non-finite training input");
        }
    }
    for (double t : targets) {
        if (!std::isfinite(t)) throw ValidationError("non-finite training target");
    }

    RegressionTree tree;
    tree.dimensions_ = dims;
    tree.nodes_ = Builder(inputs, targets, params).build();
    return tree;
}

double RegressionTree::predict(std::span<const double> config) const {
    if (config.size() != dimensions_) throw ValidationError("configuration dimensionality does not match the tree");
    return kernels::predict_one(nodes_, config);
}

std::vector<double> RegressionTree::predict_batch(std::span<const Configuration> configs) const {
    for (const auto& c : configs) {
        if (c.size() != dimensions_) throw ValidationError("configuration dimensionality does not match the tree");
    }
    std::vector<double> out(configs.size());
    kernels::parallel::predict(nodes_, configs, out);
    return out;
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t deepest = 0;
    // Children always follow their parent in preorder.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void RegressionTree::dump(std::ostream& out, std::span<const std::string> option_names) const {
    auto walk = [&](auto&& self, std::size_t i, std::size_t indent) -> void {
        const auto& n = nodes_[i];
        out << std::string(indent * 2, ' ');
        if (n.is_leaf()) {
            out << "leaf value=" << format_number(n.prediction) << " n=" << n.count << '\n';
            return;
        }
        const auto opt = static_cast<std::size_t>(n.option);
        if (opt < option_names.size()) {
            out << "split " << option_names[opt];
        } else {
            out << "split x" << opt;
        }
        out << " <= " << format_number(n.threshold) << " n=" << n.count << '\n';
        self(self, static_cast<std::size_t>(n.left), indent + 1);
        self(self, static_cast<std::size_t>(n.right), indent + 1);
    };
    walk(walk, 0, 0);
}

} // namespace flash
