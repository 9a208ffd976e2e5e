#include "flash/metrics.hpp"

#include "flash/error.hpp"
#include "flash/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flash {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("predicted and actual lists differ in length");
    if (a.empty()) throw ValidationError("empty prediction list");
}

void check_shape(const std::vector<ObjectiveVector>& points, std::size_t m) {
    for (const auto& p : points) {
        if (p.size() != m) throw ValidationError("objective vector has the wrong number of objectives");
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

double mmre(std::span<const double> predicted, std::span<const double> actual) {
    require_same_length(predicted, actual);
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!(actual[i] > 0.0)) throw ValidationError("MMRE is undefined for non-positive actual values");
        total += std::abs(predicted[i] - actual[i]) / actual[i];
    }
    return total / static_cast<double>(actual.size()) * 100.0;
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double mean_rank_difference(std::span<const double> predicted, std::span<const double> actual) {
    require_same_length(predicted, actual);
    const auto rp = average_ranks(predicted);
    const auto ra = average_ranks(actual);
    double total = 0.0;
    for (std::size_t i = 0; i < rp.size(); ++i) total += std::abs(ra[i] - rp[i]);
    return total / static_cast<double>(rp.size());
}

std::size_t rank_of(std::span<const double> values, std::size_t index, Direction d) {
    if (index >= values.size()) throw ValidationError("unknown configuration index");
    const double v = values[index];
    return 1 + static_cast<std::size_t>(
                   std::count_if(values.begin(), values.end(), [&](double w) { return better(w, v, d); }));
}

std::size_t rank_difference(std::span<const double> values, RowId chosen, Direction d) {
    return rank_of(values, chosen, d) - 1;
}

bool dominates(std::span<const double> a, std::span<const double> b, std::span<const Direction> directions) {
    if (a.size() != b.size() || a.size() != directions.size()) {
        throw ValidationError("objective vectors differ in shape");
    }
    bool strict = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (better(b[j], a[j], directions[j])) return false;
        if (better(a[j], b[j], directions[j])) strict = true;
    }
    return strict;
}

std::vector<double> to_maximize(const std::vector<ObjectiveVector>& points, std::span<const Direction> directions) {
    check_shape(points, directions.size());
    std::vector<double> flat;
    flat.reserve(points.size() * directions.size());
    for (const auto& p : points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            flat.push_back(directions[j] == Direction::Minimize ? -p[j] : p[j]);
        }
    }
    return flat;
}

std::vector<std::size_t> pareto_front(const std::vector<ObjectiveVector>& points,
                                      std::span<const Direction> directions) {
    if (points.empty()) return {};
    const auto flat = to_maximize(points, directions);
    std::vector<std::uint8_t> dominated(points.size());
    kernels::parallel::dominated_flags(flat, directions.size(), dominated);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!dominated[i]) front.push_back(i);
    }
    return front;
}

FrontComparison::FrontComparison(std::vector<ObjectiveVector> true_front, std::vector<ObjectiveVector> approx_front,
                                 std::vector<Direction> directions)
    : true_(std::move(true_front)), approx_(std::move(approx_front)), directions_(std::move(directions)) {
    if (true_.empty() || approx_.empty()) throw ValidationError("fronts must be non-empty");
    if (directions_.empty()) throw ValidationError("at least one objective is required");
    check_shape(true_, directions_.size());
    check_shape(approx_, directions_.size());
    if (pareto_front(true_, directions_).size() != true_.size()) {
        throw ValidationError("true front contains a dominated point");
    }
    if (pareto_front(approx_, directions_).size() != approx_.size()) {
        throw ValidationError("approximate front contains a dominated point");
    }
    const std::size_t m = directions_.size();
    lo_.assign(m, 0.0);
    span_.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double lo = true_.front()[j];
        double hi = lo;
        for (const auto& p : true_) {
            lo = std::min(lo, p[j]);
            hi = std::max(hi, p[j]);
        }
        lo_[j] = lo;
        span_[j] = hi - lo;
        if (hi > lo) active_.push_back(j);
    }
    if (active_.empty()) throw ValidationError("every objective is flat on the true front; GD/IGD undefined");
}

std::vector<double> FrontComparison::normalized(const std::vector<ObjectiveVector>& points) const {
    std::vector<double> flat;
    flat.reserve(points.size() * active_.size());
    for (const auto& p : points) {
        for (auto j : active_) flat.push_back((p[j] - lo_[j]) / span_[j]);
    }
    return flat;
}

double FrontComparison::gd() const {
    const auto a = normalized(approx_);
    const auto t = normalized(true_);
    std::vector<double> d(approx_.size());
    kernels::parallel::nearest_distances(a, t, active_.size(), d);
    return mean(d);
}

double FrontComparison::igd() const {
    const auto a = normalized(approx_);
    const auto t = normalized(true_);
    std::vector<double> d(true_.size());
    kernels::parallel::nearest_distances(t, a, active_.size(), d);
    return mean(d);
}

} // namespace flash
