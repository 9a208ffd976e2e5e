#include "flash/kernels.hpp"

#include <cmath>
#include <limits>

namespace flash::kernels {

namespace {

// Shared per-element bodies so the serial and OpenMP loops cannot drift.

inline double weighted_mean_at(std::span<const double> weights, std::span<const double> points,
                               std::size_t dims, std::size_t i) {
    const std::size_t n_vectors = weights.size() / dims;
    const double* p = points.data() + i * dims;
    double total = 0.0;
    for (std::size_t n = 0; n < n_vectors; ++n) {
        const double* w = weights.data() + n * dims;
        for (std::size_t j = 0; j < dims; ++j) total += w[j] * p[j];
    }
    return total / static_cast<double>(n_vectors);
}

inline std::uint8_t dominated_at(std::span<const double> points, std::size_t dims, std::size_t i) {
    const std::size_t n = points.size() / dims;
    const double* p = points.data() + i * dims;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != i && dominates_mapped(points.data() + k * dims, p, dims)) return 1;
    }
    return 0;
}

inline double nearest_at(std::span<const double> from, std::span<const double> to, std::size_t dims,
                         std::size_t i) {
    const double* a = from.data() + i * dims;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < to.size() / dims; ++k) {
        const double* b = to.data() + k * dims;
        double sq = 0.0;
        for (std::size_t j = 0; j < dims; ++j) {
            const double d = a[j] - b[j];
            sq += d * d;
        }
        if (sq < best) best = sq;
    }
    return std::sqrt(best);
}

} // namespace

namespace serial {

void predict(std::span<const TreeNode> nodes, std::span<const Configuration> configs, std::span<double> out) {
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = predict_one(nodes, configs[i]);
}

void weighted_means(std::span<const double> weights, std::span<const double> points, std::size_t dims,
                    std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = weighted_mean_at(weights, points, dims, i);
}

void dominated_flags(std::span<const double> points, std::size_t dims, std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = dominated_at(points, dims, i);
}

void nearest_distances(std::span<const double> from, std::span<const double> to, std::size_t dims,
                       std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = nearest_at(from, to, dims, i);
}

} // namespace serial

namespace parallel {

void predict(std::span<const TreeNode> nodes, std::span<const Configuration> configs, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(configs.size());
#pragma omp parallel for schedule(static) if (n > 2048)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = predict_one(nodes, configs[k]);
    }
}

void weighted_means(std::span<const double> weights, std::span<const double> points, std::size_t dims,
                    std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = weighted_mean_at(weights, points, dims, static_cast<std::size_t>(i));
    }
}

void dominated_flags(std::span<const double> points, std::size_t dims, std::span<std::uint8_t> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64) if (n > 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = dominated_at(points, dims, static_cast<std::size_t>(i));
    }
}

void nearest_distances(std::span<const double> from, std::span<const double> to, std::size_t dims,
                       std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n * static_cast<std::ptrdiff_t>(to.size()) > 65536)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = nearest_at(from, to, dims, static_cast<std::size_t>(i));
    }
}

} // namespace parallel

} // namespace flash::kernels
