#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel` with the
// same signature and bit-identical results; the library calls the parallel
// ones, the tests and the benchmark compare the two.
//
// Point sets are row-major: point i occupies [i * dims, (i + 1) * dims).

#include "flash/cart.hpp"
#include "flash/config_space.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace flash::kernels {

namespace serial {

void predict(std::span<const TreeNode> nodes, std::span<const Configuration> configs, std::span<double> out);

// out[i] = (1/N) * sum_n sum_j weights[n*dims + j] * points[i*dims + j]
void weighted_means(std::span<const double> weights, std::span<const double> points, std::size_t dims,
                    std::span<double> out);

// out[i] = 1 when some other point dominates point i. Points must already be
// mapped so that larger is better in every dimension.
void dominated_flags(std::span<const double> points, std::size_t dims, std::span<std::uint8_t> out);

// out[i] = Euclidean distance from from[i] to its nearest point in `to`.
void nearest_distances(std::span<const double> from, std::span<const double> to, std::size_t dims,
                       std::span<double> out);

} // namespace serial

namespace parallel {

void predict(std::span<const TreeNode> nodes, std::span<const Configuration> configs, std::span<double> out);
void weighted_means(std::span<const double> weights, std::span<const double> points, std::size_t dims,
                    std::span<double> out);
void dominated_flags(std::span<const double> points, std::size_t dims, std::span<std::uint8_t> out);
void nearest_distances(std::span<const double> from, std::span<const double> to, std::size_t dims,
                       std::span<double> out);

} // namespace parallel

// True when point a dominates b, both larger-is-better.
inline bool dominates_mapped(const double* a, const double* b, std::size_t dims) {
    bool strict = false;
    for (std::size_t j = 0; j < dims; ++j) {
        if (a[j] < b[j]) return false;
        if (a[j] > b[j]) strict = true;
    }
    return strict;
}

inline double predict_one(std::span<const TreeNode> nodes, std::span<const double> x) {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.option)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].prediction;
}

} // namespace flash::kernels
