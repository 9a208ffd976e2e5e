// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "flash/cart.hpp"
#include "flash/kernels.hpp"
#include "flash/rng.hpp"

#include <map>

using namespace flash;
namespace k = flash::kernels;

namespace {

struct Fixture {
    std::vector<Configuration> rows;
    std::vector<double> points; // n x 2, row-major
    std::vector<double> weights; // 16 x 2
    RegressionTree tree;

    explicit Fixture(std::size_t n) {
        Rng rng(1);
        for (std::size_t i = 0; i < n; ++i) {
            Configuration c(12);
            for (auto& v : c) v = static_cast<double>(rng.below(4));
            rows.push_back(c);
            points.push_back(rng.uniform());
            points.push_back(rng.uniform());
        }
        for (int i = 0; i < 32; ++i) weights.push_back(rng.uniform());
        const std::size_t m = std::min<std::size_t>(n, 200);
        std::vector<double> y;
        for (std::size_t i = 0; i < m; ++i) y.push_back(rows[i][0] * 3 + rows[i][1] - rows[i][5]);
        tree = RegressionTree::fit(std::span<const Configuration>(rows.data(), m), y);
    }
};

const Fixture& fixture(std::size_t n) {
    static std::map<std::size_t, Fixture> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Fixture(n)).first;
    return it->second;
}

template <bool Parallel>
void BM_Predict(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(f.rows.size());
    for (auto _ : state) {
        if (Parallel) k::parallel::predict(f.tree.nodes(), f.rows, out);
        else k::serial::predict(f.tree.nodes(), f.rows, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_WeightedMeans(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(f.rows.size());
    for (auto _ : state) {
        if (Parallel) k::parallel::weighted_means(f.weights, f.points, 2, out);
        else k::serial::weighted_means(f.weights, f.points, 2, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_Dominated(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    std::vector<std::uint8_t> out(f.rows.size());
    for (auto _ : state) {
        if (Parallel) k::parallel::dominated_flags(f.points, 2, out);
        else k::serial::dominated_flags(f.points, 2, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_Nearest(benchmark::State& state) {
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    const std::span<const double> to(f.points.data(), 200);
    std::vector<double> out(f.rows.size());
    for (auto _ : state) {
        if (Parallel) k::parallel::nearest_distances(f.points, to, 2, out);
        else k::serial::nearest_distances(f.points, to, 2, out);
        benchmark::DoNotOptimize(out.data());
    }
}

} // namespace

BENCHMARK(BM_Predict<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_Predict<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_WeightedMeans<false>)->Arg(100000);
BENCHMARK(BM_WeightedMeans<true>)->Arg(100000);
BENCHMARK(BM_Dominated<false>)->Arg(2000);
BENCHMARK(BM_Dominated<true>)->Arg(2000);
BENCHMARK(BM_Nearest<false>)->Arg(10000);
BENCHMARK(BM_Nearest<true>)->Arg(10000);

BENCHMARK_MAIN();
