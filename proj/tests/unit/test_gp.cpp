#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flash/error.hpp"
#include "flash/gp.hpp"
#include "oracles.hpp"

using namespace flash;

TEST_CASE("single point interpolation") {
    const std::vector<std::vector<double>> x{{0.3, 0.7}};
    const std::vector<double> y{4.2};
    const auto gp = GaussianProcess::fit(x, y, {0.2, 1.0, 1e-9});
    const auto p = gp.predict(x[0]);
    CHECK(p.mean == doctest::Approx(4.2).epsilon(1e-9));
    CHECK(p.sd < 1e-4);
}

TEST_CASE("far queries revert to the prior") {
    const std::vector<std::vector<double>> x{{0.0}, {0.1}, {0.3}};
    const std::vector<double> y{1.0, 2.0, 6.0};
    const GpKernel k{0.2, 2.5, 1e-6};
    const auto gp = GaussianProcess::fit(x, y, k);
    const auto p = gp.predict(std::vector<double>{1e6});
    CHECK(p.mean == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(p.sd * p.sd == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(gp.prior_mean() == doctest::Approx(3.0));
}

TEST_CASE("posterior matches a naive dense solve") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const std::size_t d = 1 + rng.below(4);
        std::vector<std::vector<double>> x(n, std::vector<double>(d));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x[i]) v = rng.uniform();
            y[i] = rng.uniform() * 4.0 - 2.0;
        }
        const GpKernel k{0.2 + rng.uniform(), 0.5 + rng.uniform(), 1e-6};
        const auto gp = GaussianProcess::fit(x, y, k);
        for (int q = 0; q < 5; ++q) {
            std::vector<double> query(d);
            for (auto& v : query) v = rng.uniform();
            const auto got = gp.predict(query);
            const auto want = oracle::gp_posterior(x, y, query, k.length_scale, k.signal_variance, k.noise_variance,
                                                   gp.jitter());
            CHECK(std::abs(got.mean - want.mean) <= 1e-8);
            CHECK(std::abs(got.sd - want.sd) <= 1e-8);
        }
    }
}

TEST_CASE("duplicate inputs with no noise need jitter") {
    const std::vector<std::vector<double>> x{{0.5}, {0.5}, {0.5}};
    const std::vector<double> y{1, 1, 1};
    const auto gp = GaussianProcess::fit(x, y, {0.2, 1.0, 0.0});
    CHECK(gp.jitter() > 0.0);
    CHECK(gp.predict(x[0]).sd >= 0.0);
}

TEST_CASE("length-scale search prefers the better fit") {
    // A smooth linear trend favours long length scales.
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        x.push_back({i / 9.0});
        y.push_back(i / 9.0);
    }
    const std::vector<double> grid{0.05, 1.0};
    const auto gp = fit_gp_with_length_search(x, y, {}, grid);
    CHECK(gp.kernel().length_scale == 1.0);
    const auto fixed = fit_gp_with_length_search(x, y, {}, {});
    CHECK(fixed.kernel().length_scale == 0.2);
}

TEST_CASE("input scaler and errors") {
    const std::vector<Configuration> ref{{0, 5, 2}, {10, 5, 4}};
    const InputScaler s(ref);
    CHECK(s(Configuration{5, 5, 3}) == std::vector<double>{0.5, 0.0, 0.5});
    CHECK_THROWS_AS(GaussianProcess::fit({}, {}, {}), ValidationError);
    CHECK_THROWS_AS(GaussianProcess::fit({{0.0}}, std::vector<double>{1.0}, {-1.0, 1.0, 0.0}), ValidationError);
}
