#pragma once

// Scott-Knott ranking of treatments, gated by a bootstrap test and the
// Vargha-Delaney A12 effect size.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flash {

struct Treatment {
    std::string label;
    std::vector<double> observations;
};

struct SkParams {
    double confidence = 0.99;
    double a12_threshold = 0.6;
    std::size_t bootstrap_resamples = 512;
    std::uint64_t seed = 0;
    bool lower_is_better = true;

    void validate() const;
};

// P(X > Y) + 0.5 * P(X == Y) over all pairs.
double a12(std::span<const double> x, std::span<const double> y);

// Two-sided bootstrap test of the difference of means: both samples are
// shifted onto the pooled mean, resampled `bootstrap_resamples` times, and
// p = (1 + #{|resampled difference| >= observed}) / (1 + resamples).
// Significant when p < 1 - confidence. Deterministic for a fixed seed.
double bootstrap_p_value(std::span<const double> x, std::span<const double> y, const SkParams& params);
bool bootstrap_significant(std::span<const double> x, std::span<const double> y, const SkParams& params);

// E(delta) = ms/ls * (mean(m) - mean(l))^2 + ns/ls * (mean(n) - mean(l))^2,
// where m is the pooled observations of treatments [0, cut), n those of
// [cut, end) and l their union.
double expected_delta(const std::vector<Treatment>& sorted, std::size_t cut);

struct Cut {
    std::size_t index = 0; // first treatment of the right-hand part
    double expected_delta = 0.0;
};

// Cut maximizing expected_delta over 1..size-1; the earliest wins ties.
// Empty for fewer than two treatments.
std::optional<Cut> best_cut(const std::vector<Treatment>& sorted);

// Treatments in ranking order: by median (then mean, then label), ascending
// when lower is better.
std::vector<Treatment> sort_treatments(std::vector<Treatment> treatments, bool lower_is_better);

// Label -> rank, 1 = best. Splits recursively at the best cut while both the
// bootstrap test and A12 >= a12_threshold (larger of the two directions)
// agree; treatments left in one group share a rank. Labels must be unique
// and every treatment needs at least one observation.
std::map<std::string, std::size_t> scott_knott(std::vector<Treatment> treatments, const SkParams& params);

double median(std::vector<double> values);
// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

} // namespace flash
