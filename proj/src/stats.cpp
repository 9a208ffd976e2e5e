#include "flash/stats.hpp"

#include "flash/error.hpp"
#include "flash/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace flash {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> pool(const std::vector<Treatment>& ts, std::size_t from, std::size_t to) {
    std::vector<double> out;
    for (std::size_t i = from; i < to; ++i) out.insert(out.end(), ts[i].observations.begin(), ts[i].observations.end());
    return out;
}

void divide(const std::vector<Treatment>& sorted, std::size_t from, std::size_t to, const SkParams& params,
            std::vector<std::size_t>& group_starts) {
    if (to - from < 2) return;
    const std::vector<Treatment> part(sorted.begin() + static_cast<std::ptrdiff_t>(from),
                                      sorted.begin() + static_cast<std::ptrdiff_t>(to));
    const auto cut = best_cut(part);
    if (!cut) return;
    const auto left = pool(part, 0, cut->index);
    const auto right = pool(part, cut->index, part.size());
    const double effect = std::max(a12(left, right), a12(right, left));
    if (effect < params.a12_threshold || !bootstrap_significant(left, right, params)) return;
    const std::size_t mid = from + cut->index;
    group_starts.push_back(mid);
    divide(sorted, from, mid, params, group_starts);
    divide(sorted, mid, to, params, group_starts);
}

} // namespace

void SkParams::validate() const {
    if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
    if (!(a12_threshold >= 0.5 && a12_threshold <= 1.0)) throw ValidationError("a12 threshold must lie in [0.5, 1]");
    if (bootstrap_resamples < 1) throw ValidationError("bootstrap_resamples must be >= 1");
}

double a12(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ValidationError("a12 needs non-empty samples");
    double wins = 0.0;
    for (double a : x) {
        for (double b : y) {
            if (a > b) {
                wins += 1.0;
            } else if (a == b) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double bootstrap_p_value(std::span<const double> x, std::span<const double> y, const SkParams& params) {
    if (x.empty() || y.empty()) throw ValidationError("bootstrap needs non-empty samples");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    const double observed = std::abs(mx - my);
    const double pooled = (mx * static_cast<double>(x.size()) + my * static_cast<double>(y.size())) /
                          static_cast<double>(x.size() + y.size());
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    for (auto& v : xs) v = v - mx + pooled;
    for (auto& v : ys) v = v - my + pooled;

    Rng rng(params.seed);
    std::size_t extreme = 0;
    for (std::size_t b = 0; b < params.bootstrap_resamples; ++b) {
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[rng.below(xs.size())];
        for (std::size_t i = 0; i < ys.size(); ++i) sy += ys[rng.below(ys.size())];
        const double d = std::abs(sx / static_cast<double>(xs.size()) - sy / static_cast<double>(ys.size()));
        if (d >= observed) ++extreme;
    }
    return static_cast<double>(extreme + 1) / static_cast<double>(params.bootstrap_resamples + 1);
}

bool bootstrap_significant(std::span<const double> x, std::span<const double> y, const SkParams& params) {
    params.validate();
    return bootstrap_p_value(x, y, params) < 1.0 - params.confidence;
}

double expected_delta(const std::vector<Treatment>& sorted, std::size_t cut) {
    if (cut == 0 || cut >= sorted.size()) throw ValidationError("cut must split the list into two parts");
    const auto m = pool(sorted, 0, cut);
    const auto n = pool(sorted, cut, sorted.size());
    const auto l = pool(sorted, 0, sorted.size());
    const double ls = static_cast<double>(l.size());
    const double lmu = mean_of(l);
    const double dm = mean_of(m) - lmu;
    const double dn = mean_of(n) - lmu;
    return static_cast<double>(m.size()) / ls * dm * dm + static_cast<double>(n.size()) / ls * dn * dn;
}

std::optional<Cut> best_cut(const std::vector<Treatment>& sorted) {
    if (sorted.size() < 2) return std::nullopt;
    std::optional<Cut> best;
    for (std::size_t c = 1; c < sorted.size(); ++c) {
        const double e = expected_delta(sorted, c);
        if (!best || e > best->expected_delta) best = Cut{c, e};
    }
    return best;
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

std::vector<Treatment> sort_treatments(std::vector<Treatment> treatments, bool lower_is_better) {
    struct Key {
        double median;
        double mean;
    };
    std::vector<std::pair<Key, Treatment>> keyed;
    for (auto& t : treatments) {
        const double sign = lower_is_better ? 1.0 : -1.0;
        Key k{sign * median(t.observations), sign * mean_of(t.observations)};
        keyed.emplace_back(k, std::move(t));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first.median != b.first.median) return a.first.median < b.first.median;
        if (a.first.mean != b.first.mean) return a.first.mean < b.first.mean;
        return a.second.label < b.second.label;
    });
    std::vector<Treatment> out;
    for (auto& [k, t] : keyed) out.push_back(std::move(t));
    return out;
}

std::map<std::string, std::size_t> scott_knott(std::vector<Treatment> treatments, const SkParams& params) {
    params.validate();
    std::set<std::string> labels;
    for (const auto& t : treatments) {
        if (!labels.insert(t.label).second) throw ValidationError("duplicate treatment label '" + t.label + "'");
        if (t.observations.empty()) throw ValidationError("treatment '" + t.label + "' has no observations");
        for (double v : t.observations) {
            if (!std::isfinite(v)) throw ValidationError("treatment '" + t.label + "' has a non-finite observation");
        }
    }
    const auto sorted = sort_treatments(std::move(treatments), params.lower_is_better);

    std::vector<std::size_t> starts{0};
    divide(sorted, 0, sorted.size(), params, starts);
    std::sort(starts.begin(), starts.end());

    std::map<std::string, std::size_t> ranks;
    std::size_t group = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        while (group + 1 < starts.size() && starts[group + 1] <= i) ++group;
        ranks[sorted[i].label] = group + 1;
    }
    return ranks;
}

} // namespace flash
