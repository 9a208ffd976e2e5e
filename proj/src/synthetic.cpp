#include "flash/synthetic.hpp"

#include "flash/error.hpp"
#include "flash/metrics.hpp"
#include "flash/rng.hpp"

#include <algorithm>

namespace flash {

std::string to_string(SyntheticKind kind) {
    switch (kind) {
    case SyntheticKind::SinglePeak: return "single-peak";
    case SyntheticKind::Interaction: return "interaction";
    case SyntheticKind::BiObjectiveTradeoff: return "bi-objective-tradeoff";
    }
    return "?";
}

SyntheticKind parse_synthetic_kind(const std::string& text) {
    if (text == "single-peak") return SyntheticKind::SinglePeak;
    if (text == "interaction") return SyntheticKind::Interaction;
    if (text == "bi-objective-tradeoff" || text == "bi-objective") return SyntheticKind::BiObjectiveTradeoff;
    throw ValidationError("unknown synthetic kind '" + text + "'");
}

SyntheticDataset generate_synthetic(SyntheticKind kind, std::size_t n_options, std::uint64_t seed,
                                    std::size_t row_limit) {
    if (n_options < 2) throw ValidationError("synthetic spaces need at least 2 options");
    if (n_options >= 63 || (std::size_t{1} << n_options) > row_limit) {
        throw ValidationError("synthetic space of 2^" + std::to_string(n_options) + " rows exceeds the limit of " +
                              std::to_string(row_limit));
    }
    const std::size_t rows = std::size_t{1} << n_options;

    Rng rng(seed);
    std::vector<double> target(n_options);
    std::vector<double> w(n_options);
    std::vector<double> u(n_options);
    for (std::size_t j = 0; j < n_options; ++j) {
        target[j] = static_cast<double>(rng.below(2));
        w[j] = 1.0 + 9.0 * rng.uniform();
        u[j] = 1.0 + 9.0 * rng.uniform();
    }

    std::vector<OptionSchema> options;
    for (std::size_t j = 0; j < n_options; ++j) {
        options.push_back({"o" + std::to_string(j), OptionKind::Boolean, 0, 1});
    }
    std::vector<ObjectiveSchema> objectives;
    if (kind == SyntheticKind::BiObjectiveTradeoff) {
        objectives = {{"f1", Direction::Minimize}, {"f2", Direction::Minimize}};
    } else {
        objectives = {{"perf", Direction::Minimize}};
    }

    std::vector<Configuration> configs(rows, Configuration(n_options));
    std::vector<std::vector<double>> values(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        auto& x = configs[r];
        for (std::size_t j = 0; j < n_options; ++j) x[j] = static_cast<double>((r >> j) & 1U);
        if (kind == SyntheticKind::BiObjectiveTradeoff) {
            double ones = 0.0;
            for (double v : x) ones += v;
            values[r] = {ones, static_cast<double>(n_options) - ones};
            continue;
        }
        double y = 1.0;
        for (std::size_t j = 0; j < n_options; ++j) {
            const bool dj = x[j] != target[j];
            if (dj) y += w[j];
            if (kind == SyntheticKind::Interaction && dj && x[(j + 1) % n_options] != target[(j + 1) % n_options]) {
                y += u[j];
            }
        }
        values[r] = {y};
    }

    const auto dirs = std::vector<Direction>(objectives.size(), Direction::Minimize);
    std::vector<RowId> optimum;
    std::vector<RowId> front;
    if (objectives.size() == 1) {
        const double best = std::min_element(values.begin(), values.end())->front();
        for (std::size_t r = 0; r < rows; ++r) {
            if (values[r].front() == best) optimum.push_back(r);
        }
        front = optimum;
    } else {
        for (std::size_t i : pareto_front(values, dirs)) front.push_back(i);
    }
    return {Dataset(std::move(options), std::move(objectives), std::move(configs), std::move(values)),
            std::move(optimum), std::move(front)};
}

} // namespace flash
