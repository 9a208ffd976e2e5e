#pragma once

// Experiment rig: repeated, seeded comparisons of optimizers on one dataset,
// Scott-Knott ranking per metric, a text report and plot-data CSVs.
//
// Repeat r uses seed + r for the 40/20/40 split and for every method, so all
// methods of a repeat see the same data. Progressive and rank-based sampling
// use the split as is; FLASH, random search and ePAL draw from the merged
// training and validation pools (80% of the rows).

#include "flash/baselines.hpp"
#include "flash/cart.hpp"
#include "flash/config_space.hpp"
#include "flash/flash.hpp"
#include "flash/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flash {

enum class MethodKind { Flash, Progressive, Rank, Epal, Random };

struct MethodSpec {
    MethodKind kind = MethodKind::Flash;
    std::optional<double> epsilon; // ePAL only; defaults to EpalParams::epsilon

    std::string label() const;
};

// "flash", "progressive", "rank", "random", "epal" or "epal:<epsilon>".
MethodSpec parse_method(const std::string& text);

struct ExperimentSpec {
    std::string dataset_name = "dataset";
    std::vector<MethodSpec> methods;
    std::vector<std::size_t> objectives; // dataset objective columns; empty = all
    std::size_t repeats = 20;
    std::uint64_t seed = 0;
    FlashParams flash{};
    CartParams cart{};
    LivesParams lives{};
    EpalParams epal{};
    std::optional<std::size_t> random_budget; // defaults to size + budget
    SplitSpec split{};
    SkParams sk{};
    bool timing = false; // record wall time in outputs

    void validate(const Dataset& dataset) const;
};

struct MethodResult {
    std::string method;
    std::size_t repeat = 0;
    bool ok = false; // false renders as "X"
    std::string termination;
    std::size_t measurements = 0;
    std::optional<std::size_t> rank_difference;      // against the whole dataset
    std::optional<std::size_t> rank_difference_pool; // against the rows the method could see
    std::optional<double> gd;
    std::optional<double> igd;
    std::optional<double> wall_time;
};

struct QualityReport {
    std::string dataset_name;
    bool multi_objective = false;
    std::vector<std::string> methods;  // in the order given
    std::size_t repeats = 0;
    std::vector<MethodResult> results; // by repeat, then method
    // metric name -> method -> Scott-Knott rank; methods without a single
    // successful repeat are absent.
    std::map<std::string, std::map<std::string, std::size_t>> ranks;

    // Observations of a metric for one method, successful repeats only.
    std::vector<double> observations(const std::string& metric, const std::string& method) const;
    // "rank_difference" and "measurements", or "gd", "igd", "measurements".
    std::vector<std::string> metrics() const;
};

QualityReport run_experiment(const Dataset& dataset, const ExperimentSpec& spec);

// Recomputes Scott-Knott ranks from the stored results.
void rank_report(QualityReport& report, const SkParams& params);

// Per-metric tables of rank, method, median, IQR and a quartile bar.
std::string render_report(const QualityReport& report);

std::string format_raw_csv(const QualityReport& report);
QualityReport parse_raw_csv(const std::string& text);

// Writes raw.csv, report.txt, measurements.csv and time_gain.csv, plus
// rank_difference.csv (single objective) or gd_igd.csv (multiple). Returns
// the written paths.
std::vector<std::filesystem::path> emit_plot_data(const QualityReport& report, const std::filesystem::path& out_dir);

} // namespace flash
