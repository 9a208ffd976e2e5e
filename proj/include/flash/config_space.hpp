#pragma once

// Configuration spaces, measured datasets, and the measurement oracle.
//
// A Dataset is the ground-truth lookup universe: one row per valid
// configuration, each with one or more measured objectives. It is immutable
// after construction and safe to share between threads. Oracles are stateful
// (they count measurements) and belong to exactly one optimizer run.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace flash {

using RowId = std::size_t;

// Option values are stored as doubles, booleans as 0.0/1.0.
using Configuration = std::vector<double>;

enum class OptionKind { Boolean, Integer };
enum class Direction { Minimize, Maximize };

struct OptionSchema {
    std::string name;
    OptionKind kind = OptionKind::Boolean;
    std::int64_t min = 0; // inclusive; ignored for booleans
    std::int64_t max = 1;

    bool admits(double value) const;
};

struct ObjectiveSchema {
    std::string name;
    Direction direction = Direction::Minimize;
};

std::string to_string(Direction d);
Direction parse_direction(const std::string& text);

// True when `a` is strictly preferable to `b` under direction `d`.
inline bool better(double a, double b, Direction d) {
    return d == Direction::Minimize ? a < b : a > b;
}

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const noexcept;
};

class Dataset {
public:
    // Validates every invariant; throws ValidationError (RowError for
    // row-level problems, 1-based row numbers).
    Dataset(std::vector<OptionSchema> options, std::vector<ObjectiveSchema> objectives,
            std::vector<Configuration> configs, std::vector<std::vector<double>> values);

    std::size_t size() const noexcept { return configs_.size(); }
    std::size_t option_count() const noexcept { return options_.size(); }
    std::size_t objective_count() const noexcept { return objectives_.size(); }

    const std::vector<OptionSchema>& options() const noexcept { return options_; }
    const std::vector<ObjectiveSchema>& objectives() const noexcept { return objectives_; }
    const std::vector<Configuration>& configs() const noexcept { return configs_; }
    const std::vector<std::vector<double>>& values() const noexcept { return values_; }

    const Configuration& config(RowId row) const { return configs_.at(row); }
    const std::vector<double>& objective_values(RowId row) const { return values_.at(row); }

    // Column of one objective across all rows.
    std::vector<double> objective_column(std::size_t objective) const;
    std::vector<Direction> directions() const;

    std::optional<RowId> find(const Configuration& config) const;
    std::optional<std::size_t> objective_index(const std::string& name) const;

    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    std::vector<OptionSchema> options_;
    std::vector<ObjectiveSchema> objectives_;
    std::vector<Configuration> configs_;
    std::vector<std::vector<double>> values_;
    std::unordered_map<Configuration, RowId, ConfigurationHash> index_;
};

// Column declarations read from a manifest file.
struct Manifest {
    std::vector<OptionSchema> options;
    std::vector<ObjectiveSchema> objectives;
};

// Manifest grammar, one declaration per line:
//
//   # comment
//   column name=<id> role=option kind=boolean
//   column name=<id> role=option kind=integer min=<int> max=<int>
//   column name=<id> role=objective direction=minimize|maximize
//
// Keys may appear in any order. Names may not contain whitespace, commas or
// '='. Errors carry the 1-based line number.
Manifest parse_manifest(const std::string& text);
Manifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const Manifest& manifest);

// Reads a manifest plus a comma-separated table with a header row. Every
// declared column must appear in the header; undeclared columns are ignored.
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const std::filesystem::path& data_path);
Dataset parse_dataset(const Manifest& manifest, const std::string& csv_text);

// Option columns only; objective columns are not required. Used when
// measurements come from an external command.
std::vector<Configuration> load_configurations(const Manifest& manifest,
                                               const std::filesystem::path& data_path);

void save_dataset(const Dataset& dataset, const std::filesystem::path& manifest_path,
                  const std::filesystem::path& data_path);
std::string format_dataset_csv(const Dataset& dataset);

// Shortest text that round-trips the double exactly.
std::string format_number(double value);

struct SplitSpec {
    double train_fraction = 0.4;
    double holdout_fraction = 0.2;
    double validation_fraction = 0.4;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Split {
    std::vector<RowId> train_pool;
    std::vector<RowId> holdout;
    std::vector<RowId> validation;
};

// Shuffles row indices with the seed, then cuts holdout and validation to
// floor(fraction * n) rows; the remainder goes to the training pool. Each
// part comes back in shuffled order.
Split split(const Dataset& dataset, const SplitSpec& spec);

class MeasurementOracle {
public:
    virtual ~MeasurementOracle() = default;

    // Objective vector of one configuration; increments the counter by one
    // per call, whether or not the configuration was seen before.
    std::vector<double> measure(const Configuration& config);

    std::size_t count() const noexcept { return count_; }
    virtual std::size_t objective_count() const = 0;

protected:
    virtual std::vector<double> do_measure(const Configuration& config) = 0;

private:
    std::size_t count_ = 0;
};

// Looks measurements up in a Dataset. `objectives` selects and orders the
// reported objective columns; empty means all of them.
class TableOracle final : public MeasurementOracle {
public:
    explicit TableOracle(const Dataset& dataset, std::vector<std::size_t> objectives = {});

    std::size_t objective_count() const override { return objectives_.size(); }

protected:
    std::vector<double> do_measure(const Configuration& config) override;

private:
    const Dataset* dataset_;
    std::vector<std::size_t> objectives_;
};

// Runs a shell command per measurement. `{name}` in the template is replaced
// by the value of option `name`; stdout must contain exactly
// `objective_count` numbers separated by whitespace or commas.
class CommandOracle final : public MeasurementOracle {
public:
    CommandOracle(std::string command_template, std::vector<OptionSchema> options,
                  std::size_t objective_count, std::chrono::milliseconds timeout);

    std::size_t objective_count() const override { return objective_count_; }

    std::string render(const Configuration& config) const;

protected:
    std::vector<double> do_measure(const Configuration& config) override;

private:
    std::string template_;
    std::vector<OptionSchema> options_;
    std::size_t objective_count_;
    std::chrono::milliseconds timeout_;
};

} // namespace flash
