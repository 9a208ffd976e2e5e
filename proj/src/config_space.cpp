#include "flash/config_space.hpp"

#include "flash/error.hpp"
#include "flash/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace flash {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        lines.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return lines;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == ',' || c == '=' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
    });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

// Header position of every declared column.
struct ColumnMap {
    std::vector<std::size_t> options;
    std::vector<std::size_t> objectives;
    std::size_t width = 0;
};

ColumnMap map_columns(const Manifest& m, std::string_view header_line, bool need_objectives) {
    std::map<std::string, std::size_t> pos;
    const auto fields = split_fields(header_line, ',');
    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto name = unquote(fields[i]);
        if (!pos.emplace(name, i).second) throw SchemaError("duplicate header column '" + name + "'");
    }
    ColumnMap map;
    map.width = fields.size();
    for (const auto& o : m.options) {
        auto it = pos.find(o.name);
        if (it == pos.end()) throw SchemaError("missing column '" + o.name + "'");
        map.options.push_back(it->second);
    }
    if (need_objectives) {
        for (const auto& o : m.objectives) {
            auto it = pos.find(o.name);
            if (it == pos.end()) throw SchemaError("missing column '" + o.name + "'");
            map.objectives.push_back(it->second);
        }
    }
    return map;
}

Configuration parse_config_row(const Manifest& m, const ColumnMap& map,
                               const std::vector<std::string_view>& fields, std::size_t row) {
    Configuration c(m.options.size());
    for (std::size_t j = 0; j < m.options.size(); ++j) {
        const auto& opt = m.options[j];
        auto v = parse_double(fields[map.options[j]]);
        if (!v || !std::isfinite(*v)) {
            throw RowError(row, "non-numeric value '" + std::string(trim(fields[map.options[j]])) +
                                    "' in column '" + opt.name + "'");
        }
        if (!opt.admits(*v)) {
            throw RowError(row, "value " + format_number(*v) + " out of bounds for option '" +
                                    opt.name + "'");
        }
        c[j] = *v;
    }
    return c;
}

} // namespace

bool OptionSchema::admits(double value) const {
    if (kind == OptionKind::Boolean) return value == 0.0 || value == 1.0;
    if (value != std::floor(value)) return false;
    return value >= static_cast<double>(min) && value <= static_cast<double>(max);
}

std::string to_string(Direction d) { return d == Direction::Minimize ? "minimize" : "maximize"; }

Direction parse_direction(const std::string& text) {
    if (text == "minimize" || text == "min") return Direction::Minimize;
    if (text == "maximize" || text == "max") return Direction::Maximize;
    throw ValidationError("unknown direction '" + text + "'");
}

std::size_t ConfigurationHash::operator()(const Configuration& c) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (double v : c) {
        const double z = v == 0.0 ? 0.0 : v; // fold -0.0
        std::uint64_t bits = 0;
        std::memcpy(&bits, &z, sizeof bits);
        h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

Dataset::Dataset(std::vector<OptionSchema> options, std::vector<ObjectiveSchema> objectives,
                 std::vector<Configuration> configs, std::vector<std::vector<double>> values)
    : options_(std::move(options)),
      objectives_(std::move(objectives)),
      configs_(std::move(configs)),
      values_(std::move(values)) {
    std::set<std::string> names;
    for (const auto& o : options_) {
        if (!valid_name(o.name)) throw SchemaError("invalid option name '" + o.name + "'");
        if (!names.insert(o.name).second) throw SchemaError("duplicate column name '" + o.name + "'");
        if (o.kind == OptionKind::Integer && o.min > o.max) {
            throw SchemaError("option '" + o.name + "' has min > max");
        }
    }
    if (objectives_.empty()) throw SchemaError("at least one objective is required");
    for (const auto& o : objectives_) {
        if (!valid_name(o.name)) throw SchemaError("invalid objective name '" + o.name + "'");
        if (!names.insert(o.name).second) throw SchemaError("duplicate column name '" + o.name + "'");
    }
    if (configs_.size() != values_.size()) throw ValidationError("configuration/value row count mismatch");
    if (configs_.size() < 2) throw ValidationError("a dataset needs at least 2 rows");

    index_.reserve(configs_.size());
    for (std::size_t r = 0; r < configs_.size(); ++r) {
        const auto& c = configs_[r];
        if (c.size() != options_.size()) throw RowError(r + 1, "wrong number of option values");
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (!options_[j].admits(c[j])) {
                throw RowError(r + 1, "value " + format_number(c[j]) + " out of bounds for option '" +
                                          options_[j].name + "'");
            }
        }
        if (values_[r].size() != objectives_.size()) throw RowError(r + 1, "wrong number of objective values");
        for (double v : values_[r]) {
            if (!std::isfinite(v)) throw RowError(r + 1, "objective value is not finite");
        }
        auto [it, inserted] = index_.emplace(c, r);
        if (!inserted) {
            throw RowError(r + 1, "duplicate configuration (same as row " + std::to_string(it->second + 1) + ")");
        }
    }
}

std::vector<double> Dataset::objective_column(std::size_t objective) const {
    if (objective >= objectives_.size()) throw ValidationError("objective index out of range");
    std::vector<double> col(values_.size());
    for (std::size_t r = 0; r < values_.size(); ++r) col[r] = values_[r][objective];
    return col;
}

std::vector<Direction> Dataset::directions() const {
    std::vector<Direction> d;
    for (const auto& o : objectives_) d.push_back(o.direction);
    return d;
}

std::optional<RowId> Dataset::find(const Configuration& config) const {
    auto it = index_.find(config);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Dataset::objective_index(const std::string& name) const {
    for (std::size_t k = 0; k < objectives_.size(); ++k) {
        if (objectives_[k].name == name) return k;
    }
    return std::nullopt;
}

bool operator==(const Dataset& a, const Dataset& b) {
    auto same_opts = std::equal(a.options_.begin(), a.options_.end(), b.options_.begin(), b.options_.end(),
                                [](const OptionSchema& x, const OptionSchema& y) {
                                    return x.name == y.name && x.kind == y.kind &&
                                           (x.kind == OptionKind::Boolean || (x.min == y.min && x.max == y.max));
                                });
    auto same_objs = std::equal(a.objectives_.begin(), a.objectives_.end(), b.objectives_.begin(),
                                b.objectives_.end(), [](const ObjectiveSchema& x, const ObjectiveSchema& y) {
                                    return x.name == y.name && x.direction == y.direction;
                                });
    return same_opts && same_objs && a.configs_ == b.configs_ && a.values_ == b.values_;
}

Manifest parse_manifest(const std::string& text) {
    Manifest m;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line_no = i + 1;
        std::string_view line = lines[i];
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto fail = [&](const std::string& what) -> SchemaError {
            return SchemaError("manifest line " + std::to_string(line_no) + ": " + what);
        };

        std::istringstream words{std::string(line)};
        std::vector<std::string> storage;
        for (std::string w; words >> w;) storage.push_back(w);
        if (storage.front() != "column") throw fail("expected 'column', got '" + storage.front() + "'");

        std::map<std::string, std::string> kv;
        for (std::size_t t = 1; t < storage.size(); ++t) {
            const auto eq = storage[t].find('=');
            if (eq == std::string::npos || eq == 0) throw fail("expected key=value, got '" + storage[t] + "'");
            auto key = storage[t].substr(0, eq);
            if (!kv.emplace(key, storage[t].substr(eq + 1)).second) throw fail("repeated key '" + key + "'");
        }
        auto take = [&](const std::string& key) -> std::string {
            auto it = kv.find(key);
            if (it == kv.end()) throw fail("missing key '" + key + "'");
            auto v = it->second;
            kv.erase(it);
            return v;
        };

        const auto name = take("name");
        if (!valid_name(name)) throw fail("invalid column name '" + name + "'");
        const auto role = take("role");
        if (role == "option") {
            OptionSchema o;
            o.name = name;
            const auto kind = take("kind");
            if (kind == "boolean" || kind == "bool") {
                o.kind = OptionKind::Boolean;
            } else if (kind == "integer" || kind == "int") {
                o.kind = OptionKind::Integer;
                auto lo = parse_int(take("min"));
                auto hi = parse_int(take("max"));
                if (!lo || !hi) throw fail("integer bounds must be integers");
                if (*lo > *hi) throw fail("min > max for '" + name + "'");
                o.min = *lo;
                o.max = *hi;
            } else {
                throw fail("unknown option kind '" + kind + "'");
            }
            m.options.push_back(o);
        } else if (role == "objective") {
            const auto dir = take("direction");
            if (dir != "minimize" && dir != "maximize") throw fail("unknown direction '" + dir + "'");
            m.objectives.push_back({name, parse_direction(dir)});
        } else {
            throw fail("unknown role '" + role + "'");
        }
        if (!kv.empty()) throw fail("unexpected key '" + kv.begin()->first + "'");
    }

    std::set<std::string> names;
    for (const auto& o : m.options) {
        if (!names.insert(o.name).second) throw SchemaError("duplicate column name '" + o.name + "'");
    }
    for (const auto& o : m.objectives) {
        if (!names.insert(o.name).second) throw SchemaError("duplicate column name '" + o.name + "'");
    }
    if (m.objectives.empty()) throw SchemaError("manifest declares no objective");
    return m;
}

Manifest read_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

std::string format_manifest(const Manifest& m) {
    std::ostringstream out;
    for (const auto& o : m.options) {
        out << "column name=" << o.name << " role=option";
        if (o.kind == OptionKind::Boolean) {
            out << " kind=boolean\n";
        } else {
            out << " kind=integer min=" << o.min << " max=" << o.max << '\n';
        }
    }
    for (const auto& o : m.objectives) {
        out << "column name=" << o.name << " role=objective direction=" << to_string(o.direction) << '\n';
    }
    return out.str();
}

Dataset parse_dataset(const Manifest& m, const std::string& csv_text) {
    const auto lines = split_lines(csv_text);
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) throw SchemaError("data file has no header row");
    const auto map = map_columns(m, lines[first], true);

    std::vector<Configuration> configs;
    std::vector<std::vector<double>> values;
    std::size_t row = 0;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        ++row;
        const auto fields = split_fields(lines[i], ',');
        if (fields.size() != map.width) {
            throw RowError(row, "expected " + std::to_string(map.width) + " fields, found " +
                                    std::to_string(fields.size()));
        }
        configs.push_back(parse_config_row(m, map, fields, row));
        std::vector<double> y(m.objectives.size());
        for (std::size_t k = 0; k < m.objectives.size(); ++k) {
            auto v = parse_double(fields[map.objectives[k]]);
            if (!v || !std::isfinite(*v)) {
                throw RowError(row, "non-numeric value '" + std::string(trim(fields[map.objectives[k]])) +
                                        "' in column '" + m.objectives[k].name + "'");
            }
            y[k] = *v;
        }
        values.push_back(std::move(y));
    }
    return Dataset(m.options, m.objectives, std::move(configs), std::move(values));
}

Dataset load_dataset(const std::filesystem::path& manifest_path, const std::filesystem::path& data_path) {
    return parse_dataset(read_manifest(manifest_path), read_file(data_path));
}

std::vector<Configuration> load_configurations(const Manifest& m, const std::filesystem::path& data_path) {
    const auto text = read_file(data_path);
    const auto lines = split_lines(text);
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) throw SchemaError("data file has no header row");
    const auto map = map_columns(m, lines[first], false);

    std::vector<Configuration> configs;
    std::unordered_set<Configuration, ConfigurationHash> seen;
    std::size_t row = 0;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        ++row;
        const auto fields = split_fields(lines[i], ',');
        if (fields.size() != map.width) throw RowError(row, "wrong number of fields");
        auto c = parse_config_row(m, map, fields, row);
        if (!seen.insert(c).second) throw RowError(row, "duplicate configuration");
        configs.push_back(std::move(c));
    }
    if (configs.empty()) throw ValidationError("no configurations in " + data_path.string());
    return configs;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf.data(), ptr);
}

std::string format_dataset_csv(const Dataset& d) {
    std::ostringstream out;
    bool first = true;
    for (const auto& o : d.options()) {
        out << (first ? "" : ",") << o.name;
        first = false;
    }
    for (const auto& o : d.objectives()) out << ',' << o.name;
    out << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto& c = d.config(r);
        for (std::size_t j = 0; j < c.size(); ++j) out << (j ? "," : "") << format_number(c[j]);
        for (double v : d.objective_values(r)) out << ',' << format_number(v);
        out << '\n';
    }
    return out.str();
}

void save_dataset(const Dataset& d, const std::filesystem::path& manifest_path,
                  const std::filesystem::path& data_path) {
    write_file(manifest_path, format_manifest(Manifest{d.options(), d.objectives()}));
    write_file(data_path, format_dataset_csv(d));
}

void SplitSpec::validate() const {
    for (double f : {train_fraction, holdout_fraction, validation_fraction}) {
        if (!(f > 0.0 && f < 1.0)) throw ValidationError("split fractions must lie in (0, 1)");
    }
    if (std::abs(train_fraction + holdout_fraction + validation_fraction - 1.0) > 1e-9) {
        throw ValidationError("split fractions must sum to 1");
    }
}

Split split(const Dataset& dataset, const SplitSpec& spec) {
    spec.validate();
    const std::size_t n = dataset.size();
    // The epsilon keeps products like 0.2 * 10 from flooring to 1.
    const auto part = [n](double f) {
        return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
    };
    const std::size_t n_holdout = part(spec.holdout_fraction);
    const std::size_t n_validation = part(spec.validation_fraction);
    if (n_holdout == 0 || n_validation == 0 || n_holdout + n_validation >= n) {
        throw ValidationError("split leaves an empty part for " + std::to_string(n) + " rows");
    }
    const std::size_t n_train = n - n_holdout - n_validation;

    std::vector<RowId> rows(n);
    std::iota(rows.begin(), rows.end(), RowId{0});
    Rng rng(spec.seed);
    rng.shuffle(rows);

    Split s;
    s.train_pool.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.holdout.assign(rows.begin() + static_cast<std::ptrdiff_t>(n_train),
                     rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_holdout));
    s.validation.assign(rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_holdout), rows.end());
    return s;
}

std::vector<double> MeasurementOracle::measure(const Configuration& config) {
    ++count_;
    return do_measure(config);
}

TableOracle::TableOracle(const Dataset& dataset, std::vector<std::size_t> objectives)
    : dataset_(&dataset), objectives_(std::move(objectives)) {
    if (objectives_.empty()) {
        objectives_.resize(dataset.objective_count());
        std::iota(objectives_.begin(), objectives_.end(), std::size_t{0});
    }
    for (auto k : objectives_) {
        if (k >= dataset.objective_count()) throw ValidationError("objective index out of range");
    }
}

std::vector<double> TableOracle::do_measure(const Configuration& config) {
    const auto row = dataset_->find(config);
    if (!row) throw MeasurementError("configuration not present in the dataset");
    const auto& all = dataset_->objective_values(*row);
    std::vector<double> out;
    out.reserve(objectives_.size());
    for (auto k : objectives_) out.push_back(all[k]);
    return out;
}

CommandOracle::CommandOracle(std::string command_template, std::vector<OptionSchema> options,
                             std::size_t objective_count, std::chrono::milliseconds timeout)
    : template_(std::move(command_template)),
      options_(std::move(options)),
      objective_count_(objective_count),
      timeout_(timeout) {
    if (template_.empty()) throw ValidationError("empty command template");
    if (objective_count_ == 0) throw ValidationError("command oracle needs at least one objective");
}

std::string CommandOracle::render(const Configuration& config) const {
    if (config.size() != options_.size()) throw MeasurementError("configuration has wrong dimensionality");
    std::string out;
    std::size_t i = 0;
    while (i < template_.size()) {
        if (template_[i] == '{') {
            const auto close = template_.find('}', i);
            if (close == std::string::npos) throw ValidationError("unterminated placeholder in command template");
            const auto name = template_.substr(i + 1, close - i - 1);
            std::size_t j = 0;
            while (j < options_.size() && options_[j].name != name) ++j;
            if (j == options_.size()) throw ValidationError("unknown placeholder '{" + name + "}'");
            out += format_number(config[j]);
            i = close + 1;
        } else {
            out += template_[i++];
        }
    }
    return out;
}

std::vector<double> CommandOracle::do_measure(const Configuration& config) {
    const auto command = render(config);

    int fds[2];
    if (pipe(fds) != 0) throw MeasurementError("pipe() failed");
    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw MeasurementError("fork() failed");
    }
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        close(fds[0]);
        close(fds[1]);
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(fds[1]);

    std::string output;
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    bool timed_out = false;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd p{fds[0], POLLIN, 0};
        const int rc = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) continue;
        char buf[4096];
        const auto got = read(fds[0], buf, sizeof buf);
        if (got <= 0) break;
        output.append(buf, static_cast<std::size_t>(got));
    }
    close(fds[0]);
    if (timed_out) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (timed_out) throw MeasurementError("command timed out: " + command);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw MeasurementError("command failed (status " + std::to_string(WEXITSTATUS(status)) + "): " + command);
    }

    std::vector<double> values;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        auto v = parse_double(token);
        if (!v || !std::isfinite(*v)) throw MeasurementError("unparseable command output '" + token + "'");
        values.push_back(*v);
        token.clear();
    };
    for (char c : output) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    if (values.size() != objective_count_) {
        throw MeasurementError("command printed " + std::to_string(values.size()) + " values, expected " +
                               std::to_string(objective_count_));
    }
    return values;
}

} // namespace flash
