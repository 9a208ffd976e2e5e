#include "flash/harness.hpp"

#include "flash/error.hpp"
#include "flash/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace flash {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

template <typename T>
std::string cell(const std::optional<T>& v) {
    if (!v) return "";
    return format_number(static_cast<double>(*v));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Rows of `rows` whose value is strictly better than values[chosen].
std::size_t rank_difference_within(std::span<const double> column, std::span<const RowId> rows, RowId chosen,
                                   Direction d) {
    std::size_t better_count = 0;
    for (RowId r : rows) {
        if (better(column[r], column[chosen], d)) ++better_count;
    }
    return better_count;
}

std::vector<ObjectiveVector> distinct_vectors(std::vector<ObjectiveVector> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct Context {
    const Dataset& dataset;
    const ExperimentSpec& spec;
    std::vector<std::size_t> objectives;
    std::vector<Direction> directions;
    std::vector<double> column; // first selected objective
    std::vector<ObjectiveVector> true_front;
};

ObjectiveVector selected(const Context& ctx, RowId row) {
    ObjectiveVector v;
    for (std::size_t k : ctx.objectives) v.push_back(ctx.dataset.objective_values(row)[k]);
    return v;
}

MethodResult run_method(const Context& ctx, const MethodSpec& method, std::size_t repeat, const Split& parts,
                        std::span<const RowId> pool) {
    const auto& spec = ctx.spec;
    const std::uint64_t seed = spec.seed + repeat;
    const auto& space = ctx.dataset.configs();
    const bool multi = ctx.objectives.size() > 1;

    MethodResult result;
    result.method = method.label();
    result.repeat = repeat;

    TableOracle oracle(ctx.dataset, ctx.objectives);
    const auto start = std::chrono::steady_clock::now();
    try {
        OptimizationRun run;
        std::span<const RowId> visible = pool;
        switch (method.kind) {
        case MethodKind::Flash: {
            FlashParams p = spec.flash;
            p.seed = seed;
            run = multi ? flash_multi(space, pool, oracle, p, ctx.directions, spec.cart)
                        : flash_single(space, pool, oracle, p, ctx.directions.front(), spec.cart);
            break;
        }
        case MethodKind::Progressive:
        case MethodKind::Rank: {
            LivesParams p = spec.lives;
            p.seed = seed;
            auto fn = method.kind == MethodKind::Progressive ? progressive_sampling : rank_based;
            run = fn(space, parts.train_pool, parts.holdout, parts.validation, oracle, p, spec.cart,
                     ctx.directions.front())
                      .run;
            visible = parts.validation;
            break;
        }
        case MethodKind::Epal: {
            EpalParams p = spec.epal;
            p.seed = seed;
            if (method.epsilon) p.epsilon = *method.epsilon;
            run = epal(space, pool, oracle, p, ctx.directions);
            break;
        }
        case MethodKind::Random: {
            const std::size_t n = std::min(spec.random_budget.value_or(spec.flash.size + spec.flash.budget), pool.size());
            run = random_search(space, pool, oracle, n, ctx.directions, seed);
            break;
        }
        }
        if (run.measurements_used != oracle.count()) {
            throw MeasurementError("run trace and oracle counter disagree");
        }
        result.measurements = oracle.count();
        result.termination = to_string(run.termination);
        result.ok = run.termination != Termination::WallTimeExceeded;
        if (multi) {
            std::vector<ObjectiveVector> approx;
            for (RowId r : run.front) approx.push_back(selected(ctx, r));
            FrontComparison cmp(ctx.true_front, distinct_vectors(std::move(approx)), ctx.directions);
            result.gd = cmp.gd();
            result.igd = cmp.igd();
        } else {
            if (!run.best) throw MeasurementError("run returned no configuration");
            result.rank_difference = rank_difference(ctx.column, *run.best, ctx.directions.front());
            result.rank_difference_pool = rank_difference_within(ctx.column, visible, *run.best, ctx.directions.front());
        }
    } catch (const std::exception& e) {
        result.ok = false;
        result.measurements = oracle.count();
        result.termination = "error";
    }
    if (spec.timing) {
        result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return result;
}

const MethodResult* find_result(const QualityReport& report, const std::string& method, std::size_t repeat) {
    for (const auto& r : report.results) {
        if (r.method == method && r.repeat == repeat) return &r;
    }
    return nullptr;
}

std::optional<double> metric_value(const MethodResult& r, const std::string& metric) {
    if (!r.ok) return std::nullopt;
    if (metric == "rank_difference" && r.rank_difference) return static_cast<double>(*r.rank_difference);
    if (metric == "rank_difference_pool" && r.rank_difference_pool) return static_cast<double>(*r.rank_difference_pool);
    if (metric == "gd") return r.gd;
    if (metric == "igd") return r.igd;
    if (metric == "measurements") return static_cast<double>(r.measurements);
    if (metric == "wall_time") return r.wall_time;
    return std::nullopt;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

} // namespace

std::string MethodSpec::label() const {
    switch (kind) {
    case MethodKind::Flash: return "flash";
    case MethodKind::Progressive: return "progressive";
    case MethodKind::Rank: return "rank";
    case MethodKind::Random: return "random";
    case MethodKind::Epal: return epsilon ? "epal:" + format_number(*epsilon) : "epal";
    }
    return "?";
}

MethodSpec parse_method(const std::string& text) {
    if (text == "flash") return {MethodKind::Flash, {}};
    if (text == "progressive") return {MethodKind::Progressive, {}};
    if (text == "rank") return {MethodKind::Rank, {}};
    if (text == "random") return {MethodKind::Random, {}};
    if (text == "epal") return {MethodKind::Epal, {}};
    if (text.rfind("epal:", 0) == 0) {
        const std::string num = text.substr(5);
        std::size_t used = 0;
        double eps = 0.0;
        try {
            eps = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size() || !(eps >= 0.0)) {
            throw ValidationError("bad ePAL epsilon in '" + text + "'");
        }
        return {MethodKind::Epal, eps};
    }
    throw ValidationError("unknown method '" + text + "' (expected flash, progressive, rank, epal[:eps] or random)");
}

void ExperimentSpec::validate(const Dataset& dataset) const {
    if (methods.empty()) throw ValidationError("an experiment needs at least one method");
    if (repeats < 1) throw ValidationError("repeats must be >= 1");
    if (dataset_name.find_first_of(",\n\r") != std::string::npos) {
        throw ValidationError("dataset name may not contain commas or newlines");
    }
    std::set<std::size_t> seen_objectives;
    for (std::size_t k : objectives) {
        if (k >= dataset.objective_count()) throw ValidationError("objective index out of range");
        if (!seen_objectives.insert(k).second) throw ValidationError("objective selected twice");
    }
    const std::size_t m = objectives.empty() ? dataset.objective_count() : objectives.size();
    std::set<std::string> labels;
    for (const auto& method : methods) {
        if (!labels.insert(method.label()).second) throw ValidationError("method '" + method.label() + "' listed twice");
        const bool lives_based = method.kind == MethodKind::Progressive || method.kind == MethodKind::Rank;
        if (lives_based && m != 1) throw ValidationError(method.label() + " handles a single objective only");
        if (method.kind == MethodKind::Epal && m < 2) throw ValidationError("epal needs at least two objectives");
    }
    flash.validate();
    cart.validate();
    lives.validate();
    epal.validate();
    split.validate();
    sk.validate();
}

std::vector<double> QualityReport::observations(const std::string& metric, const std::string& method) const {
    std::vector<double> out;
    for (const auto& r : results) {
        if (r.method != method) continue;
        if (auto v = metric_value(r, metric)) out.push_back(*v);
    }
    return out;
}

std::vector<std::string> QualityReport::metrics() const {
    if (multi_objective) return {"gd", "igd", "measurements"};
    return {"rank_difference", "measurements"};
}

QualityReport run_experiment(const Dataset& dataset, const ExperimentSpec& spec) {
    spec.validate(dataset);

    Context ctx{dataset, spec, spec.objectives, {}, {}, {}};
    if (ctx.objectives.empty()) {
        for (std::size_t k = 0; k < dataset.objective_count(); ++k) ctx.objectives.push_back(k);
    }
    for (std::size_t k : ctx.objectives) ctx.directions.push_back(dataset.objectives()[k].direction);
    ctx.column = dataset.objective_column(ctx.objectives.front());
    const bool multi = ctx.objectives.size() > 1;
    if (multi) {
        std::vector<ObjectiveVector> all;
        for (RowId r = 0; r < dataset.size(); ++r) all.push_back(selected(ctx, r));
        std::vector<ObjectiveVector> front;
        for (std::size_t i : pareto_front(all, ctx.directions)) front.push_back(all[i]);
        ctx.true_front = distinct_vectors(std::move(front));
    }

    // Each repeat owns its split and oracles; slots keep repeat order.
    std::vector<std::vector<MethodResult>> per_repeat(spec.repeats);
    std::vector<std::string> failures(spec.repeats);
    const auto n = static_cast<long>(spec.repeats);
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < n; ++r) {
        const auto rep = static_cast<std::size_t>(r);
        try {
            SplitSpec s = spec.split;
            s.seed = spec.seed + rep;
            const Split parts = split(dataset, s);
            std::vector<RowId> pool = parts.train_pool;
            pool.insert(pool.end(), parts.validation.begin(), parts.validation.end());
            for (const auto& method : spec.methods) per_repeat[rep].push_back(run_method(ctx, method, rep, parts, pool));
        } catch (const std::exception& e) {
            failures[rep] = e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) throw ValidationError(f);
    }

    QualityReport report;
    report.dataset_name = spec.dataset_name;
    report.multi_objective = multi;
    report.repeats = spec.repeats;
    for (const auto& m : spec.methods) report.methods.push_back(m.label());
    for (auto& rows : per_repeat) {
        for (auto& row : rows) report.results.push_back(std::move(row));
    }
    rank_report(report, spec.sk);
    return report;
}

void rank_report(QualityReport& report, const SkParams& params) {
    report.ranks.clear();
    for (const auto& metric : report.metrics()) {
        std::vector<Treatment> treatments;
        for (const auto& method : report.methods) {
            auto obs = report.observations(metric, method);
            if (!obs.empty()) treatments.push_back({method, std::move(obs)});
        }
        if (treatments.empty()) continue;
        SkParams p = params;
        p.lower_is_better = true;
        report.ranks[metric] = scott_knott(std::move(treatments), p);
    }
}

std::string render_report(const QualityReport& report) {
    constexpr std::size_t width = 30;
    std::ostringstream out;
    out << "dataset " << report.dataset_name << ", " << report.repeats << " repeats, "
        << (report.multi_objective ? "multi-objective" : "single-objective") << "\n";

    for (const auto& metric : report.metrics()) {
        out << "\n" << metric << " (lower is better)\n";
        double lo = 0.0;
        double hi = 0.0;
        bool any = false;
        for (const auto& method : report.methods) {
            for (double v : report.observations(metric, method)) {
                lo = any ? std::min(lo, v) : v;
                hi = any ? std::max(hi, v) : v;
                any = true;
            }
        }
        auto column = [&](double v) {
            if (hi <= lo) return std::size_t{0};
            return std::min(width - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(width - 1) + 0.5));
        };

        char head[128];
        std::snprintf(head, sizeof head, "%4s  %-14s %10s %10s %6s  %s\n", "rank", "method", "median", "iqr", "X",
                      "quartiles");
        out << head;

        // Ranked methods first, in rank then median order; unranked ones last.
        struct Row {
            std::string method;
            std::optional<std::size_t> rank;
            std::vector<double> obs;
        };
        std::vector<Row> rows;
        const auto ranks_it = report.ranks.find(metric);
        for (const auto& method : report.methods) {
            Row row{method, {}, report.observations(metric, method)};
            if (ranks_it != report.ranks.end()) {
                if (auto it = ranks_it->second.find(method); it != ranks_it->second.end()) row.rank = it->second;
            }
            rows.push_back(std::move(row));
        }
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.rank.has_value() != b.rank.has_value()) return a.rank.has_value();
            if (!a.rank) return false;
            if (*a.rank != *b.rank) return *a.rank < *b.rank;
            return median(a.obs) < median(b.obs);
        });

        for (const auto& row : rows) {
            const std::size_t failed = report.repeats - row.obs.size();
            char line[256];
            if (row.obs.empty()) {
                std::snprintf(line, sizeof line, "%4s  %-14s %10s %10s %6zu\n", "X", row.method.c_str(), "X", "X", failed);
                out << line;
                continue;
            }
            const double q1 = percentile(row.obs, 25.0);
            const double q2 = percentile(row.obs, 50.0);
            const double q3 = percentile(row.obs, 75.0);
            std::string bar(width, ' ');
            for (std::size_t c = column(q1); c <= column(q3); ++c) bar[c] = '-';
            bar[column(q2)] = '*';
            std::snprintf(line, sizeof line, "%4zu  %-14s %10s %10s %6zu  |%s|\n", *row.rank, row.method.c_str(),
                          fmt_g(q2).c_str(), fmt_g(q3 - q1).c_str(), failed, bar.c_str());
            out << line;
        }
        out << "scale: " << fmt_g(lo) << " .. " << fmt_g(hi) << "\n";
    }
    return out.str();
}

std::string format_raw_csv(const QualityReport& report) {
    std::ostringstream out;
    out << "dataset,method,repeat,status,kind,termination,measurements,rank_difference,rank_difference_pool,gd,igd,"
           "wall_time\n";
    for (const auto& r : report.results) {
        out << report.dataset_name << ',' << r.method << ',' << r.repeat << ',' << (r.ok ? "ok" : "X") << ','
            << (report.multi_objective ? "multi" : "single") << ',' << r.termination << ',' << r.measurements << ','
            << cell(r.rank_difference) << ',' << cell(r.rank_difference_pool) << ',' << cell(r.gd) << ','
            << cell(r.igd) << ',' << cell(r.wall_time) << '\n';
    }
    return out.str();
}

QualityReport parse_raw_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("raw results file is empty");
    const auto header = split_csv_line(line);
    if (header.size() != 12 || header[0] != "dataset" || header[11] != "wall_time") {
        throw SchemaError("unexpected raw results header");
    }
    QualityReport report;
    std::size_t line_no = 1;
    std::size_t max_repeat = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 12) throw RowError(line_no, "expected 12 fields");
        try {
            auto opt_size = [](const std::string& s) -> std::optional<std::size_t> {
                if (s.empty()) return std::nullopt;
                return static_cast<std::size_t>(std::stoull(s));
            };
            auto opt_double = [](const std::string& s) -> std::optional<double> {
                if (s.empty()) return std::nullopt;
                return std::stod(s);
            };
            MethodResult r;
            report.dataset_name = f[0];
            r.method = f[1];
            r.repeat = static_cast<std::size_t>(std::stoull(f[2]));
            r.ok = f[3] == "ok";
            report.multi_objective = f[4] == "multi";
            r.termination = f[5];
            r.measurements = static_cast<std::size_t>(std::stoull(f[6]));
            r.rank_difference = opt_size(f[7]);
            r.rank_difference_pool = opt_size(f[8]);
            r.gd = opt_double(f[9]);
            r.igd = opt_double(f[10]);
            r.wall_time = opt_double(f[11]);
            if (std::find(report.methods.begin(), report.methods.end(), r.method) == report.methods.end()) {
                report.methods.push_back(r.method);
            }
            max_repeat = std::max(max_repeat, r.repeat);
            report.results.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw RowError(line_no, "malformed number");
        }
    }
    if (report.results.empty()) throw ValidationError("raw results file has no rows");
    report.repeats = max_repeat + 1;
    return report;
}

std::vector<std::filesystem::path> emit_plot_data(const QualityReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(out_dir / name, text);
        written.push_back(out_dir / name);
    };

    emit("raw.csv", format_raw_csv(report));
    emit("report.txt", render_report(report));

    if (report.multi_objective) {
        std::ostringstream gi;
        gi << "dataset,method,repeat,gd,igd\n";
        for (const auto& r : report.results) {
            gi << report.dataset_name << ',' << r.method << ',' << r.repeat << ','
               << (r.ok && r.gd ? format_number(*r.gd) : "X") << ',' << (r.ok && r.igd ? format_number(*r.igd) : "X")
               << '\n';
        }
        emit("gd_igd.csv", gi.str());
    } else {
        std::ostringstream rd;
        rd << "dataset,method,repeat,rank_difference\n";
        for (const auto& r : report.results) {
            rd << report.dataset_name << ',' << r.method << ',' << r.repeat << ','
               << (r.ok && r.rank_difference ? std::to_string(*r.rank_difference) : "X") << '\n';
        }
        emit("rank_difference.csv", rd.str());
    }

    // Measurements relative to progressive sampling when it ran, else to the
    // first method.
    const auto has = [&](const std::string& m) {
        return std::find(report.methods.begin(), report.methods.end(), m) != report.methods.end();
    };
    const std::string mref = has("progressive") ? "progressive" : report.methods.front();
    std::ostringstream ms;
    ms << "dataset,method,repeat,measurements,ratio\n";
    for (const auto& r : report.results) {
        const auto* ref = find_result(report, mref, r.repeat);
        ms << report.dataset_name << ',' << r.method << ',' << r.repeat << ','
           << (r.ok ? std::to_string(r.measurements) : "X") << ',';
        if (r.ok && ref && ref->ok && ref->measurements > 0) {
            ms << format_number(static_cast<double>(r.measurements) / static_cast<double>(ref->measurements));
        } else {
            ms << 'X';
        }
        ms << '\n';
    }
    emit("measurements.csv", ms.str());

    // One column per method, one row per repeat: cost relative to FLASH (or
    // the first method). Cost is wall time when it was recorded, otherwise
    // the measurement count.
    const std::string gref = has("flash") ? "flash" : report.methods.front();
    std::ostringstream tg;
    for (std::size_t i = 0; i < report.methods.size(); ++i) tg << (i ? "," : "") << report.methods[i];
    tg << '\n';
    for (std::size_t rep = 0; rep < report.repeats; ++rep) {
        const auto* ref = find_result(report, gref, rep);
        for (std::size_t i = 0; i < report.methods.size(); ++i) {
            if (i) tg << ',';
            const auto* r = find_result(report, report.methods[i], rep);
            auto cost = [](const MethodResult* x) -> std::optional<double> {
                if (!x || !x->ok) return std::nullopt;
                if (x->wall_time) return *x->wall_time;
                return static_cast<double>(x->measurements);
            };
            const auto c = cost(r);
            const auto c0 = cost(ref);
            if (c && c0 && *c0 > 0.0) {
                tg << format_number(*c / *c0);
            } else {
                tg << 'X';
            }
        }
        tg << '\n';
    }
    emit("time_gain.csv", tg.str());
    return written;
}

} // namespace flash
