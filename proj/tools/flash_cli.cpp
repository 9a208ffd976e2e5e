// Command-line front end: tune, tune-mo, baseline, eval, experiment, synth.
//
// Exit status: 0 on success, 1 for invalid input or arguments, 2 when a
// run fails (measurement command errors, numerical trouble, I/O).

#include "flash/baselines.hpp"
#include "flash/error.hpp"
#include "flash/flash.hpp"
#include "flash/harness.hpp"
#include "flash/metrics.hpp"
#include "flash/rng.hpp"
#include "flash/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace flash;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out;
    std::size_t cart_min_split = 4;
    std::size_t cart_min_leaf = 2;
    std::size_t size = 30;
    std::size_t budget = 50;
    std::size_t projections = 10;
    std::size_t lives = 3;
    double epsilon = 0.01;
    std::string method;
    bool with_replacement = false;
    double max_wall_time = 0.0; // 0 = unlimited
    bool timing = false;

    CartParams cart() const {
        CartParams p;
        p.min_samples_split = cart_min_split;
        p.min_samples_leaf = cart_min_leaf;
        return p;
    }
    FlashParams flash() const { return {size, budget, projections, seed}; }
    LivesParams lives_params() const { return {lives, 1, with_replacement, seed}; }
    EpalParams epal() const {
        EpalParams p;
        p.epsilon = epsilon;
        p.seed = seed;
        if (max_wall_time > 0.0) p.max_wall_time = max_wall_time;
        return p;
    }
};

struct Source {
    std::string manifest;
    std::string data;
    std::string objectives; // comma-separated names
    std::string command;
    double timeout = 60.0;
};

// Reports a subset of another oracle's objectives, in the given order.
class ProjectedOracle final : public MeasurementOracle {
public:
    ProjectedOracle(MeasurementOracle& inner, std::vector<std::size_t> keep) : inner_(inner), keep_(std::move(keep)) {}
    std::size_t objective_count() const override { return keep_.size(); }

protected:
    std::vector<double> do_measure(const Configuration& config) override {
        const auto all = inner_.measure(config);
        std::vector<double> out;
        for (std::size_t k : keep_) {
            if (k >= all.size()) throw MeasurementError("measurement command returned too few values");
            out.push_back(all[k]);
        }
        return out;
    }

private:
    MeasurementOracle& inner_;
    std::vector<std::size_t> keep_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Everything a tuning command needs: configurations, the oracle, the
// selected objectives and, for table lookups, the dataset for scoring.
struct Problem {
    Manifest manifest;
    std::optional<Dataset> dataset;
    std::vector<Configuration> space;
    std::vector<std::size_t> objectives; // manifest objective indices
    std::vector<Direction> directions;
    std::unique_ptr<MeasurementOracle> base;
    std::unique_ptr<MeasurementOracle> oracle;

    std::vector<std::string> option_names() const {
        std::vector<std::string> n;
        for (const auto& o : manifest.options) n.push_back(o.name);
        return n;
    }
    std::vector<std::string> objective_names() const {
        std::vector<std::string> n;
        for (std::size_t k : objectives) n.push_back(manifest.objectives[k].name);
        return n;
    }
};

std::vector<std::size_t> select_objectives(const Manifest& manifest, const std::string& names, std::size_t default_count) {
    std::vector<std::size_t> out;
    if (names.empty()) {
        for (std::size_t k = 0; k < std::min(default_count, manifest.objectives.size()); ++k) out.push_back(k);
        return out;
    }
    for (const auto& name : split_list(names)) {
        auto it = std::find_if(manifest.objectives.begin(), manifest.objectives.end(),
                               [&](const ObjectiveSchema& o) { return o.name == name; });
        if (it == manifest.objectives.end()) throw ValidationError("unknown objective '" + name + "'");
        const auto k = static_cast<std::size_t>(it - manifest.objectives.begin());
        if (std::find(out.begin(), out.end(), k) != out.end()) throw ValidationError("objective '" + name + "' given twice");
        out.push_back(k);
    }
    return out;
}

Problem load_problem(const Source& src, std::size_t default_objectives) {
    if (src.manifest.empty() || src.data.empty()) throw ValidationError("--manifest and --data are required");
    Problem p;
    p.manifest = read_manifest(src.manifest);
    p.objectives = select_objectives(p.manifest, src.objectives, default_objectives);
    for (std::size_t k : p.objectives) p.directions.push_back(p.manifest.objectives[k].direction);
    if (src.command.empty()) {
        p.dataset = load_dataset(src.manifest, src.data);
        p.space = p.dataset->configs();
        p.oracle = std::make_unique<TableOracle>(*p.dataset, p.objectives);
    } else {
        if (!(src.timeout > 0.0)) throw ValidationError("--timeout must be positive");
        p.space = load_configurations(p.manifest, src.data);
        p.base = std::make_unique<CommandOracle>(
            src.command, p.manifest.options, p.manifest.objectives.size(),
            std::chrono::milliseconds(static_cast<long long>(src.timeout * 1000.0)));
        p.oracle = std::make_unique<ProjectedOracle>(*p.base, p.objectives);
    }
    return p;
}

std::vector<RowId> all_rows(std::size_t n) {
    std::vector<RowId> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error("cannot write " + path.string());
}

fs::path out_dir(const Globals& g) {
    if (g.out.empty()) return {};
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (ec) throw Error("cannot create " + g.out + ": " + ec.message());
    return g.out;
}

std::string config_text(const Problem& p, RowId row) {
    std::string s;
    for (std::size_t j = 0; j < p.manifest.options.size(); ++j) {
        s += (j ? " " : "") + p.manifest.options[j].name + "=" + format_number(p.space[row][j]);
    }
    return s;
}

std::string values_text(const std::vector<std::string>& names, const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < names.size(); ++k) s += (k ? " " : "") + names[k] + "=" + format_number(v[k]);
    return s;
}

const std::vector<double>& measured(const OptimizationRun& run, RowId row) {
    for (const auto& e : run.evaluated) {
        if (e.row == row) return e.objectives;
    }
    throw Error("row missing from trace");
}

// Shared tail of every tuning command: summary to stdout (and summary.txt),
// trace.csv and front.csv under --out.
void report_run(const Problem& p, const OptimizationRun& run, const Globals& g) {
    const auto names = p.objective_names();
    std::ostringstream s;
    s << "method " << run.method << "\n";
    s << "measurements " << run.measurements_used << "\n";
    s << "termination " << to_string(run.termination) << "\n";
    if (run.lives_lost) s << "lives_lost " << run.lives_lost << "\n";
    if (run.best) {
        s << "best_row " << *run.best << "\n";
        s << "best_config " << config_text(p, *run.best) << "\n";
        s << "best_value " << values_text(names, measured(run, *run.best)) << "\n";
        if (p.dataset) {
            const auto column = p.dataset->objective_column(p.objectives.front());
            s << "rank_difference " << rank_difference(column, *run.best, p.directions.front()) << "\n";
        }
    }
    if (p.directions.size() > 1) {
        s << "front_size " << run.front.size() << "\n";
        for (RowId r : run.front) s << "front " << r << " " << values_text(names, measured(run, r)) << "\n";
        if (p.dataset) {
            std::vector<ObjectiveVector> all;
            for (RowId r = 0; r < p.dataset->size(); ++r) {
                ObjectiveVector v;
                for (std::size_t k : p.objectives) v.push_back(p.dataset->objective_values(r)[k]);
                all.push_back(std::move(v));
            }
            std::vector<ObjectiveVector> truth;
            for (auto i : pareto_front(all, p.directions)) truth.push_back(all[i]);
            std::vector<ObjectiveVector> approx;
            for (RowId r : run.front) approx.push_back(measured(run, r));
            for (auto* v : {&truth, &approx}) {
                std::sort(v->begin(), v->end());
                v->erase(std::unique(v->begin(), v->end()), v->end());
            }
            try {
                FrontComparison cmp(truth, approx, p.directions);
                s << "gd " << format_number(cmp.gd()) << "\nigd " << format_number(cmp.igd()) << "\n";
            } catch (const ValidationError&) {
                s << "gd X\nigd X\n";
            }
        }
    }
    if (g.timing) s << "wall_time " << format_number(run.wall_time) << "\n";
    std::cout << s.str();

    const auto dir = out_dir(g);
    if (dir.empty()) return;
    write_text(dir / "summary.txt", s.str());
    const auto opts = p.option_names();
    std::ostringstream trace;
    write_trace_csv(trace, run, p.space, opts, names);
    write_text(dir / "trace.csv", trace.str());
    if (!run.front.empty()) {
        std::ostringstream front;
        front << "row";
        for (const auto& n : opts) front << ',' << n;
        for (const auto& n : names) front << ',' << n;
        front << '\n';
        for (RowId r : run.front) {
            front << r;
            for (double v : p.space[r]) front << ',' << format_number(v);
            for (double v : measured(run, r)) front << ',' << format_number(v);
            front << '\n';
        }
        write_text(dir / "front.csv", front.str());
    }
}

void dump_tree(const Problem& p, const OptimizationRun& run, const CartParams& cart, const std::string& target) {
    if (target.empty()) return;
    std::vector<Configuration> x;
    std::vector<double> y;
    for (const auto& e : run.evaluated) {
        x.push_back(p.space[e.row]);
        y.push_back(e.objectives.front());
    }
    const auto tree = RegressionTree::fit(x, y, cart);
    std::ostringstream text;
    tree.dump(text, p.option_names());
    if (target == "-") {
        std::cout << text.str();
    } else {
        write_text(target, text.str());
    }
}

// Objective columns of a front CSV; other columns are ignored.
std::vector<ObjectiveVector> read_front(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_list(line);
    std::vector<std::size_t> cols;
    for (const auto& n : names) {
        auto it = std::find(header.begin(), header.end(), n);
        if (it == header.end()) throw SchemaError(path + ": missing column '" + n + "'");
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<ObjectiveVector> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string c;
        std::istringstream ls(line);
        while (std::getline(ls, c, ',')) cells.push_back(c);
        ObjectiveVector v;
        for (std::size_t col : cols) {
            if (col >= cells.size()) throw RowError(row, "too few fields");
            std::size_t used = 0;
            double d = 0.0;
            try {
                d = std::stod(cells[col], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[col].size() || !std::isfinite(d)) throw RowError(row, "bad number '" + cells[col] + "'");
            v.push_back(d);
        }
        out.push_back(std::move(v));
    }
    if (out.empty()) throw ValidationError(path + " has no rows");
    return out;
}

std::vector<ObjectiveVector> non_dominated(const std::vector<ObjectiveVector>& pts, const std::vector<Direction>& dirs) {
    std::vector<ObjectiveVector> out;
    for (auto i : pareto_front(pts, dirs)) out.push_back(pts[i]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"FLASH configuration optimizer"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--cart-min-split", g.cart_min_split, "CART: minimum node size to split");
    app.add_option("--cart-min-leaf", g.cart_min_leaf, "CART: minimum leaf size");
    app.add_option("--size", g.size, "initial random sample");
    app.add_option("--budget", g.budget, "acquisition steps");
    app.add_option("--projections", g.projections, "Bazza weight vectors");
    app.add_option("--lives", g.lives, "lives of the sampling baselines");
    app.add_option("--epsilon", g.epsilon, "ePAL epsilon");
    app.add_option("--method", g.method, "baseline method, or comma-separated methods for experiment");
    app.add_flag("--with-replacement", g.with_replacement, "baselines draw training rows with replacement");
    app.add_option("--max-wall-time", g.max_wall_time, "ePAL wall-time limit in seconds (0 = none)");
    app.add_flag("--timing", g.timing, "include wall times in outputs");

    Source src;
    auto add_source = [&](CLI::App* sub, bool command) {
        sub->add_option("--manifest", src.manifest, "column manifest")->required();
        sub->add_option("--data", src.data, "dataset CSV")->required();
        sub->add_option("--objectives,--objective", src.objectives, "comma-separated objective names");
        if (command) {
            sub->add_option("--command", src.command, "measurement command template with {option} placeholders");
            sub->add_option("--timeout", src.timeout, "measurement command timeout in seconds");
        }
    };

    std::string tree_target;
    auto* tune = app.add_subcommand("tune", "single-objective FLASH");
    add_source(tune, true);
    tune->add_option("--dump-tree", tree_target, "write the final CART model ('-' for stdout)");

    auto* tune_mo = app.add_subcommand("tune-mo", "multi-objective FLASH");
    add_source(tune_mo, true);

    auto* baseline = app.add_subcommand("baseline", "run one baseline (--method progressive|rank|epal|random)");
    add_source(baseline, true);

    std::string front_path;
    std::string true_front_path;
    auto* eval = app.add_subcommand("eval", "GD / IGD / RD of a front against a dataset");
    add_source(eval, false);
    eval->add_option("--front", front_path, "approximate front CSV")->required();
    eval->add_option("--true-front", true_front_path, "true front CSV (default: computed from the dataset)");

    std::size_t repeats = 20;
    std::string name;
    std::string from_raw;
    auto* experiment = app.add_subcommand("experiment", "repeated method comparison with Scott-Knott ranking");
    experiment->add_option("--manifest", src.manifest, "column manifest");
    experiment->add_option("--data", src.data, "dataset CSV");
    experiment->add_option("--objectives,--objective", src.objectives, "comma-separated objective names");
    experiment->add_option("--repeats", repeats, "repeats");
    experiment->add_option("--name", name, "dataset label (default: data file stem)");
    experiment->add_option("--from-raw", from_raw, "rebuild report and plot data from a raw.csv");

    std::string kind = "single-peak";
    std::size_t n_options = 10;
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
    synth->add_option("--kind", kind, "single-peak | interaction | bi-objective-tradeoff");
    synth->add_option("--options", n_options, "number of boolean options");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*tune) {
        auto p = load_problem(src, 1);
        if (p.objectives.size() != 1) throw ValidationError("tune optimizes exactly one objective");
        const auto run = flash_single(p.space, all_rows(p.space.size()), *p.oracle, g.flash(), p.directions.front(), g.cart());
        report_run(p, run, g);
        dump_tree(p, run, g.cart(), tree_target);
    } else if (*tune_mo) {
        auto p = load_problem(src, std::numeric_limits<std::size_t>::max());
        const auto run = flash_multi(p.space, all_rows(p.space.size()), *p.oracle, g.flash(), p.directions, g.cart());
        report_run(p, run, g);
    } else if (*baseline) {
        if (g.method.empty()) throw ValidationError("baseline needs --method");
        const auto m = parse_method(g.method);
        const bool multi = m.kind == MethodKind::Epal;
        auto p = load_problem(src, multi ? std::numeric_limits<std::size_t>::max() : 1);
        OptimizationRun run;
        const auto rows = all_rows(p.space.size());
        switch (m.kind) {
        case MethodKind::Progressive:
        case MethodKind::Rank: {
            if (p.objectives.size() != 1) throw ValidationError(m.label() + " optimizes exactly one objective");
            // Shuffled 40/20/40 cut of the rows.
            const SplitSpec spec;
            Rng rng(g.seed);
            auto order = rows;
            rng.shuffle(order);
            const auto n = order.size();
            const auto nh = static_cast<std::size_t>(spec.holdout_fraction * static_cast<double>(n) + 1e-9);
            const auto nv = static_cast<std::size_t>(spec.validation_fraction * static_cast<double>(n) + 1e-9);
            if (nh == 0 || nv == 0 || nh + nv >= n) throw ValidationError("dataset too small for a 40/20/40 split");
            const std::vector<RowId> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nh));
            const std::vector<RowId> validation(order.begin() + static_cast<std::ptrdiff_t>(nh),
                                                order.begin() + static_cast<std::ptrdiff_t>(nh + nv));
            const std::vector<RowId> train(order.begin() + static_cast<std::ptrdiff_t>(nh + nv), order.end());
            auto fn = m.kind == MethodKind::Progressive ? progressive_sampling : rank_based;
            run = fn(p.space, train, holdout, validation, *p.oracle, g.lives_params(), g.cart(), p.directions.front()).run;
            break;
        }
        case MethodKind::Epal: {
            auto params = g.epal();
            if (m.epsilon) params.epsilon = *m.epsilon;
            run = epal(p.space, rows, *p.oracle, params, p.directions);
            break;
        }
        case MethodKind::Random:
            run = random_search(p.space, rows, *p.oracle, std::min(g.size + g.budget, rows.size()), p.directions, g.seed);
            break;
        case MethodKind::Flash:
            throw ValidationError("use tune or tune-mo for FLASH");
        }
        report_run(p, run, g);
    } else if (*eval) {
        const auto dataset = load_dataset(src.manifest, src.data);
        const auto manifest = read_manifest(src.manifest);
        const auto objs = select_objectives(manifest, src.objectives, std::numeric_limits<std::size_t>::max());
        std::vector<std::string> names;
        std::vector<Direction> dirs;
        for (auto k : objs) {
            names.push_back(manifest.objectives[k].name);
            dirs.push_back(manifest.objectives[k].direction);
        }
        std::vector<ObjectiveVector> all;
        for (RowId r = 0; r < dataset.size(); ++r) {
            ObjectiveVector v;
            for (auto k : objs) v.push_back(dataset.objective_values(r)[k]);
            all.push_back(std::move(v));
        }
        const auto approx_points = read_front(front_path, names);
        const auto truth = true_front_path.empty() ? non_dominated(all, dirs) : non_dominated(read_front(true_front_path, names), dirs);
        const auto approx = non_dominated(approx_points, dirs);

        std::ostringstream s;
        s << "objectives";
        for (const auto& n : names) s << ' ' << n;
        s << "\ntrue_front_size " << truth.size() << "\napprox_front_size " << approx.size() << "\n";
        if (dirs.size() > 1) {
            FrontComparison cmp(truth, approx, dirs);
            s << "gd " << format_number(cmp.gd()) << "\nigd " << format_number(cmp.igd()) << "\n";
        }
        // Rank difference of the front's best value on the first objective:
        // the number of dataset rows strictly better than it.
        double best = approx_points.front()[0];
        for (const auto& v : approx_points) {
            if (better(v[0], best, dirs[0])) best = v[0];
        }
        std::size_t rd = 0;
        for (const auto& v : all) {
            if (better(v[0], best, dirs[0])) ++rd;
        }
        s << "rank_difference " << rd << "\n";
        std::cout << s.str();
        const auto dir = out_dir(g);
        if (!dir.empty()) write_text(dir / "eval.txt", s.str());
    } else if (*experiment) {
        if (g.out.empty()) throw ValidationError("experiment needs --out");
        SkParams sk;
        sk.seed = g.seed;
        QualityReport report;
        if (!from_raw.empty()) {
            std::ifstream in(from_raw, std::ios::binary);
            if (!in) throw ValidationError("cannot open " + from_raw);
            std::ostringstream text;
            text << in.rdbuf();
            report = parse_raw_csv(text.str());
            rank_report(report, sk);
        } else {
            if (src.manifest.empty() || src.data.empty()) throw ValidationError("experiment needs --manifest and --data, or --from-raw");
            const auto dataset = load_dataset(src.manifest, src.data);
            ExperimentSpec spec;
            spec.dataset_name = name.empty() ? fs::path(src.data).stem().string() : name;
            spec.objectives = select_objectives(read_manifest(src.manifest), src.objectives, std::numeric_limits<std::size_t>::max());
            const bool multi = spec.objectives.size() > 1;
            const std::string methods = !g.method.empty() ? g.method
                                        : multi           ? "flash,epal:0.01,epal:0.3,random"
                                                          : "flash,progressive,rank,random";
            for (const auto& m : split_list(methods)) spec.methods.push_back(parse_method(m));
            spec.repeats = repeats;
            spec.seed = g.seed;
            spec.flash = g.flash();
            spec.cart = g.cart();
            spec.lives = g.lives_params();
            spec.epal = g.epal();
            spec.sk = sk;
            spec.timing = g.timing;
            report = run_experiment(dataset, spec);
        }
        emit_plot_data(report, g.out);
        std::cout << render_report(report);
    } else if (*synth) {
        if (g.out.empty()) throw ValidationError("synth needs --out");
        const auto s = generate_synthetic(parse_synthetic_kind(kind), n_options, g.seed);
        const auto dir = out_dir(g);
        save_dataset(s.dataset, dir / "synthetic.manifest", dir / "synthetic.csv");
        std::ostringstream best;
        best << "row\n";
        for (RowId r : s.dataset.objective_count() == 1 ? s.optimum : s.front) best << r << '\n';
        write_text(dir / (s.dataset.objective_count() == 1 ? "optimum.csv" : "front.csv"), best.str());
        std::cout << "kind " << to_string(parse_synthetic_kind(kind)) << "\nrows " << s.dataset.size() << "\noptions "
                  << n_options << "\nobjectives " << s.dataset.objective_count() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
