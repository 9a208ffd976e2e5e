#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flash/config_space.hpp"
#include "flash/error.hpp"
#include "oracles.hpp"

#include <fstream>
#include <set>

using namespace flash;

namespace {

const char* kTwoBool = "column name=a role=option kind=boolean\n"
                       "column name=b role=option kind=boolean\n"
                       "column name=perf role=objective direction=minimize\n";

Dataset tiny() { return parse_dataset(parse_manifest(kTwoBool), "a,b,perf\n0,0,4\n0,1,3\n1,0,2\n1,1,1\n"); }

Dataset numbered(std::size_t n) {
    Manifest m;
    m.options = {{"x", OptionKind::Integer, 0, static_cast<std::int64_t>(n)}};
    m.objectives = {{"y", Direction::Minimize}};
    std::string csv = "x,y\n";
    for (std::size_t i = 0; i < n; ++i) csv += std::to_string(i) + "," + std::to_string(i * 2 + 1) + "\n";
    return parse_dataset(m, csv);
}

void check_partition(const Split& s, std::size_t n) {
    std::set<RowId> all;
    for (const auto* part : {&s.train_pool, &s.holdout, &s.validation}) {
        for (RowId r : *part) CHECK(all.insert(r).second);
    }
    CHECK(all.size() == n);
    CHECK(*all.rbegin() == n - 1);
}

} // namespace

TEST_CASE("manifest grammar") {
    const auto m = parse_manifest("# header comment\n"
                                  "column name=threads role=option kind=integer min=1 max=8\n"
                                  "\n"
                                  "column role=option name=cache kind=boolean  # trailing\n"
                                  "column name=latency role=objective direction=minimize\n"
                                  "column name=throughput role=objective direction=maximize\n");
    REQUIRE(m.options.size() == 2);
    CHECK(m.options[0].kind == OptionKind::Integer);
    CHECK(m.options[0].min == 1);
    CHECK(m.options[0].max == 8);
    CHECK(m.options[1].name == "cache");
    REQUIRE(m.objectives.size() == 2);
    CHECK(m.objectives[1].direction == Direction::Maximize);
    CHECK(parse_manifest(format_manifest(m)).options.size() == 2);

    CHECK_THROWS_AS(parse_manifest("col name=a role=option kind=boolean\n"), SchemaError);
    CHECK_THROWS_AS(parse_manifest("column name=a role=option kind=float\ncolumn name=y role=objective direction=minimize\n"),
                    SchemaError);
    CHECK_THROWS_AS(parse_manifest("column name=a role=option kind=integer min=3 max=1\n"), SchemaError);
    CHECK_THROWS_AS(parse_manifest("column name=a role=option kind=boolean\n"), SchemaError);
    CHECK_THROWS_AS(parse_manifest("column name=a role=option kind=boolean\ncolumn name=a role=objective direction=minimize\n"),
                    SchemaError);
    CHECK_THROWS_AS(parse_manifest("column name=y role=objective direction=upward\n"), SchemaError);
    try {
        parse_manifest("column name=a role=option kind=boolean\ncolumn name=b role=option\n");
        FAIL("expected an error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_dataset on an exhaustive two-option space") {
    const auto d = tiny();
    CHECK(d.size() == 4);
    CHECK(d.option_count() == 2);
    CHECK(d.objective_count() == 1);
    CHECK(d.config(2) == Configuration{1, 0});
    CHECK(d.objective_values(3) == std::vector<double>{1});
    CHECK(d.find({0, 1}) == RowId{1});
    CHECK_FALSE(d.find({2, 1}).has_value());
}

TEST_CASE("dataset errors") {
    const auto m = parse_manifest(kTwoBool);
    CHECK_THROWS_AS(parse_dataset(m, "a,b,perf\n0,0,4\n0,1,3\n0,0,2\n"), ValidationError);
    try {
        parse_dataset(m, "a,b,perf\n0,0,4\n0,1,3\n0,0,2\n");
    } catch (const RowError& e) {
        CHECK(e.row() == 3);
    }
    try {
        parse_dataset(m, "a,perf\n0,4\n1,3\n");
        FAIL("expected an error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
    try {
        parse_dataset(m, "a,b,perf\n0,0,4\n0,x,3\n");
        FAIL("expected an error");
    } catch (const RowError& e) {
        CHECK(e.row() == 2);
    }
    try {
        parse_dataset(m, "a,b,perf\n0,0,4\n0,2,3\n");
        FAIL("expected an error");
    } catch (const RowError& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(parse_dataset(m, "a,b,perf\n0,0,4\n"), ValidationError);
    CHECK_THROWS_AS(parse_dataset(m, "a,b,perf\n0,0,4\n0,1,nan\n"), RowError);
    // Undeclared columns are ignored and column order is free.
    const auto d = parse_dataset(m, "note,perf,b,a\nx,4,0,0\ny,3,1,0\n");
    CHECK(d.config(1) == Configuration{0, 1});
}

TEST_CASE("load/save round trip") {
    const auto dir = oracle::scratch_dir("roundtrip");
    Manifest m;
    m.options = {{"n", OptionKind::Integer, -5, 40}, {"flag", OptionKind::Boolean, 0, 1}};
    m.objectives = {{"time", Direction::Minimize}, {"ops", Direction::Maximize}};
    const auto d = parse_dataset(m, "n,flag,time,ops\n-5,0,0.1,3e7\n40,1,2.5e-9,17\n3,1,1234.5678,0.3333333333333333\n");
    save_dataset(d, dir / "d.manifest", dir / "d.csv");
    const auto back = load_dataset(dir / "d.manifest", dir / "d.csv");
    CHECK(back == d);
}

TEST_CASE("split sizes and partition") {
    SUBCASE("10 rows") {
        const auto d = numbered(10);
        const auto s = split(d, {0.4, 0.2, 0.4, 7});
        CHECK(s.train_pool.size() == 4);
        CHECK(s.holdout.size() == 2);
        CHECK(s.validation.size() == 4);
        check_partition(s, 10);
        const auto again = split(d, {0.4, 0.2, 0.4, 7});
        CHECK(again.train_pool == s.train_pool);
        CHECK(again.holdout == s.holdout);
        CHECK(again.validation == s.validation);
    }
    SUBCASE("1343 rows") {
        const auto d = numbered(1343);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto s = split(d, {0.4, 0.2, 0.4, seed});
            CHECK(s.train_pool.size() == 538);
            CHECK(s.holdout.size() == 268);
            CHECK(s.validation.size() == 537);
            check_partition(s, 1343);
        }
    }
    CHECK_THROWS_AS(split(numbered(3), {0.4, 0.2, 0.4, 1}), ValidationError);
    CHECK_THROWS_AS(split(numbered(10), {0.5, 0.2, 0.4, 1}), ValidationError);
}

TEST_CASE("table oracle counts every call") {
    const auto d = tiny();
    TableOracle o(d);
    CHECK(o.count() == 0);
    CHECK(o.measure(d.config(0)) == d.objective_values(0));
    CHECK(o.count() == 1);
    o.measure(d.config(0));
    CHECK(o.count() == 2);
    CHECK_THROWS_AS(o.measure({5, 5}), MeasurementError);
}

TEST_CASE("command oracle") {
    const auto m = parse_manifest(kTwoBool);
    SUBCASE("fixed echo") {
        CommandOracle o("echo 42.0", m.options, 1, std::chrono::milliseconds(5000));
        CHECK(o.measure({0, 1}) == std::vector<double>{42.0});
        CHECK(o.count() == 1);
    }
    SUBCASE("placeholders") {
        CommandOracle o("echo $(({a} * 10 + {b})), 7", m.options, 2, std::chrono::milliseconds(5000));
        CHECK(o.render({1, 0}) == "echo $((1 * 10 + 0)), 7");
        CHECK(o.measure({1, 1}) == std::vector<double>{11.0, 7.0});
    }
    SUBCASE("failures") {
        CommandOracle bad_status("exit 3", m.options, 1, std::chrono::milliseconds(5000));
        CHECK_THROWS_AS(bad_status.measure({0, 0}), MeasurementError);
        CommandOracle garbage("echo fast", m.options, 1, std::chrono::milliseconds(5000));
        CHECK_THROWS_AS(garbage.measure({0, 0}), MeasurementError);
        CommandOracle too_many("echo 1 2", m.options, 1, std::chrono::milliseconds(5000));
        CHECK_THROWS_AS(too_many.measure({0, 0}), MeasurementError);
        CommandOracle slow("sleep 5; echo 1", m.options, 1, std::chrono::milliseconds(200));
        CHECK_THROWS_AS(slow.measure({0, 0}), MeasurementError);
        CHECK_THROWS_AS(CommandOracle("echo {zzz}", m.options, 1, std::chrono::milliseconds(10)).render({0, 0}),
                        ValidationError);
    }
}
