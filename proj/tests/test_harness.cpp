#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ips/config.hpp"
#include "ips/report.hpp"
#include "ips/scoring.hpp"
#include "ips/suites.hpp"

using namespace ips;

namespace {

GroundTruthRecord truth_frame(std::uint64_t seq, std::vector<VehicleTruth> vehicles) {
    GroundTruthRecord r;
    r.sequence_number = seq;
    r.timestamp = seq / 50.0;
    r.vehicles = std::move(vehicles);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("identical estimates score zero error", "[harness]") {
    std::vector<GroundTruthRecord> truth;
    std::vector<std::vector<PoseSample>> samples;
    for (int f = 0; f < 10; ++f) {
        const Pose p{{1.0 + 0.01 * f, 2.0}, 0.3};
        truth.push_back(truth_frame(f, {{0, p, true, {}}}));
        samples.push_back({PoseSample{0, p, static_cast<std::uint64_t>(f), f / 50.0, 0}});
    }
    const AccuracyReport r = score(samples, truth, "exact");
    CHECK(r.position_cm.mean == 0.0);
    CHECK(r.position_cm.max == 0.0);
    CHECK(r.orientation_deg.max == 0.0);
    CHECK(r.availability() == 1.0);
    CHECK(r.id_correct == r.id_resolved);
}

TEST_CASE("a single centimeter offset is reported exactly", "[harness]") {
    const Pose p{{1.0, 2.0}, 0.0};
    const Pose q{{1.01, 2.0}, 0.0};
    std::vector<GroundTruthRecord> truth = {truth_frame(0, {{0, p, true, {}}})};
    std::vector<std::vector<PoseSample>> samples = {{PoseSample{0, q, 0, 0.0, 0}}};
    const AccuracyReport r = score(samples, truth, "offset");
    CHECK(r.position_cm.mean == Catch::Approx(1.0));
    CHECK(r.position_cm.max == Catch::Approx(1.0));
    CHECK(r.position_cm.stddev == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("statistics agree with an independent recomputation", "[harness]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> err(0.0, 0.02);
    std::vector<GroundTruthRecord> truth;
    std::vector<std::vector<PoseSample>> samples;
    std::vector<double> expected_cm;
    for (int f = 0; f < 200; ++f) {
        const Pose p{{2.0, 2.0}, 0.5};
        const double e = err(rng);
        expected_cm.push_back(100.0 * e);
        const Pose q{{2.0 + e, 2.0}, 0.5};
        truth.push_back(truth_frame(f, {{0, p, true, {}}}));
        samples.push_back({PoseSample{0, q, static_cast<std::uint64_t>(f), f / 50.0, 0}});
    }
    const AccuracyReport r = score(samples, truth, "synthetic");

    // Second implementation: accumulate in long double, two-pass variance.
    long double sum = 0.0L, maxv = 0.0L;
    for (double v : expected_cm) {
        sum += v;
        maxv = std::max<long double>(maxv, v);
    }
    const double mean = static_cast<double>(sum / expected_cm.size());
    long double var = 0.0L;
    for (double v : expected_cm) var += (v - mean) * (v - mean);
    const double stddev = std::sqrt(static_cast<double>(var / expected_cm.size()));

    CHECK(r.position_cm.mean == Catch::Approx(mean).epsilon(1e-12));
    CHECK(r.position_cm.max == Catch::Approx(static_cast<double>(maxv)));
    CHECK(r.position_cm.stddev == Catch::Approx(stddev).epsilon(1e-9));
}

TEST_CASE("undetected vehicles count against availability only", "[harness]") {
    const Pose p{{1.0, 1.0}, 0.0};
    std::vector<GroundTruthRecord> truth = {truth_frame(0, {{0, p, true, {}}}),
                                            truth_frame(1, {{0, p, true, {}}})};
    std::vector<std::vector<PoseSample>> samples = {{PoseSample{0, p, 0, 0.0, 0}}, {}};
    const AccuracyReport r = score(samples, truth, "partial");
    CHECK(r.availability() == Catch::Approx(0.5));
    CHECK(r.position_cm.count == 1);
    CHECK(r.position_cm.mean == 0.0);
}

TEST_CASE("estimates without a resolved id match by position", "[harness]") {
    const Pose p{{1.0, 1.0}, 0.0};
    std::vector<GroundTruthRecord> truth = {truth_frame(0, {{4, p, true, {}}})};
    std::vector<std::vector<PoseSample>> samples = {
        {PoseSample{std::nullopt, p, 0, 0.0, 0}}};
    const AccuracyReport r = score(samples, truth, "pending");
    CHECK(r.matched_records == 1);
    CHECK(r.id_resolved == 0);
}

TEST_CASE("mismatched stream lengths are rejected", "[harness]") {
    std::vector<GroundTruthRecord> truth = {truth_frame(0, {})};
    std::vector<std::vector<PoseSample>> samples;
    CHECK_THROWS_AS(score(samples, truth, "bad"), ConfigError);
}

TEST_CASE("config files parse sections, comments and points", "[harness]") {
    const std::string text = R"(# comment
[geometry]
back_left  = -0.082 0.017
back_right = -0.082 -0.017
front      = 0.082 0.0
id_led     = -0.010 0.0
tolerance  = 0.005

[scenario]
kind = circle       ; trailing comment
vehicle_count = 3
speed = 1.0
radius = 1.2
)";
    const Config cfg = Config::parse_string(text, "test.cfg");
    const VehicleGeometry g = load_geometry(cfg);
    CHECK(g.vehicle_width == Catch::Approx(0.034));
    const Scenario sc = load_scenario(cfg);
    CHECK(sc.kind == ScenarioKind::circle);
    CHECK(sc.vehicle_count == 3);
    CHECK(sc.radius == Catch::Approx(1.2));
}

TEST_CASE("config errors carry the file position", "[harness]") {
    CHECK_THROWS_WITH(Config::parse_string("key value\n", "broken.cfg"),
                      Catch::Matchers::ContainsSubstring("broken.cfg:1"));
    const Config cfg = Config::parse_string("[a]\nx = not_a_number\n", "bad.cfg");
    CHECK_THROWS_WITH(cfg.get_double("a", "x", 0.0),
                      Catch::Matchers::ContainsSubstring("bad.cfg:2"));
    CHECK_THROWS_AS(Config::parse_string("[unterminated\n", "u.cfg"), ConfigError);
}

TEST_CASE("malformed scenario kind is a config error", "[harness]") {
    const Config cfg = Config::parse_string("[scenario]\nkind = warp_drive\n");
    CHECK_THROWS_AS(load_scenario(cfg), ConfigError);
}

TEST_CASE("same seed and config produce byte-identical reports", "[harness]") {
    Scenario sc;
    sc.kind = ScenarioKind::clusters;
    sc.vehicle_count = 4;
    sc.duration = 0.6;
    sc.name = "determinism_probe";
    RunConfig rc;
    rc.seed = 42;

    const auto out_dir = std::filesystem::temp_directory_path() / "ips_det_test";
    std::filesystem::create_directories(out_dir);
    const auto write = [&](const std::string& suffix) {
        const RunResult rr = run_scenario(sc, rc);
        const std::vector<AccuracyReport> reports = {rr.accuracy};
        write_accuracy_csv(reports, (out_dir / ("acc_" + suffix + ".csv")).string());
        write_error_series_csv(reports, (out_dir / ("err_" + suffix + ".csv")).string());
        write_accuracy_summary_json(reports, rr.accuracy,
                                    (out_dir / ("sum_" + suffix + ".json")).string());
    };
    write("a");
    write("b");
    CHECK(slurp((out_dir / "acc_a.csv").string()) == slurp((out_dir / "acc_b.csv").string()));
    CHECK(slurp((out_dir / "err_a.csv").string()) == slurp((out_dir / "err_b.csv").string()));
    CHECK(slurp((out_dir / "sum_a.json").string()) == slurp((out_dir / "sum_b.json").string()));
    CHECK(!slurp((out_dir / "acc_a.csv").string()).empty());
}

TEST_CASE("table1 manifest has 175 uniquely named scenarios", "[harness]") {
    const auto suite = table1_suite();
    REQUIRE(suite.size() == 175);
    std::set<std::string> names;
    int statics = 0, lines = 0;
    for (const Scenario& sc : suite) {
        names.insert(sc.name);
        if (sc.kind == ScenarioKind::static_grid) ++statics;
        if (sc.kind == ScenarioKind::straight_line) ++lines;
        REQUIRE_NOTHROW(generate_trajectory(sc));
    }
    CHECK(names.size() == 175);
    CHECK(statics == 72);
    CHECK(lines == 48);
}

TEST_CASE("latency manifest covers both cases at the three fleet sizes", "[harness]") {
    const auto cells = latency_suite();
    REQUIRE(cells.size() == 6);
    for (const LatencyCell& cell : cells) REQUIRE_NOTHROW(generate_trajectory(cell.scenario));
}
