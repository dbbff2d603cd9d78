// Command-line driver: runs scenarios end to end, the accuracy and latency
// suites, and small debug helpers around the positioning engine.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ips/config.hpp"
#include "ips/report.hpp"
#include "ips/suites.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int frames_override = 0;
    double deadline_ms = 20.0;
};

ips::RunConfig run_config_from(const CommonOpts& opts) {
    ips::RunConfig rc;
    if (!opts.config_path.empty()) {
        const ips::Config cfg = ips::Config::parse_file(opts.config_path);
        rc.geometry = ips::load_geometry(cfg);
        rc.render = ips::load_render(cfg);
        rc.limits = ips::load_limits(cfg);
        rc.id_table_size = cfg.get_int("id", "count", rc.id_table_size);
    }
    rc.seed = opts.seed;
    rc.deadline_ms = opts.deadline_ms;
    rc.use_frame_path = rc.render.quantize;
    return rc;
}

ips::Scenario scenario_from(const CommonOpts& opts) {
    if (opts.config_path.empty())
        throw ips::ConfigError("run: --config with a [scenario] section is required");
    const ips::Config cfg = ips::Config::parse_file(opts.config_path);
    ips::Scenario sc = ips::load_scenario(cfg);
    if (opts.frames_override > 0) sc.duration = opts.frames_override / sc.frame_rate;
    return sc;
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

int cmd_run(const CommonOpts& opts) {
    const ips::Scenario sc = scenario_from(opts);
    const ips::RunConfig rc = run_config_from(opts);
    const ips::RunResult rr = ips::run_scenario(sc, rc);

    ensure_dir(opts.out_dir);
    const std::vector<ips::AccuracyReport> reports = {rr.accuracy};
    ips::write_accuracy_csv(reports, opts.out_dir + "/accuracy.csv");
    ips::write_error_series_csv(reports, opts.out_dir + "/errors.csv");
    ips::write_accuracy_summary_json(reports, rr.accuracy, opts.out_dir + "/accuracy.json");
    const std::vector<ips::LatencyCellReport> cells = {
        ips::summarize_latency(sc.name, sc.vehicle_count, rr)};
    ips::write_latency_timing_csv(cells, opts.out_dir + "/latency_timing.csv");

    std::printf("scenario %s: frames=%lld availability=%.4f pos mean %.4f cm, ori mean %.4f deg\n",
                sc.name.c_str(), static_cast<long long>(rr.frames), rr.accuracy.availability(),
                rr.accuracy.position_cm.mean, rr.accuracy.orientation_deg.mean);

    const bool clean = rr.accuracy.id_correct == rr.accuracy.id_resolved;
    return clean ? 0 : 1;
}

int cmd_suite_table1(const CommonOpts& opts) {
    const ips::RunConfig rc = run_config_from(opts);
    std::vector<ips::AccuracyReport> reports;
    for (const ips::Scenario& sc : ips::table1_suite()) {
        const ips::RunResult rr = ips::run_scenario(sc, rc);
        reports.push_back(rr.accuracy);
    }
    const ips::AccuracyReport overall =
        ips::pool_reports(reports, rc.use_frame_path ? "table1" : "table1_exact");

    ensure_dir(opts.out_dir);
    ips::write_accuracy_csv(reports, opts.out_dir + "/accuracy.csv");
    ips::write_error_series_csv(reports, opts.out_dir + "/errors.csv");
    ips::write_accuracy_summary_json(reports, overall, opts.out_dir + "/accuracy.json");

    std::printf("table1 (%zu scenarios): availability=%.4f\n", reports.size(),
                overall.availability());
    std::printf("  position error    mean %.6f cm  max %.6f cm  std %.6f cm\n",
                overall.position_cm.mean, overall.position_cm.max, overall.position_cm.stddev);
    std::printf("  orientation error mean %.6f deg max %.6f deg std %.6f deg\n",
                overall.orientation_deg.mean, overall.orientation_deg.max,
                overall.orientation_deg.stddev);
    std::printf("  id decisions %lld, correct %lld\n", static_cast<long long>(overall.id_resolved),
                static_cast<long long>(overall.id_correct));
    return overall.id_correct == overall.id_resolved ? 0 : 1;
}

int cmd_suite_latency(const CommonOpts& opts) {
    const ips::RunConfig rc = run_config_from(opts);
    std::vector<ips::LatencyCellReport> cells;
    for (const ips::LatencyCell& cell : ips::latency_suite()) {
        const ips::RunResult rr = ips::run_scenario(cell.scenario, rc);
        cells.push_back(ips::summarize_latency(cell.case_name, cell.scenario.vehicle_count, rr));
    }
    ensure_dir(opts.out_dir);
    ips::write_latency_manifest_csv(cells, opts.out_dir + "/latency_manifest.csv");
    ips::write_latency_timing_csv(cells, opts.out_dir + "/latency_timing.csv");
    ips::write_latency_json(cells, opts.deadline_ms, opts.out_dir + "/latency.json");

    std::printf("latency suite on %s\n", ips::hardware_description().c_str());
    std::printf("%-10s %9s %12s %14s %15s %17s %11s %10s %13s\n", "case", "vehicles",
                "find_points", "find_vehicles", "match_vehicles", "compute_id_pose", "total_mean",
                "total_max", "deadline_hit");
    for (const auto& c : cells) {
        std::printf("%-10s %9d %9.3f ms %11.3f ms %12.3f ms %14.3f ms %8.3f ms %7.3f ms %12.2f%%\n",
                    c.case_name.c_str(), c.vehicle_count, c.find_points_ms, c.find_vehicles_ms,
                    c.match_vehicles_ms, c.compute_id_pose_ms, c.total_mean_ms, c.total_max_ms,
                    100.0 * c.deadline_fraction);
    }
    std::printf("(reference figures from the original rig: worst case at 20 vehicles met the "
                "20 ms deadline in 87.57%% of frames)\n");
    return 0;
}

int cmd_print_id_table(const CommonOpts& opts, double f_camera, int count) {
    if (!opts.config_path.empty()) {
        const ips::Config cfg = ips::Config::parse_file(opts.config_path);
        f_camera = cfg.get_double("id", "camera_frequency", f_camera);
        count = cfg.get_int("id", "count", count);
    }
    const ips::IdTable table = ips::build_id_table(f_camera, count);
    std::printf("camera frequency: %.3f Hz\n", table.f_camera);
    std::printf("%4s %6s %10s %22s\n", "id", "n_on", "f_led", "accept interval");
    for (const auto& e : table.entries)
        std::printf("%4d %6d %7.3f Hz   [%7.3f, %7.3f] Hz\n", e.vehicle_id, e.frames_on, e.f_led,
                    e.f_low, e.f_high);
    return 0;
}

int cmd_render_debug(const CommonOpts& opts, int frame_count) {
    const ips::Scenario sc = scenario_from(opts);
    const ips::RunConfig rc = run_config_from(opts);
    const ips::TrajectorySet ts = ips::generate_trajectory(sc);
    const ips::CameraCalibration cal =
        ips::CameraCalibration::map_scaled(rc.render.image_width, rc.render.image_height);
    const ips::IdTable table =
        ips::build_id_table(sc.frame_rate, std::max(rc.id_table_size, sc.vehicle_count));

    ensure_dir(opts.out_dir);
    std::mt19937_64 rng(rc.seed);
    std::vector<int> ids(static_cast<std::size_t>(sc.vehicle_count));
    for (int i = 0; i < sc.vehicle_count; ++i) ids[static_cast<std::size_t>(i)] = i;
    const int n = std::min(frame_count, ts.frame_count);
    std::vector<ips::Pose> poses(static_cast<std::size_t>(sc.vehicle_count));
    for (int f = 0; f < n; ++f) {
        for (int v = 0; v < sc.vehicle_count; ++v)
            poses[static_cast<std::size_t>(v)] =
                ts.vehicles[static_cast<std::size_t>(v)][static_cast<std::size_t>(f)];
        const ips::SimFrame sf =
            ips::render_frame(poses, ids, table, f * ts.frame_period,
                              static_cast<std::uint64_t>(f), rc.geometry, cal, rc.render, rng);
        char name[64];
        std::snprintf(name, sizeof(name), "/frame_%04d.pgm", f);
        ips::write_pgm(sf.frame, opts.out_dir + name);
        std::printf("frame %d: %zu led points\n", f, sf.exact_points.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-vehicle LED indoor positioning engine"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "Path to the key=value config file");
    app.add_option("--out", opts.out_dir, "Output directory for reports");
    app.add_option("--seed", opts.seed, "Random seed for simulation");
    app.add_option("--frames", opts.frames_override, "Limit scenarios to this many frames");
    app.add_option("--deadline-ms", opts.deadline_ms, "Soft per-frame deadline in milliseconds");

    auto* run = app.add_subcommand("run", "Run one scenario from the config and write reports");

    auto* suite = app.add_subcommand("suite", "Run a bundled suite");
    std::string suite_name;
    suite->add_option("name", suite_name, "Suite name: table1 or latency")->required();

    auto* print_table = app.add_subcommand("print-id-table", "Print the LED frequency table");
    double f_camera = 50.0;
    int id_count = 20;
    print_table->add_option("--camera-frequency", f_camera, "Camera frequency in Hz");
    print_table->add_option("--count", id_count, "Number of IDs");

    auto* render = app.add_subcommand("render-debug", "Dump rendered frames as PGM files");
    int render_frames = 10;
    render->add_option("--count", render_frames, "Number of frames to dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opts);
        if (suite->parsed()) {
            if (suite_name == "table1") return cmd_suite_table1(opts);
            if (suite_name == "latency") return cmd_suite_latency(opts);
            std::cerr << "unknown suite '" << suite_name << "' (expected table1 or latency)\n";
            return 2;
        }
        if (print_table->parsed()) return cmd_print_id_table(opts, f_camera, id_count);
        if (render->parsed()) return cmd_render_debug(opts, render_frames);
    } catch (const ips::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
