#ifndef IPS_SUITES_HPP
#define IPS_SUITES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ips/pipeline.hpp"
#include "ips/scoring.hpp"
#include "ips/simulator.hpp"

namespace ips {

struct RunConfig {
    VehicleGeometry geometry = VehicleGeometry::standard();
    RenderParams render{};
    PlausibilityLimits limits{};
    int id_table_size = 20;
    double deadline_ms = 20.0;
    std::uint64_t seed = 1;
    /// true: rasterize frames and detect blobs (realistic path);
    /// false: feed exact projected points (exactness path).
    bool use_frame_path = true;
};

struct RunResult {
    AccuracyReport accuracy;
    std::vector<StepLatencies> latencies;
    std::int64_t frames{};
    std::int64_t deadline_hits{};
    std::vector<std::vector<PoseSample>> samples_per_frame;
    std::vector<GroundTruthRecord> truth_per_frame;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline BlobParams blob_params_for(const RenderParams& rp) {
    BlobParams bp;
    const double area = std::numbers::pi * rp.blob_radius * rp.blob_radius;
    bp.threshold = 128;
    bp.min_area = std::max(1, static_cast<int>(std::floor(area * 0.5)));
    bp.max_area = static_cast<int>(std::ceil(area * 1.5));
    return bp;
}

}  // namespace detail

/// Runs one scenario end to end: trajectory, rendered frames, engine,
/// accuracy scoring. Deterministic for a given (scenario, config, seed).
inline RunResult run_scenario(const Scenario& sc, const RunConfig& rc) {
    const TrajectorySet ts = generate_trajectory(sc);
    const CameraCalibration cal =
        CameraCalibration::map_scaled(rc.render.image_width, rc.render.image_height);
    const IdTable table = build_id_table(sc.frame_rate, std::max(rc.id_table_size, sc.vehicle_count));

    EngineConfig ec;
    ec.geometry = rc.geometry;
    ec.calibration = cal;
    ec.id_table = table;
    ec.limits = rc.limits;
    ec.blob = detail::blob_params_for(rc.render);
    ec.deadline_ms = rc.deadline_ms;
    Engine engine(ec);

    std::mt19937_64 rng(detail::mix_seed(rc.seed, sc.name));
    std::vector<int> vehicle_ids(static_cast<std::size_t>(sc.vehicle_count));
    for (int i = 0; i < sc.vehicle_count; ++i) vehicle_ids[static_cast<std::size_t>(i)] = i;

    RunResult result;
    result.samples_per_frame.reserve(static_cast<std::size_t>(ts.frame_count));
    result.truth_per_frame.reserve(static_cast<std::size_t>(ts.frame_count));

    std::vector<Pose> poses(static_cast<std::size_t>(sc.vehicle_count));
    for (int f = 0; f < ts.frame_count; ++f) {
        const double t = f * ts.frame_period;
        for (int v = 0; v < sc.vehicle_count; ++v)
            poses[static_cast<std::size_t>(v)] = ts.vehicles[static_cast<std::size_t>(v)][static_cast<std::size_t>(f)];
        SimFrame sf = render_frame(poses, vehicle_ids, table, t,
                                   static_cast<std::uint64_t>(f), rc.geometry, cal, rc.render, rng);
        FrameResult fr = rc.use_frame_path
                             ? engine.process_frame(sf.frame)
                             : engine.process_points(sf.exact_points, t, static_cast<std::uint64_t>(f));
        result.latencies.push_back(fr.latencies);
        if (fr.latencies.total_ms <= rc.deadline_ms) ++result.deadline_hits;
        ++result.frames;
        result.samples_per_frame.push_back(std::move(fr.samples));
        result.truth_per_frame.push_back(std::move(sf.truth));
    }
    result.accuracy = score(result.samples_per_frame, result.truth_per_frame, sc.name);
    return result;
}

namespace detail {

inline Scenario named(Scenario sc, const std::string& name) {
    sc.name = name;
    return sc;
}

}  // namespace detail

/// The 175-scenario accuracy suite: 72 static poses, 8 lines in both
/// directions at three speeds, ellipse and figure-eight trains at growing
/// fleet sizes, static clusters, and the two-vehicle traffic cases.
inline std::vector<Scenario> table1_suite() {
    std::vector<Scenario> suite;
    suite.reserve(175);

    for (int i = 0; i < 72; ++i) {
        Scenario sc;
        sc.kind = ScenarioKind::static_grid;
        sc.grid_index = i;
        sc.vehicle_count = 1;
        sc.duration = 0.8;
        suite.push_back(detail::named(sc, "static_" + std::to_string(i)));
    }

    const std::vector<std::pair<WorldPoint, WorldPoint>> lines = {
        {{0.5, 0.8}, {4.0, 0.8}}, {{0.5, 1.6}, {4.0, 1.6}}, {{0.5, 2.4}, {4.0, 2.4}},
        {{0.5, 3.2}, {4.0, 3.2}}, {{1.2, 0.5}, {1.2, 3.5}}, {{3.3, 0.5}, {3.3, 3.5}},
        {{0.6, 0.6}, {3.9, 3.4}}, {{0.6, 3.4}, {3.9, 0.6}}};
    const std::vector<double> speeds = {0.5, 0.8, 1.0};
    for (std::size_t li = 0; li < lines.size(); ++li) {
        for (int dir = 0; dir < 2; ++dir) {
            for (std::size_t si = 0; si < speeds.size(); ++si) {
                Scenario sc;
                sc.kind = ScenarioKind::straight_line;
                sc.line_start = dir == 0 ? lines[li].first : lines[li].second;
                sc.line_end = dir == 0 ? lines[li].second : lines[li].first;
                sc.speed = speeds[si];
                sc.duration = 2.0;
                suite.push_back(detail::named(
                    sc, "line_" + std::to_string(li) + (dir == 0 ? "_fwd_" : "_rev_") +
                            std::to_string(static_cast<int>(speeds[si] * 10))));
            }
        }
    }

    const std::vector<int> fleet_sizes = {1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    for (int n : fleet_sizes) {
        Scenario sc;
        sc.kind = ScenarioKind::ellipse;
        sc.vehicle_count = n;
        sc.speed = 1.0;
        sc.duration = 2.0;
        suite.push_back(detail::named(sc, "ellipse_" + std::to_string(n)));
    }
    for (int n : fleet_sizes) {
        Scenario sc;
        sc.kind = ScenarioKind::figure_eight;
        sc.vehicle_count = n;
        sc.speed = 0.8;
        sc.duration = 2.0;
        sc.semi_major = 1.9;
        sc.semi_minor = 1.35;
        suite.push_back(detail::named(sc, "eight_" + std::to_string(n)));
    }

    const std::vector<int> cluster_sizes = {2, 3, 4, 6, 8, 9, 11, 12, 14, 16, 18, 20};
    for (int n : cluster_sizes) {
        Scenario sc;
        sc.kind = ScenarioKind::clusters;
        sc.vehicle_count = n;
        sc.duration = 1.0;
        suite.push_back(detail::named(sc, "clusters_" + std::to_string(n)));
    }

    // Two-vehicle traffic: oncoming and same-direction lanes, and passing a
    // parked vehicle at a range of approach angles.
    {
        Scenario sc;
        sc.kind = ScenarioKind::two_lane;
        sc.vehicle_count = 2;
        sc.speed = 0.8;
        sc.duration = 2.0;
        sc.direction = -1;
        suite.push_back(detail::named(sc, "traffic_right_hand"));
        Scenario sc2 = sc;
        sc2.lane_swap = true;
        suite.push_back(detail::named(sc2, "traffic_left_hand"));
        Scenario sc3 = sc;
        sc3.direction = +1;
        suite.push_back(detail::named(sc3, "traffic_parallel_same"));
        Scenario sc4 = sc;
        sc4.direction = -1;
        sc4.lane_gap = 0.7;
        suite.push_back(detail::named(sc4, "traffic_parallel_wide"));
    }
    for (int k = 0; k < 13; ++k) {
        Scenario sc;
        sc.kind = ScenarioKind::passing;
        sc.vehicle_count = 2;
        sc.speed = 0.8;
        sc.duration = 2.0;
        sc.passing_angle = rad_from_deg(15.0 * k);
        suite.push_back(detail::named(sc, "passing_" + std::to_string(15 * k)));
    }
    for (int k = 0; k < 4; ++k) {
        Scenario sc;
        sc.kind = ScenarioKind::passing;
        sc.vehicle_count = 2;
        sc.speed = 1.0;
        sc.duration = 2.0;
        sc.passing_angle = rad_from_deg(30.0 + 30.0 * k);
        sc.direction = -1;
        suite.push_back(detail::named(sc, "passing_rev_" + std::to_string(30 + 30 * k)));
    }

    return suite;
}

struct LatencyCell {
    std::string case_name;  // "clusters" (average) or "platoon" (worst)
    Scenario scenario;
};

/// The latency benchmark: the easy clustered layout and the hard platoon
/// layout at 3, 16 and 20 vehicles.
inline std::vector<LatencyCell> latency_suite() {
    std::vector<LatencyCell> cells;
    const std::vector<std::pair<int, int>> cluster_cells = {{3, 1}, {16, 9}, {20, 11}};
    for (auto [n, c] : cluster_cells) {
        Scenario sc;
        sc.kind = ScenarioKind::clusters;
        sc.vehicle_count = n;
        sc.cluster_count = c;
        sc.duration = 3.0;
        sc.name = "latency_clusters_" + std::to_string(n);
        cells.push_back({"clusters", sc});
    }
    for (int n : {3, 16, 20}) {
        Scenario sc;
        sc.kind = ScenarioKind::platoon;
        sc.vehicle_count = n;
        sc.speed = 0.2;
        sc.duration = 3.0;
        sc.name = "latency_platoon_" + std::to_string(n);
        cells.push_back({"platoon", sc});
    }
    return cells;
}

struct LatencyCellReport {
    std::string case_name;
    int vehicle_count{};
    std::int64_t frames{};
    double find_points_ms{};
    double find_vehicles_ms{};
    double match_vehicles_ms{};
    double compute_id_pose_ms{};
    double total_mean_ms{};
    double total_max_ms{};
    double deadline_fraction{};
};

inline LatencyCellReport summarize_latency(const std::string& case_name, int vehicle_count,
                                           const RunResult& rr) {
    LatencyCellReport rep;
    rep.case_name = case_name;
    rep.vehicle_count = vehicle_count;
    rep.frames = rr.frames;
    for (const StepLatencies& l : rr.latencies) {
        rep.find_points_ms += l.find_points_ms;
        rep.find_vehicles_ms += l.find_vehicles_ms;
        rep.match_vehicles_ms += l.match_vehicles_ms;
        rep.compute_id_pose_ms += l.compute_id_pose_ms;
        rep.total_mean_ms += l.total_ms;
        rep.total_max_ms = std::max(rep.total_max_ms, l.total_ms);
    }
    if (rr.frames > 0) {
        rep.find_points_ms /= rr.frames;
        rep.find_vehicles_ms /= rr.frames;
        rep.match_vehicles_ms /= rr.frames;
        rep.compute_id_pose_ms /= rr.frames;
        rep.total_mean_ms /= rr.frames;
        rep.deadline_fraction = static_cast<double>(rr.deadline_hits) / rr.frames;
    }
    return rep;
}

}  // namespace ips

#endif  // IPS_SUITES_HPP
