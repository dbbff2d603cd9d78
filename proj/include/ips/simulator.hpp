#ifndef IPS_SIMULATOR_HPP
#define IPS_SIMULATOR_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ips/assembly.hpp"
#include "ips/calibration.hpp"
#include "ips/errors.hpp"
#include "ips/frame.hpp"
#include "ips/geometry.hpp"
#include "ips/identification.hpp"
#include "ips/vehicle_geometry.hpp"

namespace ips {

enum class ScenarioKind {
    static_grid,
    straight_line,
    circle,
    ellipse,
    figure_eight,
    platoon,
    clusters,
    two_lane,  // two-vehicle traffic on parallel lanes
    passing,   // one vehicle passes a parked one
};

/// One simulated run. Per-kind parameters have usable defaults; the suite
/// builders override them per scenario.
struct Scenario {
    ScenarioKind kind = ScenarioKind::static_grid;
    std::string name = "scenario";
    int vehicle_count = 1;
    double speed = 0.0;        // m/s along the path (0 = static)
    double duration = 1.0;     // seconds
    double frame_rate = 50.0;  // Hz

    // static_grid: which of the position x orientation combinations.
    int grid_index = 0;

    // straight_line
    WorldPoint line_start{0.5, 2.0};
    WorldPoint line_end{4.0, 2.0};

    // circle / ellipse / figure_eight
    WorldPoint center{2.25, 2.0};
    double radius = 1.2;       // circle
    double semi_major = 1.7;   // ellipse/eight x half-extent
    double semi_minor = 1.3;   // ellipse y half-extent; eight uses lobe height
    int direction = +1;        // +1 counter-clockwise, -1 clockwise

    // platoon: a single lane along the map diagonal.
    double platoon_spacing = 0.236;  // midpoint-to-midpoint, meters

    // clusters: static groups; 0 means "derive from vehicle_count".
    int cluster_count = 0;

    // two_lane: lateral lane separation; direction -1 = oncoming traffic;
    // lane_swap mirrors which lane the first vehicle uses.
    double lane_gap = 0.5;
    bool lane_swap = false;

    // passing: orientation of the parked vehicle.
    double passing_angle = 0.0;
};

/// The 9 x 8 pose family used by the static scenarios: a 3x3 position grid,
/// each with the eight distinct multiples of pi/4 as orientation.
inline std::vector<Pose> static_grid_poses() {
    std::vector<Pose> poses;
    poses.reserve(72);
    const std::array<double, 3> xs = {1.0, 2.25, 3.5};
    const std::array<double, 3> ys = {0.9, 2.0, 3.1};
    const std::array<double, 8> yaws = {0.0, std::numbers::pi / 4, -std::numbers::pi / 4,
                                        std::numbers::pi / 2, -std::numbers::pi / 2,
                                        3 * std::numbers::pi / 4, -3 * std::numbers::pi / 4,
                                        std::numbers::pi};
    for (double y : ys)
        for (double x : xs)
            for (double yaw : yaws) poses.push_back({{x, y}, yaw});
    return poses;
}

struct TrajectorySet {
    int frame_count{};
    double frame_period{};
    std::vector<std::vector<Pose>> vehicles;  // [vehicle][frame]
};

namespace detail {

inline Pose line_pose(WorldPoint a, WorldPoint b, double speed, double t) {
    const WorldPoint d = b - a;
    const double len = norm(d);
    const WorldPoint dir = (1.0 / len) * d;
    const double s = std::min(speed * t, len);
    return {a + s * dir, wrap_angle(std::atan2(dir.y, dir.x))};
}

inline Pose circle_pose(WorldPoint c, double r, double speed, int direction, double phase,
                        double t) {
    const double omega = direction * speed / r;
    const double a = phase + omega * t;
    return {{c.x + r * std::cos(a), c.y + r * std::sin(a)},
            wrap_angle(a + direction * std::numbers::pi / 2)};
}

inline Pose ellipse_pose(WorldPoint c, double ea, double eb, double speed, int direction,
                         double phase, double t) {
    const double omega = direction * speed / (0.5 * (ea + eb));
    const double a = phase + omega * t;
    const double dx = -ea * std::sin(a) * direction;
    const double dy = eb * std::cos(a) * direction;
    return {{c.x + ea * std::cos(a), c.y + eb * std::sin(a)},
            wrap_angle(std::atan2(direction * dy, direction * dx))};
}

inline Pose eight_pose(WorldPoint c, double ea, double eb, double speed, int direction,
                       double phase, double t) {
    // Lemniscate of Gerono: x = a sin(u), y = b sin(u) cos(u).
    const double omega = direction * speed / (0.5 * (ea + eb));
    const double u = phase + omega * t;
    const double dx = ea * std::cos(u);
    const double dy = eb * std::cos(2 * u);
    return {{c.x + ea * std::sin(u), c.y + eb * std::sin(u) * std::cos(u)},
            wrap_angle(std::atan2(direction * dy, direction * dx))};
}

}  // namespace detail

/// Analytic ground-truth trajectories for a scenario, one pose per frame per
/// vehicle. Throws ConfigError when a trajectory leaves the map.
inline TrajectorySet generate_trajectory(const Scenario& sc) {
    if (sc.vehicle_count < 1 || sc.vehicle_count > 20)
        throw ConfigError("scenario: vehicle_count must be in 1..20");
    if (!(sc.frame_rate > 0.0) || !(sc.duration > 0.0))
        throw ConfigError("scenario: frame_rate and duration must be > 0");

    TrajectorySet ts;
    ts.frame_period = 1.0 / sc.frame_rate;
    ts.frame_count = std::max(1, static_cast<int>(std::llround(sc.duration * sc.frame_rate)));
    ts.vehicles.assign(sc.vehicle_count, {});

    const auto pose_at = [&sc](int vehicle, double t) -> Pose {
        switch (sc.kind) {
            case ScenarioKind::static_grid: {
                const auto grid = static_grid_poses();
                const int idx = sc.grid_index + vehicle;
                if (idx < 0 || idx >= static_cast<int>(grid.size()))
                    throw ConfigError("scenario: grid_index out of range");
                return grid[idx];
            }
            case ScenarioKind::straight_line: {
                // Multiple vehicles follow the same lane, staggered behind the lead.
                const WorldPoint d = sc.line_end - sc.line_start;
                const double len = norm(d);
                const WorldPoint dir = (1.0 / len) * d;
                const WorldPoint start = sc.line_start - (0.35 * vehicle) * dir;
                return detail::line_pose(start, sc.line_end, sc.speed, t);
            }
            case ScenarioKind::circle:
                return detail::circle_pose(sc.center, sc.radius, sc.speed, sc.direction,
                                           2.0 * std::numbers::pi * vehicle / sc.vehicle_count, t);
            case ScenarioKind::ellipse:
                return detail::ellipse_pose(sc.center, sc.semi_major, sc.semi_minor, sc.speed,
                                            sc.direction,
                                            2.0 * std::numbers::pi * vehicle / sc.vehicle_count, t);
            case ScenarioKind::figure_eight:
                // The two branches of the eight meet at the center half a
                // period apart. Keeping all vehicle phases strictly inside
                // one half period guarantees no two vehicles occupy the
                // crossing at the same time.
                return detail::eight_pose(sc.center, sc.semi_major, sc.semi_minor, sc.speed,
                                          sc.direction,
                                          std::numbers::pi * (vehicle + 0.5) / sc.vehicle_count, t);
            case ScenarioKind::platoon: {
                // Single lane on the map diagonal so that 20 vehicles fit.
                const double lane_yaw = std::atan2(kMapHeight - 0.8, kMapWidth - 0.8);
                const WorldPoint dir = {std::cos(lane_yaw), std::sin(lane_yaw)};
                const WorldPoint start = {0.4, 0.4};
                const double s = sc.speed * t + sc.platoon_spacing * vehicle;
                return {start + s * dir, lane_yaw};
            }
            case ScenarioKind::clusters: {
                const int clusters = sc.cluster_count > 0
                                         ? sc.cluster_count
                                         : (sc.vehicle_count + 2) / 3;
                const int per = (sc.vehicle_count + clusters - 1) / clusters;
                const int c = vehicle / per;
                const int k = vehicle % per;
                const int cols = 4;
                const WorldPoint base = {0.7 + 1.05 * (c % cols), 0.7 + 1.05 * (c / cols)};
                const std::array<WorldPoint, 3> off = {{{0.0, 0.0}, {0.42, 0.1}, {0.18, 0.42}}};
                const std::array<double, 3> yaws = {0.0, std::numbers::pi / 3, -2.2};
                return {base + off[k % 3], yaws[k % 3]};
            }
            case ScenarioKind::two_lane: {
                const double y_lo = 2.0 - 0.5 * sc.lane_gap;
                const double y_hi = 2.0 + 0.5 * sc.lane_gap;
                const bool first_low = !sc.lane_swap;
                const double y = (vehicle == 0) == first_low ? y_lo : y_hi;
                if (vehicle == 0 || sc.direction > 0)
                    return detail::line_pose({0.5, y}, {4.0, y}, sc.speed, t);
                return detail::line_pose({4.0, y}, {0.5, y}, sc.speed, t);
            }
            case ScenarioKind::passing: {
                if (vehicle == 0) return {{2.25, 2.0}, wrap_angle(sc.passing_angle)};
                const double y = 1.55;
                if (sc.direction > 0) return detail::line_pose({0.6, y}, {3.9, y}, sc.speed, t);
                return detail::line_pose({3.9, y}, {0.6, y}, sc.speed, t);
            }
        }
        throw ConfigError("scenario: unknown kind");
    };

    for (int v = 0; v < sc.vehicle_count; ++v) {
        ts.vehicles[v].reserve(ts.frame_count);
        for (int f = 0; f < ts.frame_count; ++f) {
            const Pose p = pose_at(v, f * ts.frame_period);
            if (!on_map(p.position, 0.12))
                throw ConfigError("scenario '" + sc.name + "': trajectory leaves the map");
            ts.vehicles[v].push_back(p);
        }
    }
    return ts;
}

struct RenderParams {
    int blob_radius = 4;       // pixels
    int image_width = 2048;
    int image_height = 1810;
    bool quantize = true;      // round blob centers onto the pixel grid
    double noise_sigma = 0.0;  // pixels, applied to blob centers before drawing
    double disturbance_rate = 0.0;  // expected extra blobs per frame
    double occlusion_rate = 0.0;    // per LED per frame
};

struct VehicleTruth {
    int vehicle_id{};
    Pose pose{};
    bool id_led_on{};
    std::vector<int> occluded_leds;  // 0 bl, 1 br, 2 front, 3 id
};

struct GroundTruthRecord {
    std::uint64_t sequence_number{};
    double timestamp{};
    std::vector<VehicleTruth> vehicles;
};

/// Frame plus everything needed to check the pipeline against it. The exact
/// sub-pixel LED projections are kept alongside the rasterized image: binary
/// pixel moments cannot carry sub-pixel positions, so exactness checks feed
/// the pipeline from `exact_points` while realistic runs use `frame`.
struct SimFrame {
    Frame frame;
    std::vector<ImagePoint> exact_points;
    GroundTruthRecord truth;
};

/// Square-wave state of an identification LED at time t. Symmetric duty:
/// n frames on, n frames off. Each vehicle gets a fixed phase so the fleet
/// does not switch in lockstep.
inline bool id_led_on_at(const IdTable::Entry& entry, double f_camera, double t, int vehicle_id) {
    const double period_frames = 2.0 * entry.frames_on;
    const double phase = std::fmod(0.618034 * (vehicle_id + 1) * period_frames, period_frames) + 0.25;
    const double pos = std::fmod(t * f_camera + phase, period_frames);
    return pos < entry.frames_on;
}

namespace detail {

inline void draw_disk(Frame& frame, double cu, double cv, int radius) {
    const int u0 = std::max(0, static_cast<int>(std::floor(cu - radius - 1)));
    const int u1 = std::min(frame.width - 1, static_cast<int>(std::ceil(cu + radius + 1)));
    const int v0 = std::max(0, static_cast<int>(std::floor(cv - radius - 1)));
    const int v1 = std::min(frame.height - 1, static_cast<int>(std::ceil(cv + radius + 1)));
    const double r2 = static_cast<double>(radius) * radius;
    for (int v = v0; v <= v1; ++v)
        for (int u = u0; u <= u1; ++u) {
            const double du = u - cu, dv = v - cv;
            if (du * du + dv * dv <= r2) frame.at(u, v) = 255;
        }
}

}  // namespace detail

/// Renders one frame: three positioning LEDs per vehicle (unless occluded),
/// the identification LED when its wave is in the on half-period, plus
/// disturbance blobs. With quantize on, blob centers snap to the pixel grid
/// before drawing, so detected centroids carry the usual half-pixel error.
inline SimFrame render_frame(std::span<const Pose> poses, std::span<const int> vehicle_ids,
                             const IdTable& table, double t, std::uint64_t seq,
                             const VehicleGeometry& geom, const CameraCalibration& cal,
                             const RenderParams& rp, std::mt19937_64& rng) {
    if (rp.blob_radius < 1) throw ConfigError("render: blob_radius must be >= 1");
    SimFrame sf;
    sf.frame = Frame::black(rp.image_width, rp.image_height, t, seq);
    sf.truth.sequence_number = seq;
    sf.truth.timestamp = t;

    std::normal_distribution<double> noise(0.0, rp.noise_sigma);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const auto draw_led = [&](WorldPoint w) {
        ImagePoint q = cal.world_to_image(w);
        if (rp.noise_sigma > 0.0) {
            q.u += noise(rng);
            q.v += noise(rng);
        }
        if (q.u < 0 || q.u >= rp.image_width || q.v < 0 || q.v >= rp.image_height)
            throw ConfigError("render: LED projects outside the image");
        if (rp.quantize) {
            q.u = std::round(q.u);
            q.v = std::round(q.v);
        }
        detail::draw_disk(sf.frame, q.u, q.v, rp.blob_radius);
        sf.exact_points.push_back(q);
    };

    for (std::size_t i = 0; i < poses.size(); ++i) {
        VehicleTruth vt;
        vt.vehicle_id = vehicle_ids[i];
        vt.pose = poses[i];
        const auto& entry = table.entries.at(static_cast<std::size_t>(vehicle_ids[i]));
        vt.id_led_on = id_led_on_at(entry, table.f_camera, t, vehicle_ids[i]);

        const auto body = geom.body_points();
        for (int led = 0; led < 4; ++led) {
            if (led == 3 && !vt.id_led_on) continue;
            if (rp.occlusion_rate > 0.0 && uni(rng) < rp.occlusion_rate) {
                vt.occluded_leds.push_back(led);
                continue;
            }
            draw_led(body_to_world(poses[i], body[led]));
        }
        sf.truth.vehicles.push_back(std::move(vt));
    }

    if (rp.disturbance_rate > 0.0) {
        std::poisson_distribution<int> extra(rp.disturbance_rate);
        const int count = extra(rng);
        std::uniform_real_distribution<double> ux(0.15, kMapWidth - 0.15);
        std::uniform_real_distribution<double> uy(0.15, kMapHeight - 0.15);
        for (int k = 0; k < count; ++k) draw_led({ux(rng), uy(rng)});
    }
    return sf;
}

/// Adds `count` disturbance points to a world-frame point set, rejecting any
/// candidate that would complete a vehicle geometry with the existing points
/// (the soundness assumption of the assembly step).
inline void add_safe_disturbance_points(std::vector<WorldPoint>& points, int count,
                                        const VehicleGeometry& geom, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(0.1, kMapWidth - 0.1);
    std::uniform_real_distribution<double> uy(0.1, kMapHeight - 0.1);
    const double reach = geom.vehicle_length + 2.0 * geom.tolerance;
    for (int k = 0; k < count; ++k) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const WorldPoint d{ux(rng), uy(rng)};
            bool clear = true;
            std::vector<int> near;
            for (int i = 0; i < static_cast<int>(points.size()); ++i) {
                const double dist = distance(points[i], d);
                if (dist < 1e-5) {
                    clear = false;
                    break;
                }
                if (dist <= reach) near.push_back(i);
            }
            if (clear) {
                // Any 3- or 4-subset containing the candidate must miss the
                // reference distances by a safe margin.
                const double margin = 1.5 * geom.tolerance;
                const auto matches = [&](std::vector<WorldPoint>& sub) {
                    auto ds = detail::sorted_distances(sub);
                    const auto& ref3 = geom.ref_distances3;
                    const auto& ref4 = geom.ref_distances4;
                    if (sub.size() == 3)
                        return detail::distances_match(ds, ref3, margin);
                    return detail::distances_match(ds, ref4, margin);
                };
                std::vector<WorldPoint> sub;
                for (std::size_t a = 0; a < near.size() && clear; ++a)
                    for (std::size_t b = a + 1; b < near.size() && clear; ++b) {
                        sub = {d, points[near[a]], points[near[b]]};
                        if (matches(sub)) clear = false;
                        for (std::size_t c = b + 1; c < near.size() && clear; ++c) {
                            sub = {d, points[near[a]], points[near[b]], points[near[c]]};
                            if (matches(sub)) clear = false;
                        }
                    }
            }
            if (clear) {
                points.push_back(d);
                break;
            }
        }
    }
}

}  // namespace ips

#endif  // IPS_SIMULATOR_HPP
