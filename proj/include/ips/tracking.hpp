#ifndef IPS_TRACKING_HPP
#define IPS_TRACKING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ips/assembly.hpp"
#include "ips/geometry.hpp"
#include "ips/identification.hpp"

namespace ips {

/// Cross-frame history of one vehicle.
struct Track {
    int track_id{};
    Pose last_pose{};
    std::uint64_t last_frame{};
    double last_timestamp{};
    IdState id_state{};
    std::optional<int> resolved_vehicle_id{};
    int missed_frames{};
};

struct PlausibilityLimits {
    double max_speed = 4.0;                              // m/s
    double max_yaw_rate = 2.0 * std::numbers::pi;        // rad/s
};

/// A vehicle found in the current frame, with its estimated pose.
struct Detection {
    AssembledVehicle vehicle;
    Pose pose;
    bool id_led_visible{};
};

struct AssociationResult {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;     // sorted by pose (x, y) for determinism
};

/// Accepts or vetoes a (track, detection) pairing on identity grounds.
using IdConsistencyCheck = std::function<bool(const Track&, const Detection&)>;

/// Greedy globally-nearest association on midpoint distance. All pairs are
/// sorted by distance (track then detection index on ties) and taken while
/// both sides are free. A pairing is rejected when the implied motion is
/// physically impossible within the elapsed time, or when the identity
/// recheck contradicts the track's stored ID. Tracks missing for several
/// frames get proportionally more motion allowance.
inline AssociationResult associate(std::span<const Track> tracks,
                                   std::span<const Detection> detections, double dt,
                                   const PlausibilityLimits& limits,
                                   const IdConsistencyCheck& id_consistent = nullptr) {
    if (!(dt > 0.0)) throw ConfigError("associate: dt must be > 0");

    struct Pair {
        double dist;
        int track;
        int det;
    };
    std::vector<Pair> pairs;
    pairs.reserve(tracks.size() * detections.size());
    for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti)
        for (int di = 0; di < static_cast<int>(detections.size()); ++di)
            pairs.push_back({distance(tracks[ti].last_pose.position, detections[di].pose.position),
                             ti, di});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.track != b.track) return a.track < b.track;
        return a.det < b.det;
    });

    std::vector<char> track_used(tracks.size(), 0), det_used(detections.size(), 0);
    AssociationResult result;
    for (const Pair& p : pairs) {
        if (track_used[p.track] || det_used[p.det]) continue;
        const Track& t = tracks[p.track];
        const Detection& d = detections[p.det];
        const double eff_dt = dt * (t.missed_frames + 1);
        if (p.dist > limits.max_speed * eff_dt) continue;
        if (std::abs(angle_diff(d.pose.yaw, t.last_pose.yaw)) > limits.max_yaw_rate * eff_dt)
            continue;
        if (id_consistent && !id_consistent(t, d)) continue;
        track_used[p.track] = 1;
        det_used[p.det] = 1;
        result.matches.emplace_back(p.track, p.det);
    }

    for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti)
        if (!track_used[ti]) result.unmatched_tracks.push_back(ti);
    for (int di = 0; di < static_cast<int>(detections.size()); ++di)
        if (!det_used[di]) result.unmatched_detections.push_back(di);
    std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end(),
              [&detections](int a, int b) {
                  const auto& pa = detections[a].pose.position;
                  const auto& pb = detections[b].pose.position;
                  if (pa.x != pb.x) return pa.x < pb.x;
                  if (pa.y != pb.y) return pa.y < pb.y;
                  return a < b;
              });
    return result;
}

}  // namespace ips

#endif  // IPS_TRACKING_HPP
