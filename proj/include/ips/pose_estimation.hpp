#ifndef IPS_POSE_ESTIMATION_HPP
#define IPS_POSE_ESTIMATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "ips/errors.hpp"
#include "ips/geometry.hpp"
#include "ips/vehicle_geometry.hpp"

namespace ips {

/// Index of the identification LED among four vehicle points: the point with
/// the smallest sum of distances to the other three. The layout guarantees a
/// strict margin; a near-tie means the points do not form a vehicle.
inline int split_id_led_index(std::span<const WorldPoint> points) {
    if (points.size() != 4) throw GeometryViolation("split_id_led: expected 4 points");
    std::array<double, 4> sums{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) sums[i] += distance(points[i], points[j]);
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (sums[i] < sums[best]) best = i;
    for (int i = 0; i < 4; ++i)
        if (i != best && sums[i] - sums[best] <= 1e-9)
            throw GeometryViolation("split_id_led: ambiguous distance sums");
    return best;
}

struct SplitResult {
    std::array<WorldPoint, 3> positioning;
    WorldPoint id_point;
};

inline SplitResult split_id_led(std::span<const WorldPoint> points) {
    const int id = split_id_led_index(points);
    SplitResult r{};
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        if (i == id)
            r.id_point = points[i];
        else
            r.positioning[k++] = points[i];
    }
    return r;
}

/// Back pair and front of three positioning points. The pair at
/// vehicle-width (within tolerance) is the back; left/right follow from the
/// sign of the cross product with the back-to-front direction.
struct BackClassification {
    int back_left;
    int back_right;
    int front;
};

inline BackClassification classify_back(std::span<const WorldPoint> points,
                                        const VehicleGeometry& geom) {
    if (points.size() != 3) throw GeometryViolation("classify_back: expected 3 points");
    int pair_a = -1, pair_b = -1, found = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(distance(points[i], points[j]) - geom.vehicle_width) <= geom.tolerance) {
                pair_a = i;
                pair_b = j;
                ++found;
            }
        }
    }
    if (found != 1)
        throw GeometryViolation(found == 0 ? "classify_back: no pair at vehicle-width"
                                           : "classify_back: multiple pairs at vehicle-width");
    const int front = 3 - pair_a - pair_b;
    const WorldPoint mid = 0.5 * (points[pair_a] + points[pair_b]);
    const WorldPoint forward = points[front] - mid;
    // Positive cross product = point lies to the left of the forward axis.
    if (cross(forward, points[pair_a] - mid) > 0.0)
        return {pair_a, pair_b, front};
    return {pair_b, pair_a, front};
}

/// Yaw from three labeled positioning points: each LED pair contributes the
/// angle of its line plus that pair's body-frame offset, and the circular
/// median of the three candidates is the result. The median discards one
/// outlier pair without biasing the estimate.
inline double estimate_orientation(WorldPoint back_left, WorldPoint back_right, WorldPoint front,
                                   const VehicleGeometry& geom) {
    const std::array<std::pair<WorldPoint, WorldPoint>, 3> pairs = {
        std::pair{back_left, back_right}, {back_left, front}, {back_right, front}};
    std::array<double, 3> candidates{};
    for (int k = 0; k < 3; ++k) {
        const WorldPoint d = pairs[k].second - pairs[k].first;
        candidates[k] = wrap_angle(std::atan2(d.y, d.x) + geom.pair_side_offset[k]);
    }
    // Unwrap relative to the first candidate so the median is immune to the
    // +-pi seam, then take the middle value.
    std::array<double, 3> unwrapped = {candidates[0],
                                       candidates[0] + angle_diff(candidates[1], candidates[0]),
                                       candidates[0] + angle_diff(candidates[2], candidates[0])};
    std::sort(unwrapped.begin(), unwrapped.end());
    return wrap_angle(unwrapped[1]);
}

/// Vehicle midpoint from the two back points: their midpoint shifted by the
/// body-frame vector from the back midpoint to the origin, rotated into the
/// world frame.
inline WorldPoint estimate_position(WorldPoint back_left, WorldPoint back_right, double yaw,
                                    const VehicleGeometry& geom) {
    const WorldPoint back_mid_body = 0.5 * (geom.back_left + geom.back_right);
    const WorldPoint shift_body = {-back_mid_body.x, -back_mid_body.y};
    const double c = std::cos(yaw), s = std::sin(yaw);
    const WorldPoint mid = 0.5 * (back_left + back_right);
    return {mid.x + c * shift_body.x - s * shift_body.y,
            mid.y + s * shift_body.x + c * shift_body.y};
}

/// Full pose from 3 or 4 vehicle points of the current frame.
inline Pose estimate_pose(std::span<const WorldPoint> points, const VehicleGeometry& geom) {
    std::array<WorldPoint, 3> positioning{};
    if (points.size() == 4) {
        positioning = split_id_led(points).positioning;
    } else if (points.size() == 3) {
        std::copy(points.begin(), points.end(), positioning.begin());
    } else {
        throw GeometryViolation("estimate_pose: expected 3 or 4 points");
    }
    const BackClassification cls = classify_back(positioning, geom);
    const double yaw = estimate_orientation(positioning[cls.back_left], positioning[cls.back_right],
                                            positioning[cls.front], geom);
    const WorldPoint pos = estimate_position(positioning[cls.back_left],
                                             positioning[cls.back_right], yaw, geom);
    return {pos, yaw};
}

}  // namespace ips

#endif  // IPS_POSE_ESTIMATION_HPP
