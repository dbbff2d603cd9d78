#ifndef IPS_GEOMETRY_HPP
#define IPS_GEOMETRY_HPP

#include <cmath>
#include <numbers>

namespace ips {

// Map dimensions in meters. Origin is a map corner, x runs along the long edge.
inline constexpr double kMapWidth = 4.5;
inline constexpr double kMapHeight = 4.0;

/// A point on the driving plane, in meters.
struct WorldPoint {
    double x{};
    double y{};

    friend constexpr WorldPoint operator+(WorldPoint a, WorldPoint b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr WorldPoint operator-(WorldPoint a, WorldPoint b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr WorldPoint operator*(double s, WorldPoint p) { return {s * p.x, s * p.y}; }
    friend constexpr WorldPoint operator*(WorldPoint p, double s) { return s * p; }
    friend constexpr bool operator==(WorldPoint a, WorldPoint b) { return a.x == b.x && a.y == b.y; }
};

/// A sub-pixel position in the image, u = column, v = row.
struct ImagePoint {
    double u{};
    double v{};
};

inline double norm(WorldPoint p) { return std::hypot(p.x, p.y); }
inline double distance(WorldPoint a, WorldPoint b) { return norm(a - b); }
inline constexpr double dot(WorldPoint a, WorldPoint b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(WorldPoint a, WorldPoint b) { return a.x * b.y - a.y * b.x; }

/// Normalizes an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

/// Signed difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

inline constexpr double deg_from_rad(double r) { return r * 180.0 / std::numbers::pi; }
inline constexpr double rad_from_deg(double d) { return d * std::numbers::pi / 180.0; }

/// Vehicle pose: midpoint position plus heading of the forward axis.
struct Pose {
    WorldPoint position{};
    double yaw{};  // radians, normalized to (-pi, pi]
};

/// Transforms a body-frame offset (x forward) into the world frame.
inline WorldPoint body_to_world(const Pose& pose, WorldPoint offset) {
    const double c = std::cos(pose.yaw);
    const double s = std::sin(pose.yaw);
    return {pose.position.x + c * offset.x - s * offset.y,
            pose.position.y + s * offset.x + c * offset.y};
}

/// Inverse of body_to_world.
inline WorldPoint world_to_body(const Pose& pose, WorldPoint world) {
    const double c = std::cos(pose.yaw);
    const double s = std::sin(pose.yaw);
    const WorldPoint d = world - pose.position;
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

inline bool on_map(WorldPoint p, double margin = 0.0) {
    return p.x >= margin && p.x <= kMapWidth - margin && p.y >= margin && p.y <= kMapHeight - margin;
}

}  // namespace ips

#endif  // IPS_GEOMETRY_HPP
