#ifndef IPS_VEHICLE_GEOMETRY_HPP
#define IPS_VEHICLE_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include "ips/errors.hpp"
#include "ips/geometry.hpp"

namespace ips {

/// LED layout of one vehicle, in the body frame (x forward, origin at the
/// vehicle midpoint). Three positioning LEDs form a non-equilateral triangle
/// whose base is the vehicle back; the identification LED sits inside the
/// triangle. All assembly and pose math keys off the derived distances here.
struct VehicleGeometry {
    WorldPoint back_left{};   // g1
    WorldPoint back_right{};  // g2
    WorldPoint front{};       // g3
    WorldPoint id_led{};      // g4
    double tolerance{};       // distance match tolerance, meters

    // Derived; filled by finalize().
    double vehicle_width{};   // |back_left - back_right|
    double vehicle_length{};  // max pairwise LED distance
    double d_front_back_left{}, d_front_back_right{};
    double d_id_back_left{}, d_id_back_right{};
    std::array<double, 3> ref_distances3{};  // sorted pairwise distances, positioning LEDs
    std::array<double, 6> ref_distances4{};  // sorted pairwise distances, all four LEDs
    // Yaw offset per positioning pair, ordered (bl,br), (bl,f), (br,f):
    // yaw = wrap(world pair angle + pair_side_offset[k]).
    std::array<double, 3> pair_side_offset{};

    std::array<WorldPoint, 4> body_points() const { return {back_left, back_right, front, id_led}; }
    std::array<WorldPoint, 3> positioning_points() const { return {back_left, back_right, front}; }

    static VehicleGeometry make(WorldPoint bl, WorldPoint br, WorldPoint f, WorldPoint id,
                                double tolerance) {
        VehicleGeometry g;
        g.back_left = bl;
        g.back_right = br;
        g.front = f;
        g.id_led = id;
        g.tolerance = tolerance;
        g.finalize();
        return g;
    }

    /// Default layout. The layout is always configurable; these values come
    /// from the model-scale LED placement the rest of the defaults assume.
    static VehicleGeometry standard() {
        return make({-0.082, 0.017}, {-0.082, -0.017}, {0.082, 0.0}, {-0.010, 0.0}, 0.005);
    }

    void finalize() {
        if (!(tolerance > 0.0)) throw ConfigError("vehicle geometry: tolerance must be > 0");

        vehicle_width = distance(back_left, back_right);
        d_front_back_left = distance(front, back_left);
        d_front_back_right = distance(front, back_right);
        d_id_back_left = distance(id_led, back_left);
        d_id_back_right = distance(id_led, back_right);

        ref_distances3 = {vehicle_width, d_front_back_left, d_front_back_right};
        std::sort(ref_distances3.begin(), ref_distances3.end());

        const double d_id_front = distance(id_led, front);
        ref_distances4 = {vehicle_width, d_front_back_left, d_front_back_right,
                          d_id_back_left, d_id_back_right, d_id_front};
        std::sort(ref_distances4.begin(), ref_distances4.end());
        vehicle_length = ref_distances4.back();

        validate();

        const auto offset_for = [](WorldPoint a, WorldPoint b) {
            const WorldPoint d = b - a;
            return wrap_angle(-std::atan2(d.y, d.x));
        };
        pair_side_offset = {offset_for(back_left, back_right),
                            offset_for(back_left, front),
                            offset_for(back_right, front)};
    }

private:
    void validate() const {
        if (!(vehicle_width < vehicle_length))
            throw ConfigError("vehicle geometry: width must be smaller than length");

        // Non-equilateral triangle, otherwise the heading is ambiguous.
        const double lo = std::min({vehicle_width, d_front_back_left, d_front_back_right});
        const double hi = std::max({vehicle_width, d_front_back_left, d_front_back_right});
        if (hi - lo <= 2.0 * tolerance)
            throw ConfigError("vehicle geometry: positioning triangle is too close to equilateral");

        // Any two distinct reference distances must be separated by more than
        // twice the tolerance or the distance matcher cannot tell them apart.
        for (std::size_t i = 0; i + 1 < ref_distances4.size(); ++i) {
            const double gap = ref_distances4[i + 1] - ref_distances4[i];
            if (gap > 1e-9 && gap <= 2.0 * tolerance)
                throw ConfigError("vehicle geometry: reference distances closer than 2*tolerance");
        }

        // The identification LED must lie strictly inside the triangle.
        const WorldPoint a = back_left, b = back_right, c = front, p = id_led;
        const double s1 = cross(b - a, p - a);
        const double s2 = cross(c - b, p - b);
        const double s3 = cross(a - c, p - c);
        const bool inside = (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
        if (!inside)
            throw ConfigError("vehicle geometry: identification LED must be inside the triangle");

        // The identification LED is found by the smallest distance sum; that
        // requires a strict margin against the positioning LEDs.
        const auto pts = body_points();
        std::array<double, 4> sums{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j) sums[i] += distance(pts[i], pts[j]);
        for (int i = 0; i < 3; ++i)
            if (!(sums[3] < sums[i] - 1e-9))
                throw ConfigError("vehicle geometry: identification LED distance sum not minimal");
    }
};

}  // namespace ips

#endif  // IPS_VEHICLE_GEOMETRY_HPP
