#include <catch_amalgamated.hpp>

#include <random>

#include "ips/pose_estimation.hpp"

using namespace ips;

namespace {

const VehicleGeometry kGeom = VehicleGeometry::standard();

std::vector<WorldPoint> render_points(const Pose& pose, int count = 4) {
    std::vector<WorldPoint> pts;
    const auto body = kGeom.body_points();
    for (int i = 0; i < count; ++i) pts.push_back(body_to_world(pose, body[i]));
    return pts;
}

}  // namespace

TEST_CASE("identification point has the smallest distance sum", "[pose]") {
    const auto pts = render_points({{0, 0}, 0.0});
    CHECK(split_id_led_index(pts) == 3);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto moved = render_points({{u(rng), u(rng)}, wrap_angle(u(rng))});
        REQUIRE(split_id_led_index(moved) == 3);
    }
}

TEST_CASE("identification split survives noise up to a quarter tolerance", "[pose]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> noise(-kGeom.tolerance / 4, kGeom.tolerance / 4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        auto pts = render_points({{u(rng), u(rng)}, wrap_angle(u(rng))});
        for (auto& p : pts) {
            p.x += noise(rng);
            p.y += noise(rng);
        }
        REQUIRE(split_id_led_index(pts) == 3);
    }
}

TEST_CASE("ambiguous distance sums are a geometry violation", "[pose]") {
    // A square: all four distance sums are equal.
    const std::vector<WorldPoint> square = {{0, 0}, {0.1, 0}, {0.1, 0.1}, {0, 0.1}};
    CHECK_THROWS_AS(split_id_led_index(square), GeometryViolation);
}

TEST_CASE("classify_back labels the pair at vehicle width", "[pose]") {
    const auto pts = render_points({{1.0, 2.0}, 0.0}, 3);
    const BackClassification c = classify_back(pts, kGeom);
    CHECK(pts[c.back_left].y > pts[c.back_right].y);  // yaw 0: left is +y
    CHECK(c.front == 2);
}

TEST_CASE("classify_back flips consistently when the vehicle is reversed", "[pose]") {
    const auto fwd = render_points({{1.0, 2.0}, 0.0}, 3);
    const auto rev = render_points({{1.0, 2.0}, std::numbers::pi}, 3);
    const BackClassification cf = classify_back(fwd, kGeom);
    const BackClassification cr = classify_back(rev, kGeom);
    // Reversing the vehicle swaps which raw point plays back-left, but the
    // body-frame relation (left of the forward axis) is preserved.
    const WorldPoint mid_f = 0.5 * (fwd[cf.back_left] + fwd[cf.back_right]);
    const WorldPoint mid_r = 0.5 * (rev[cr.back_left] + rev[cr.back_right]);
    CHECK(cross(fwd[cf.front] - mid_f, fwd[cf.back_left] - mid_f) > 0.0);
    CHECK(cross(rev[cr.front] - mid_r, rev[cr.back_left] - mid_r) > 0.0);
}

TEST_CASE("equilateral triangles are rejected", "[pose]") {
    const double s = kGeom.vehicle_width;
    const std::vector<WorldPoint> tri = {{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}};
    CHECK_THROWS_AS(classify_back(tri, kGeom), GeometryViolation);
}

TEST_CASE("orientation is exact on clean points", "[pose]") {
    const auto p0 = render_points({{0, 0}, 0.0}, 3);
    CHECK(std::abs(estimate_orientation(p0[0], p0[1], p0[2], kGeom)) < 1e-12);

    const auto p2 = render_points({{0.5, 0.5}, 2.0}, 3);
    CHECK(estimate_orientation(p2[0], p2[1], p2[2], kGeom) == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("orientation equals the median of the three pair angles", "[pose]") {
    // Push the front point sideways: two pair angles are contaminated and the
    // median must coincide with one of the explicitly computed candidates and
    // stay within the band of the two least-deviating ones.
    const Pose truth{{1.0, 1.0}, 0.9};
    auto pts = render_points(truth, 3);
    const WorldPoint fwd{std::cos(truth.yaw), std::sin(truth.yaw)};
    pts[2] = pts[2] + 3 * kGeom.tolerance * WorldPoint{-fwd.y, fwd.x};

    std::array<double, 3> candidates{};
    const std::array<std::pair<int, int>, 3> pairs = {std::pair{0, 1}, {0, 2}, {1, 2}};
    for (int k = 0; k < 3; ++k) {
        const WorldPoint d = pts[pairs[k].second] - pts[pairs[k].first];
        candidates[k] = wrap_angle(std::atan2(d.y, d.x) + kGeom.pair_side_offset[k]);
    }
    std::array<double, 3> dev{};
    for (int k = 0; k < 3; ++k) dev[k] = std::abs(angle_diff(candidates[k], truth.yaw));
    std::sort(dev.begin(), dev.end());

    const double est = estimate_orientation(pts[0], pts[1], pts[2], kGeom);
    const bool is_candidate = std::any_of(candidates.begin(), candidates.end(), [&](double c) {
        return std::abs(angle_diff(est, c)) < 1e-12;
    });
    CHECK(is_candidate);
    CHECK(std::abs(angle_diff(est, truth.yaw)) <= dev[1] + 1e-12);
}

TEST_CASE("corrupting any single point keeps the median inside the clean band", "[pose]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<int> which(0, 2);
    std::uniform_real_distribution<double> mag(-5.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const Pose truth{{u(rng), u(rng)}, wrap_angle(u(rng))};
        auto pts = render_points(truth, 3);
        const int corrupt = which(rng);
        const double offset = mag(rng) * kGeom.tolerance;
        const WorldPoint fwd{std::cos(truth.yaw), std::sin(truth.yaw)};
        pts[corrupt] = pts[corrupt] + offset * WorldPoint{-fwd.y, fwd.x};

        std::array<double, 3> candidates{};
        const std::array<std::pair<int, int>, 3> pairs = {std::pair{0, 1}, {0, 2}, {1, 2}};
        for (int k = 0; k < 3; ++k) {
            const WorldPoint d = pts[pairs[k].second] - pts[pairs[k].first];
            candidates[k] = wrap_angle(std::atan2(d.y, d.x) + kGeom.pair_side_offset[k]);
        }
        std::array<double, 3> dev{};
        for (int k = 0; k < 3; ++k) dev[k] = std::abs(angle_diff(candidates[k], truth.yaw));
        std::sort(dev.begin(), dev.end());

        const double est = estimate_orientation(pts[0], pts[1], pts[2], kGeom);
        // The median never exceeds the second-largest deviation.
        REQUIRE(std::abs(angle_diff(est, truth.yaw)) <= dev[1] + 1e-12);
    }
}

TEST_CASE("position is exact on clean points", "[pose]") {
    const auto p1 = render_points({{1.0, 1.0}, 0.0}, 3);
    const BackClassification c1 = classify_back(p1, kGeom);
    const WorldPoint q1 = estimate_position(p1[c1.back_left], p1[c1.back_right], 0.0, kGeom);
    CHECK(distance(q1, {1.0, 1.0}) < 1e-12);

    const Pose t2{{2.0, 3.0}, std::numbers::pi / 3};
    const auto p2 = render_points(t2, 3);
    const BackClassification c2 = classify_back(p2, kGeom);
    const double yaw2 = estimate_orientation(p2[c2.back_left], p2[c2.back_right], p2[c2.front], kGeom);
    const WorldPoint q2 = estimate_position(p2[c2.back_left], p2[c2.back_right], yaw2, kGeom);
    CHECK(distance(q2, t2.position) < 1e-9);
}

TEST_CASE("symmetric back displacement along the back line cancels", "[pose]") {
    const auto pts = render_points({{1.0, 1.0}, 0.0}, 3);
    const BackClassification c = classify_back(pts, kGeom);
    const WorldPoint along = pts[c.back_right] - pts[c.back_left];
    const WorldPoint bl = pts[c.back_left] + 0.001 * along;
    const WorldPoint br = pts[c.back_right] - 0.001 * along;
    const WorldPoint shifted = estimate_position(bl, br, 0.0, kGeom);
    const WorldPoint clean = estimate_position(pts[c.back_left], pts[c.back_right], 0.0, kGeom);
    CHECK(distance(shifted, clean) < 1e-12);
}

TEST_CASE("full pose estimation is exact over random poses", "[pose]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.3, 3.7);
    std::uniform_real_distribution<double> yaw(-3.14, 3.14);
    for (int trial = 0; trial < 1000; ++trial) {
        const Pose truth{{u(rng), u(rng)}, wrap_angle(yaw(rng))};
        const bool with_id = trial % 2 == 0;
        const auto pts = render_points(truth, with_id ? 4 : 3);
        const Pose est = estimate_pose(pts, kGeom);
        REQUIRE(distance(est.position, truth.position) < 1e-9);
        REQUIRE(std::abs(angle_diff(est.yaw, truth.yaw)) < 1e-9);
    }
}

TEST_CASE("pose estimation is equivariant under rigid motion", "[pose]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Pose base{{1.5, 1.5}, 0.4};
    const auto pts = render_points(base, 4);
    const Pose est0 = estimate_pose(pts, kGeom);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = 3.0 * u(rng);
        const WorldPoint t{u(rng), u(rng)};
        std::vector<WorldPoint> moved;
        for (const WorldPoint& p : pts)
            moved.push_back({t.x + std::cos(theta) * p.x - std::sin(theta) * p.y,
                             t.y + std::sin(theta) * p.x + std::cos(theta) * p.y});
        const Pose est = estimate_pose(moved, kGeom);
        const WorldPoint expect{t.x + std::cos(theta) * est0.position.x - std::sin(theta) * est0.position.y,
                                t.y + std::sin(theta) * est0.position.x + std::cos(theta) * est0.position.y};
        REQUIRE(distance(est.position, expect) < 1e-9);
        REQUIRE(std::abs(angle_diff(est.yaw, wrap_angle(est0.yaw + theta))) < 1e-9);
    }
}

TEST_CASE("estimate_pose rejects wrong point counts", "[pose]") {
    const auto pts = render_points({{1, 1}, 0.0}, 4);
    CHECK_THROWS_AS(estimate_pose(std::span<const WorldPoint>(pts.data(), 2), kGeom),
                    GeometryViolation);
}
