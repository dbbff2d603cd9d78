#include <catch_amalgamated.hpp>

#include <random>

#include "ips/calibration.hpp"
#include "ips/geometry.hpp"
#include "ips/vehicle_geometry.hpp"

using namespace ips;

TEST_CASE("world_to_image identity homography", "[geometry]") {
    CameraCalibration cal({1, 0, 0, 0, 1, 0, 0, 0, 1}, 100, 100);
    const ImagePoint q = cal.world_to_image({1.0, 2.0});
    CHECK(q.u == Catch::Approx(1.0));
    CHECK(q.v == Catch::Approx(2.0));
}

TEST_CASE("world_to_image pure scale", "[geometry]") {
    CameraCalibration cal({100, 0, 0, 0, 100, 0, 0, 0, 1}, 2048, 1810);
    const ImagePoint q = cal.world_to_image({0.5, 0.25});
    CHECK(q.u == Catch::Approx(50.0));
    CHECK(q.v == Catch::Approx(25.0));
    const WorldPoint back = cal.image_to_world({50.0, 25.0});
    CHECK(back.x == Catch::Approx(0.5));
    CHECK(back.y == Catch::Approx(0.25));
}

TEST_CASE("projection round trip over random homographies", "[geometry]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> perturb(-0.05, 0.05);
    std::uniform_real_distribution<double> px(0.0, kMapWidth);
    std::uniform_real_distribution<double> py(0.0, kMapHeight);
    for (int trial = 0; trial < 200; ++trial) {
        // Near-scaling homographies with mild projective terms, always invertible.
        const std::array<double, 9> h = {400 + 40 * perturb(rng), 40 * perturb(rng), 20.0,
                                         40 * perturb(rng), -400 - 40 * perturb(rng), 1800.0,
                                         perturb(rng) * 0.01, perturb(rng) * 0.01, 1.0};
        const CameraCalibration cal(h, 2048, 1810);
        for (int k = 0; k < 20; ++k) {
            const WorldPoint p{px(rng), py(rng)};
            const WorldPoint back = cal.image_to_world(cal.world_to_image(p));
            REQUIRE(distance(p, back) < 1e-9);
        }
    }
}

TEST_CASE("default map calibration round trip", "[geometry]") {
    const CameraCalibration cal = CameraCalibration::map_scaled(2048, 1810);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> px(0.0, kMapWidth), py(0.0, kMapHeight);
    for (int k = 0; k < 1000; ++k) {
        const WorldPoint p{px(rng), py(rng)};
        REQUIRE(distance(p, cal.image_to_world(cal.world_to_image(p))) < 1e-9);
    }
}

TEST_CASE("singular homography rejected", "[geometry]") {
    CHECK_THROWS_AS(CameraCalibration({1, 0, 0, 2, 0, 0, 0, 0, 1}, 10, 10), ConfigError);
}

TEST_CASE("projection to infinity reported", "[geometry]") {
    CameraCalibration cal({1, 0, 0, 0, 1, 0, 1, 0, 1}, 10, 10);  // w = x + 1
    CHECK_THROWS_AS(cal.world_to_image({-1.0, 0.5}), ProjectionError);
}

TEST_CASE("body_to_world identity and quarter turn", "[geometry]") {
    const WorldPoint a = body_to_world({{0, 0}, 0.0}, {0.3, -0.2});
    CHECK(a.x == Catch::Approx(0.3));
    CHECK(a.y == Catch::Approx(-0.2));
    const WorldPoint b = body_to_world({{0, 0}, std::numbers::pi / 2}, {1.0, 0.0});
    CHECK(std::abs(b.x - 0.0) < 1e-12);
    CHECK(std::abs(b.y - 1.0) < 1e-12);
}

TEST_CASE("body_to_world inverts with world_to_body", "[geometry]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const Pose pose{{u(rng), u(rng)}, wrap_angle(u(rng) * 3)};
        const WorldPoint offset{u(rng), u(rng)};
        const WorldPoint back = world_to_body(pose, body_to_world(pose, offset));
        REQUIRE(distance(back, offset) < 1e-9);
    }
}

TEST_CASE("rigid transforms preserve pairwise LED distances", "[geometry]") {
    const VehicleGeometry g = VehicleGeometry::standard();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto body = g.body_points();
    for (int k = 0; k < 500; ++k) {
        const Pose pose{{u(rng), u(rng)}, wrap_angle(u(rng))};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const double before = distance(body[i], body[j]);
                const double after =
                    distance(body_to_world(pose, body[i]), body_to_world(pose, body[j]));
                REQUIRE(std::abs(before - after) < 1e-9);
            }
    }
}

TEST_CASE("wrap_angle is idempotent and lands in (-pi, pi]", "[geometry]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 10000; ++k) {
        const double a = wrap_angle(u(rng));
        REQUIRE(a > -std::numbers::pi);
        REQUIRE(a <= std::numbers::pi);
        REQUIRE(wrap_angle(a) == Catch::Approx(a).margin(1e-15));
    }
    CHECK(wrap_angle(std::numbers::pi) == Catch::Approx(std::numbers::pi));
    CHECK(wrap_angle(-std::numbers::pi) == Catch::Approx(std::numbers::pi));
}

TEST_CASE("standard vehicle geometry satisfies its invariants", "[geometry]") {
    const VehicleGeometry g = VehicleGeometry::standard();
    CHECK(g.vehicle_width == Catch::Approx(0.034));
    CHECK(g.vehicle_length == Catch::Approx(0.1648787).epsilon(1e-5));
    CHECK(g.vehicle_width < g.vehicle_length);
    CHECK(g.ref_distances3[0] == Catch::Approx(0.034));
    CHECK(g.ref_distances4.back() == Catch::Approx(g.vehicle_length));
    CHECK(g.pair_side_offset[0] == Catch::Approx(std::numbers::pi / 2));
}

TEST_CASE("degenerate vehicle geometries are rejected", "[geometry]") {
    // Equilateral triangle: direction would be ambiguous.
    const double s = 0.1;
    const double h = s * std::sqrt(3.0) / 2.0;
    CHECK_THROWS_AS(VehicleGeometry::make({0, 0}, {s, 0}, {s / 2, h}, {s / 2, h / 3}, 0.005),
                    ConfigError);
    // Identification LED outside the triangle.
    CHECK_THROWS_AS(
        VehicleGeometry::make({-0.082, 0.017}, {-0.082, -0.017}, {0.082, 0}, {-0.2, 0}, 0.005),
        ConfigError);
    // Tolerance must be positive.
    CHECK_THROWS_AS(
        VehicleGeometry::make({-0.082, 0.017}, {-0.082, -0.017}, {0.082, 0}, {-0.01, 0}, 0.0),
        ConfigError);
    // Distinct reference distances closer than twice the tolerance.
    CHECK_THROWS_AS(
        VehicleGeometry::make({-0.082, 0.017}, {-0.082, -0.017}, {0.082, 0}, {-0.01, 0}, 0.01),
        ConfigError);
}
