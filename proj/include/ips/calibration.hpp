#ifndef IPS_CALIBRATION_HPP
#define IPS_CALIBRATION_HPP

#include <array>
#include <cmath>

#include "ips/errors.hpp"
#include "ips/geometry.hpp"

namespace ips {

/// Planar camera model: a 3x3 homography maps the z=0 ground plane to the
/// image plane. The scene is a single flat map under a fixed ceiling camera,
/// so this is the whole calibration.
class CameraCalibration {
public:
    CameraCalibration(const std::array<double, 9>& homography, int image_width, int image_height)
        : h_(homography), width_(image_width), height_(image_height) {
        if (image_width <= 0 || image_height <= 0)
            throw ConfigError("calibration: image dimensions must be positive");
        invert();
    }

    /// Axis-aligned homography covering the full map, image v axis pointing
    /// down (world y up). This is the default used by the simulator.
    static CameraCalibration map_scaled(int image_width, int image_height,
                                        double map_w = kMapWidth, double map_h = kMapHeight) {
        const double su = image_width / map_w;
        const double sv = image_height / map_h;
        return CameraCalibration({su, 0.0, 0.0,
                                  0.0, -sv, static_cast<double>(image_height),
                                  0.0, 0.0, 1.0},
                                 image_width, image_height);
    }

    ImagePoint world_to_image(WorldPoint p) const {
        const double u = h_[0] * p.x + h_[1] * p.y + h_[2];
        const double v = h_[3] * p.x + h_[4] * p.y + h_[5];
        const double w = h_[6] * p.x + h_[7] * p.y + h_[8];
        if (std::abs(w) < 1e-12)
            throw ProjectionError("world_to_image: point maps to infinity");
        return {u / w, v / w};
    }

    WorldPoint image_to_world(ImagePoint q) const {
        const double x = hinv_[0] * q.u + hinv_[1] * q.v + hinv_[2];
        const double y = hinv_[3] * q.u + hinv_[4] * q.v + hinv_[5];
        const double w = hinv_[6] * q.u + hinv_[7] * q.v + hinv_[8];
        if (std::abs(w) < 1e-12)
            throw ProjectionError("image_to_world: point maps to infinity");
        return {x / w, y / w};
    }

    int image_width() const { return width_; }
    int image_height() const { return height_; }
    const std::array<double, 9>& homography() const { return h_; }

private:
    void invert() {
        const auto& h = h_;
        const double det = h[0] * (h[4] * h[8] - h[5] * h[7])
                         - h[1] * (h[3] * h[8] - h[5] * h[6])
                         + h[2] * (h[3] * h[7] - h[4] * h[6]);
        double scale = 0.0;
        for (double e : h) scale = std::max(scale, std::abs(e));
        if (std::abs(det) < 1e-12 * std::max(1.0, scale * scale * scale))
            throw ConfigError("calibration: homography is singular");
        const double inv = 1.0 / det;
        hinv_ = {(h[4] * h[8] - h[5] * h[7]) * inv, (h[2] * h[7] - h[1] * h[8]) * inv,
                 (h[1] * h[5] - h[2] * h[4]) * inv, (h[5] * h[6] - h[3] * h[8]) * inv,
                 (h[0] * h[8] - h[2] * h[6]) * inv, (h[2] * h[3] - h[0] * h[5]) * inv,
                 (h[3] * h[7] - h[4] * h[6]) * inv, (h[1] * h[6] - h[0] * h[7]) * inv,
                 (h[0] * h[4] - h[1] * h[3]) * inv};
    }

    std::array<double, 9> h_;
    std::array<double, 9> hinv_{};
    int width_;
    int height_;
};

}  // namespace ips

#endif  // IPS_CALIBRATION_HPP
