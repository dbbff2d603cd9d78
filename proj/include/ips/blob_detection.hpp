#ifndef IPS_BLOB_DETECTION_HPP
#define IPS_BLOB_DETECTION_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ips/errors.hpp"
#include "ips/frame.hpp"
#include "ips/geometry.hpp"

namespace ips {

/// A connected bright region, reduced to its centroid and pixel count.
struct Blob {
    ImagePoint centroid;  // binary moments m10/m00, m01/m00
    int area{};
};

struct BlobParams {
    std::uint8_t threshold = 128;
    int min_area = 1;
    int max_area = 1 << 30;
};

/// Finds all 8-connected components of pixels >= threshold whose area lies in
/// [min_area, max_area]. Centroids are unweighted means of member pixel
/// coordinates; LEDs saturate under short exposure, so intensity weighting
/// would add nothing. Components touching the border are kept. Output is
/// sorted by centroid (v, then u), so identical input gives identical output.
inline std::vector<Blob> detect_blobs(const Frame& frame, std::uint8_t threshold,
                                      int min_area, int max_area) {
    if (frame.pixels.empty() || frame.width <= 0 || frame.height <= 0)
        throw ConfigError("detect_blobs: empty frame buffer");
    if (!(0 < min_area && min_area <= max_area))
        throw ConfigError("detect_blobs: need 0 < min_area <= max_area");

    const int w = frame.width;
    const int h = frame.height;
    const std::uint8_t* px = frame.pixels.data();

    std::vector<std::uint8_t> visited(frame.pixels.size(), 0);
    std::vector<std::int32_t> stack;
    std::vector<Blob> blobs;

    for (int v = 0; v < h; ++v) {
        const std::size_t row = static_cast<std::size_t>(v) * w;
        for (int u = 0; u < w; ++u) {
            const std::size_t idx = row + u;
            if (px[idx] < threshold || visited[idx]) continue;

            // Flood-fill one component.
            long long sum_u = 0, sum_v = 0;
            int area = 0;
            visited[idx] = 1;
            stack.push_back(static_cast<std::int32_t>(idx));
            while (!stack.empty()) {
                const std::int32_t cur = stack.back();
                stack.pop_back();
                const int cu = cur % w;
                const int cv = cur / w;
                sum_u += cu;
                sum_v += cv;
                ++area;
                const int u0 = std::max(cu - 1, 0), u1 = std::min(cu + 1, w - 1);
                const int v0 = std::max(cv - 1, 0), v1 = std::min(cv + 1, h - 1);
                for (int nv = v0; nv <= v1; ++nv) {
                    const std::size_t nrow = static_cast<std::size_t>(nv) * w;
                    for (int nu = u0; nu <= u1; ++nu) {
                        const std::size_t n = nrow + nu;
                        if (px[n] >= threshold && !visited[n]) {
                            visited[n] = 1;
                            stack.push_back(static_cast<std::int32_t>(n));
                        }
                    }
                }
            }

            if (area >= min_area && area <= max_area) {
                blobs.push_back({{static_cast<double>(sum_u) / area,
                                  static_cast<double>(sum_v) / area},
                                 area});
            }
        }
    }

    std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
        if (a.centroid.v != b.centroid.v) return a.centroid.v < b.centroid.v;
        return a.centroid.u < b.centroid.u;
    });
    return blobs;
}

inline std::vector<Blob> detect_blobs(const Frame& frame, const BlobParams& params) {
    return detect_blobs(frame, params.threshold, params.min_area, params.max_area);
}

}  // namespace ips

#endif  // IPS_BLOB_DETECTION_HPP
