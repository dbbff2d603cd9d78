#ifndef IPS_FRAME_HPP
#define IPS_FRAME_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ips/errors.hpp"

namespace ips {

/// One camera image: 8-bit grayscale, row-major, with capture metadata.
/// Within a run, timestamps advance by a constant period and sequence
/// numbers are strictly increasing.
struct Frame {
    int width{};
    int height{};
    std::vector<std::uint8_t> pixels;  // size = width * height
    double timestamp{};                // seconds, monotonic
    std::uint64_t sequence_number{};

    std::uint8_t at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
    std::uint8_t& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }

    static Frame black(int width, int height, double timestamp = 0.0, std::uint64_t seq = 0) {
        Frame f;
        f.width = width;
        f.height = height;
        f.pixels.assign(static_cast<std::size_t>(width) * height, 0);
        f.timestamp = timestamp;
        f.sequence_number = seq;
        return f;
    }
};

/// Writes a binary PGM (P5, maxval 255). Used for debug dumps and fixtures.
inline void write_pgm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_pgm: cannot open " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw ConfigError("write_pgm: write failed for " + path);
}

/// Reads a binary PGM (P5, maxval 255).
inline Frame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ConfigError("read_pgm: not a P5 file: " + path);
    const auto next_token = [&in, &path]() {
        // Skips whitespace and '#' comment lines.
        std::string tok;
        while (in >> tok) {
            if (tok[0] != '#') return tok;
            std::string rest;
            std::getline(in, rest);
        }
        throw ConfigError("read_pgm: truncated header in " + path);
    };
    Frame f;
    f.width = std::stoi(next_token());
    f.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255) throw ConfigError("read_pgm: only maxval 255 supported");
    if (f.width <= 0 || f.height <= 0) throw ConfigError("read_pgm: bad dimensions");
    in.get();  // single whitespace after maxval
    f.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw ConfigError("read_pgm: truncated pixel data in " + path);
    return f;
}

}  // namespace ips

#endif  // IPS_FRAME_HPP
