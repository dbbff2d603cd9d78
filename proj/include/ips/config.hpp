#ifndef IPS_CONFIG_HPP
#define IPS_CONFIG_HPP

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ips/calibration.hpp"
#include "ips/errors.hpp"
#include "ips/geometry.hpp"
#include "ips/simulator.hpp"
#include "ips/tracking.hpp"
#include "ips/vehicle_geometry.hpp"

namespace ips {

/// Parsed key=value config with [section] headers. '#' and ';' start
/// comments. Values keep their raw text; typed access goes through the
/// getters, which report the file position on errors.
class Config {
public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path);
        return parse_stream(in, path);
    }

    static Config parse_string(const std::string& text, const std::string& label = "<string>") {
        std::istringstream in(text);
        return parse_stream(in, label);
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        auto s = values_.find(section);
        if (s == values_.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second.text;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        const Entry& e = values_.at(section).at(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.text, &pos);
            if (pos != e.text.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(where(e, section, key) + ": expected a number, got '" + e.text + "'");
        }
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        if (!has(section, key)) return fallback;
        const Entry& e = values_.at(section).at(key);
        try {
            std::size_t pos = 0;
            const int v = std::stoi(e.text, &pos);
            if (pos != e.text.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(where(e, section, key) + ": expected an integer, got '" + e.text + "'");
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const Entry& e = values_.at(section).at(key);
        if (e.text == "on" || e.text == "true" || e.text == "1") return true;
        if (e.text == "off" || e.text == "false" || e.text == "0") return false;
        throw ConfigError(where(e, section, key) + ": expected on/off, got '" + e.text + "'");
    }

    std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
        const Entry& e = values_.at(section).at(key);
        std::istringstream in(e.text);
        std::vector<double> out;
        double v;
        while (in >> v) out.push_back(v);
        if (!in.eof())
            throw ConfigError(where(e, section, key) + ": expected numbers, got '" + e.text + "'");
        return out;
    }

    WorldPoint get_point(const std::string& section, const std::string& key,
                         WorldPoint fallback) const {
        if (!has(section, key)) return fallback;
        const auto v = get_doubles(section, key);
        if (v.size() != 2) {
            const Entry& e = values_.at(section).at(key);
            throw ConfigError(where(e, section, key) + ": expected 'x y'");
        }
        return {v[0], v[1]};
    }

private:
    struct Entry {
        std::string text;
        int line{};
    };

    template <typename Stream>
    static Config parse_stream(Stream& in, const std::string& label) {
        Config cfg;
        cfg.label_ = label;
        std::string line;
        std::string section = "global";
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto comment = line.find_first_of("#;");
            if (comment != std::string::npos) line.erase(comment);
            const auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string{};
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(label + ":" + std::to_string(line_no) +
                                      ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(label + ":" + std::to_string(line_no) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(label + ":" + std::to_string(line_no) + ": empty key");
            cfg.values_[section][key] = Entry{value, line_no};
        }
        return cfg;
    }

    std::string where(const Entry& e, const std::string& section, const std::string& key) const {
        return label_ + ":" + std::to_string(e.line) + " [" + section + "] " + key;
    }

    std::string label_;
    std::map<std::string, std::map<std::string, Entry>> values_;
};

inline VehicleGeometry load_geometry(const Config& cfg) {
    const VehicleGeometry d = VehicleGeometry::standard();
    return VehicleGeometry::make(cfg.get_point("geometry", "back_left", d.back_left),
                                 cfg.get_point("geometry", "back_right", d.back_right),
                                 cfg.get_point("geometry", "front", d.front),
                                 cfg.get_point("geometry", "id_led", d.id_led),
                                 cfg.get_double("geometry", "tolerance", d.tolerance));
}

inline CameraCalibration load_calibration(const Config& cfg) {
    const int w = cfg.get_int("calibration", "image_width", 2048);
    const int h = cfg.get_int("calibration", "image_height", 1810);
    if (cfg.has("calibration", "homography")) {
        const auto v = cfg.get_doubles("calibration", "homography");
        if (v.size() != 9) throw ConfigError("calibration.homography: expected 9 numbers");
        std::array<double, 9> m{};
        std::copy(v.begin(), v.end(), m.begin());
        return CameraCalibration(m, w, h);
    }
    return CameraCalibration::map_scaled(w, h);
}

inline RenderParams load_render(const Config& cfg) {
    RenderParams rp;
    rp.blob_radius = cfg.get_int("render", "blob_radius", rp.blob_radius);
    rp.image_width = cfg.get_int("calibration", "image_width", rp.image_width);
    rp.image_height = cfg.get_int("calibration", "image_height", rp.image_height);
    rp.quantize = cfg.get_bool("render", "quantize", rp.quantize);
    rp.noise_sigma = cfg.get_double("render", "noise_sigma", rp.noise_sigma);
    rp.disturbance_rate = cfg.get_double("render", "disturbance_rate", rp.disturbance_rate);
    rp.occlusion_rate = cfg.get_double("render", "occlusion_rate", rp.occlusion_rate);
    return rp;
}

inline PlausibilityLimits load_limits(const Config& cfg) {
    PlausibilityLimits pl;
    pl.max_speed = cfg.get_double("tracking", "max_speed", pl.max_speed);
    pl.max_yaw_rate = cfg.get_double("tracking", "max_yaw_rate", pl.max_yaw_rate);
    return pl;
}

inline Scenario load_scenario(const Config& cfg) {
    Scenario sc;
    const std::string kind = cfg.get("scenario", "kind", "static_grid");
    if (kind == "static_grid")
        sc.kind = ScenarioKind::static_grid;
    else if (kind == "straight_line")
        sc.kind = ScenarioKind::straight_line;
    else if (kind == "circle")
        sc.kind = ScenarioKind::circle;
    else if (kind == "ellipse")
        sc.kind = ScenarioKind::ellipse;
    else if (kind == "figure_eight")
        sc.kind = ScenarioKind::figure_eight;
    else if (kind == "platoon")
        sc.kind = ScenarioKind::platoon;
    else if (kind == "clusters")
        sc.kind = ScenarioKind::clusters;
    else if (kind == "two_lane")
        sc.kind = ScenarioKind::two_lane;
    else if (kind == "passing")
        sc.kind = ScenarioKind::passing;
    else
        throw ConfigError("scenario.kind: unknown kind '" + kind + "'");
    sc.name = cfg.get("scenario", "name", kind);
    sc.vehicle_count = cfg.get_int("scenario", "vehicle_count", sc.vehicle_count);
    sc.speed = cfg.get_double("scenario", "speed", sc.speed);
    sc.duration = cfg.get_double("scenario", "duration", sc.duration);
    sc.frame_rate = cfg.get_double("scenario", "frame_rate", sc.frame_rate);
    sc.grid_index = cfg.get_int("scenario", "grid_index", sc.grid_index);
    sc.line_start = cfg.get_point("scenario", "line_start", sc.line_start);
    sc.line_end = cfg.get_point("scenario", "line_end", sc.line_end);
    sc.center = cfg.get_point("scenario", "center", sc.center);
    sc.radius = cfg.get_double("scenario", "radius", sc.radius);
    sc.semi_major = cfg.get_double("scenario", "semi_major", sc.semi_major);
    sc.semi_minor = cfg.get_double("scenario", "semi_minor", sc.semi_minor);
    sc.direction = cfg.get_int("scenario", "direction", sc.direction);
    sc.platoon_spacing = cfg.get_double("scenario", "platoon_spacing", sc.platoon_spacing);
    sc.cluster_count = cfg.get_int("scenario", "cluster_count", sc.cluster_count);
    sc.lane_gap = cfg.get_double("scenario", "lane_gap", sc.lane_gap);
    sc.lane_swap = cfg.get_bool("scenario", "lane_swap", sc.lane_swap);
    sc.passing_angle = rad_from_deg(cfg.get_double("scenario", "passing_angle_deg",
                                                   deg_from_rad(sc.passing_angle)));
    return sc;
}

}  // namespace ips

#endif  // IPS_CONFIG_HPP
