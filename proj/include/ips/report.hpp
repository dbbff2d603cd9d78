#ifndef IPS_REPORT_HPP
#define IPS_REPORT_HPP

#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ips/errors.hpp"
#include "ips/scoring.hpp"
#include "ips/suites.hpp"

namespace ips {

namespace report_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: identical bytes across runs
    if (!out) throw ConfigError("report: cannot open " + path + " for writing");
    return out;
}

}  // namespace report_detail

inline std::string hardware_description() {
    std::string model = "unknown cpu";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        const auto pos = line.find("model name");
        if (pos != std::string::npos) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) model = line.substr(colon + 2);
            break;
        }
    }
    return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " threads";
}

/// Per-scenario accuracy rows. Columns are fixed; values formatted with %.9g
/// so identical runs produce identical bytes.
inline void write_accuracy_csv(std::span<const AccuracyReport> reports, const std::string& path) {
    auto out = report_detail::open_out(path);
    out << "scenario,truth_records,matched_records,availability,"
           "pos_mean_cm,pos_max_cm,pos_std_cm,ori_mean_deg,ori_max_deg,ori_std_deg,"
           "id_resolved,id_correct\n";
    for (const AccuracyReport& r : reports) {
        out << r.scenario << ',' << r.truth_records << ',' << r.matched_records << ','
            << report_detail::fmt(r.availability()) << ','
            << report_detail::fmt(r.position_cm.mean) << ','
            << report_detail::fmt(r.position_cm.max) << ','
            << report_detail::fmt(r.position_cm.stddev) << ','
            << report_detail::fmt(r.orientation_deg.mean) << ','
            << report_detail::fmt(r.orientation_deg.max) << ','
            << report_detail::fmt(r.orientation_deg.stddev) << ','
            << r.id_resolved << ',' << r.id_correct << '\n';
    }
}

/// Flat per-record error series across all scenarios.
inline void write_error_series_csv(std::span<const AccuracyReport> reports,
                                   const std::string& path) {
    auto out = report_detail::open_out(path);
    out << "scenario,record,pos_error_cm,ori_error_deg\n";
    for (const AccuracyReport& r : reports) {
        for (std::size_t i = 0; i < r.position_series_cm.size(); ++i) {
            out << r.scenario << ',' << i << ',' << report_detail::fmt(r.position_series_cm[i])
                << ',' << report_detail::fmt(r.orientation_series_deg[i]) << '\n';
        }
    }
}

inline void write_accuracy_summary_json(std::span<const AccuracyReport> reports,
                                        const AccuracyReport& overall, const std::string& path) {
    nlohmann::ordered_json j;
    j["suite"] = overall.scenario;
    j["scenario_count"] = reports.size();
    j["overall"] = {
        {"truth_records", overall.truth_records},
        {"matched_records", overall.matched_records},
        {"availability", overall.availability()},
        {"position_cm", {{"mean", overall.position_cm.mean},
                         {"max", overall.position_cm.max},
                         {"std", overall.position_cm.stddev}}},
        {"orientation_deg", {{"mean", overall.orientation_deg.mean},
                             {"max", overall.orientation_deg.max},
                             {"std", overall.orientation_deg.stddev}}},
        {"id_resolved", overall.id_resolved},
        {"id_correct", overall.id_correct},
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const AccuracyReport& r : reports) {
        rows.push_back({{"scenario", r.scenario},
                        {"availability", r.availability()},
                        {"pos_mean_cm", r.position_cm.mean},
                        {"ori_mean_deg", r.orientation_deg.mean}});
    }
    j["scenarios"] = rows;
    auto out = report_detail::open_out(path);
    out << j.dump(2) << '\n';
}

/// Deterministic part of the latency suite output: which cells ran and how
/// many frames each processed.
inline void write_latency_manifest_csv(std::span<const LatencyCellReport> cells,
                                       const std::string& path) {
    auto out = report_detail::open_out(path);
    out << "case,vehicle_count,frames\n";
    for (const LatencyCellReport& c : cells)
        out << c.case_name << ',' << c.vehicle_count << ',' << c.frames << '\n';
}

/// Measured step timings. Wall-clock numbers vary run to run and are kept
/// out of the deterministic artifacts by design.
inline void write_latency_timing_csv(std::span<const LatencyCellReport> cells,
                                     const std::string& path) {
    auto out = report_detail::open_out(path);
    out << "# hardware: " << hardware_description() << '\n';
    out << "case,vehicle_count,frames,find_points_ms,find_vehicles_ms,match_vehicles_ms,"
           "compute_id_pose_ms,total_mean_ms,total_max_ms,deadline_fraction\n";
    for (const LatencyCellReport& c : cells) {
        out << c.case_name << ',' << c.vehicle_count << ',' << c.frames << ','
            << report_detail::fmt(c.find_points_ms) << ',' << report_detail::fmt(c.find_vehicles_ms)
            << ',' << report_detail::fmt(c.match_vehicles_ms) << ','
            << report_detail::fmt(c.compute_id_pose_ms) << ','
            << report_detail::fmt(c.total_mean_ms) << ',' << report_detail::fmt(c.total_max_ms)
            << ',' << report_detail::fmt(c.deadline_fraction) << '\n';
    }
}

inline void write_latency_json(std::span<const LatencyCellReport> cells, double deadline_ms,
                               const std::string& path) {
    nlohmann::ordered_json j;
    j["hardware"] = hardware_description();
    j["deadline_ms"] = deadline_ms;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const LatencyCellReport& c : cells) {
        rows.push_back({{"case", c.case_name},
                        {"vehicle_count", c.vehicle_count},
                        {"frames", c.frames},
                        {"find_points_ms", c.find_points_ms},
                        {"find_vehicles_ms", c.find_vehicles_ms},
                        {"match_vehicles_ms", c.match_vehicles_ms},
                        {"compute_id_pose_ms", c.compute_id_pose_ms},
                        {"total_mean_ms", c.total_mean_ms},
                        {"total_max_ms", c.total_max_ms},
                        {"deadline_fraction", c.deadline_fraction}});
    }
    j["cells"] = rows;
    auto out = report_detail::open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace ips

#endif  // IPS_REPORT_HPP
