#ifndef IPS_SCORING_HPP
#define IPS_SCORING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ips/errors.hpp"
#include "ips/geometry.hpp"
#include "ips/pipeline.hpp"
#include "ips/simulator.hpp"

namespace ips {

struct ErrorStats {
    double mean{};
    double max{};
    double stddev{};
    std::int64_t count{};
};

/// Accuracy of one run against its ground truth. Position errors are
/// Euclidean distances in centimeters, orientation errors wrapped absolute
/// differences in degrees. Frames where a truth vehicle had no matching
/// estimate count against availability and stay out of the error stats.
struct AccuracyReport {
    std::string scenario;
    ErrorStats position_cm;
    ErrorStats orientation_deg;
    std::int64_t truth_records{};
    std::int64_t matched_records{};
    std::int64_t id_resolved{};
    std::int64_t id_correct{};
    std::vector<double> position_series_cm;     // per matched record
    std::vector<double> orientation_series_deg;

    double availability() const {
        return truth_records == 0 ? 1.0
                                  : static_cast<double>(matched_records) / truth_records;
    }
};

namespace detail {

inline ErrorStats stats_of(std::span<const double> xs) {
    ErrorStats s;
    s.count = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
        s.max = std::max(s.max, x);
    }
    s.mean = sum / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / xs.size());
    return s;
}

}  // namespace detail

/// Scores an estimate stream against the aligned truth stream. Streams must
/// cover the same frames in the same order. Estimates with a resolved ID are
/// matched to the truth vehicle with that ID; estimates still initiating are
/// matched to the nearest unclaimed truth vehicle within a 10 cm gate, so
/// availability reflects detection rather than ID latency.
inline AccuracyReport score(std::span<const std::vector<PoseSample>> samples_per_frame,
                            std::span<const GroundTruthRecord> truth_per_frame,
                            const std::string& scenario_name = "") {
    if (samples_per_frame.size() != truth_per_frame.size())
        throw ConfigError("score: estimate and truth streams have different lengths");

    AccuracyReport report;
    report.scenario = scenario_name;

    for (std::size_t f = 0; f < truth_per_frame.size(); ++f) {
        const GroundTruthRecord& truth = truth_per_frame[f];
        const std::vector<PoseSample>& samples = samples_per_frame[f];
        report.truth_records += static_cast<std::int64_t>(truth.vehicles.size());

        std::vector<char> truth_used(truth.vehicles.size(), 0);
        std::vector<const PoseSample*> pending;

        const auto record_match = [&](const VehicleTruth& tv, const PoseSample& est) {
            const double pos_cm = 100.0 * distance(tv.pose.position, est.pose.position);
            const double ori_deg = std::abs(deg_from_rad(angle_diff(est.pose.yaw, tv.pose.yaw)));
            report.position_series_cm.push_back(pos_cm);
            report.orientation_series_deg.push_back(ori_deg);
            ++report.matched_records;
            if (est.vehicle_id) {
                ++report.id_resolved;
                if (*est.vehicle_id == tv.vehicle_id) ++report.id_correct;
            }
        };

        for (const PoseSample& est : samples) {
            bool matched = false;
            if (est.vehicle_id) {
                for (std::size_t t = 0; t < truth.vehicles.size(); ++t) {
                    if (!truth_used[t] && truth.vehicles[t].vehicle_id == *est.vehicle_id) {
                        truth_used[t] = 1;
                        record_match(truth.vehicles[t], est);
                        matched = true;
                        break;
                    }
                }
            }
            if (!matched) pending.push_back(&est);
        }
        for (const PoseSample* est : pending) {
            double best = 0.10;  // meters
            int best_t = -1;
            for (std::size_t t = 0; t < truth.vehicles.size(); ++t) {
                if (truth_used[t]) continue;
                const double d = distance(truth.vehicles[t].pose.position, est->pose.position);
                if (d < best) {
                    best = d;
                    best_t = static_cast<int>(t);
                }
            }
            if (best_t >= 0) {
                truth_used[best_t] = 1;
                record_match(truth.vehicles[best_t], *est);
            }
        }
    }

    report.position_cm = detail::stats_of(report.position_series_cm);
    report.orientation_deg = detail::stats_of(report.orientation_series_deg);
    return report;
}

/// Pools several per-scenario reports into one aggregate (series are
/// concatenated in input order, stats recomputed over the pool).
inline AccuracyReport pool_reports(std::span<const AccuracyReport> reports,
                                   const std::string& name) {
    AccuracyReport all;
    all.scenario = name;
    for (const AccuracyReport& r : reports) {
        all.truth_records += r.truth_records;
        all.matched_records += r.matched_records;
        all.id_resolved += r.id_resolved;
        all.id_correct += r.id_correct;
        all.position_series_cm.insert(all.position_series_cm.end(), r.position_series_cm.begin(),
                                      r.position_series_cm.end());
        all.orientation_series_deg.insert(all.orientation_series_deg.end(),
                                          r.orientation_series_deg.begin(),
                                          r.orientation_series_deg.end());
    }
    all.position_cm = detail::stats_of(all.position_series_cm);
    all.orientation_deg = detail::stats_of(all.orientation_series_deg);
    return all;
}

}  // namespace ips

#endif  // IPS_SCORING_HPP
