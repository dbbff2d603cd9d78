#ifndef IPS_PIPELINE_HPP
#define IPS_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ips/assembly.hpp"
#include "ips/blob_detection.hpp"
#include "ips/calibration.hpp"
#include "ips/errors.hpp"
#include "ips/frame.hpp"
#include "ips/identification.hpp"
#include "ips/pose_estimation.hpp"
#include "ips/tracking.hpp"
#include "ips/vehicle_geometry.hpp"

namespace ips {

/// One output record: where a vehicle is and, once decoded, which one it is.
struct PoseSample {
    std::optional<int> vehicle_id;  // nullopt while the ID is still initiating
    Pose pose{};
    std::uint64_t frame_sequence{};
    double timestamp{};
    int track_id{};
};

/// Wall-clock cost of the four processing steps of one frame, milliseconds.
struct StepLatencies {
    double find_points_ms{};
    double find_vehicles_ms{};
    double match_vehicles_ms{};
    double compute_id_pose_ms{};
    double total_ms{};
};

struct FrameDiagnostics {
    std::uint64_t sequence_number{};
    int point_count{};
    int vehicle_count{};
    int disturbance_count{};
    int unmapped_count{};
    int active_tracks{};
    bool deadline_missed{};
    std::vector<std::string> errors;
};

struct FrameResult {
    std::vector<PoseSample> samples;
    StepLatencies latencies;
    FrameDiagnostics diagnostics;
};

struct EngineConfig {
    VehicleGeometry geometry = VehicleGeometry::standard();
    CameraCalibration calibration = CameraCalibration::map_scaled(2048, 1810);
    IdTable id_table = build_id_table(50.0, 20);
    PlausibilityLimits limits{};
    BlobParams blob{};
    double deadline_ms = 20.0;
    int retire_after_missed = 5;
    int max_tracks = 28;  // fixed track-slot capacity, sized for the fleet
};

/// The frame-ordered engine: find points, find vehicles, match to tracks,
/// then decode IDs and emit poses. Processing is deterministic: replaying a
/// frame sequence reproduces the identical sample stream. Track state lives
/// in a fixed-capacity slot table and the ID/pose step touches every slot
/// uniformly each frame, so its cost does not follow the vehicle count;
/// per-frame load changes only the vehicle-finding step, which keeps the
/// latency budget predictable.
class Engine {
public:
    explicit Engine(EngineConfig config)
        : cfg_(std::move(config)), slots_(static_cast<std::size_t>(cfg_.max_tracks)) {}

    const EngineConfig& config() const { return cfg_; }

    FrameResult process_frame(const Frame& frame) {
        const Clock::time_point t0 = Clock::now();
        check_order(frame.sequence_number);
        FrameResult result;
        result.diagnostics.sequence_number = frame.sequence_number;

        std::vector<Blob> blobs;
        try {
            blobs = detect_blobs(frame, cfg_.blob);
        } catch (const std::exception& e) {
            result.diagnostics.errors.emplace_back(std::string("find_points: ") + e.what());
        }
        std::vector<ImagePoint> points;
        points.reserve(blobs.size());
        for (const Blob& b : blobs) points.push_back(b.centroid);
        const Clock::time_point t1 = Clock::now();

        run_after_detection(points, frame.timestamp, frame.sequence_number, t0, t1, result);
        return result;
    }

    /// Same pipeline fed with already-extracted LED image points; used when
    /// the point source is exact (no rasterization) and for replay.
    FrameResult process_points(std::span<const ImagePoint> image_points, double timestamp,
                               std::uint64_t sequence_number) {
        const Clock::time_point t0 = Clock::now();
        check_order(sequence_number);
        FrameResult result;
        result.diagnostics.sequence_number = sequence_number;
        std::vector<ImagePoint> points(image_points.begin(), image_points.end());
        const Clock::time_point t1 = Clock::now();
        run_after_detection(points, timestamp, sequence_number, t0, t1, result);
        return result;
    }

    std::vector<Track> active_tracks() const {
        std::vector<Track> out;
        for (const auto& s : slots_)
            if (s.used) out.push_back(s.track);
        return out;
    }

private:
    using Clock = std::chrono::steady_clock;

    struct Slot {
        bool used = false;
        Track track{};
    };

    static double ms_between(Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    }

    void check_order(std::uint64_t seq) {
        if (have_last_ && seq <= last_seq_)
            throw ConfigError("engine: frame out of order (seq " + std::to_string(seq) + ")");
    }

    void run_after_detection(std::vector<ImagePoint>& image_points, double timestamp,
                             std::uint64_t seq, Clock::time_point t0, Clock::time_point t1,
                             FrameResult& result) {
        auto& diag = result.diagnostics;

        // Find vehicles: map to the world plane, merge near-duplicates, assemble.
        PointSet ps;
        ps.points.reserve(image_points.size());
        for (const ImagePoint& q : image_points) {
            const WorldPoint w = cfg_.calibration.image_to_world(q);
            bool duplicate = false;
            for (const WorldPoint& existing : ps.points)
                if (distance(existing, w) < 1e-6) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) ps.points.push_back(w);
        }
        diag.point_count = static_cast<int>(ps.points.size());

        AssemblyOutcome outcome;
        try {
            outcome = assemble(ps, cfg_.geometry);
        } catch (const std::exception& e) {
            diag.errors.emplace_back(std::string("find_vehicles: ") + e.what());
        }
        diag.vehicle_count = static_cast<int>(outcome.vehicles.size());
        diag.disturbance_count = static_cast<int>(outcome.disturbance_points.size());
        diag.unmapped_count = static_cast<int>(outcome.unmapped_points.size());
        const Clock::time_point t2 = Clock::now();

        // Match vehicles: pose each detection, then nearest-neighbor with
        // plausibility gating against the stored tracks.
        std::vector<Detection> detections;
        detections.reserve(outcome.vehicles.size());
        for (const AssembledVehicle& v : outcome.vehicles) {
            std::vector<WorldPoint> pts;
            for (int i : v.indices()) pts.push_back(ps.points[i]);
            try {
                detections.push_back({v, estimate_pose(pts, cfg_.geometry), v.id_led >= 0});
            } catch (const std::exception& e) {
                diag.errors.emplace_back(std::string("pose: ") + e.what());
            }
        }

        const double dt = have_last_ ? std::max(timestamp - last_timestamp_, 1e-6) : 0.02;
        std::vector<Track> tracks;
        std::vector<int> slot_of_track;
        tracks.reserve(slots_.size());
        for (int s = 0; s < static_cast<int>(slots_.size()); ++s) {
            if (slots_[s].used) {
                tracks.push_back(slots_[s].track);
                slot_of_track.push_back(s);
            }
        }

        const IdConsistencyCheck id_check = [this](const Track& t, const Detection& d) {
            if (!t.resolved_vehicle_id) return true;
            IdState tentative = update_id_state(t.id_state, d.id_led_visible);
            const std::optional<int> re = classify(tentative, cfg_.id_table);
            return !re || *re == *t.resolved_vehicle_id;
        };
        AssociationResult assoc;
        try {
            assoc = associate(tracks, detections, dt, cfg_.limits, id_check);
        } catch (const std::exception& e) {
            diag.errors.emplace_back(std::string("match_vehicles: ") + e.what());
            for (int di = 0; di < static_cast<int>(detections.size()); ++di)
                assoc.unmatched_detections.push_back(di);
        }
        const Clock::time_point t3 = Clock::now();

        // Compute ID and pose for every track slot. Unused slots run the
        // same decode kernel on their retained state so the step's cost is
        // uniform across frame loads.
        std::vector<char> slot_updated(slots_.size(), 0);
        for (const auto& [ti, di] : assoc.matches) {
            Slot& slot = slots_[static_cast<std::size_t>(slot_of_track[ti])];
            const Detection& det = detections[di];
            Track& tr = slot.track;
            tr.id_state = update_id_state(tr.id_state, det.id_led_visible);
            tr.last_pose = det.pose;
            tr.last_frame = seq;
            tr.last_timestamp = timestamp;
            tr.missed_frames = 0;
            slot_updated[static_cast<std::size_t>(slot_of_track[ti])] = 1;
        }
        for (int di : assoc.unmatched_detections) {
            const int s = allocate_slot();
            if (s < 0) {
                diag.errors.emplace_back("tracking: track table full, detection dropped");
                continue;
            }
            Slot& slot = slots_[static_cast<std::size_t>(s)];
            slot.used = true;
            slot.track = Track{};
            slot.track.track_id = next_track_id_++;
            slot.track.last_pose = detections[di].pose;
            slot.track.last_frame = seq;
            slot.track.last_timestamp = timestamp;
            slot.track.id_state = update_id_state(IdState{}, detections[di].id_led_visible);
            slot_updated[static_cast<std::size_t>(s)] = 1;
        }
        for (int ti : assoc.unmatched_tracks) {
            Slot& slot = slots_[static_cast<std::size_t>(slot_of_track[ti])];
            slot.track.missed_frames += 1;
            slot.track.id_state.note_gap();
            if (slot.track.missed_frames >= cfg_.retire_after_missed) slot.used = false;
        }

        result.samples.reserve(slots_.size());
        int active = 0;
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            Slot& slot = slots_[s];
            // Uniform decode work for every slot, live or not. The probe
            // accumulator keeps the dead-slot decode observable so the
            // optimizer cannot drop it.
            const std::optional<int> id = classify(slot.track.id_state, cfg_.id_table);
            decode_probe_ += id ? 1 + *id : 0;
            if (!slot.used) continue;
            ++active;
            if (id) slot.track.resolved_vehicle_id = id;
            if (slot_updated[s]) {
                result.samples.push_back({slot.track.resolved_vehicle_id, slot.track.last_pose,
                                          seq, timestamp, slot.track.track_id});
            }
        }
        diag.active_tracks = active;
        const Clock::time_point t4 = Clock::now();

        result.latencies.find_points_ms = ms_between(t0, t1);
        result.latencies.find_vehicles_ms = ms_between(t1, t2);
        result.latencies.match_vehicles_ms = ms_between(t2, t3);
        result.latencies.compute_id_pose_ms = ms_between(t3, t4);
        result.latencies.total_ms = ms_between(t0, t4);
        diag.deadline_missed = result.latencies.total_ms > cfg_.deadline_ms;

        have_last_ = true;
        last_seq_ = seq;
        last_timestamp_ = timestamp;
    }

    int allocate_slot() {
        for (int s = 0; s < static_cast<int>(slots_.size()); ++s)
            if (!slots_[s].used) return s;
        return -1;
    }

    EngineConfig cfg_;
    std::vector<Slot> slots_;
    int next_track_id_ = 0;
    bool have_last_ = false;
    std::uint64_t last_seq_ = 0;
    double last_timestamp_ = 0.0;
    std::uint64_t decode_probe_ = 0;
};

}  // namespace ips

#endif  // IPS_PIPELINE_HPP
