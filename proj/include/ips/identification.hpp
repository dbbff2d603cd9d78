#ifndef IPS_IDENTIFICATION_HPP
#define IPS_IDENTIFICATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ips/errors.hpp"

namespace ips {

/// Streaming on/off run-length state of one vehicle's identification LED.
/// Only the current run and a bounded history of completed on-runs are kept;
/// past frames are never re-examined. A run enters the history only when
/// both of its switch transitions were observed: the run in progress when
/// observation starts (or resumes after a gap) has an unknown true length
/// and would poison the classifier.
struct IdState {
    static constexpr int kHistoryCapacity = 8;

    bool has_current_run = false;
    bool current_run_is_on = false;
    bool current_run_start_seen = false;
    int current_run_length = 0;
    std::array<std::int16_t, kHistoryCapacity> completed_on_runs{};
    int completed_count = 0;  // fully observed on-runs ever; history keeps the last 8
    std::int64_t frames_observed = 0;

    void push_on_run(int length) {
        if (completed_count < kHistoryCapacity) {
            completed_on_runs[completed_count] = static_cast<std::int16_t>(length);
        } else {
            for (int i = 1; i < kHistoryCapacity; ++i) completed_on_runs[i - 1] = completed_on_runs[i];
            completed_on_runs[kHistoryCapacity - 1] = static_cast<std::int16_t>(length);
        }
        ++completed_count;
    }

    int history_size() const { return std::min(completed_count, kHistoryCapacity); }

    /// The vehicle was not seen this frame: the current run length is no
    /// longer trustworthy, so it is discarded without entering the history.
    void note_gap() {
        has_current_run = false;
        current_run_length = 0;
    }
};

/// Extends the current run or closes it and starts the opposite one. Fully
/// observed on-runs enter the bounded history.
inline IdState update_id_state(IdState state, bool led_visible_on) {
    if (!state.has_current_run) {
        state.has_current_run = true;
        state.current_run_is_on = led_visible_on;
        state.current_run_start_seen = false;  // already mid-run when observation began
        state.current_run_length = 1;
    } else if (led_visible_on == state.current_run_is_on) {
        ++state.current_run_length;
    } else {
        if (state.current_run_is_on && state.current_run_start_seen)
            state.push_on_run(state.current_run_length);
        state.current_run_is_on = led_visible_on;
        state.current_run_start_seen = true;
        state.current_run_length = 1;
    }
    ++state.frames_observed;
    return state;
}

/// Frequency table mapping on-run lengths to vehicle IDs. Entry k uses
/// n = 2 + 3k frames per on-period; skipping two of every three lengths
/// keeps the acceptance intervals disjoint even when sampling lands on a
/// switch and a run comes out one frame long or short.
struct IdTable {
    struct Entry {
        int vehicle_id;
        int frames_on;     // n
        double f_led;      // f_camera / n
        double f_low;      // f_camera / (n + 1)
        double f_high;     // f_camera / (n - 1)
    };
    double f_camera{};
    std::vector<Entry> entries;
};

inline IdTable build_id_table(double f_camera, int count) {
    if (!(f_camera > 0.0)) throw ConfigError("build_id_table: camera frequency must be > 0");
    if (count < 0) throw ConfigError("build_id_table: count must be >= 0");
    IdTable table;
    table.f_camera = f_camera;
    table.entries.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int n = 2 + 3 * k;
        table.entries.push_back({k, n, f_camera / n, f_camera / (n + 1), f_camera / (n - 1)});
    }
    // Disjoint by construction; keep the guard anyway.
    for (std::size_t i = 1; i < table.entries.size(); ++i) {
        if (table.entries[i].f_high >= table.entries[i - 1].f_low)
            throw ConfigError("build_id_table: acceptance intervals overlap");
    }
    return table;
}

/// Classifies the observed on-run history against the table. Needs at least
/// two completed on-runs; the representative run length is the rounded
/// median of the history, so one elongated or shortened run from switch
/// sampling cannot flip the result. Returns nullopt while initiating or when
/// the observed frequency falls outside every interval.
///
/// The decode always walks the full fixed-size history buffer and the full
/// table, so its cost is the same for every track slot regardless of fill
/// level; the per-frame decode pass stays flat under changing vehicle counts.
inline std::optional<int> classify(const IdState& state, const IdTable& table) {
    std::array<std::int16_t, IdState::kHistoryCapacity> runs = state.completed_on_runs;
    const int hist = state.history_size();
    std::sort(runs.begin(), runs.end());  // unfilled entries are zero and sort first
    const int base = IdState::kHistoryCapacity - hist;
    double median = 0.0;
    if (hist > 0) {
        median = (hist % 2 == 1)
                     ? runs[base + hist / 2]
                     : 0.5 * (runs[base + hist / 2 - 1] + runs[base + hist / 2]);
    }
    const auto r = static_cast<double>(std::llround(median));
    const double f = r >= 1.0 ? table.f_camera / r : -1.0;
    int found = -1;
    for (const auto& e : table.entries)
        if (found < 0 && f >= e.f_low && f <= e.f_high) found = e.vehicle_id;
    if (hist < 2 || found < 0) return std::nullopt;
    return found;
}

}  // namespace ips

#endif  // IPS_IDENTIFICATION_HPP
