#ifndef IPS_POSE_BUS_HPP
#define IPS_POSE_BUS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "ips/geometry.hpp"

namespace ips {

/// Fixed 30-byte pose record broadcast to the vehicles. All multi-byte
/// fields are big-endian:
///   magic 0x49 0x50 | version 1 | vehicle_id u8 | frame sequence u32 |
///   timestamp us u64 | x um i32 | y um i32 | yaw urad i32 | CRC-16 u16
/// Positions quantize to micrometers and yaw to microradians; that is the
/// only precision lost relative to the engine's samples.
struct PoseMessage {
    std::uint8_t vehicle_id{};
    std::uint32_t frame_sequence{};
    std::uint64_t timestamp_us{};
    std::int32_t x_um{};
    std::int32_t y_um{};
    std::int32_t yaw_urad{};

    friend bool operator==(const PoseMessage&, const PoseMessage&) = default;
};

inline constexpr std::size_t kPoseMessageSize = 30;
inline constexpr std::uint8_t kMagic0 = 0x49;
inline constexpr std::uint8_t kMagic1 = 0x50;
inline constexpr std::uint8_t kWireVersion = 1;

/// CRC-16/CCITT-FALSE: polynomial 0x1021, initial value 0xFFFF, no
/// reflection, no final xor. Check value: crc("123456789") == 0x29B1.
inline std::uint16_t crc16_ccitt(std::span<const std::uint8_t> data) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        crc ^= static_cast<std::uint16_t>(byte) << 8;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

namespace wire_detail {

template <typename T>
inline void put_be(std::uint8_t* out, T value) {
    for (int i = static_cast<int>(sizeof(T)) - 1; i >= 0; --i) {
        out[i] = static_cast<std::uint8_t>(value & 0xFF);
        value = static_cast<T>(value >> 8);
    }
}

template <typename T>
inline T get_be(const std::uint8_t* in) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        value = static_cast<T>((value << 8) | in[i]);
    return value;
}

}  // namespace wire_detail

inline std::array<std::uint8_t, kPoseMessageSize> encode(const PoseMessage& m) {
    std::array<std::uint8_t, kPoseMessageSize> buf{};
    buf[0] = kMagic0;
    buf[1] = kMagic1;
    buf[2] = kWireVersion;
    buf[3] = m.vehicle_id;
    wire_detail::put_be<std::uint32_t>(buf.data() + 4, m.frame_sequence);
    wire_detail::put_be<std::uint64_t>(buf.data() + 8, m.timestamp_us);
    wire_detail::put_be<std::uint32_t>(buf.data() + 16, static_cast<std::uint32_t>(m.x_um));
    wire_detail::put_be<std::uint32_t>(buf.data() + 20, static_cast<std::uint32_t>(m.y_um));
    wire_detail::put_be<std::uint32_t>(buf.data() + 24, static_cast<std::uint32_t>(m.yaw_urad));
    wire_detail::put_be<std::uint16_t>(buf.data() + 28,
                                       crc16_ccitt({buf.data(), kPoseMessageSize - 2}));
    return buf;
}

enum class DecodeStatus { ok, bad_length, bad_magic, bad_version, bad_checksum };

inline DecodeStatus decode(std::span<const std::uint8_t> buf, PoseMessage& out) {
    if (buf.size() != kPoseMessageSize) return DecodeStatus::bad_length;
    if (buf[0] != kMagic0 || buf[1] != kMagic1) return DecodeStatus::bad_magic;
    if (buf[2] != kWireVersion) return DecodeStatus::bad_version;
    const std::uint16_t expected = crc16_ccitt(buf.subspan(0, kPoseMessageSize - 2));
    if (wire_detail::get_be<std::uint16_t>(buf.data() + 28) != expected)
        return DecodeStatus::bad_checksum;
    out.vehicle_id = buf[3];
    out.frame_sequence = wire_detail::get_be<std::uint32_t>(buf.data() + 4);
    out.timestamp_us = wire_detail::get_be<std::uint64_t>(buf.data() + 8);
    out.x_um = static_cast<std::int32_t>(wire_detail::get_be<std::uint32_t>(buf.data() + 16));
    out.y_um = static_cast<std::int32_t>(wire_detail::get_be<std::uint32_t>(buf.data() + 20));
    out.yaw_urad = static_cast<std::int32_t>(wire_detail::get_be<std::uint32_t>(buf.data() + 24));
    return DecodeStatus::ok;
}

/// Builds a wire message from engine output values (SI units).
inline PoseMessage make_message(int vehicle_id, std::uint64_t frame_sequence, double timestamp_s,
                                double x_m, double y_m, double yaw_rad) {
    PoseMessage m;
    m.vehicle_id = static_cast<std::uint8_t>(vehicle_id);
    m.frame_sequence = static_cast<std::uint32_t>(frame_sequence);
    m.timestamp_us = static_cast<std::uint64_t>(std::llround(timestamp_s * 1e6));
    m.x_um = static_cast<std::int32_t>(std::llround(x_m * 1e6));
    m.y_um = static_cast<std::int32_t>(std::llround(y_m * 1e6));
    m.yaw_urad = static_cast<std::int32_t>(std::llround(yaw_rad * 1e6));
    return m;
}

/// Vehicle-side watchdog. stopped exactly when the time since the last
/// valid update first exceeds the timeout; any valid message re-arms it.
struct WatchdogState {
    double last_update{};
    enum class Status { active, stopped } status{Status::active};
};

inline WatchdogState watchdog_tick(WatchdogState w, double now, double timeout = 0.1) {
    w.status = (now - w.last_update > timeout) ? WatchdogState::Status::stopped
                                               : WatchdogState::Status::active;
    return w;
}

inline WatchdogState watchdog_message(WatchdogState w, double now) {
    w.last_update = now;
    w.status = WatchdogState::Status::active;
    return w;
}

/// In-process datagram fan-out: one loss-tolerant channel per vehicle id.
/// Stands in for the lab transport so the protocol and watchdog behavior
/// are testable under a simulated clock.
class PoseBus {
public:
    using Datagram = std::array<std::uint8_t, kPoseMessageSize>;

    void publish(const PoseMessage& m) { channels_[m.vehicle_id].push_back(encode(m)); }

    /// Drains and returns the pending datagrams for one vehicle.
    std::vector<Datagram> drain(std::uint8_t vehicle_id) {
        auto it = channels_.find(vehicle_id);
        std::vector<Datagram> out;
        if (it == channels_.end()) return out;
        out.assign(it->second.begin(), it->second.end());
        it->second.clear();
        return out;
    }

private:
    std::map<std::uint8_t, std::deque<Datagram>> channels_;
};

/// Consumer side of one vehicle: decodes its channel and runs the watchdog.
class VehicleClient {
public:
    VehicleClient(std::uint8_t vehicle_id, double start_time, double timeout = 0.1)
        : id_(vehicle_id), timeout_(timeout) {
        watchdog_.last_update = start_time;
    }

    /// Processes pending datagrams at simulated time `now`, then ticks.
    void poll(PoseBus& bus, double now) {
        for (const auto& dgram : bus.drain(id_)) {
            PoseMessage m;
            if (decode(dgram, m) == DecodeStatus::ok) {
                watchdog_ = watchdog_message(watchdog_, now);
                last_message_ = m;
            }
        }
        watchdog_ = watchdog_tick(watchdog_, now, timeout_);
    }

    bool stopped() const { return watchdog_.status == WatchdogState::Status::stopped; }
    const PoseMessage& last_message() const { return last_message_; }

private:
    std::uint8_t id_;
    double timeout_;
    WatchdogState watchdog_{};
    PoseMessage last_message_{};
};

}  // namespace ips

#endif  // IPS_POSE_BUS_HPP
