#ifndef HYMAC_REPORT_HPP
#define HYMAC_REPORT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hymac/error.hpp"

namespace hymac {

enum class Variant { hybrid, csma, tdma };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::hybrid: return "hybrid";
    case Variant::csma: return "csma";
    case Variant::tdma: return "tdma";
  }
  return "hybrid";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "hybrid") return Variant::hybrid;
  if (s == "csma") return Variant::csma;
  if (s == "tdma") return Variant::tdma;
  throw ConfigError("unknown protocol variant '" + std::string(s) + "'");
}

/// Energies of one frame in joules. e_top = e_s + e_in and
/// e_frame = e_np + e_cop + e_ap + e_top.
struct EnergyBreakdown {
  double e_np = 0.0;
  double e_cop = 0.0;
  double e_ap = 0.0;
  double e_s = 0.0;
  double e_in = 0.0;
  double e_top = 0.0;
  double e_frame = 0.0;
};

enum class EnergyMode {
  physical,       // idle listening at idle power, transmissions at transmit power
  literal,  // per-success-interval channel times at the printed powers
};

enum class CopEventKind { idle, collision, success };

inline std::string_view to_string(CopEventKind k) {
  switch (k) {
    case CopEventKind::idle: return "idle";
    case CopEventKind::collision: return "collision";
    case CopEventKind::success: return "success";
  }
  return "idle";
}

/// One contention-period event. An idle event covers a run of consecutive
/// idle slots.
struct CopEvent {
  CopEventKind kind = CopEventKind::idle;
  std::int64_t start_ns = 0;     // from the start of the contention period
  std::int64_t duration_ns = 0;
  int transmitters = 0;
  int device = 0;                // winner (1-based) for success events, else 0
};

/// Channel and radio time sums of one contention period.
struct CopLedger {
  std::int64_t idle_ns = 0;
  std::int64_t collision_ns = 0;
  std::int64_t success_ns = 0;
  std::int64_t idle_slots = 0;
  std::int64_t collisions = 0;
  std::int64_t successes = 0;
  // Device-time products: sum over events of (devices in mode) * duration.
  double transmit_device_ns = 0.0;
  double listen_device_ns = 0.0;
  // Idle time split by the kind of the busy slot that follows it.
  std::int64_t idle_before_collision_ns = 0;
  std::int64_t idle_before_success_ns = 0;

  std::int64_t total_ns() const { return idle_ns + collision_ns + success_ns; }
};

struct FrameTrace {
  int frame = 0;
  int active = 0;   // L: devices holding a packet at the start of the frame
  int winners = 0;  // M: data slots used
  std::int64_t t_cop_ns = 0;
  CopLedger cop;
  std::vector<CopEvent> events;       // filled only when tracing is on
  std::vector<int> winner_devices;    // 1-based, in slot order
  // Listening device-time during data slots (contention-only baseline).
  double data_listen_device_ns = 0.0;
  EnergyBreakdown energy;
};

struct DeviceStats {
  int id = 0;  // 1-based
  int q = 1;
  std::int64_t generated = 0;
  std::int64_t dropped = 0;
  std::int64_t delivered = 0;
  std::int64_t delay_frames_sum = 0;
  bool buffered = false;
  int d = 0;  // failure count at the end of the run
};

struct SimReport {
  Variant variant = Variant::hybrid;
  std::uint64_t seed = 0;
  int devices = 0;
  std::vector<FrameTrace> frames;
  std::vector<DeviceStats> device_stats;
};

}  // namespace hymac

#endif  // HYMAC_REPORT_HPP
