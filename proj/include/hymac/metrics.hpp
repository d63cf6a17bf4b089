#ifndef HYMAC_METRICS_HPP
#define HYMAC_METRICS_HPP

#include <cstdint>
#include <ios>
#include <ostream>
#include <string>

#include "hymac/error.hpp"
#include "hymac/report.hpp"
#include "hymac/timing.hpp"

namespace hymac {

inline constexpr int kCsvSchemaVersion = 1;

/// Fraction of the frame carrying data: M T_r / T_frame.
inline double frame_utility(const FrameTrace& f, const TimingConstants& tc) {
  return static_cast<double>(f.winners) * tc.t_r.us() / tc.t_frame.us();
}

inline double channel_utility_of(const SimReport& r, const TimingConstants& tc) {
  if (r.frames.empty()) return 0.0;
  double s = 0.0;
  for (const auto& f : r.frames) s += frame_utility(f, tc);
  return s / static_cast<double>(r.frames.size());
}

namespace detail {

inline const DeviceStats& device_of(const SimReport& r, int id) {
  if (id < 1 || id > static_cast<int>(r.device_stats.size())) {
    throw InvalidArgument("metrics: device id out of range");
  }
  return r.device_stats[id - 1];
}

inline double ratio(std::int64_t num, std::int64_t den, const char* what) {
  if (den == 0) throw UndefinedRatio(std::string("metrics: ") + what + " has an empty denominator");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

/// Dropped over generated packets, pooled over all devices.
inline double drop_ratio(const SimReport& r) {
  std::int64_t dropped = 0;
  std::int64_t generated = 0;
  for (const auto& d : r.device_stats) {
    dropped += d.dropped;
    generated += d.generated;
  }
  return detail::ratio(dropped, generated, "drop ratio");
}

inline double drop_ratio(const SimReport& r, int device) {
  const auto& d = detail::device_of(r, device);
  return detail::ratio(d.dropped, d.generated, "drop ratio");
}

/// Mean of k2 - k1 in frames over delivered packets, pooled.
inline double avg_delay(const SimReport& r) {
  std::int64_t sum = 0;
  std::int64_t w = 0;
  for (const auto& d : r.device_stats) {
    sum += d.delay_frames_sum;
    w += d.delivered;
  }
  return detail::ratio(sum, w, "delay");
}

inline double avg_delay(const SimReport& r, int device) {
  const auto& d = detail::device_of(r, device);
  return detail::ratio(d.delay_frames_sum, d.delivered, "delay");
}

/// Mean of the per-device drop ratios of class q, over devices that
/// generated at least one packet.
inline double class_mean_drop_ratio(const SimReport& r, int q) {
  double s = 0.0;
  int n = 0;
  for (const auto& d : r.device_stats) {
    if (d.q != q || d.generated == 0) continue;
    s += static_cast<double>(d.dropped) / static_cast<double>(d.generated);
    ++n;
  }
  if (n == 0) throw UndefinedRatio("metrics: class has no generated packets");
  return s / n;
}

/// Mean of the per-device delays of class q, over devices with W > 0.
inline double class_mean_delay(const SimReport& r, int q) {
  double s = 0.0;
  int n = 0;
  for (const auto& d : r.device_stats) {
    if (d.q != q || d.delivered == 0) continue;
    s += static_cast<double>(d.delay_frames_sum) / static_cast<double>(d.delivered);
    ++n;
  }
  if (n == 0) throw UndefinedRatio("metrics: class has no delivered packets");
  return s / n;
}

namespace detail {

inline void check_trace(const FrameTrace& f, int devices, Variant v) {
  if (f.active < 0 || f.winners < 0 || f.active > devices) throw TraceError("trace: device counts out of range");
  if (v != Variant::tdma && f.winners > f.active) throw TraceError("trace: more winners than active devices");
  if (f.cop.total_ns() != f.t_cop_ns) throw TraceError("trace: contention ledger does not sum to T_COP");
  if (v == Variant::hybrid && f.cop.successes != f.winners) {
    throw TraceError("trace: successes and winners disagree");
  }
  if (f.cop.transmit_device_ns < 0.0 || f.cop.listen_device_ns < 0.0 || f.data_listen_device_ns < 0.0) {
    throw TraceError("trace: negative device time");
  }
  if (f.cop.idle_before_collision_ns + f.cop.idle_before_success_ns > f.cop.idle_ns) {
    throw TraceError("trace: idle split exceeds idle time");
  }
  if (!f.events.empty()) {
    std::int64_t sum = 0;
    for (const auto& e : f.events) {
      // The contention-only baseline interleaves data slots, so only the
      // hybrid contention period is contiguous from zero.
      if (v == Variant::hybrid && e.start_ns != sum) throw TraceError("trace: events are not contiguous");
      sum += e.duration_ns;
    }
    if (sum != f.t_cop_ns) throw TraceError("trace: events do not sum to T_COP");
  }
}

constexpr double kNsToS = 1e-9;

}  // namespace detail

/// Per-frame energy in joules from a frame trace.
///
/// hybrid: E_NP = K P_r T_NOF, E_AP = L P_r T_ANC, E_s = M P_t T_r,
/// E_in = (L - M) M P_i T_r. E_COP is either the device-time ledger
/// (physical) or the channel times of the contention period at the printed
/// powers (literal). The contention-only baseline has no NP/AP and
/// charges listeners at P_i during data; the slotted baseline only pays E_s.
inline EnergyBreakdown energy_per_frame(const FrameTrace& f, const TimingConstants& tc, int devices,
                                        Variant variant, EnergyMode mode = EnergyMode::physical) {
  detail::check_trace(f, devices, variant);
  EnergyBreakdown e;
  const double m = f.winners;
  const double l = f.active;
  const double t_r = tc.t_r.seconds();
  e.e_s = m * tc.p_tx * t_r;
  if (variant != Variant::tdma) {
    if (mode == EnergyMode::physical) {
      e.e_cop = (tc.p_tx * f.cop.transmit_device_ns + tc.p_idle * f.cop.listen_device_ns) * detail::kNsToS;
    } else {
      const double at_idle = static_cast<double>(f.cop.idle_before_collision_ns);
      const double at_tx = static_cast<double>(f.cop.collision_ns + f.cop.idle_before_success_ns + f.cop.success_ns);
      e.e_cop = (tc.p_idle * at_idle + tc.p_tx * at_tx) * detail::kNsToS;
    }
  }
  if (variant == Variant::hybrid) {
    e.e_np = static_cast<double>(devices) * tc.p_rx * tc.t_nof.seconds();
    e.e_ap = l * tc.p_rx * tc.t_anc.seconds();
    e.e_in = (l - m) * m * tc.p_idle * t_r;
  } else if (variant == Variant::csma) {
    e.e_in = tc.p_idle * f.data_listen_device_ns * detail::kNsToS;
  }
  e.e_top = e.e_s + e.e_in;
  e.e_frame = e.e_np + e.e_cop + e.e_ap + e.e_top;
  return e;
}

/// Frame-averaged energy breakdown of a report.
inline EnergyBreakdown mean_energy(const SimReport& r) {
  EnergyBreakdown s;
  if (r.frames.empty()) return s;
  for (const auto& f : r.frames) {
    s.e_np += f.energy.e_np;
    s.e_cop += f.energy.e_cop;
    s.e_ap += f.energy.e_ap;
    s.e_s += f.energy.e_s;
    s.e_in += f.energy.e_in;
    s.e_top += f.energy.e_top;
    s.e_frame += f.energy.e_frame;
  }
  const double n = static_cast<double>(r.frames.size());
  s.e_np /= n;
  s.e_cop /= n;
  s.e_ap /= n;
  s.e_s /= n;
  s.e_in /= n;
  s.e_top /= n;
  s.e_frame /= n;
  return s;
}

// CSV output. The first line of every file is "# schema_version=N".

inline void write_schema_line(std::ostream& os) { os << "# schema_version=" << kCsvSchemaVersion << '\n'; }

inline void write_frame_csv(std::ostream& os, const SimReport& r, const TimingConstants& tc) {
  const auto flags = os.flags();
  const auto prec = os.precision(12);
  write_schema_line(os);
  os << "frame,M,T_COP_us,utility,e_np_J,e_cop_J,e_ap_J,e_top_J,e_frame_J\n";
  for (const auto& f : r.frames) {
    os << f.frame << ',' << f.winners << ',' << static_cast<double>(f.t_cop_ns) / 1e3 << ','
       << frame_utility(f, tc) << ',' << f.energy.e_np << ',' << f.energy.e_cop << ',' << f.energy.e_ap << ','
       << f.energy.e_top << ',' << f.energy.e_frame << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

/// Per-device table; `limit` > 0 keeps the first `limit` devices. Undefined
/// ratios are written as empty fields.
inline void write_device_csv(std::ostream& os, const SimReport& r, int limit = 0) {
  const auto flags = os.flags();
  const auto prec = os.precision(12);
  write_schema_line(os);
  os << "device,class,generated,dropped,drop_ratio,W,avg_delay_frames\n";
  int written = 0;
  for (const auto& d : r.device_stats) {
    if (limit > 0 && written == limit) break;
    os << d.id << ',' << d.q << ',' << d.generated << ',' << d.dropped << ',';
    if (d.generated > 0) os << static_cast<double>(d.dropped) / static_cast<double>(d.generated);
    os << ',' << d.delivered << ',';
    if (d.delivered > 0) os << static_cast<double>(d.delay_frames_sum) / static_cast<double>(d.delivered);
    os << '\n';
    ++written;
  }
  os.flags(flags);
  os.precision(prec);
}

/// Contention events as delimited text: frame,event,start_us,duration_us,transmitters,device.
inline void write_trace_csv(std::ostream& os, const SimReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision(12);
  write_schema_line(os);
  os << "frame,event,start_us,duration_us,transmitters,device\n";
  for (const auto& f : r.frames) {
    for (const auto& e : f.events) {
      os << f.frame << ',' << to_string(e.kind) << ',' << static_cast<double>(e.start_ns) / 1e3 << ','
         << static_cast<double>(e.duration_ns) / 1e3 << ',' << e.transmitters << ',';
      if (e.device > 0) os << e.device;
      os << '\n';
    }
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace hymac

#endif  // HYMAC_METRICS_HPP
