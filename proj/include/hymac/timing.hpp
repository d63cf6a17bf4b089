#ifndef HYMAC_TIMING_HPP
#define HYMAC_TIMING_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "hymac/error.hpp"

namespace hymac {

/// Exact time quantity stored as integer nanoseconds.
///
/// Every protocol constant in the reference parameter table is a whole
/// number of nanoseconds, so sums such as the collision and success
/// periods are exact. Analytical code works in double microseconds via us().
class Duration {
 public:
  constexpr Duration() = default;

  static constexpr Duration from_ns(std::int64_t ns) { return Duration(ns); }
  static Duration from_us(double us) { return Duration(std::llround(us * 1e3)); }
  static Duration from_ms(double ms) { return Duration(std::llround(ms * 1e6)); }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double us() const { return static_cast<double>(ns_) / 1e3; }
  constexpr double ms() const { return static_cast<double>(ns_) / 1e6; }
  constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }

  constexpr Duration operator+(Duration o) const { return Duration(ns_ + o.ns_); }
  constexpr Duration operator-(Duration o) const { return Duration(ns_ - o.ns_); }
  constexpr Duration operator*(std::int64_t k) const { return Duration(ns_ * k); }
  constexpr Duration& operator+=(Duration o) {
    ns_ += o.ns_;
    return *this;
  }
  constexpr auto operator<=>(const Duration&) const = default;

 private:
  constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

/// Protocol timing and radio power constants.
struct TimingConstants {
  Duration t_frame = Duration::from_ms(1000);
  Duration t_r = Duration::from_ms(2);
  Duration t_req = Duration::from_us(22.2);
  Duration t_nof = Duration::from_us(10);
  Duration t_anc = Duration::from_us(10);
  Duration t_ack = Duration::from_us(7.5);
  Duration sifs = Duration::from_us(2.5);
  Duration bifs = Duration::from_us(7.5);
  // Not part of the published table; see README.
  Duration delta_idle = Duration::from_us(10);
  double p_tx = 1.5;    // W
  double p_rx = 1.0;    // W
  double p_idle = 0.5;  // W

  bool operator==(const TimingConstants&) const = default;

  /// Throws InvalidArgument when a constant is non-positive or the frame
  /// cannot hold one slot or one request/ACK exchange.
  void validate() const {
    const Duration* durations[] = {&t_frame, &t_r,  &t_req, &t_nof, &t_anc,
                                   &t_ack,   &sifs, &bifs,  &delta_idle};
    for (const Duration* d : durations) {
      if (d->ns() <= 0) throw InvalidArgument("timing: durations must be strictly positive");
    }
    if (!(p_tx > 0.0) || !(p_rx > 0.0) || !(p_idle > 0.0)) {
      throw InvalidArgument("timing: powers must be strictly positive");
    }
    if (t_r >= t_frame) throw InvalidArgument("timing: t_r must be shorter than t_frame");
    if (t_req + sifs + t_ack + bifs >= t_frame) {
      throw InvalidArgument("timing: request/ACK exchange does not fit in a frame");
    }
  }
};

/// Reference constants (frame 1000 ms, slot 2 ms, ...), delta_idle = 10 us.
inline TimingConstants reference_timing() { return TimingConstants{}; }

struct SlotDurations {
  Duration idle;
  Duration collision;
  Duration success;
};

/// Lengths of the three contention-slot kinds.
/// collision = t_req + bifs, success = t_req + sifs + t_ack + bifs.
inline SlotDurations slot_durations(const TimingConstants& tc) {
  return SlotDurations{
      tc.delta_idle,
      tc.t_req + tc.bifs,
      tc.t_req + tc.sifs + tc.t_ack + tc.bifs,
  };
}

/// Priority classes and traffic. Index 0 of class_sizes is class q = 1,
/// the lowest priority.
struct ClassConfig {
  std::vector<int> class_sizes{1200};
  double p_inl = 0.1;
  double alpha = 1.0;
  // Escalation step for failed frames. Negative means "same as alpha".
  double alpha_escalation = -1.0;
  double lambda = 1.0;  // packets per second per device

  bool operator==(const ClassConfig&) const = default;

  int q_count() const { return static_cast<int>(class_sizes.size()); }
  int device_count() const { return std::accumulate(class_sizes.begin(), class_sizes.end(), 0); }
  double escalation() const { return alpha_escalation < 0.0 ? alpha : alpha_escalation; }

  void validate() const {
    if (class_sizes.empty()) throw InvalidArgument("classes: at least one class required");
    for (int k : class_sizes) {
      if (k < 0) throw InvalidArgument("classes: class sizes must be non-negative");
    }
    if (device_count() <= 0) throw InvalidArgument("classes: no devices");
    if (!(p_inl > 0.0 && p_inl <= 1.0)) throw InvalidArgument("classes: p_inl must lie in (0, 1]");
    if (!(alpha > 0.0)) throw InvalidArgument("classes: alpha must be positive");
    if (alpha_escalation >= 0.0 && !(alpha_escalation > 0.0)) {
      throw InvalidArgument("classes: alpha_escalation must be positive");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw InvalidArgument("arrival: lambda must be finite and non-negative");
    }
  }
};

/// Three-class layout used for the heterogeneous experiments:
/// class 1 holds K - 20 devices, classes 2 and 3 hold 10 each.
inline ClassConfig heterogeneous_classes(int k, double lambda, double alpha, double p_inl) {
  ClassConfig c;
  c.class_sizes = {k - 20, 10, 10};
  c.lambda = lambda;
  c.alpha = alpha;
  c.p_inl = p_inl;
  return c;
}

inline ClassConfig homogeneous_classes(int k, double lambda, double alpha, double p_inl) {
  ClassConfig c;
  c.class_sizes = {k};
  c.lambda = lambda;
  c.alpha = alpha;
  c.p_inl = p_inl;
  return c;
}

}  // namespace hymac

#endif  // HYMAC_TIMING_HPP
