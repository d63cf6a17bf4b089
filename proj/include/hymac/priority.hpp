#ifndef HYMAC_PRIORITY_HPP
#define HYMAC_PRIORITY_HPP

#include <algorithm>
#include <cmath>

#include "hymac/error.hpp"

namespace hymac {

/// Position of a device in the priority ladder: its class q (1-based,
/// q = 1 lowest) and the number d of consecutive frames it lost.
struct ContentionIdentity {
  int q = 1;
  int d = 0;

  bool operator==(const ContentionIdentity&) const = default;

  /// Virtual class rho = q + d - 1. Devices sharing rho share a probability.
  constexpr int virtual_class() const { return q + d - 1; }
};

namespace detail {

inline void check_priority_args(int q, int d, double p_inl) {
  if (q < 1) throw InvalidArgument("priority: class index must be >= 1");
  if (d < 0) throw InvalidArgument("priority: failure count must be >= 0");
  if (!(p_inl > 0.0 && p_inl <= 1.0)) throw InvalidArgument("priority: p_inl must lie in (0, 1]");
}

}  // namespace detail

/// Contending probability min{1, (1+alpha)^(q-1) (1+alpha_esc)^d p_inl}.
///
/// The class step and the escalation step are separate knobs; with
/// alpha_escalation == alpha the result depends on (q, d) only through the
/// virtual class q + d - 1.
inline double contending_probability(int q, int d, double alpha, double alpha_escalation,
                                     double p_inl) {
  detail::check_priority_args(q, d, p_inl);
  if (!(alpha > 0.0) || !(alpha_escalation > 0.0)) {
    throw InvalidArgument("priority: alpha must be positive");
  }
  if (alpha == alpha_escalation) {
    return std::min(1.0, std::pow(1.0 + alpha, q + d - 1) * p_inl);
  }
  const double preliminary = std::min(1.0, std::pow(1.0 + alpha, q - 1) * p_inl);
  return std::min(1.0, std::pow(1.0 + alpha_escalation, d) * preliminary);
}

inline double contending_probability(int q, int d, double alpha, double p_inl) {
  return contending_probability(q, d, alpha, alpha, p_inl);
}

inline double contending_probability(const ContentionIdentity& id, double alpha, double p_inl) {
  return contending_probability(id.q, id.d, alpha, p_inl);
}

/// A successful transmission drops the device back to its class level.
constexpr ContentionIdentity reset_after_success(ContentionIdentity id) {
  id.d = 0;
  return id;
}

/// One more lost frame.
constexpr ContentionIdentity escalate_after_failure(ContentionIdentity id) {
  ++id.d;
  return id;
}

}  // namespace hymac

#endif  // HYMAC_PRIORITY_HPP
