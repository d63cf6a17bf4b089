#ifndef HYMAC_ANALYTICS_HPP
#define HYMAC_ANALYTICS_HPP

// Closed-form model of one contention-only period (COP).
//
// Every active device in virtual class rho transmits a request in each
// contention slot with probability p_rho. A slot with no transmitter is
// idle, with one is a success, with two or more a collision. The number of
// collisions before a success is geometric, which gives the expected time
// per successful contention and, by linearity, the expected COP length for
// M winners.
//
// Products of many (1 - p) factors underflow for populations in the
// thousands, so every probability is assembled in log space.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hymac/error.hpp"
#include "hymac/timing.hpp"

namespace hymac {

struct MixtureEntry {
  double p = 0.0;        // contending probability in (0, 1]
  std::int64_t n = 0;    // devices using it

  bool operator==(const MixtureEntry&) const = default;
};

/// Occupied virtual classes of one frame: (p, count) pairs.
class ContentionMixture {
 public:
  ContentionMixture() = default;

  explicit ContentionMixture(std::vector<MixtureEntry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (!(e.p > 0.0 && e.p <= 1.0)) throw InvalidArgument("mixture: probabilities must lie in (0, 1]");
      if (e.n < 0) throw InvalidArgument("mixture: counts must be non-negative");
    }
  }

  static ContentionMixture single(double p, std::int64_t n) { return ContentionMixture({{p, n}}); }

  std::span<const MixtureEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& e : entries_) t += e.n;
    return t;
  }

 private:
  std::vector<MixtureEntry> entries_;
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// n * log(1 - p), with 0 * log(0) taken as 0.
inline double log_pow_one_minus(double p, std::int64_t n) {
  if (n == 0) return 0.0;
  if (p >= 1.0) return kNegInf;
  return static_cast<double>(n) * std::log1p(-p);
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

struct ContentionLogs {
  double log_p0 = 0.0;        // log P(no transmitter)
  double log_p1 = kNegInf;    // log P(exactly one transmitter)
  double log_busy = kNegInf;  // log P(at least one transmitter)
  std::vector<double> log_single;  // per entry: log P(lone transmitter is from it)
};

inline ContentionLogs contention_logs(const ContentionMixture& mix) {
  ContentionLogs out;
  const auto entries = mix.entries();
  out.log_single.assign(entries.size(), kNegInf);
  for (const auto& e : entries) out.log_p0 += log_pow_one_minus(e.p, e.n);

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.n == 0) continue;
    double t = std::log(static_cast<double>(e.n)) + std::log(e.p) + log_pow_one_minus(e.p, e.n - 1);
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j != i) t += log_pow_one_minus(entries[j].p, entries[j].n);
    }
    out.log_single[i] = t;
  }
  out.log_p1 = log_sum_exp(out.log_single);
  if (out.log_p0 < 0.0) out.log_busy = std::log(-std::expm1(out.log_p0));
  return out;
}

inline ContentionLogs busy_logs(const ContentionMixture& mix) {
  auto logs = contention_logs(mix);
  if (logs.log_busy == kNegInf) {
    throw DegenerateMixture("mixture: no device can transmit");
  }
  return logs;
}

}  // namespace detail

/// P(no device transmits in a slot) = prod (1 - p)^n.
inline double prob_no_transmission(const ContentionMixture& mix) {
  return std::exp(detail::contention_logs(mix).log_p0);
}

/// P(exactly one transmitter) unconditioned.
inline double prob_single_transmission(const ContentionMixture& mix) {
  return std::exp(detail::contention_logs(mix).log_p1);
}

/// P(exactly one transmitter | at least one).
inline double prob_success_given_busy(const ContentionMixture& mix) {
  const auto logs = detail::busy_logs(mix);
  return std::min(1.0, std::exp(logs.log_p1 - logs.log_busy));
}

inline double prob_collision_given_busy(const ContentionMixture& mix) {
  return 1.0 - prob_success_given_busy(mix);
}

/// Mean number of collisions preceding a success: 1 / P_success - 1.
inline double expected_collisions(const ContentionMixture& mix) {
  const auto logs = detail::busy_logs(mix);
  if (logs.log_p1 == detail::kNegInf) {
    throw DivergentExpectation("mixture: a lone transmitter is impossible, collisions never end");
  }
  return std::max(0.0, std::expm1(logs.log_busy - logs.log_p1));
}

/// Mean idle time ahead of one busy slot: delta_idle * P0 / (1 - P0), in us.
inline double expected_idle(const ContentionMixture& mix, double delta_idle_us) {
  const auto logs = detail::busy_logs(mix);
  return delta_idle_us * std::exp(logs.log_p0 - logs.log_busy);
}

inline double expected_idle(const ContentionMixture& mix, Duration delta_idle) {
  return expected_idle(mix, delta_idle.us());
}

/// Expected COP figures for m successful contentions. Times in microseconds.
struct CopExpectation {
  double e_collisions = 0.0;  // collisions per success
  double e_idle_us = 0.0;     // idle time ahead of one busy slot
  double e_attempt_us = 0.0;  // time per success
  double e_tcop_us = 0.0;     // m * e_attempt_us
  // Split of e_attempt_us.
  double idle_us = 0.0;
  double collision_us = 0.0;
  double success_us = 0.0;
};

/// e_attempt = (E[Nc] + 1) E[Idle] + E[Nc] delta_coll + delta_succ, e_tcop = m e_attempt.
inline CopExpectation expected_tcop(std::int64_t m, const ContentionMixture& mix,
                                    const TimingConstants& tc) {
  if (m < 0) throw InvalidArgument("expected_tcop: m must be non-negative");
  CopExpectation out;
  if (m == 0) return out;
  const auto slots = slot_durations(tc);
  out.e_collisions = expected_collisions(mix);
  out.e_idle_us = expected_idle(mix, slots.idle);
  out.idle_us = (out.e_collisions + 1.0) * out.e_idle_us;
  out.collision_us = out.e_collisions * slots.collision.us();
  out.success_us = slots.success.us();
  out.e_attempt_us = out.idle_us + out.collision_us + out.success_us;
  out.e_tcop_us = static_cast<double>(m) * out.e_attempt_us;
  return out;
}

/// Probability that the lone transmitter of a successful slot belongs to
/// entry `index`. Sums to one over the entries.
inline double success_share(const ContentionMixture& mix, std::size_t index) {
  if (index >= mix.size()) throw InvalidArgument("success_share: index out of range");
  const auto logs = detail::contention_logs(mix);
  if (logs.log_p1 == detail::kNegInf) throw DegenerateMixture("success_share: no lone transmitter possible");
  return std::exp(logs.log_single[index] - logs.log_p1);
}

inline std::vector<double> success_shares(const ContentionMixture& mix) {
  const auto logs = detail::contention_logs(mix);
  if (logs.log_p1 == detail::kNegInf) throw DegenerateMixture("success_share: no lone transmitter possible");
  std::vector<double> out(mix.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(logs.log_single[i] - logs.log_p1);
  return out;
}

/// Probability that a device sees at least one Poisson arrival in a frame.
inline double arrival_probability(double lambda, Duration t_frame) {
  if (!(lambda >= 0.0)) throw InvalidArgument("arrivals: lambda must be non-negative");
  return -std::expm1(-lambda * t_frame.seconds());
}

/// Mean number of empty devices that become active during one frame.
inline double expected_new_arrivals(double empty_count, double lambda, Duration t_frame) {
  if (!(empty_count >= 0.0)) throw InvalidArgument("arrivals: empty_count must be non-negative");
  return empty_count * arrival_probability(lambda, t_frame);
}

// ---------------------------------------------------------------------------
// Large-population single-probability form.
//
// All L contenders share x = (1 + alpha) p_inl. The per-success time is
//   h(x) = (d_idle - d_coll) / (L x) + (d_succ - d_coll) + (d_coll / L) E(x),
//   E(x) = x^-1 (1 - x)^-(L-1),
// and T(M, alpha, p_inl) = M h(x). E(x) overflows a double long before the
// interesting range ends, so the scaled variants return T * exp(-log_scale).
// ---------------------------------------------------------------------------

namespace detail {

inline double check_asymptotic_args(double m, double alpha, double p_inl, double l_total) {
  if (!(m >= 0.0)) throw InvalidArgument("asymptotic_tcop: m must be non-negative");
  if (!(alpha > 0.0)) throw InvalidArgument("asymptotic_tcop: alpha must be positive");
  if (!(p_inl > 0.0 && p_inl <= 1.0)) throw InvalidArgument("asymptotic_tcop: p_inl must lie in (0, 1]");
  if (!(l_total >= 1.0)) throw InvalidArgument("asymptotic_tcop: l_total must be >= 1");
  const double x = (1.0 + alpha) * p_inl;
  if (x > 1.0) throw InvalidArgument("asymptotic_tcop: requires (1 + alpha) p_inl <= 1");
  return x;
}

/// log E(x) = -log x - (L - 1) log(1 - x).
inline double log_tail(double x, double l_total) {
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log(x) - (l_total - 1.0) * std::log1p(-x);
}

}  // namespace detail

inline double asymptotic_tcop_scaled(double m, double alpha, double p_inl, double l_total,
                                     const TimingConstants& tc, double log_scale) {
  const double x = detail::check_asymptotic_args(m, alpha, p_inl, l_total);
  if (m == 0.0) return 0.0;
  const auto slots = slot_durations(tc);
  const double d_idle = slots.idle.us();
  const double d_coll = slots.collision.us();
  const double d_succ = slots.success.us();
  const double a = (d_idle - d_coll) / l_total;
  const double c = d_coll / l_total;
  const double lt = detail::log_tail(x, l_total);
  const double h = (a / x + (d_succ - d_coll)) * std::exp(-log_scale) + c * std::exp(lt - log_scale);
  return m * h;
}

/// Large-population expected COP length in microseconds. +inf at x = 1.
inline double asymptotic_tcop(double m, double alpha, double p_inl, double l_total,
                              const TimingConstants& tc) {
  return asymptotic_tcop_scaled(m, alpha, p_inl, l_total, tc, 0.0);
}

/// Same single-probability population without the (1-x)^(L-1) ~ (1-x)^L
/// shortcut; equals expected_tcop on ContentionMixture::single(x, L).
inline double single_probability_tcop(double m, double alpha, double p_inl, double l_total,
                                      const TimingConstants& tc) {
  const double x = detail::check_asymptotic_args(m, alpha, p_inl, l_total);
  if (m == 0.0) return 0.0;
  const auto slots = slot_durations(tc);
  const double lx = l_total * x;
  const double log_q = std::log1p(-x);
  // 1 / (L x (1-x)^(L-1))
  const double inv_single = std::exp(-std::log(lx) - (l_total - 1.0) * log_q);
  const double idle_term = (1.0 - x) / lx;
  const double coll_term = inv_single - (1.0 - x) / lx - 1.0;
  return m * (idle_term * slots.idle.us() + coll_term * slots.collision.us() + slots.success.us());
}

/// Hessian of asymptotic_tcop in the variable order (M, p_inl, alpha),
/// stored as value() = scaled * exp(log_scale).
struct TcopHessian {
  Eigen::Matrix3d scaled = Eigen::Matrix3d::Zero();
  double log_scale = 0.0;

  Eigen::Matrix3d value() const { return scaled * std::exp(log_scale); }
};

inline TcopHessian tcop_hessian(double m, double alpha, double p_inl, double l_total,
                                const TimingConstants& tc) {
  const double x = detail::check_asymptotic_args(m, alpha, p_inl, l_total);
  if (x >= 1.0) throw InvalidArgument("tcop_hessian: singular at (1 + alpha) p_inl = 1");
  const auto slots = slot_durations(tc);
  const double d_idle = slots.idle.us();
  const double d_coll = slots.collision.us();
  const double a = (d_idle - d_coll) / l_total;
  const double c = d_coll / l_total;

  const double lt = detail::log_tail(x, l_total);
  const double u = -1.0 / x + (l_total - 1.0) / (1.0 - x);
  const double du = 1.0 / (x * x) + (l_total - 1.0) / ((1.0 - x) * (1.0 - x));

  TcopHessian out;
  out.log_scale = std::max(0.0, lt);
  const double g0 = std::exp(-out.log_scale);
  const double ge = std::exp(lt - out.log_scale);
  const double h1 = -a / (x * x) * g0 + c * ge * u;
  const double h2 = 2.0 * a / (x * x * x) * g0 + c * ge * (u * u + du);

  const double dx_dp = 1.0 + alpha;
  const double dx_da = p_inl;
  auto& H = out.scaled;
  H(0, 0) = 0.0;
  H(0, 1) = H(1, 0) = h1 * dx_dp;
  H(0, 2) = H(2, 0) = h1 * dx_da;
  H(1, 1) = m * h2 * dx_dp * dx_dp;
  H(2, 2) = m * h2 * dx_da * dx_da;
  // x = (1 + alpha) p_inl has d2x / dp dalpha = 1.
  H(1, 2) = H(2, 1) = m * (h2 * dx_dp * dx_da + h1);
  return out;
}

}  // namespace hymac

#endif  // HYMAC_ANALYTICS_HPP
