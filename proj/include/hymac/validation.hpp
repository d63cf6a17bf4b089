#ifndef HYMAC_VALIDATION_HPP
#define HYMAC_VALIDATION_HPP

// Property checks shared by the `validate` command and the test suites.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hymac/analytics.hpp"
#include "hymac/oracles.hpp"
#include "hymac/simulator.hpp"
#include "hymac/timing.hpp"

namespace hymac::validation {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Random mixture with 1..max_classes classes, 1..max_devices devices and
/// probabilities in [p_lo, p_hi].
inline ContentionMixture random_mixture(std::mt19937_64& rng, int max_classes = 4, int max_devices = 20,
                                        double p_lo = 0.01, double p_hi = 0.5) {
  std::uniform_int_distribution<int> classes(1, max_classes);
  std::uniform_int_distribution<int> total(1, max_devices);
  std::uniform_real_distribution<double> prob(p_lo, p_hi);
  const int c = classes(rng);
  int left = total(rng);
  std::vector<MixtureEntry> e;
  for (int i = 0; i < c; ++i) {
    const int n = i + 1 == c ? left : std::uniform_int_distribution<int>(0, left)(rng);
    left -= n;
    e.push_back({prob(rng), n});
  }
  return ContentionMixture(std::move(e));
}

/// Largest absolute error of the closed forms against exhaustive
/// enumeration over `samples` random mixtures.
struct EnumerationReport {
  int samples = 0;
  double max_success = 0.0;
  double max_collision = 0.0;
  double max_collisions = 0.0;
  double max_idle = 0.0;

  double worst() const { return std::max({max_success, max_collision, max_collisions, max_idle}); }
};

inline EnumerationReport enumeration_errors(int samples, std::uint64_t seed, const TimingConstants& tc,
                                            const std::function<double(const ContentionMixture&)>& success =
                                                prob_success_given_busy) {
  std::mt19937_64 rng(seed);
  EnumerationReport r;
  const double d_idle = tc.delta_idle.us();
  for (int s = 0; s < samples; ++s) {
    const auto mix = random_mixture(rng);
    const auto ex = oracle::enumerate(mix);
    r.max_success = std::max(r.max_success, std::abs(success(mix) - ex.success_given_busy()));
    r.max_collision = std::max(r.max_collision, std::abs(prob_collision_given_busy(mix) - ex.collision_given_busy()));
    r.max_collisions = std::max(r.max_collisions, std::abs(expected_collisions(mix) - ex.expected_collisions()));
    r.max_idle = std::max(r.max_idle, std::abs(expected_idle(mix, d_idle) - ex.expected_idle(d_idle)));
    ++r.samples;
  }
  return r;
}

/// Analytic Hessian against finite differences, plus symmetry, the zero
/// (M, M) entry and the eigenvalue floor -tol_psd * trace.
struct HessianCheck {
  double max_rel_fd = 0.0;
  double asymmetry = 0.0;
  double mm_entry = 0.0;
  double min_eig_over_trace = 0.0;
  bool fd_ok = false;
  bool psd_ok = false;
};

inline HessianCheck check_hessian(double m, double alpha, double p_inl, double l_total, const TimingConstants& tc,
                                  double tol_fd = 1e-4, double tol_psd = 1e-8) {
  const auto h = tcop_hessian(m, alpha, p_inl, l_total, tc);
  const Eigen::Matrix3d fd = oracle::fd_hessian(m, alpha, p_inl, l_total, tc, h.log_scale);
  HessianCheck c;
  const double norm = h.scaled.cwiseAbs().maxCoeff();
  c.fd_ok = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double a = h.scaled(i, j);
      const double err = std::abs(a - fd(i, j));
      // Entries that vanish analytically are compared against the matrix
      // scale instead of their own magnitude.
      const double rel = a == 0.0 ? err / norm : err / std::abs(a);
      c.max_rel_fd = std::max(c.max_rel_fd, rel);
      if (rel > tol_fd) c.fd_ok = false;
    }
  }
  c.asymmetry = (h.scaled - h.scaled.transpose()).cwiseAbs().maxCoeff();
  c.mm_entry = h.scaled(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h.scaled, Eigen::EigenvaluesOnly);
  const double trace = h.scaled.trace();
  c.min_eig_over_trace = eig.eigenvalues().minCoeff() / trace;
  c.psd_ok = eig.eigenvalues().minCoeff() >= -tol_psd * trace;
  return c;
}

/// p_inl grid from 1e-4 up to (just below) the singular point 1 / (1 + alpha).
inline std::vector<double> hessian_p_grid(double alpha) {
  std::vector<double> out;
  const double top = 1.0 / (1.0 + alpha);
  for (double p : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1}) {
    if (p < top * (1.0 - 1e-9)) out.push_back(p);
  }
  out.push_back(top * 0.999);
  return out;
}

inline std::vector<double> hessian_alpha_grid() { return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 3.0, 4.0, 5.0}; }
inline std::vector<double> hessian_m_grid() { return {1.0, 10.0, 50.0, 100.0, 200.0, 400.0}; }

/// Busy-slot statistics of the simulator's contention draw against the
/// closed forms, for one class of n devices.
struct Calibration {
  double p_success = 0.0;
  double p_success_sim = 0.0;
  double p_success_se = 0.0;
  double idle_us = 0.0;
  double idle_us_sim = 0.0;
  double idle_us_se = 0.0;
  std::int64_t slots = 0;

  bool success_ok() const { return std::abs(p_success - p_success_sim) <= 3.0 * p_success_se; }
  bool idle_ok() const { return std::abs(idle_us - idle_us_sim) <= 3.0 * idle_us_se; }
};

inline Calibration calibrate(int n, double p, std::int64_t busy_slots, std::uint64_t seed,
                             const TimingConstants& tc) {
  std::vector<ContentionGroup> groups{{p, {}}};
  for (int i = 0; i < n; ++i) groups[0].devices.push_back(i);
  Rng rng(seed);
  const auto s = sample_slots(std::span<const ContentionGroup>(groups), busy_slots, rng);
  const auto mix = ContentionMixture::single(p, n);
  Calibration c;
  const double busy = static_cast<double>(s.busy);
  c.slots = s.busy + s.idle_slots;
  c.p_success = prob_success_given_busy(mix);
  c.p_success_sim = static_cast<double>(s.successes) / busy;
  c.p_success_se = std::sqrt(c.p_success_sim * (1.0 - c.p_success_sim) / busy);
  const double d = tc.delta_idle.us();
  const double mean_run = static_cast<double>(s.idle_slots) / busy;
  const double var_run = std::max(0.0, s.idle_sq / busy - mean_run * mean_run);
  c.idle_us = expected_idle(mix, d);
  c.idle_us_sim = d * mean_run;
  c.idle_us_se = d * std::sqrt(var_run / busy);
  return c;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// The full property suite run by `validate`.
inline std::vector<CheckResult> run_all(const TimingConstants& tc = reference_timing()) {
  std::vector<CheckResult> out;

  {
    const auto r = enumeration_errors(200, 7, tc);
    out.push_back({"closed forms vs exhaustive enumeration (200 mixtures)", r.worst() <= 1e-9,
                   "max abs error " + fmt(r.worst())});
  }
  {
    const auto r = enumeration_errors(200, 7, tc, oracle::prob_success_without_p);
    out.push_back({"enumeration rejects success probability without the p factor", r.max_success > 1e-9,
                   "max abs error of the mutant " + fmt(r.max_success)});
  }
  {
    // Closed-form P0 and P1 plus the enumerated P(>= 2) must add up to one.
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      const auto mix = random_mixture(rng);
      const auto ex = oracle::enumerate(mix);
      const double total = prob_no_transmission(mix) + prob_single_transmission(mix) + static_cast<double>(ex.p2);
      worst = std::max(worst, std::abs(total - 1.0));
      double shares = 0.0;
      for (double v : success_shares(mix)) shares += v;
      worst = std::max(worst, std::abs(shares - 1.0));
    }
    out.push_back({"slot probabilities and success shares sum to one", worst <= 1e-12, "max deviation " + fmt(worst)});
  }
  {
    const auto c = calibrate(500, 0.01, 100000, 3, tc);
    out.push_back({"simulated P(success | busy) within 3 SE (n=500, p=0.01)", c.success_ok(),
                   "analytic " + fmt(c.p_success) + " simulated " + fmt(c.p_success_sim) + " se " +
                       fmt(c.p_success_se)});
    out.push_back({"simulated idle time per busy slot within 3 SE (n=500, p=0.01)", c.idle_ok(),
                   "analytic " + fmt(c.idle_us) + " us simulated " + fmt(c.idle_us_sim) + " us se " +
                       fmt(c.idle_us_se)});
  }
  {
    const auto h = check_hessian(100, 1.0, 0.001, 1e5, tc);
    out.push_back({"Hessian matches finite differences (m=100, alpha=1, p_inl=0.001, L=1e5)", h.fd_ok,
                   "max rel error " + fmt(h.max_rel_fd)});
    out.push_back({"Hessian positive semidefinite (m=100, alpha=1, p_inl=0.001, L=1e5)",
                   h.psd_ok && h.mm_entry == 0.0 && h.asymmetry == 0.0,
                   "min eigenvalue / trace " + fmt(h.min_eig_over_trace)});
  }
  {
    ClassConfig cfg = homogeneous_classes(60, 2.0, 1.0, 0.05);
    const auto plan = plan_operating_point(cfg, tc, 20);
    const auto rep = run_hybrid(cfg, tc, plan, 20, 5);
    bool ok = true;
    for (const auto& d : rep.device_stats) {
      ok = ok && d.generated == d.delivered + d.dropped + (d.buffered ? 1 : 0);
    }
    for (const auto& f : rep.frames) {
      ok = ok && (tc.t_nof.ns() + f.t_cop_ns + tc.t_anc.ns() + f.winners * tc.t_r.ns() <= tc.t_frame.ns());
      ok = ok && f.winners <= plan.per_frame[static_cast<std::size_t>(f.frame - 1)].m_opt;
    }
    out.push_back({"simulator packet and frame-time accounting", ok, "60 devices, 20 frames"});
  }
  return out;
}

}  // namespace hymac::validation

#endif  // HYMAC_VALIDATION_HPP
