#ifndef HYMAC_ORACLES_HPP
#define HYMAC_ORACLES_HPP

// Independent reference computations used by the test suites and by the
// `validate` command. None of them reuses the closed forms they check.

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hymac/analytics.hpp"
#include "hymac/error.hpp"
#include "hymac/timing.hpp"

namespace hymac::oracle {

/// Slot-outcome probabilities summed over every transmit/silent pattern.
struct Enumeration {
  long double p0 = 0.0L;
  long double p1 = 0.0L;
  long double p2 = 0.0L;  // two or more transmitters

  double success_given_busy() const { return static_cast<double>(p1 / (p1 + p2)); }
  double collision_given_busy() const { return static_cast<double>(p2 / (p1 + p2)); }
  double expected_collisions() const { return static_cast<double>(p2 / p1); }
  double expected_idle(double delta_idle_us) const { return static_cast<double>(delta_idle_us * p0 / (p1 + p2)); }
};

/// Visits all 2^N patterns of the N devices in the mixture.
inline Enumeration enumerate(const ContentionMixture& mix) {
  std::vector<long double> probs;
  for (const auto& e : mix.entries()) probs.insert(probs.end(), static_cast<std::size_t>(e.n), e.p);
  if (probs.size() > 26) throw InvalidArgument("enumerate: too many devices");
  Enumeration out;
  std::function<void(std::size_t, long double, int)> walk = [&](std::size_t i, long double w, int tx) {
    if (i == probs.size()) {
      (tx == 0 ? out.p0 : tx == 1 ? out.p1 : out.p2) += w;
      return;
    }
    walk(i + 1, w * (1.0L - probs[i]), tx);
    walk(i + 1, w * probs[i], tx + 1);
  };
  walk(0, 1.0L, 0);
  return out;
}

/// Success probability with the lone-transmitter term missing its p factor,
/// n (1-p)^(n-1) prod (1-p_l)^(n_l). Kept to show that the enumeration check
/// rejects it.
inline double prob_success_without_p(const ContentionMixture& mix) {
  const auto entries = mix.entries();
  double p0 = 1.0;
  for (const auto& e : entries) p0 *= std::pow(1.0 - e.p, static_cast<double>(e.n));
  double p1 = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].n == 0) continue;
    double t = static_cast<double>(entries[i].n) * std::pow(1.0 - entries[i].p, static_cast<double>(entries[i].n - 1));
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j != i) t *= std::pow(1.0 - entries[j].p, static_cast<double>(entries[j].n));
    }
    p1 += t;
  }
  return p1 / (1.0 - p0);
}

/// Slot-by-slot Bernoulli simulation on a fixed population.
struct SlotMonteCarlo {
  std::int64_t slots = 0;
  std::int64_t idle = 0;
  std::int64_t busy = 0;
  std::int64_t successes = 0;
  std::vector<std::int64_t> lone_by_entry;  // successes owned by each entry

  double success_given_busy() const { return static_cast<double>(successes) / static_cast<double>(busy); }
  double success_se() const {
    const double p = success_given_busy();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(busy));
  }
  double mean_idle_run() const { return static_cast<double>(idle) / static_cast<double>(busy); }
};

inline SlotMonteCarlo slot_monte_carlo(const ContentionMixture& mix, std::int64_t slots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto entries = mix.entries();
  SlotMonteCarlo out;
  out.lone_by_entry.assign(entries.size(), 0);
  for (std::int64_t s = 0; s < slots; ++s) {
    int tx = 0;
    std::size_t owner = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::int64_t k = 0; k < entries[i].n; ++k) {
        if (u(rng) < entries[i].p) {
          ++tx;
          owner = i;
        }
      }
    }
    ++out.slots;
    if (tx == 0) {
      ++out.idle;
    } else {
      ++out.busy;
      if (tx == 1) {
        ++out.successes;
        ++out.lone_by_entry[owner];
      }
    }
  }
  return out;
}

/// Collisions before the first success, averaged over `attempts` contention
/// rounds on a fixed population, with its standard error.
struct CollisionMonteCarlo {
  double mean = 0.0;
  double se = 0.0;
};

inline CollisionMonteCarlo collision_monte_carlo(const ContentionMixture& mix, std::int64_t attempts,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto entries = mix.entries();
  double sum = 0.0;
  double sq = 0.0;
  for (std::int64_t a = 0; a < attempts; ++a) {
    std::int64_t collisions = 0;
    for (;;) {
      int tx = 0;
      for (const auto& e : entries) {
        for (std::int64_t k = 0; k < e.n; ++k) tx += u(rng) < e.p ? 1 : 0;
      }
      if (tx == 1) break;
      if (tx >= 2) ++collisions;
    }
    sum += static_cast<double>(collisions);
    sq += static_cast<double>(collisions) * static_cast<double>(collisions);
  }
  const double n = static_cast<double>(attempts);
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean) / n)};
}

/// Event-level contention period: slots are drawn until m successes, the
/// population stays fixed. Mean and standard error of the length in us.
struct CopMonteCarlo {
  double mean_us = 0.0;
  double se_us = 0.0;
};

inline CopMonteCarlo cop_monte_carlo(std::int64_t m, const ContentionMixture& mix, const TimingConstants& tc,
                                     int runs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto entries = mix.entries();
  const double d_idle = tc.delta_idle.us();
  const double d_coll = (tc.t_req + tc.bifs).us();
  const double d_succ = (tc.t_req + tc.sifs + tc.t_ack + tc.bifs).us();
  double sum = 0.0;
  double sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    double t = 0.0;
    std::int64_t wins = 0;
    while (wins < m) {
      int tx = 0;
      for (const auto& e : entries) {
        for (std::int64_t k = 0; k < e.n; ++k) tx += u(rng) < e.p ? 1 : 0;
      }
      if (tx == 0) {
        t += d_idle;
      } else if (tx == 1) {
        t += d_succ;
        ++wins;
      } else {
        t += d_coll;
      }
    }
    sum += t;
    sq += t * t;
  }
  const double mean = sum / runs;
  return {mean, std::sqrt(std::max(0.0, sq / runs - mean * mean) / runs)};
}

/// sum_n n C(N, n) g^n (1 - g)^(N - n), term by term.
inline double binomial_mean(std::int64_t count, double g) {
  if (count == 0 || g == 0.0) return 0.0;
  if (g == 1.0) return static_cast<double>(count);
  double s = 0.0;
  for (std::int64_t n = 1; n <= count; ++n) {
    const double log_c = std::lgamma(static_cast<double>(count) + 1.0) - std::lgamma(static_cast<double>(n) + 1.0) -
                         std::lgamma(static_cast<double>(count - n) + 1.0);
    s += static_cast<double>(n) *
         std::exp(log_c + static_cast<double>(n) * std::log(g) + static_cast<double>(count - n) * std::log1p(-g));
  }
  return s;
}

/// Large-population COP length times exp(-log_scale), evaluated in long
/// double. Near x = 1 the exponent reaches ~L log(1000) and the finite
/// differences below need the extra digits.
inline long double asymptotic_tcop_long(long double m, long double alpha, long double p_inl, long double l_total,
                                        const TimingConstants& tc, long double log_scale) {
  const long double x = (1.0L + alpha) * p_inl;
  const long double d_idle = tc.delta_idle.ns() / 1e3L;
  const long double d_coll = (tc.t_req + tc.bifs).ns() / 1e3L;
  const long double d_succ = (tc.t_req + tc.sifs + tc.t_ack + tc.bifs).ns() / 1e3L;
  const long double lt = -std::log(x) - (l_total - 1.0L) * std::log1p(-x);
  return m * (((d_idle - d_coll) / (l_total * x) + (d_succ - d_coll)) * std::exp(-log_scale) +
              d_coll / l_total * std::exp(lt - log_scale));
}

/// Central-difference Hessian of the large-population COP length in
/// (M, p_inl, alpha) with one Richardson step. The step in
/// x = (1 + alpha) p_inl is a small fraction of the scale on which
/// log E(x) changes.
inline Eigen::Matrix3d fd_hessian(double m, double alpha, double p_inl, double l_total, const TimingConstants& tc,
                                  double log_scale) {
  auto f = [&](const std::array<long double, 3>& v) {
    return asymptotic_tcop_long(v[0], v[2], v[1], l_total, tc, log_scale);
  };
  const double x = (1.0 + alpha) * p_inl;
  const double u = std::abs(-1.0 / x + (l_total - 1.0) / (1.0 - x));
  const double curv = std::sqrt(1.0 / (x * x) + (l_total - 1.0) / ((1.0 - x) * (1.0 - x)));
  const double dx = 0.01 / std::max({u, curv, 1.0 / x, 1.0 / (1.0 - x)});
  const std::array<long double, 3> base{m, p_inl, alpha};
  const std::array<long double, 3> h0{std::max(1.0, 0.01 * m), dx / (1.0 + alpha), dx / p_inl};

  using Matrix3l = Eigen::Matrix<long double, 3, 3>;
  auto estimate = [&](long double scale) {
    Matrix3l H;
    std::array<long double, 3> h{h0[0] * scale, h0[1] * scale, h0[2] * scale};
    const long double f0 = f(base);
    for (int i = 0; i < 3; ++i) {
      auto up = base;
      auto dn = base;
      up[i] += h[i];
      dn[i] -= h[i];
      H(i, i) = (f(up) - 2.0 * f0 + f(dn)) / (h[i] * h[i]);
      for (int j = i + 1; j < 3; ++j) {
        auto pp = base, pm = base, mp = base, mm = base;
        pp[i] += h[i], pp[j] += h[j];
        pm[i] += h[i], pm[j] -= h[j];
        mp[i] -= h[i], mp[j] += h[j];
        mm[i] -= h[i], mm[j] -= h[j];
        H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
      }
    }
    return H;
  };
  const Matrix3l coarse = estimate(1.0L);
  const Matrix3l fine = estimate(0.5L);
  return ((4.0L * fine - coarse) / 3.0L).cast<double>();
}

}  // namespace hymac::oracle

#endif  // HYMAC_ORACLES_HPP
