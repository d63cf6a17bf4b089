#ifndef HYMAC_OPTIMIZER_HPP
#define HYMAC_OPTIMIZER_HPP

// Channel-utility maximization over a horizon of I frames.
//
// For a fixed operating point (alpha, p_inl) the expected population is
// pushed forward frame by frame: pick the largest winner count M that fits
// the frame (expected COP length + M slots <= frame), split the winners
// across virtual classes by their success shares, promote the losers one
// level, and add the expected new arrivals at each class's starting level.
// Utility is increasing in every M, so the per-frame maximum is optimal for
// that population path. The operating point itself is chosen on a grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "hymac/analytics.hpp"
#include "hymac/error.hpp"
#include "hymac/parallel.hpp"
#include "hymac/population.hpp"
#include "hymac/priority.hpp"
#include "hymac/timing.hpp"

namespace hymac {

/// Per-frame thresholds handed to the contention period: stop after m_opt
/// winners or once t_cop_opt has elapsed, whichever comes first.
struct FrameTarget {
  int frame = 1;
  std::int64_t m_opt = 0;
  double t_cop_opt_us = 0.0;
  double predicted_utility = 0.0;
  PopulationState population;  // expected population entering the frame
};

struct FramePlan {
  double alpha_opt = 0.0;
  double p_inl_opt = 0.0;
  std::vector<FrameTarget> per_frame;
  double utility = 0.0;

  int horizon() const { return static_cast<int>(per_frame.size()); }
};

/// (1 / I) * sum_i m_i T_r / T_frame.
inline double channel_utility(std::span<const std::int64_t> m_per_frame, const TimingConstants& tc) {
  if (m_per_frame.empty()) return 0.0;
  double sum = 0.0;
  for (std::int64_t m : m_per_frame) {
    if (m < 0) throw InvalidArgument("channel_utility: negative winner count");
    sum += static_cast<double>(m);
  }
  return sum * tc.t_r.us() / (static_cast<double>(m_per_frame.size()) * tc.t_frame.us());
}

/// Mixture view of a population: entries grouped by contending probability,
/// each remembering which (q, d) cells it merges.
struct PopulationMixture {
  ContentionMixture mixture;
  std::vector<std::vector<std::pair<int, int>>> members;  // (q, d), q 1-based
  std::vector<double> expected_counts;
};

inline PopulationMixture population_mixture(const PopulationState& state, const ClassConfig& cfg) {
  std::map<double, std::size_t> by_p;
  std::vector<double> probs;
  PopulationMixture out;
  for (std::size_t qi = 0; qi < state.counts.size(); ++qi) {
    const int q = static_cast<int>(qi) + 1;
    for (std::size_t d = 0; d < state.counts[qi].size(); ++d) {
      const double c = state.counts[qi][d];
      if (!(c > 0.0)) continue;
      const double p = contending_probability(q, static_cast<int>(d), cfg.alpha, cfg.escalation(), cfg.p_inl);
      auto [it, inserted] = by_p.try_emplace(p, probs.size());
      if (inserted) {
        probs.push_back(p);
        out.members.emplace_back();
        out.expected_counts.push_back(0.0);
      }
      out.members[it->second].emplace_back(q, static_cast<int>(d));
      out.expected_counts[it->second] += c;
    }
  }
  // Order entries by probability so the mixture is canonical.
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return probs[a] < probs[b]; });
  std::vector<MixtureEntry> entries;
  PopulationMixture sorted;
  for (std::size_t i : order) {
    entries.push_back({probs[i], std::llround(out.expected_counts[i])});
    sorted.members.push_back(std::move(out.members[i]));
    sorted.expected_counts.push_back(out.expected_counts[i]);
  }
  sorted.mixture = ContentionMixture(std::move(entries));
  return sorted;
}

/// Largest m with m (e_attempt + T_r) <= T_frame, capped by `active`.
inline std::int64_t max_feasible_m(double e_attempt_us, std::int64_t active, const TimingConstants& tc) {
  if (active <= 0 || !std::isfinite(e_attempt_us)) return 0;
  if (e_attempt_us < 0.0) throw InvalidArgument("max_feasible_m: negative attempt time");
  const double frame = tc.t_frame.us();
  const double slot = tc.t_r.us();
  const double bound = std::floor(frame / (e_attempt_us + slot));
  std::int64_t m = bound >= static_cast<double>(active) ? active : static_cast<std::int64_t>(bound);
  while (m > 0 && static_cast<double>(m) * e_attempt_us + static_cast<double>(m) * slot > frame) --m;
  return m;
}

/// Largest m with expected_tcop(m) + m T_r <= T_frame, capped by the
/// number of contenders. Zero when one success alone does not fit or the
/// mixture cannot produce a lone transmitter.
inline std::int64_t max_feasible_m(const ContentionMixture& mix, const TimingConstants& tc) {
  const std::int64_t total = mix.total();
  if (total == 0) return 0;
  double attempt = 0.0;
  try {
    attempt = expected_tcop(1, mix, tc).e_attempt_us;
  } catch (const DivergentExpectation&) {
    return 0;
  } catch (const DegenerateMixture&) {
    return 0;
  }
  return max_feasible_m(attempt, total, tc);
}

/// Splits m winners across mixture entries: ceil(m * share), trimming the
/// ceiling overshoot from the entries it inflated most, then moving any
/// excess over an entry's population to the entries with the largest shares.
inline std::vector<std::int64_t> allocate_winners(std::int64_t m, const ContentionMixture& mix) {
  const auto entries = mix.entries();
  std::vector<std::int64_t> w(entries.size(), 0);
  if (m == 0) return w;
  if (m < 0) throw InvalidArgument("allocate_winners: negative m");
  if (m > mix.total()) throw InfeasibleAllocation("allocate_winners: more winners than active devices");

  const auto shares = success_shares(mix);
  std::vector<double> exact(entries.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    exact[i] = static_cast<double>(m) * shares[i];
    w[i] = static_cast<std::int64_t>(std::ceil(exact[i] - 1e-9));
    sum += w[i];
  }

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return (static_cast<double>(w[a]) - exact[a]) > (static_cast<double>(w[b]) - exact[b]);
  });
  for (std::size_t k = 0; sum > m; k = (k + 1) % order.size()) {
    if (w[order[k]] > 0) {
      --w[order[k]];
      --sum;
    }
  }

  std::int64_t shortfall = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (w[i] > entries[i].n) {
      shortfall += w[i] - entries[i].n;
      w[i] = entries[i].n;
    }
  }
  if (shortfall > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return shares[a] > shares[b]; });
    for (std::size_t i : order) {
      const std::int64_t room = entries[i].n - w[i];
      const std::int64_t take = std::min(room, shortfall);
      w[i] += take;
      shortfall -= take;
      if (shortfall == 0) break;
    }
  }
  if (shortfall != 0) throw InfeasibleAllocation("allocate_winners: allocation exceeds class populations");
  return w;
}

namespace detail {

/// Smallest failure count at which class q is already at probability 1.
inline int saturation_depth(int q, const ClassConfig& cfg) {
  int d = 0;
  while (contending_probability(q, d, cfg.alpha, cfg.escalation(), cfg.p_inl) < 1.0) ++d;
  return d;
}

}  // namespace detail

/// Expected population entering frame 1: every device that saw an arrival
/// during the warm-up frame, at its class's starting level.
inline PopulationState initial_population(const ClassConfig& cfg, const TimingConstants& tc) {
  PopulationState s;
  s.frame_index = 1;
  s.counts.resize(cfg.class_sizes.size());
  for (std::size_t q = 0; q < cfg.class_sizes.size(); ++q) {
    s.counts[q] = {expected_new_arrivals(cfg.class_sizes[q], cfg.lambda, tc.t_frame)};
  }
  return s;
}

/// One step of the expected-population recursion after m_total winners.
inline PopulationState evolve_population(const PopulationState& state, std::int64_t m_total,
                                         const ClassConfig& cfg, const TimingConstants& tc) {
  if (state.counts.size() != cfg.class_sizes.size()) {
    throw InvalidArgument("evolve_population: population and class config disagree");
  }
  const auto pm = population_mixture(state, cfg);
  const auto winners = allocate_winners(m_total, pm.mixture);

  // Winners per (q, d), split within an entry in proportion to the cells.
  std::vector<std::vector<double>> won(state.counts.size());
  for (std::size_t q = 0; q < state.counts.size(); ++q) won[q].assign(state.counts[q].size(), 0.0);
  for (std::size_t e = 0; e < pm.members.size(); ++e) {
    if (winners[e] == 0 || !(pm.expected_counts[e] > 0.0)) continue;
    for (auto [q, d] : pm.members[e]) {
      const double c = state.counts[q - 1][d];
      won[q - 1][d] = static_cast<double>(winners[e]) * c / pm.expected_counts[e];
    }
  }

  PopulationState next;
  next.frame_index = state.frame_index + 1;
  next.counts.resize(state.counts.size());
  for (std::size_t qi = 0; qi < state.counts.size(); ++qi) {
    const int q = static_cast<int>(qi) + 1;
    const auto& row = state.counts[qi];
    double active = 0.0;
    double winners_q = 0.0;
    for (std::size_t d = 0; d < row.size(); ++d) {
      active += row[d];
      winners_q += won[qi][d];
    }
    const double size = cfg.class_sizes[qi];
    const double empty = std::clamp(size - active + winners_q, 0.0, size);

    const int cap = detail::saturation_depth(q, cfg);
    auto& out = next.counts[qi];
    out.assign(std::min<std::size_t>(row.size() + 1, static_cast<std::size_t>(cap) + 1), 0.0);
    out[0] = expected_new_arrivals(empty, cfg.lambda, tc.t_frame);
    for (std::size_t d = 0; d < row.size(); ++d) {
      const double survivors = std::max(0.0, row[d] - won[qi][d]);
      const std::size_t to = std::min<std::size_t>(d + 1, static_cast<std::size_t>(cap));
      out[to] += survivors;
    }
  }
  return next;
}

/// Plan for one operating point (cfg.alpha, cfg.p_inl).
inline FramePlan plan_operating_point(const ClassConfig& cfg, const TimingConstants& tc, int horizon) {
  cfg.validate();
  tc.validate();
  if (horizon < 1) throw InvalidArgument("optimize: horizon must be >= 1");
  FramePlan plan;
  plan.alpha_opt = cfg.alpha;
  plan.p_inl_opt = cfg.p_inl;
  plan.per_frame.reserve(horizon);
  PopulationState state = initial_population(cfg, tc);
  std::vector<std::int64_t> ms;
  ms.reserve(horizon);
  for (int i = 1; i <= horizon; ++i) {
    const auto pm = population_mixture(state, cfg);
    const std::int64_t m = max_feasible_m(pm.mixture, tc);
    FrameTarget t;
    t.frame = i;
    t.m_opt = m;
    t.t_cop_opt_us = expected_tcop(m, pm.mixture, tc).e_tcop_us;
    t.predicted_utility = static_cast<double>(m) * tc.t_r.us() / tc.t_frame.us();
    t.population = state;
    ms.push_back(m);
    plan.per_frame.push_back(std::move(t));
    if (i < horizon) state = evolve_population(state, m, cfg, tc);
  }
  plan.utility = channel_utility(ms, tc);
  return plan;
}

/// Operating-point lattice. refine_levels > 0 adds successively finer local
/// lattices (11 x 11 points) around the incumbent.
struct SearchGrid {
  std::vector<double> alphas;
  std::vector<double> p_inls;
  int refine_levels = 0;

  /// alpha in {0.5, ..., 1.0, 2, 3, 4, 5}, p_inl in {0.1, ..., 1.0}.
  static SearchGrid table() {
    return SearchGrid{{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 3.0, 4.0, 5.0},
                      {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0},
                      0};
  }
};

struct GridCell {
  double alpha = 0.0;
  double p_inl = 0.0;
  double utility = 0.0;
};

struct GridSearch {
  std::vector<GridCell> cells;  // coarse lattice, alpha-major
  FramePlan best;
};

namespace detail {

// Ties go to the lexicographically smallest (alpha, p_inl).
inline bool better(const GridCell& a, const GridCell& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return a.p_inl < b.p_inl;
}

inline std::vector<GridCell> evaluate_cells(const ClassConfig& cfg, const TimingConstants& tc, int horizon,
                                            const std::vector<std::pair<double, double>>& points,
                                            int workers) {
  std::vector<GridCell> cells(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    ClassConfig c = cfg;
    c.alpha = points[i].first;
    c.p_inl = points[i].second;
    cells[i] = GridCell{c.alpha, c.p_inl, plan_operating_point(c, tc, horizon).utility};
  });
  return cells;
}

inline double neighbour_gap(const std::vector<double>& axis, double v) {
  double gap = 0.0;
  for (double a : axis) {
    if (a != v) gap = gap == 0.0 ? std::abs(a - v) : std::min(gap, std::abs(a - v));
  }
  return gap == 0.0 ? std::abs(v) * 0.5 : gap;
}

}  // namespace detail

inline GridSearch search_grid(const ClassConfig& cfg, const TimingConstants& tc, int horizon,
                              const SearchGrid& grid, int workers = 1) {
  cfg.validate();
  tc.validate();
  if (grid.alphas.empty() || grid.p_inls.empty()) throw InvalidArgument("optimize: empty search grid");
  std::vector<std::pair<double, double>> points;
  for (double a : grid.alphas) {
    for (double p : grid.p_inls) points.emplace_back(a, p);
  }
  GridSearch out;
  out.cells = detail::evaluate_cells(cfg, tc, horizon, points, workers);
  GridCell best = out.cells.front();
  for (const auto& c : out.cells) {
    if (detail::better(c, best)) best = c;
  }

  double da = detail::neighbour_gap(grid.alphas, best.alpha);
  double dp = detail::neighbour_gap(grid.p_inls, best.p_inl);
  for (int level = 0; level < grid.refine_levels; ++level) {
    std::vector<std::pair<double, double>> local;
    for (int i = -5; i <= 5; ++i) {
      const double a = best.alpha + da * i / 5.0;
      if (!(a > 0.0)) continue;
      for (int j = -5; j <= 5; ++j) {
        const double p = best.p_inl + dp * j / 5.0;
        if (p > 0.0 && p <= 1.0) local.emplace_back(a, p);
      }
    }
    for (const auto& c : detail::evaluate_cells(cfg, tc, horizon, local, workers)) {
      if (detail::better(c, best)) best = c;
    }
    da /= 5.0;
    dp /= 5.0;
  }

  ClassConfig chosen = cfg;
  chosen.alpha = best.alpha;
  chosen.p_inl = best.p_inl;
  out.best = plan_operating_point(chosen, tc, horizon);
  return out;
}

/// Best plan over the grid. Deterministic in (cfg, tc, horizon, grid).
inline FramePlan optimize(const ClassConfig& cfg, const TimingConstants& tc, int horizon,
                          const SearchGrid& grid = SearchGrid::table(), int workers = 1) {
  return search_grid(cfg, tc, horizon, grid, workers).best;
}

}  // namespace hymac

#endif  // HYMAC_OPTIMIZER_HPP
