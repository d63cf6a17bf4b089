#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hymac/optimizer.hpp"

using namespace hymac;

namespace {

const TimingConstants kTc = reference_timing();

PopulationState single_class(std::vector<double> row) {
  PopulationState s;
  s.counts = {std::move(row)};
  return s;
}

}  // namespace

TEST(ChannelUtility, Examples) {
  const std::vector<std::int64_t> zeros(5, 0);
  EXPECT_EQ(channel_utility(zeros, kTc), 0.0);
  const std::vector<std::int64_t> full{500};
  EXPECT_DOUBLE_EQ(channel_utility(full, kTc), 1.0);
  const std::vector<std::int64_t> two{100, 300};
  EXPECT_DOUBLE_EQ(channel_utility(two, kTc), 0.4);
  const std::vector<std::int64_t> bad{-1};
  EXPECT_THROW(channel_utility(bad, kTc), InvalidArgument);
}

TEST(MaxFeasibleM, Examples) {
  EXPECT_EQ(max_feasible_m(kTc.t_frame.us(), 1000, kTc), 0);
  EXPECT_EQ(max_feasible_m(ContentionMixture::single(1.0, 1), kTc), 1);
  EXPECT_EQ(max_feasible_m(2000.0, 1000, kTc), 250);
  EXPECT_EQ(max_feasible_m(0.0, 7, kTc), 7);
  EXPECT_EQ(max_feasible_m(ContentionMixture{}, kTc), 0);
  EXPECT_EQ(max_feasible_m(ContentionMixture::single(1.0, 2), kTc), 0);
}

TEST(MaxFeasibleM, IsTheBindingConstraint) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(0.0005, 0.05);
  std::uniform_int_distribution<int> n(1, 3000);
  for (int s = 0; s < 200; ++s) {
    const ContentionMixture mix({{p(rng), n(rng)}, {p(rng), n(rng)}});
    const std::int64_t m = max_feasible_m(mix, kTc);
    const double frame = kTc.t_frame.us();
    const double slot = kTc.t_r.us();
    EXPECT_LE(expected_tcop(m, mix, kTc).e_tcop_us + static_cast<double>(m) * slot, frame);
    if (m < mix.total()) {
      EXPECT_GT(expected_tcop(m + 1, mix, kTc).e_tcop_us + static_cast<double>(m + 1) * slot, frame);
    }
  }
}

TEST(AllocateWinners, SingleEntryTakesAll) {
  EXPECT_EQ(allocate_winners(37, ContentionMixture::single(0.1, 50)), std::vector<std::int64_t>{37});
}

TEST(AllocateWinners, SumsToMAndRespectsPopulations) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> p(0.001, 0.5);
  std::uniform_int_distribution<int> n(0, 40);
  for (int s = 0; s < 500; ++s) {
    const ContentionMixture mix({{p(rng), n(rng)}, {p(rng), n(rng)}, {p(rng), n(rng) + 1}});
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(0, mix.total())(rng);
    const auto w = allocate_winners(m, mix);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_GE(w[i], 0);
      EXPECT_LE(w[i], mix.entries()[i].n);
      sum += w[i];
    }
    EXPECT_EQ(sum, m);
  }
}

TEST(AllocateWinners, Errors) {
  EXPECT_THROW(allocate_winners(6, ContentionMixture::single(0.1, 5)), InfeasibleAllocation);
  EXPECT_THROW(allocate_winners(-1, ContentionMixture::single(0.1, 5)), InvalidArgument);
}

TEST(EvolvePopulation, PurePromotion) {
  ClassConfig cfg = homogeneous_classes(100, 0.0, 1.0, 0.01);
  const auto next = evolve_population(single_class({10.0, 5.0}), 0, cfg, kTc);
  ASSERT_EQ(next.counts[0].size(), 3u);
  EXPECT_EQ(next.counts[0][0], 0.0);
  EXPECT_EQ(next.counts[0][1], 10.0);
  EXPECT_EQ(next.counts[0][2], 5.0);
  EXPECT_EQ(next.frame_index, 2);
}

TEST(EvolvePopulation, RecursionOracle) {
  // Q = 1, 100 devices at d = 1, 40 winners, lambda T_frame = 1, K = 1200.
  ClassConfig cfg = homogeneous_classes(1200, 1.0, 1.0, 0.1);
  const auto next = evolve_population(single_class({0.0, 100.0}), 40, cfg, kTc);
  const double g = 1.0 - std::exp(-1.0);
  ASSERT_GE(next.counts[0].size(), 3u);
  EXPECT_NEAR(next.counts[0][0], (1200.0 - 100.0 + 40.0) * g, 1e-9);
  EXPECT_EQ(next.counts[0][1], 0.0);
  EXPECT_NEAR(next.counts[0][2], 60.0, 1e-12);
}

TEST(EvolvePopulation, SaturatedLevelsMerge) {
  // alpha = 1, p_inl = 0.25 reaches probability 1 at d = 2.
  ClassConfig cfg = homogeneous_classes(100, 0.0, 1.0, 0.25);
  const auto next = evolve_population(single_class({0.0, 3.0, 4.0}), 0, cfg, kTc);
  ASSERT_EQ(next.counts[0].size(), 3u);
  EXPECT_EQ(next.counts[0][2], 7.0);
}

TEST(EvolvePopulation, CountsStayNonNegative) {
  ClassConfig cfg = heterogeneous_classes(60, 3.0, 0.7, 0.05);
  PopulationState s = initial_population(cfg, kTc);
  for (int i = 0; i < 30; ++i) {
    const auto pm = population_mixture(s, cfg);
    s = evolve_population(s, max_feasible_m(pm.mixture, kTc), cfg, kTc);
    for (std::size_t q = 0; q < s.counts.size(); ++q) {
      for (double c : s.counts[q]) EXPECT_GE(c, 0.0);
      EXPECT_LE(s.class_total(static_cast<int>(q) + 1), cfg.class_sizes[q] + 1e-9);
    }
  }
}

TEST(OptimizerProperties, GreedyMatchesExhaustiveSearch) {
  // Toy frames: 8 ms frame, 1 ms slots, populations of at most 6 devices.
  TimingConstants tc = kTc;
  tc.t_frame = Duration::from_ms(8);
  tc.t_r = Duration::from_ms(1);
  for (int k : {2, 4, 6}) {
    for (double p : {0.05, 0.2, 0.5}) {
      ClassConfig cfg = homogeneous_classes(k, 400.0, 1.0, p);
      for (int horizon = 1; horizon <= 3; ++horizon) {
        const auto plan = plan_operating_point(cfg, tc, horizon);
        std::int64_t best = -1;
        std::vector<std::int64_t> ms(static_cast<std::size_t>(horizon), 0);
        // Walk every M-vector, keeping those that satisfy the frame
        // constraint on the population path they induce.
        std::function<void(int, const PopulationState&, std::int64_t)> walk = [&](int i, const PopulationState& st,
                                                                                  std::int64_t sum) {
          if (i == horizon) {
            best = std::max(best, sum);
            return;
          }
          const auto pm = population_mixture(st, cfg);
          for (std::int64_t m = 0; m <= pm.mixture.total(); ++m) {
            double tcop = 0.0;
            try {
              tcop = expected_tcop(m, pm.mixture, tc).e_tcop_us;
            } catch (const Error&) {
              continue;
            }
            if (tcop + static_cast<double>(m) * tc.t_r.us() > tc.t_frame.us()) continue;
            walk(i + 1, evolve_population(st, m, cfg, tc), sum + m);
          }
        };
        walk(0, initial_population(cfg, tc), 0);
        std::int64_t greedy = 0;
        for (const auto& f : plan.per_frame) greedy += f.m_opt;
        EXPECT_EQ(greedy, best) << "k=" << k << " p=" << p << " I=" << horizon;
      }
    }
  }
}

TEST(OptimizerProperties, PlansAreFeasible) {
  for (int k : {200, 500, 1200}) {
    SearchGrid grid{{0.5, 1.0, 2.0}, {0.001, 0.01, 0.1}, 1};
    const auto plan = optimize(homogeneous_classes(k, 1.0, 1.0, 0.1), kTc, 50, grid);
    EXPECT_GT(plan.alpha_opt, 0.0);
    EXPECT_GT(plan.p_inl_opt, 0.0);
    EXPECT_LE(plan.p_inl_opt, 1.0);
    std::vector<std::int64_t> ms;
    for (const auto& f : plan.per_frame) {
      EXPECT_LE(f.t_cop_opt_us + static_cast<double>(f.m_opt) * kTc.t_r.us(), kTc.t_frame.us());
      ms.push_back(f.m_opt);
    }
    EXPECT_GE(plan.utility, 0.0);
    EXPECT_LE(plan.utility, 1.0);
    EXPECT_DOUBLE_EQ(plan.utility, channel_utility(ms, kTc));
  }
}

TEST(OptimizerProperties, Deterministic) {
  const auto cfg = heterogeneous_classes(300, 1.0, 1.0, 0.1);
  SearchGrid grid{{0.5, 1.0, 3.0}, {0.002, 0.01, 0.05}, 2};
  const auto a = search_grid(cfg, kTc, 30, grid, 1);
  const auto b = search_grid(cfg, kTc, 30, grid, 4);
  EXPECT_EQ(a.best.alpha_opt, b.best.alpha_opt);
  EXPECT_EQ(a.best.p_inl_opt, b.best.p_inl_opt);
  EXPECT_EQ(a.best.utility, b.best.utility);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].utility, b.cells[i].utility);
}

TEST(OptimizerProperties, TiesGoToSmallestCell) {
  // Every Table II cell jams at K = 1200, so all utilities tie at zero.
  const auto s = search_grid(homogeneous_classes(1200, 1.0, 1.0, 0.1), kTc, 10, SearchGrid::table());
  for (const auto& c : s.cells) EXPECT_EQ(c.utility, 0.0);
  EXPECT_EQ(s.best.alpha_opt, 0.5);
  EXPECT_EQ(s.best.p_inl_opt, 0.1);
}

TEST(OptimizerProperties, ArgmaxUnderCommonTimeScaling) {
  SearchGrid grid{{0.5, 1.0, 2.0}, {0.002, 0.005, 0.01, 0.02}, 0};
  const auto cfg = homogeneous_classes(500, 1.0, 1.0, 0.1);
  const auto base = optimize(cfg, kTc, 20, grid);
  TimingConstants scaled = kTc;
  scaled.t_frame = Duration::from_ms(2000);
  scaled.t_r = Duration::from_ms(4);
  ClassConfig cfg2 = cfg;
  cfg2.lambda = cfg.lambda / 2.0;  // same arrivals per frame
  const auto wide = optimize(cfg2, scaled, 20, grid);
  EXPECT_EQ(base.alpha_opt, wide.alpha_opt);
  EXPECT_EQ(base.p_inl_opt, wide.p_inl_opt);
}

TEST(OptimizerErrors, InvalidInputs) {
  EXPECT_THROW(plan_operating_point(homogeneous_classes(10, 1.0, 1.0, 0.1), kTc, 0), InvalidArgument);
  EXPECT_THROW(plan_operating_point(homogeneous_classes(10, 1.0, 0.0, 0.1), kTc, 5), InvalidArgument);
  SearchGrid empty{{}, {0.1}, 0};
  EXPECT_THROW(optimize(homogeneous_classes(10, 1.0, 1.0, 0.1), kTc, 5, empty), InvalidArgument);
}
