#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hymac/analytics.hpp"
#include "hymac/oracles.hpp"
#include "hymac/validation.hpp"

using namespace hymac;

namespace {
const TimingConstants kTc = reference_timing();
}

TEST(ProbNoTransmission, Examples) {
  EXPECT_EQ(prob_no_transmission(ContentionMixture::single(1.0, 1)), 0.0);
  EXPECT_EQ(prob_no_transmission(ContentionMixture::single(0.3, 0)), 1.0);
  EXPECT_EQ(prob_no_transmission(ContentionMixture{}), 1.0);
  EXPECT_NEAR(prob_no_transmission(ContentionMixture::single(0.1, 10)), std::pow(0.9, 10), 1e-15);
}

TEST(ProbSuccessGivenBusy, CertainOutcomes) {
  EXPECT_EQ(prob_success_given_busy(ContentionMixture::single(1.0, 1)), 1.0);
  EXPECT_EQ(prob_success_given_busy(ContentionMixture::single(1.0, 2)), 0.0);
  EXPECT_EQ(prob_collision_given_busy(ContentionMixture::single(1.0, 1)), 0.0);
  EXPECT_EQ(prob_collision_given_busy(ContentionMixture::single(1.0, 2)), 1.0);
}

TEST(ProbSuccessGivenBusy, DegenerateMixture) {
  EXPECT_THROW(prob_success_given_busy(ContentionMixture::single(0.5, 0)), DegenerateMixture);
  EXPECT_THROW(prob_success_given_busy(ContentionMixture{}), DegenerateMixture);
}

TEST(ProbSuccessGivenBusy, MatchesSlotMonteCarlo) {
  const auto mix = ContentionMixture::single(0.1, 10);
  const auto mc = oracle::slot_monte_carlo(mix, 1000000, 42);
  const double se = mc.success_se();
  EXPECT_NEAR(prob_success_given_busy(mix), mc.success_given_busy(), 3 * se);
  EXPECT_NEAR(prob_collision_given_busy(mix), 1.0 - mc.success_given_busy(), 3 * se);
}

TEST(ExpectedCollisions, Examples) {
  EXPECT_EQ(expected_collisions(ContentionMixture::single(1.0, 1)), 0.0);
  EXPECT_THROW(expected_collisions(ContentionMixture::single(1.0, 2)), DivergentExpectation);
}

TEST(ExpectedCollisions, MatchesContentionMonteCarlo) {
  const auto mix = ContentionMixture::single(0.1, 10);
  const auto mc = oracle::collision_monte_carlo(mix, 100000, 9);
  EXPECT_NEAR(expected_collisions(mix), mc.mean, 3 * mc.se);
}

TEST(ExpectedIdle, Examples) {
  EXPECT_EQ(expected_idle(ContentionMixture::single(1.0, 1), 10.0), 0.0);
  EXPECT_NEAR(expected_idle(ContentionMixture::single(0.5, 1), 10.0), 10.0, 1e-12);
  EXPECT_THROW(expected_idle(ContentionMixture{}, 10.0), DegenerateMixture);
}

TEST(ExpectedIdle, MatchesSlotMonteCarlo) {
  const auto mix = ContentionMixture::single(0.1, 10);
  const auto mc = oracle::slot_monte_carlo(mix, 1000000, 5);
  // Idle-run lengths are geometric: sd = sqrt(P0) / (1 - P0) per busy slot.
  const double p0 = std::pow(0.9, 10);
  const double se = std::sqrt(p0) / (1 - p0) / std::sqrt(static_cast<double>(mc.busy));
  EXPECT_NEAR(expected_idle(mix, 10.0), 10.0 * mc.mean_idle_run(), 3 * 10.0 * se);
}

TEST(ExpectedTcop, Examples) {
  const auto zero = expected_tcop(0, ContentionMixture::single(0.1, 10), kTc);
  EXPECT_EQ(zero.e_tcop_us, 0.0);
  const auto one = expected_tcop(1, ContentionMixture::single(1.0, 1), kTc);
  EXPECT_NEAR(one.e_tcop_us, 39.7, 1e-12);
  EXPECT_THROW(expected_tcop(1, ContentionMixture::single(1.0, 2), kTc), DivergentExpectation);
  EXPECT_THROW(expected_tcop(-1, ContentionMixture::single(1.0, 1), kTc), InvalidArgument);
}

TEST(ExpectedTcop, MatchesEventMonteCarlo) {
  const auto mix = ContentionMixture::single(0.01, 500);
  const auto mc = oracle::cop_monte_carlo(50, mix, kTc, 200, 17);
  EXPECT_NEAR(expected_tcop(50, mix, kTc).e_tcop_us, mc.mean_us, 3 * mc.se_us);
}

TEST(ExpectedTcop, LinearInM) {
  const ContentionMixture mix({{0.01, 300}, {0.02, 50}, {0.04, 5}});
  const auto one = expected_tcop(1, mix, kTc);
  for (std::int64_t m : {2, 7, 100, 480}) {
    const auto e = expected_tcop(m, mix, kTc);
    EXPECT_NEAR(e.e_tcop_us, static_cast<double>(m) * one.e_attempt_us, 1e-9 * e.e_tcop_us);
    EXPECT_DOUBLE_EQ(e.e_attempt_us, e.idle_us + e.collision_us + e.success_us);
  }
}

TEST(SuccessShare, Examples) {
  EXPECT_DOUBLE_EQ(success_share(ContentionMixture::single(0.3, 7), 0), 1.0);
  const ContentionMixture twin({{0.2, 4}, {0.2, 4}});
  EXPECT_NEAR(success_share(twin, 0), 0.5, 1e-15);
  EXPECT_NEAR(success_share(twin, 1), 0.5, 1e-15);
  EXPECT_THROW(success_share(twin, 2), InvalidArgument);
}

TEST(SuccessShare, MatchesConditionalMonteCarlo) {
  const ContentionMixture mix({{0.1, 10}, {0.2, 5}});
  const auto mc = oracle::slot_monte_carlo(mix, 1000000, 23);
  const double f = static_cast<double>(mc.lone_by_entry[0]) / static_cast<double>(mc.successes);
  const double se = std::sqrt(f * (1 - f) / static_cast<double>(mc.successes));
  EXPECT_NEAR(success_share(mix, 0), f, 3 * se);
  EXPECT_NEAR(success_share(mix, 1), 1 - f, 3 * se);
}

TEST(ExpectedNewArrivals, Examples) {
  const auto frame = Duration::from_ms(1000);
  EXPECT_EQ(expected_new_arrivals(100, 0.0, frame), 0.0);
  EXPECT_EQ(expected_new_arrivals(0, 1.0, frame), 0.0);
  EXPECT_NEAR(expected_new_arrivals(100, 1.0, frame), oracle::binomial_mean(100, 1 - std::exp(-1.0)), 1e-9);
  EXPECT_NEAR(expected_new_arrivals(100, 1.0, frame), 63.212055882855765, 1e-9);
}

TEST(AsymptoticTcop, Examples) {
  EXPECT_EQ(asymptotic_tcop(0, 1.0, 0.1, 1000, kTc), 0.0);
  EXPECT_THROW(asymptotic_tcop(1, 1.0, 0.6, 1000, kTc), InvalidArgument);
  const double exact = expected_tcop(1, ContentionMixture::single(2 * 0.0001, 10000), kTc).e_tcop_us;
  EXPECT_NEAR(asymptotic_tcop(1, 1.0, 0.0001, 10000, kTc), exact, 0.01 * exact);
}

TEST(AsymptoticTcop, SingleProbabilityFormMatchesExact) {
  for (double l : {10.0, 500.0, 20000.0}) {
    const double exact = expected_tcop(3, ContentionMixture::single(0.002, static_cast<std::int64_t>(l)), kTc).e_tcop_us;
    EXPECT_NEAR(single_probability_tcop(3, 1.0, 0.001, l, kTc), exact, 1e-9 * exact);
  }
}

TEST(AsymptoticTcop, GapToExactShrinksWithPopulation) {
  // x fixed at L x = 2 so both forms stay finite as L grows.
  double prev = 1e300;
  for (double l : {1e2, 1e3, 1e4, 1e5}) {
    const double p = 2.0 / l / 2.0;
    const double a = asymptotic_tcop(1, 1.0, p, l, kTc);
    const double b = single_probability_tcop(1, 1.0, p, l, kTc);
    const double rel = std::abs(a - b) / b;
    EXPECT_LT(rel, prev);
    prev = rel;
  }
}

TEST(TcopHessian, ExamplePointMatchesFiniteDifferences) {
  const auto c = validation::check_hessian(100, 1.0, 0.001, 1e5, kTc);
  EXPECT_TRUE(c.fd_ok) << c.max_rel_fd;
  EXPECT_EQ(c.mm_entry, 0.0);
  EXPECT_EQ(c.asymmetry, 0.0);
  EXPECT_TRUE(c.psd_ok) << c.min_eig_over_trace;
}

TEST(TcopHessian, StructureOnGrid) {
  for (double alpha : validation::hessian_alpha_grid()) {
    for (double p : validation::hessian_p_grid(alpha)) {
      for (double m : {1.0, 100.0, 400.0}) {
        const auto h = tcop_hessian(m, alpha, p, 1e5, kTc);
        EXPECT_EQ(h.scaled(0, 0), 0.0);
        EXPECT_GT(h.scaled(1, 1), 0.0);
        EXPECT_GT(h.scaled(2, 2), 0.0);
        EXPECT_EQ(h.scaled, h.scaled.transpose());
      }
    }
  }
  EXPECT_THROW(tcop_hessian(1, 1.0, 0.5, 1e5, kTc), InvalidArgument);
}

TEST(Properties, ExhaustiveEnumeration) {
  const auto r = validation::enumeration_errors(200, 101, kTc);
  EXPECT_LE(r.max_success, 1e-9);
  EXPECT_LE(r.max_collision, 1e-9);
  EXPECT_LE(r.max_collisions, 1e-9);
  EXPECT_LE(r.max_idle, 1e-9);
}

TEST(Properties, EnumerationRejectsMissingPFactor) {
  const auto r = validation::enumeration_errors(200, 101, kTc, oracle::prob_success_without_p);
  EXPECT_GT(r.max_success, 1e-3);
}

TEST(Properties, Conservation) {
  std::mt19937_64 rng(77);
  for (int s = 0; s < 300; ++s) {
    const auto mix = validation::random_mixture(rng);
    const auto ex = oracle::enumerate(mix);
    EXPECT_NEAR(prob_no_transmission(mix) + prob_single_transmission(mix) + static_cast<double>(ex.p2), 1.0, 1e-12);
    double shares = 0.0;
    for (double v : success_shares(mix)) shares += v;
    EXPECT_NEAR(shares, 1.0, 1e-12);
  }
}

TEST(Properties, LargePopulationsDoNotUnderflow) {
  const ContentionMixture mix({{0.001, 5000}, {0.002, 2000}, {0.004, 500}});
  const auto e = expected_tcop(10, mix, kTc);
  EXPECT_TRUE(std::isfinite(e.e_tcop_us));
  EXPECT_GT(e.e_tcop_us, 0.0);
  const auto jam = ContentionMixture::single(0.1, 1200);
  EXPECT_GT(expected_collisions(jam), 1e40);
  EXPECT_TRUE(std::isfinite(expected_collisions(jam)));
}
