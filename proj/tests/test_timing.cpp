#include <gtest/gtest.h>

#include "hymac/config.hpp"
#include "hymac/timing.hpp"

using namespace hymac;

TEST(SlotDurations, ReferenceConstants) {
  const auto s = slot_durations(reference_timing());
  // 22.2 + 7.5 and 22.2 + 2.5 + 7.5 + 7.5, in ns.
  EXPECT_EQ(s.collision.ns(), 29700);
  EXPECT_EQ(s.success.ns(), 39700);
  EXPECT_EQ(s.idle.ns(), 10000);
}

TEST(SlotDurations, ZeroSpacingsPassIdleThrough) {
  TimingConstants tc;
  tc.t_req = tc.sifs = tc.t_ack = tc.bifs = Duration::from_ns(0);
  tc.delta_idle = Duration::from_us(3);
  const auto s = slot_durations(tc);
  EXPECT_EQ(s.idle, Duration::from_us(3));
  EXPECT_EQ(s.collision.ns(), 0);
  EXPECT_EQ(s.success.ns(), 0);
}

TEST(SlotDurations, HandValues) {
  TimingConstants tc;
  tc.t_req = Duration::from_us(10);
  tc.bifs = Duration::from_us(5);
  tc.sifs = Duration::from_us(1);
  tc.t_ack = Duration::from_us(2);
  const auto s = slot_durations(tc);
  EXPECT_EQ(s.collision, Duration::from_us(15));
  EXPECT_EQ(s.success, Duration::from_us(18));
}

TEST(SlotDurations, SuccessLongerThanCollisionWhenAckPresent) {
  for (double ack : {0.5, 1.0, 7.5, 100.0}) {
    TimingConstants tc;
    tc.t_ack = Duration::from_us(ack);
    const auto s = slot_durations(tc);
    EXPECT_GT(s.success, s.collision);
  }
}

TEST(Duration, ReferenceValuesAreExact) {
  EXPECT_EQ(Duration::from_us(22.2).ns(), 22200);
  EXPECT_EQ(Duration::from_ms(2).ns(), 2000000);
  EXPECT_EQ((Duration::from_us(22.2) + Duration::from_us(7.5)).ns(), 29700);
  EXPECT_DOUBLE_EQ(Duration::from_ms(1000).seconds(), 1.0);
}

TEST(TimingConstants, ValidateRejectsBadValues) {
  EXPECT_NO_THROW(reference_timing().validate());
  TimingConstants tc;
  tc.t_r = tc.t_frame;
  EXPECT_THROW(tc.validate(), InvalidArgument);
  tc = TimingConstants{};
  tc.delta_idle = Duration::from_ns(0);
  EXPECT_THROW(tc.validate(), InvalidArgument);
  tc = TimingConstants{};
  tc.p_idle = 0.0;
  EXPECT_THROW(tc.validate(), InvalidArgument);
  tc = TimingConstants{};
  tc.t_frame = Duration::from_us(30);
  tc.t_r = Duration::from_us(1);
  EXPECT_THROW(tc.validate(), InvalidArgument);
}

TEST(ClassConfig, ValidateRejectsBadValues) {
  ClassConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.device_count(), 1200);
  c.p_inl = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ClassConfig{};
  c.p_inl = 1.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ClassConfig{};
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ClassConfig{};
  c.lambda = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = ClassConfig{};
  c.class_sizes = {};
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(ClassConfig, HeterogeneousLayout) {
  const auto c = heterogeneous_classes(1200, 1.0, 1.0, 0.1);
  ASSERT_EQ(c.q_count(), 3);
  EXPECT_EQ(c.class_sizes[0], 1180);
  EXPECT_EQ(c.class_sizes[1], 10);
  EXPECT_EQ(c.class_sizes[2], 10);
  EXPECT_EQ(c.device_count(), 1200);
}

TEST(Serialization, TimingRoundTripIsBitIdentical) {
  TimingConstants tc;
  tc.t_req = Duration::from_us(22.2);
  tc.delta_idle = Duration::from_us(12.345);
  tc.p_tx = 1.0 / 3.0;
  const auto back = timing_from_json(json::parse(timing_to_json(tc).dump()));
  EXPECT_EQ(back, tc);
}

TEST(Serialization, ClassesRoundTripIsBitIdentical) {
  ClassConfig c = heterogeneous_classes(800, 0.7, 0.3, 0.123456789);
  c.alpha_escalation = 0.25;
  ClassConfig back;
  classes_from_json(json::parse(classes_to_json(c).dump()), back);
  back.lambda = c.lambda;  // lambda lives in the arrival section
  EXPECT_EQ(back, c);
}
