#include <gtest/gtest.h>

#include <filesystem>

#include "hymac/config.hpp"
#include "hymac/optimizer.hpp"

using namespace hymac;

TEST(Scenario, DefaultsRoundTrip) {
  const Scenario s;
  EXPECT_EQ(s.frames, 200);
  EXPECT_EQ(s.seeds.size(), 10u);
  EXPECT_EQ(scenario_from_json(scenario_to_json(s)), s);
}

TEST(Scenario, CustomRoundTrip) {
  Scenario s;
  s.name = "hetero";
  s.classes = heterogeneous_classes(800, 2.0, 0.7, 0.003);
  s.classes.alpha_escalation = 0.4;
  s.timing.delta_idle = Duration::from_us(9);
  s.variant = "all";
  s.frames = 50;
  s.seeds = {3, 9, 27};
  s.csma_p = 0.002;
  s.operating_point = "fixed";
  s.refine_levels = 2;
  s.sweep.alpha = {0.5, 1.0};
  s.sweep.k = {500, 800};
  const auto back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.variants().size(), 3u);
}

TEST(Scenario, PartialDocumentKeepsDefaults) {
  const auto s = scenario_from_json(json::parse(R"({"arrival": {"lambda": 2.5}, "protocol": {"frames": 7}})"));
  EXPECT_EQ(s.classes.lambda, 2.5);
  EXPECT_EQ(s.frames, 7);
  EXPECT_EQ(s.timing, reference_timing());
  EXPECT_EQ(s.classes.class_sizes, std::vector<int>{1200});
}

TEST(Scenario, RejectsUnknownFields) {
  EXPECT_THROW(scenario_from_json(json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"frame": 3}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"timing": {"t_frame": 1000, "tr": 2}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"sweep": {"beta": [1]}})")), ConfigError);
}

TEST(Scenario, RejectsInvalidValues) {
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"seeds": [1, 2, 1]}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"seeds": []}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"variant": "aloha"}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"frames": 0}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"classes": {"p_inl": 1.5}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"arrival": {"lambda": -1}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"protocol": {"frames": "ten"}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"sweep": {"p_inl": [0]}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"schema_version": 99})")), ConfigError);
}

TEST(Scenario, MissingFile) { EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError); }

TEST(Plan, RoundTripThroughFile) {
  const auto cfg = homogeneous_classes(300, 1.0, 1.0, 0.005);
  const auto plan = plan_operating_point(cfg, reference_timing(), 12);
  const auto path = (std::filesystem::temp_directory_path() / "hymac_plan_test.json").string();
  write_text_file(path, plan_to_json(plan).dump(2) + "\n");
  const auto back = load_plan(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.alpha_opt, plan.alpha_opt);
  EXPECT_EQ(back.p_inl_opt, plan.p_inl_opt);
  EXPECT_EQ(back.utility, plan.utility);
  ASSERT_EQ(back.horizon(), plan.horizon());
  for (int i = 0; i < plan.horizon(); ++i) {
    EXPECT_EQ(back.per_frame[i].m_opt, plan.per_frame[i].m_opt);
    EXPECT_EQ(back.per_frame[i].t_cop_opt_us, plan.per_frame[i].t_cop_opt_us);
  }
}

TEST(Plan, RejectsBadDocuments) {
  EXPECT_THROW(plan_from_json(json::parse(R"({"alpha_opt": 1})")), ConfigError);
  EXPECT_THROW(plan_from_json(json::parse(R"({"frames": [{"frame": 2, "m_opt": 1, "t_cop_opt_us": 1}]})")),
               ConfigError);
  EXPECT_THROW(plan_from_json(json::parse(R"({"frames": [{"frame": 1, "m_opt": -1, "t_cop_opt_us": 1}]})")),
               ConfigError);
  EXPECT_THROW(plan_from_json(json::parse(R"({"frames": [], "extra": 0})")), ConfigError);
}
