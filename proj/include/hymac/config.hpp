#ifndef HYMAC_CONFIG_HPP
#define HYMAC_CONFIG_HPP

// JSON documents: scenarios, frame plans, and run summaries.
//
// Scenario layout (every section and field optional, defaults shown by
// `--print-config`):
//   timing:   t_frame, t_r in ms; t_req, t_nof, t_anc, t_ack, sifs, bifs,
//             delta_idle in us; p_tx, p_rx, p_idle in W
//   classes:  class_sizes, p_inl, alpha, alpha_escalation
//   arrival:  lambda (packets/s per device)
//   protocol: variant, frames, seeds, csma_p, operating_point, refine_levels
//   sweep:    alpha, p_inl, lambda, k (lists)

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hymac/error.hpp"
#include "hymac/optimizer.hpp"
#include "hymac/report.hpp"
#include "hymac/timing.hpp"

namespace hymac {

using json = nlohmann::json;

inline constexpr int kDocumentSchemaVersion = 1;

struct SweepAxes {
  std::vector<double> alpha;
  std::vector<double> p_inl;
  std::vector<double> lambda;
  std::vector<int> k;

  bool empty() const { return alpha.empty() && p_inl.empty() && lambda.empty() && k.empty(); }
  bool operator==(const SweepAxes&) const = default;
};

struct Scenario {
  std::string name = "default";
  TimingConstants timing;
  ClassConfig classes;
  std::string variant = "hybrid";  // hybrid | csma | tdma | all
  int frames = 200;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double csma_p = 0.0;                        // <= 0: use p_inl
  std::string operating_point = "optimize";   // optimize | fixed
  int refine_levels = 0;
  SweepAxes sweep;

  bool operator==(const Scenario&) const = default;

  std::vector<Variant> variants() const {
    if (variant == "all") return {Variant::hybrid, Variant::csma, Variant::tdma};
    return {parse_variant(variant)};
  }

  void validate() const {
    try {
      timing.validate();
      classes.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    if (variant != "all") parse_variant(variant);
    if (frames < 1) throw ConfigError("protocol.frames must be >= 1");
    if (seeds.empty()) throw ConfigError("protocol.seeds must not be empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw ConfigError("protocol.seeds must be distinct");
    }
    if (csma_p > 1.0) throw ConfigError("protocol.csma_p must lie in (0, 1]");
    if (operating_point != "optimize" && operating_point != "fixed") {
      throw ConfigError("protocol.operating_point must be 'optimize' or 'fixed'");
    }
    if (refine_levels < 0) throw ConfigError("protocol.refine_levels must be >= 0");
    for (double a : sweep.alpha) {
      if (!(a > 0.0)) throw ConfigError("sweep.alpha values must be positive");
    }
    for (double p : sweep.p_inl) {
      if (!(p > 0.0 && p <= 1.0)) throw ConfigError("sweep.p_inl values must lie in (0, 1]");
    }
    for (double l : sweep.lambda) {
      if (!(l >= 0.0)) throw ConfigError("sweep.lambda values must be non-negative");
    }
    for (int k : sweep.k) {
      if (k < 1) throw ConfigError("sweep.k values must be >= 1");
    }
  }
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline void read_ms(const json& j, const char* key, Duration& out, const std::string& where) {
  double v = out.ms();
  read(j, key, v, where);
  out = Duration::from_ms(v);
}

inline void read_us(const json& j, const char* key, Duration& out, const std::string& where) {
  double v = out.us();
  read(j, key, v, where);
  out = Duration::from_us(v);
}

}  // namespace detail

inline json timing_to_json(const TimingConstants& t) {
  return json{{"t_frame", t.t_frame.ms()}, {"t_r", t.t_r.ms()},      {"t_req", t.t_req.us()},
              {"t_nof", t.t_nof.us()},     {"t_anc", t.t_anc.us()},  {"t_ack", t.t_ack.us()},
              {"sifs", t.sifs.us()},       {"bifs", t.bifs.us()},    {"delta_idle", t.delta_idle.us()},
              {"p_tx", t.p_tx},            {"p_rx", t.p_rx},         {"p_idle", t.p_idle}};
}

inline TimingConstants timing_from_json(const json& j) {
  const std::string w = "timing";
  detail::reject_unknown(j, {"t_frame", "t_r", "t_req", "t_nof", "t_anc", "t_ack", "sifs", "bifs", "delta_idle",
                             "p_tx", "p_rx", "p_idle"},
                         w);
  TimingConstants t;
  detail::read_ms(j, "t_frame", t.t_frame, w);
  detail::read_ms(j, "t_r", t.t_r, w);
  detail::read_us(j, "t_req", t.t_req, w);
  detail::read_us(j, "t_nof", t.t_nof, w);
  detail::read_us(j, "t_anc", t.t_anc, w);
  detail::read_us(j, "t_ack", t.t_ack, w);
  detail::read_us(j, "sifs", t.sifs, w);
  detail::read_us(j, "bifs", t.bifs, w);
  detail::read_us(j, "delta_idle", t.delta_idle, w);
  detail::read(j, "p_tx", t.p_tx, w);
  detail::read(j, "p_rx", t.p_rx, w);
  detail::read(j, "p_idle", t.p_idle, w);
  return t;
}

inline json classes_to_json(const ClassConfig& c) {
  json j{{"class_sizes", c.class_sizes}, {"p_inl", c.p_inl}, {"alpha", c.alpha}};
  j["alpha_escalation"] = c.alpha_escalation < 0.0 ? json(nullptr) : json(c.alpha_escalation);
  return j;
}

inline void classes_from_json(const json& j, ClassConfig& c) {
  const std::string w = "classes";
  detail::reject_unknown(j, {"class_sizes", "p_inl", "alpha", "alpha_escalation"}, w);
  detail::read(j, "class_sizes", c.class_sizes, w);
  detail::read(j, "p_inl", c.p_inl, w);
  detail::read(j, "alpha", c.alpha, w);
  if (j.contains("alpha_escalation")) {
    if (j.at("alpha_escalation").is_null()) {
      c.alpha_escalation = -1.0;
    } else {
      detail::read(j, "alpha_escalation", c.alpha_escalation, w);
      if (!(c.alpha_escalation > 0.0)) throw ConfigError("classes.alpha_escalation must be positive or null");
    }
  }
}

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kDocumentSchemaVersion;
  j["name"] = s.name;
  j["timing"] = timing_to_json(s.timing);
  j["classes"] = classes_to_json(s.classes);
  j["arrival"] = json{{"lambda", s.classes.lambda}};
  j["protocol"] = json{{"variant", s.variant},
                       {"frames", s.frames},
                       {"seeds", s.seeds},
                       {"csma_p", s.csma_p > 0.0 ? json(s.csma_p) : json(nullptr)},
                       {"operating_point", s.operating_point},
                       {"refine_levels", s.refine_levels}};
  j["sweep"] = json{{"alpha", s.sweep.alpha}, {"p_inl", s.sweep.p_inl}, {"lambda", s.sweep.lambda}, {"k", s.sweep.k}};
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  detail::reject_unknown(j, {"schema_version", "name", "timing", "classes", "arrival", "protocol", "sweep"},
                         "scenario");
  Scenario s;
  if (j.contains("schema_version") && j.at("schema_version") != kDocumentSchemaVersion) {
    throw ConfigError("scenario: unsupported schema_version");
  }
  detail::read(j, "name", s.name, "scenario");
  if (j.contains("timing")) s.timing = timing_from_json(j.at("timing"));
  if (j.contains("classes")) classes_from_json(j.at("classes"), s.classes);
  if (j.contains("arrival")) {
    const auto& a = j.at("arrival");
    detail::reject_unknown(a, {"lambda"}, "arrival");
    detail::read(a, "lambda", s.classes.lambda, "arrival");
  }
  if (j.contains("protocol")) {
    const auto& p = j.at("protocol");
    const std::string w = "protocol";
    detail::reject_unknown(p, {"variant", "frames", "seeds", "csma_p", "operating_point", "refine_levels"}, w);
    detail::read(p, "variant", s.variant, w);
    detail::read(p, "frames", s.frames, w);
    detail::read(p, "seeds", s.seeds, w);
    if (p.contains("csma_p") && !p.at("csma_p").is_null()) {
      detail::read(p, "csma_p", s.csma_p, w);
      if (!(s.csma_p > 0.0)) throw ConfigError("protocol.csma_p must lie in (0, 1]");
    }
    detail::read(p, "operating_point", s.operating_point, w);
    detail::read(p, "refine_levels", s.refine_levels, w);
  }
  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    detail::reject_unknown(sw, {"alpha", "p_inl", "lambda", "k"}, "sweep");
    detail::read(sw, "alpha", s.sweep.alpha, "sweep");
    detail::read(sw, "p_inl", s.sweep.p_inl, "sweep");
    detail::read(sw, "lambda", s.sweep.lambda, "sweep");
    detail::read(sw, "k", s.sweep.k, "sweep");
  }
  s.validate();
  return s;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

inline json plan_to_json(const FramePlan& p) {
  json frames = json::array();
  for (const auto& f : p.per_frame) {
    frames.push_back(json{{"frame", f.frame},
                          {"m_opt", f.m_opt},
                          {"t_cop_opt_us", f.t_cop_opt_us},
                          {"predicted_utility", f.predicted_utility}});
  }
  return json{{"schema_version", kDocumentSchemaVersion},
              {"alpha_opt", p.alpha_opt},
              {"p_inl_opt", p.p_inl_opt},
              {"utility", p.utility},
              {"frames", frames}};
}

/// Reads a plan document. Predicted populations are not stored.
inline FramePlan plan_from_json(const json& j) {
  detail::reject_unknown(j, {"schema_version", "alpha_opt", "p_inl_opt", "utility", "frames"}, "plan");
  FramePlan p;
  detail::read(j, "alpha_opt", p.alpha_opt, "plan");
  detail::read(j, "p_inl_opt", p.p_inl_opt, "plan");
  detail::read(j, "utility", p.utility, "plan");
  if (!j.contains("frames") || !j.at("frames").is_array()) throw ConfigError("plan: 'frames' array required");
  int expect = 1;
  for (const auto& f : j.at("frames")) {
    detail::reject_unknown(f, {"frame", "m_opt", "t_cop_opt_us", "predicted_utility"}, "plan.frames");
    FrameTarget t;
    detail::read(f, "frame", t.frame, "plan.frames");
    detail::read(f, "m_opt", t.m_opt, "plan.frames");
    detail::read(f, "t_cop_opt_us", t.t_cop_opt_us, "plan.frames");
    detail::read(f, "predicted_utility", t.predicted_utility, "plan.frames");
    if (t.frame != expect++) throw ConfigError("plan: frames must be numbered 1, 2, ...");
    if (t.m_opt < 0 || !(t.t_cop_opt_us >= 0.0)) throw ConfigError("plan: negative threshold");
    p.per_frame.push_back(std::move(t));
  }
  return p;
}

inline FramePlan load_plan(const std::string& path) { return plan_from_json(read_json_file(path)); }

/// Writes `doc` with a trailing newline; throws Error on I/O failure.
inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace hymac

#endif  // HYMAC_CONFIG_HPP
