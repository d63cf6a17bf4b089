// hymac: command-line front end.
//
//   hymac run      --scenario s.json [--variant all] [--out dir] ...
//   hymac sweep    --scenario s.json --sweep alpha=0.5,1 --sweep p_inl=0.1,0.2 [--simulate]
//   hymac optimize --scenario s.json [--out dir]
//   hymac validate
//
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 runtime.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hymac/hymac.hpp"

namespace fs = std::filesystem;
using namespace hymac;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string scenario;
  std::string variant;
  std::optional<int> frames;
  std::string seeds;
  std::vector<std::string> sweep;
  std::string out;
  std::string plan;
  bool trace = false;
  bool print_config = false;
  bool simulate = false;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> p_inl;
  std::optional<int> k;
  std::optional<int> refine;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--scenario", f.scenario, "Scenario JSON file (defaults apply when omitted)");
  app->add_option("--variant", f.variant, "hybrid | csma | tdma | all");
  app->add_option("--frames", f.frames, "Frames per run (I)");
  app->add_option("--seeds", f.seeds, "Seed list, e.g. 1,2,3 or 1-10");
  app->add_option("--lambda", f.lambda, "Arrival rate per device (packets/s)");
  app->add_option("--alpha", f.alpha, "Incremental indicator alpha");
  app->add_option("--p-inl", f.p_inl, "Initial contending probability");
  app->add_option("--k", f.k, "Total device count; resizes class 1");
  app->add_option("--refine", f.refine, "Local refinement levels of the optimizer grid");
  app->add_option("--out", f.out, "Output directory");
  app->add_flag("--print-config", f.print_config, "Print the resolved scenario and exit");
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("seed range '" + item + "' is reversed");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse seed '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_list(const std::string& axis, const std::string& values) {
  std::vector<double> out;
  std::stringstream ss(values);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("sweep axis '" + axis + "': cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("sweep axis '" + axis + "' has no values");
  return out;
}

void apply_sweep(const std::vector<std::string>& specs, SweepAxes& axes) {
  for (const auto& spec : specs) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ';')) {
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ConfigError("sweep '" + part + "': expected axis=v1,v2,...");
      const std::string axis = part.substr(0, eq);
      const auto values = parse_list(axis, part.substr(eq + 1));
      if (axis == "alpha") {
        axes.alpha = values;
      } else if (axis == "p_inl") {
        axes.p_inl = values;
      } else if (axis == "lambda") {
        axes.lambda = values;
      } else if (axis == "k" || axis == "K") {
        axes.k.clear();
        for (double v : values) {
          if (v != std::floor(v)) throw ConfigError("sweep axis 'k' needs integers");
          axes.k.push_back(static_cast<int>(v));
        }
      } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
      }
    }
  }
}

void resize_devices(ClassConfig& c, int k) {
  int others = 0;
  for (std::size_t q = 1; q < c.class_sizes.size(); ++q) others += c.class_sizes[q];
  if (k - others < 0) throw ConfigError("--k is smaller than the higher classes");
  c.class_sizes[0] = k - others;
}

Scenario resolve(const Flags& f) {
  Scenario s = f.scenario.empty() ? Scenario{} : load_scenario(f.scenario);
  if (!f.variant.empty()) s.variant = f.variant;
  if (f.frames) s.frames = *f.frames;
  if (!f.seeds.empty()) s.seeds = parse_seeds(f.seeds);
  if (f.lambda) s.classes.lambda = *f.lambda;
  if (f.alpha) s.classes.alpha = *f.alpha;
  if (f.p_inl) s.classes.p_inl = *f.p_inl;
  if (f.k) resize_devices(s.classes, *f.k);
  if (f.refine) s.refine_levels = *f.refine;
  if (f.alpha || f.p_inl) s.operating_point = "fixed";
  apply_sweep(f.sweep, s.sweep);
  s.validate();
  return s;
}

fs::path out_dir(const Flags& f) {
  const fs::path dir = f.out.empty() ? fs::path("out") : fs::path(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

SearchGrid grid_of(const Scenario& s) {
  SearchGrid g = SearchGrid::table();
  if (!s.sweep.alpha.empty()) g.alphas = s.sweep.alpha;
  if (!s.sweep.p_inl.empty()) g.p_inls = s.sweep.p_inl;
  g.refine_levels = s.refine_levels;
  return g;
}

/// Plan for the scenario: from file, at the configured point, or optimized.
FramePlan make_plan(const Scenario& s, const Flags& f) {
  if (!f.plan.empty()) {
    FramePlan p = load_plan(f.plan);
    if (p.horizon() != s.frames) {
      throw ConfigError("plan covers " + std::to_string(p.horizon()) + " frames, scenario asks for " +
                        std::to_string(s.frames));
    }
    return p;
  }
  if (s.operating_point == "fixed") return plan_operating_point(s.classes, s.timing, s.frames);
  return optimize(s.classes, s.timing, s.frames, grid_of(s), default_workers());
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= s.n;
  if (s.n > 1) {
    double q = 0.0;
    for (double x : v) q += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(q / (s.n - 1));
  }
  return s;
}

json optional_mean(const std::vector<SimReport>& reps, double (*metric)(const SimReport&)) {
  std::vector<double> v;
  for (const auto& r : reps) {
    try {
      v.push_back(metric(r));
    } catch (const UndefinedRatio&) {
    }
  }
  if (v.empty()) return nullptr;
  return stats_of(v).mean;
}

json summarize(const std::vector<SimReport>& reps, const TimingConstants& tc) {
  std::vector<double> util;
  std::vector<double> energy;
  for (const auto& r : reps) {
    util.push_back(channel_utility_of(r, tc));
    energy.push_back(mean_energy(r).e_frame);
  }
  const auto u = stats_of(util);
  return json{{"utility_mean", u.mean},
              {"utility_std", u.stddev},
              {"utility_per_seed", util},
              {"drop_ratio_mean", optional_mean(reps, static_cast<double (*)(const SimReport&)>(drop_ratio))},
              {"delay_frames_mean", optional_mean(reps, static_cast<double (*)(const SimReport&)>(avg_delay))},
              {"energy_per_frame_J", stats_of(energy).mean}};
}

std::string dump(const json& j) {
  // Round-trip precision for every double.
  return j.dump(2) + "\n";
}

int cmd_run(const Flags& f) {
  const Scenario s = resolve(f);
  if (f.print_config) {
    std::cout << dump(scenario_to_json(s));
    return 0;
  }
  const fs::path dir = out_dir(f);
  const auto workers = default_workers();
  json summary{{"schema_version", kDocumentSchemaVersion}, {"scenario", s.name}, {"frames", s.frames},
               {"seeds", s.seeds}};
  json variants = json::object();
  SimOptions opt;
  opt.record_events = f.trace;

  for (Variant v : s.variants()) {
    FramePlan plan;
    ClassConfig cfg = s.classes;
    if (v == Variant::hybrid) {
      plan = make_plan(s, f);
      cfg = with_operating_point(cfg, plan);
      write_text_file((dir / "plan.json").string(), dump(plan_to_json(plan)));
      summary["operating_point"] =
          json{{"alpha", plan.alpha_opt}, {"p_inl", plan.p_inl_opt}, {"analytic_utility", plan.utility}};
    }
    const double csma_p = s.csma_p > 0.0 ? s.csma_p : s.classes.p_inl;
    const auto reps = simulate_seeds(v, cfg, s.timing, plan, s.frames, s.seeds, workers, csma_p, opt);
    for (const auto& r : reps) {
      const std::string tag = std::string(to_string(v)) + "_seed" + std::to_string(r.seed);
      std::ostringstream frames, devices;
      write_frame_csv(frames, r, s.timing);
      write_device_csv(devices, r);
      write_text_file((dir / ("frames_" + tag + ".csv")).string(), frames.str());
      write_text_file((dir / ("devices_" + tag + ".csv")).string(), devices.str());
      if (f.trace) {
        std::ostringstream trace;
        write_trace_csv(trace, r);
        write_text_file((dir / ("trace_" + tag + ".csv")).string(), trace.str());
      }
    }
    variants[std::string(to_string(v))] = summarize(reps, s.timing);
    if (v == Variant::csma) variants["csma"]["p"] = csma_p;
  }
  summary["variants"] = variants;
  write_text_file((dir / "summary.json").string(), dump(summary));
  std::cout << dump(summary);
  return 0;
}

int cmd_sweep(const Flags& f) {
  const Scenario s = resolve(f);
  if (f.print_config) {
    std::cout << dump(scenario_to_json(s));
    return 0;
  }
  if (s.sweep.empty()) throw ConfigError("sweep: no sweep axes given (scenario 'sweep' section or --sweep)");
  const fs::path dir = out_dir(f);
  const auto workers = default_workers();

  const std::vector<int> ks = s.sweep.k.empty() ? std::vector<int>{s.classes.device_count()} : s.sweep.k;
  const std::vector<double> lambdas = s.sweep.lambda.empty() ? std::vector<double>{s.classes.lambda} : s.sweep.lambda;
  const bool grid_axes = !s.sweep.alpha.empty() || !s.sweep.p_inl.empty();
  const std::vector<double> alphas = s.sweep.alpha.empty() ? std::vector<double>{s.classes.alpha} : s.sweep.alpha;
  const std::vector<double> p_inls = s.sweep.p_inl.empty() ? std::vector<double>{s.classes.p_inl} : s.sweep.p_inl;

  std::ostringstream csv;
  csv.precision(12);
  write_schema_line(csv);
  csv << "variant,K,lambda,alpha,p_inl,analytic_utility,sim_utility_mean,sim_utility_std,drop_ratio_mean,"
         "energy_per_frame_J\n";

  auto sim_columns = [&](Variant v, const ClassConfig& cfg, const FramePlan& plan) {
    std::ostringstream os;
    os.precision(12);
    if (!f.simulate) return std::string(",,,");
    const double csma_p = s.csma_p > 0.0 ? s.csma_p : cfg.p_inl;
    const auto reps = simulate_seeds(v, cfg, s.timing, plan, s.frames, s.seeds, workers, csma_p);
    const json sum = summarize(reps, s.timing);
    os << sum["utility_mean"].get<double>() << ',' << sum["utility_std"].get<double>() << ',';
    if (!sum["drop_ratio_mean"].is_null()) os << sum["drop_ratio_mean"].get<double>();
    os << ',' << sum["energy_per_frame_J"].get<double>();
    return os.str();
  };

  for (int k : ks) {
    for (double lambda : lambdas) {
      ClassConfig base = s.classes;
      base.lambda = lambda;
      resize_devices(base, k);
      for (Variant v : s.variants()) {
        if (v != Variant::hybrid) {
          csv << to_string(v) << ',' << k << ',' << lambda << ",,,," << sim_columns(v, base, FramePlan{}) << '\n';
          continue;
        }
        if (grid_axes || s.operating_point == "fixed") {
          SearchGrid g{alphas, p_inls, 0};
          const auto gs = search_grid(base, s.timing, s.frames, g, workers);
          for (const auto& cell : gs.cells) {
            ClassConfig cfg = base;
            cfg.alpha = cell.alpha;
            cfg.p_inl = cell.p_inl;
            const FramePlan plan = f.simulate ? plan_operating_point(cfg, s.timing, s.frames) : FramePlan{};
            csv << "hybrid," << k << ',' << lambda << ',' << cell.alpha << ',' << cell.p_inl << ',' << cell.utility
                << ',' << sim_columns(v, cfg, plan) << '\n';
          }
        } else {
          const FramePlan plan = optimize(base, s.timing, s.frames, grid_of(s), workers);
          const ClassConfig cfg = with_operating_point(base, plan);
          csv << "hybrid," << k << ',' << lambda << ',' << plan.alpha_opt << ',' << plan.p_inl_opt << ','
              << plan.utility << ',' << sim_columns(v, cfg, plan) << '\n';
        }
      }
    }
  }
  write_text_file((dir / "sweep.csv").string(), csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_optimize(const Flags& f) {
  const Scenario s = resolve(f);
  if (f.print_config) {
    std::cout << dump(scenario_to_json(s));
    return 0;
  }
  const FramePlan plan = s.operating_point == "fixed" && s.sweep.alpha.empty() && s.sweep.p_inl.empty()
                             ? plan_operating_point(s.classes, s.timing, s.frames)
                             : optimize(s.classes, s.timing, s.frames, grid_of(s), default_workers());
  const std::string doc = dump(plan_to_json(plan));
  if (!f.out.empty()) write_text_file((out_dir(f) / "plan.json").string(), doc);
  std::cout << std::setprecision(10) << "alpha_opt " << plan.alpha_opt << "\np_inl_opt " << plan.p_inl_opt
            << "\nutility " << plan.utility << '\n';
  return 0;
}

int cmd_validate() {
  const auto results = validation::run_all();
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  [" << r.detail << "]\n";
    all = all && r.pass;
  }
  std::cout << (all ? "all properties pass\n" : "some properties failed\n");
  return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid contention/reservation MAC: optimizer, simulator and baselines"};
  app.require_subcommand(0, 1);
  Flags run_flags, sweep_flags, opt_flags;
  bool validate_flag = false;
  app.add_flag("--validate", validate_flag, "Run the property suites (same as the validate command)");

  auto* run = app.add_subcommand("run", "Optimize (or load --plan) and simulate each variant and seed");
  add_common(run, run_flags);
  run->add_option("--plan", run_flags.plan, "Plan JSON from 'optimize' instead of running the optimizer");
  run->add_flag("--trace", run_flags.trace, "Also write per-frame contention event logs");

  auto* sweep = app.add_subcommand("sweep", "Grid over alpha, p_inl, lambda and K");
  add_common(sweep, sweep_flags);
  sweep->add_option("--sweep", sweep_flags.sweep, "axis=v1,v2,... (alpha, p_inl, lambda, k); repeatable");
  sweep->add_flag("--simulate", sweep_flags.simulate, "Also simulate every cell over the seeds");

  auto* opt = app.add_subcommand("optimize", "Write the frame plan of the best operating point");
  add_common(opt, opt_flags);
  opt->add_option("--sweep", opt_flags.sweep, "Override the search grid: alpha=...;p_inl=...");

  auto* validate = app.add_subcommand("validate", "Run the property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (validate_flag || validate->parsed()) return cmd_validate();
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
    if (opt->parsed()) return cmd_optimize(opt_flags);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
