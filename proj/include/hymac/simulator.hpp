#ifndef HYMAC_SIMULATOR_HPP
#define HYMAC_SIMULATOR_HPP

// Frame-by-frame simulation of the hybrid protocol and the two baselines.
//
// Frame 0 only collects arrivals. In every later frame the devices holding a
// packet at the frame start contend (hybrid, contention-only baseline) or
// wait for their owned slot (slotted baseline). Packets arriving during a
// frame contend from the next frame on. An arrival into a full buffer
// replaces the buffered packet and counts one drop.
//
// Arrivals and contention outcomes come from two policy objects so tests
// can script either one. Arrivals and contention use separate RNG streams
// derived from the seed, so all variants see the same traffic for a seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hymac/error.hpp"
#include "hymac/metrics.hpp"
#include "hymac/optimizer.hpp"
#include "hymac/parallel.hpp"
#include "hymac/priority.hpp"
#include "hymac/report.hpp"
#include "hymac/timing.hpp"

namespace hymac {

using Rng = std::mt19937_64;

/// Devices sharing one contending probability. Device indices are 0-based.
struct ContentionGroup {
  double p = 0.0;
  std::vector<int> devices;
};

/// Outcome of one busy period: `idle_slots` idle slots followed by a slot
/// with `transmitters` requests. transmitters == 0 means the channel stays
/// idle for good (no busy slot follows).
struct SlotDraw {
  std::int64_t idle_slots = 0;
  int transmitters = 0;
  int winner = -1;        // device index when transmitters == 1
  int winner_group = -1;  // position of the winner in the groups
  int winner_slot = -1;
};

inline constexpr std::int64_t kIdleForever = std::numeric_limits<std::int64_t>::max() / 4;

/// Every contender transmits independently with its group's probability in
/// every slot. Draws the idle run in one step (geometric), then the busy
/// slot conditioned on being busy, which has the same law as slot-by-slot
/// Bernoulli trials.
class BinomialContention {
 public:
  SlotDraw next(int /*frame*/, std::span<const ContentionGroup> groups, Rng& rng) {
    SlotDraw out;
    const std::size_t g = groups.size();
    log_a0_.assign(g, 0.0);
    double log_p0 = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < g; ++i) {
      const auto n = static_cast<std::int64_t>(groups[i].devices.size());
      if (n == 0) continue;
      any = true;
      log_a0_[i] = groups[i].p >= 1.0 ? -std::numeric_limits<double>::infinity()
                                      : static_cast<double>(n) * std::log1p(-groups[i].p);
      log_p0 += log_a0_[i];
    }
    if (!any) {
      out.idle_slots = kIdleForever;
      return out;
    }
    const double busy = -std::expm1(log_p0);
    if (busy < 1.0) {
      if (!(busy > 0.0)) {
        out.idle_slots = kIdleForever;
        return out;
      }
      std::geometric_distribution<std::int64_t> idle(busy);
      out.idle_slots = idle(rng);
    }

    // First group with a transmitter, given at least one transmits in it or
    // a later group: P = (1 - a0_i) / (1 - prod_{j >= i} a0_j).
    suffix_.assign(g + 1, 0.0);
    for (std::size_t i = g; i-- > 0;) suffix_[i] = suffix_[i + 1] + log_a0_[i];
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t first = g;
    for (std::size_t i = 0; i < g; ++i) {
      if (groups[i].devices.empty()) continue;
      const double pi = -std::expm1(log_a0_[i]);
      const double rest = -std::expm1(suffix_[i]);
      if (pi >= rest || unit(rng) * rest < pi) {
        first = i;
        break;
      }
    }
    if (first == g) throw Error("contention draw: no busy group selected");

    // Inside that group: first transmitter index is a truncated geometric,
    // the devices after it transmit independently.
    const auto& grp = groups[first];
    const auto n = static_cast<std::int64_t>(grp.devices.size());
    std::int64_t j = 0;
    if (grp.p < 1.0) {
      const double u = unit(rng);
      const double tail = -std::expm1(log_a0_[first]);
      j = static_cast<std::int64_t>(std::floor(std::log1p(-u * tail) / std::log1p(-grp.p)));
      j = std::clamp<std::int64_t>(j, 0, n - 1);
    }
    std::int64_t count = 1;
    if (n - j - 1 > 0) count += binomial(n - j - 1, grp.p, rng);
    for (std::size_t i = first + 1; i < g; ++i) {
      if (!groups[i].devices.empty()) {
        count += binomial(static_cast<std::int64_t>(groups[i].devices.size()), groups[i].p, rng);
      }
    }
    out.transmitters = static_cast<int>(count);
    if (count == 1) {
      out.winner = grp.devices[static_cast<std::size_t>(j)];
      out.winner_group = static_cast<int>(first);
      out.winner_slot = static_cast<int>(j);
    }
    return out;
  }

 private:
  static std::int64_t binomial(std::int64_t n, double p, Rng& rng) {
    if (p >= 1.0) return n;
    std::binomial_distribution<std::int64_t> b(n, p);
    return b(rng);
  }

  std::vector<double> log_a0_;
  std::vector<double> suffix_;
};

/// Forces the winners of each frame, in order (1-based device ids). Once a
/// frame's script is used up the remaining contenders collide, or the
/// channel stays idle when only one is left.
class ScriptedContention {
 public:
  ScriptedContention() = default;
  explicit ScriptedContention(std::map<int, std::vector<int>> winners) : winners_(std::move(winners)) {}

  SlotDraw next(int frame, std::span<const ContentionGroup> groups, Rng& /*rng*/) {
    if (frame != frame_) {
      frame_ = frame;
      pos_ = 0;
    }
    SlotDraw out;
    const auto it = winners_.find(frame);
    if (it != winners_.end() && pos_ < it->second.size()) {
      const int want = it->second[pos_++] - 1;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& devs = groups[g].devices;
        const auto at = std::find(devs.begin(), devs.end(), want);
        if (at != devs.end()) {
          out.transmitters = 1;
          out.winner = want;
          out.winner_group = static_cast<int>(g);
          out.winner_slot = static_cast<int>(at - devs.begin());
          return out;
        }
      }
      throw TraceError("scripted contention: scripted winner is not contending");
    }
    int contenders = 0;
    for (const auto& g : groups) contenders += static_cast<int>(g.devices.size());
    if (contenders >= 2) {
      out.transmitters = contenders;
    } else {
      out.idle_slots = kIdleForever;
    }
    return out;
  }

 private:
  std::map<int, std::vector<int>> winners_;
  int frame_ = -1;
  std::size_t pos_ = 0;
};

/// Poisson arrivals at rate lambda, arrival instants uniform in the frame.
class PoissonArrivals {
 public:
  void draw(int /*frame*/, int /*device*/, double lambda, Duration t_frame, Rng& rng,
            std::vector<std::int64_t>& out) {
    out.clear();
    const double mean = lambda * t_frame.seconds();
    if (!(mean > 0.0)) return;
    std::poisson_distribution<int> count(mean);
    const int n = count(rng);
    std::uniform_int_distribution<std::int64_t> at(0, t_frame.ns() - 1);
    for (int i = 0; i < n; ++i) out.push_back(at(rng));
    std::sort(out.begin(), out.end());
  }
};

/// Fixed arrival instants per (frame, device); device ids 1-based.
class ScriptedArrivals {
 public:
  ScriptedArrivals& add(int frame, int device, Duration offset) {
    times_[{frame, device}].push_back(offset.ns());
    return *this;
  }

  void draw(int frame, int device, double /*lambda*/, Duration /*t_frame*/, Rng& /*rng*/,
            std::vector<std::int64_t>& out) {
    out.clear();
    const auto it = times_.find({frame, device + 1});
    if (it == times_.end()) return;
    out = it->second;
    std::sort(out.begin(), out.end());
  }

 private:
  std::map<std::pair<int, int>, std::vector<std::int64_t>> times_;
};

struct SimOptions {
  bool record_events = false;
};

/// Class of each device (1-based q), indexed by device. Classes 2..Q take
/// the lowest ids in ascending class order, class 1 the rest.
inline std::vector<int> device_classes(const ClassConfig& cfg) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cfg.device_count()));
  for (int q = 2; q <= cfg.q_count(); ++q) out.insert(out.end(), cfg.class_sizes[q - 1], q);
  out.insert(out.end(), cfg.class_sizes[0], 1);
  return out;
}

/// `cfg` moved to the operating point a plan was made for.
inline ClassConfig with_operating_point(ClassConfig cfg, const FramePlan& plan) {
  cfg.alpha = plan.alpha_opt;
  cfg.p_inl = plan.p_inl_opt;
  return cfg;
}

namespace detail {

struct DeviceState {
  DeviceStats stats;
  int k1 = 0;  // frame in which the buffered packet arrived
};

inline std::vector<DeviceState> make_devices(const ClassConfig& cfg) {
  const auto classes = device_classes(cfg);
  std::vector<DeviceState> devs(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    devs[i].stats.id = static_cast<int>(i) + 1;
    devs[i].stats.q = classes[i];
  }
  return devs;
}

inline void arrive(DeviceState& dev, int frame) {
  ++dev.stats.generated;
  if (dev.stats.buffered) ++dev.stats.dropped;
  dev.stats.buffered = true;
  dev.k1 = frame;
}

inline void deliver(DeviceState& dev, int frame) {
  ++dev.stats.delivered;
  dev.stats.delay_frames_sum += frame - dev.k1;
  dev.stats.buffered = false;
  dev.stats.d = 0;
}

/// Applies one frame of arrivals interleaved with transmission instants.
/// A device transmits at an instant only if its buffer is full then.
inline int apply_frame(DeviceState& dev, int frame, std::span<const std::int64_t> arrivals,
                       std::span<const std::int64_t> serve_at) {
  std::size_t a = 0;
  int sent = 0;
  for (std::int64_t t : serve_at) {
    for (; a < arrivals.size() && arrivals[a] < t; ++a) arrive(dev, frame);
    if (dev.stats.buffered) {
      deliver(dev, frame);
      ++sent;
    }
  }
  for (; a < arrivals.size(); ++a) arrive(dev, frame);
  return sent;
}

inline std::pair<Rng, Rng> make_streams(std::uint64_t seed) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  std::seed_seq arrivals{lo, hi, 1u};
  std::seed_seq contention{lo, hi, 2u};
  return {Rng(arrivals), Rng(contention)};
}

template <class Arrivals>
void warmup_frame(std::vector<DeviceState>& devs, const ClassConfig& cfg, const TimingConstants& tc,
                  Arrivals& arrivals, Rng& rng, std::vector<std::int64_t>& buf) {
  for (std::size_t i = 0; i < devs.size(); ++i) {
    arrivals.draw(0, static_cast<int>(i), cfg.lambda, tc.t_frame, rng, buf);
    apply_frame(devs[i], 0, buf, {});
  }
}

inline std::int64_t us_to_ns_capped(double us) {
  constexpr double cap = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4);
  const double ns = us * 1e3;
  if (!(ns < cap)) return static_cast<std::int64_t>(cap);
  return std::max<std::int64_t>(0, std::llround(ns));
}

inline void add_busy(FrameTrace& f, CopEventKind kind, std::int64_t dur, int tx, int awake, std::int64_t idle_ns) {
  auto& c = f.cop;
  if (kind == CopEventKind::collision) {
    c.collision_ns += dur;
    ++c.collisions;
    c.idle_before_collision_ns += idle_ns;
  } else {
    c.success_ns += dur;
    ++c.successes;
    c.idle_before_success_ns += idle_ns;
  }
  c.transmit_device_ns += static_cast<double>(tx) * static_cast<double>(dur);
  c.listen_device_ns += static_cast<double>(awake - tx) * static_cast<double>(dur);
}

inline void add_idle(FrameTrace& f, std::int64_t slots, std::int64_t dur, int awake) {
  f.cop.idle_ns += dur;
  f.cop.idle_slots += slots;
  f.cop.listen_device_ns += static_cast<double>(awake) * static_cast<double>(dur);
}

inline void push_event(FrameTrace& f, bool record, CopEventKind kind, std::int64_t start, std::int64_t dur,
                       int tx, int device) {
  if (record && dur > 0) f.events.push_back({kind, start, dur, tx, device});
}

inline void remove_winner(std::vector<ContentionGroup>& groups, const SlotDraw& d) {
  auto& devs = groups[static_cast<std::size_t>(d.winner_group)].devices;
  devs[static_cast<std::size_t>(d.winner_slot)] = devs.back();
  devs.pop_back();
}

}  // namespace detail

/// Runs the hybrid protocol for `frames` frames under the per-frame
/// thresholds of `plan`.
template <class Arrivals = PoissonArrivals, class Contention = BinomialContention>
SimReport run_hybrid(const ClassConfig& cfg, const TimingConstants& tc, const FramePlan& plan, int frames,
                     std::uint64_t seed, Arrivals arrivals = {}, Contention contention = {},
                     const SimOptions& opt = {}) {
  cfg.validate();
  tc.validate();
  if (frames < 0) throw ConfigError("run: frame count must be non-negative");
  if (static_cast<int>(plan.per_frame.size()) != frames) {
    throw ConfigError("run: plan covers " + std::to_string(plan.per_frame.size()) + " frames, run asks for " +
                      std::to_string(frames));
  }
  if (tc.t_nof + tc.t_anc + tc.t_r > tc.t_frame) {
    throw ConfigError("run: notification and announcement periods leave no room for a data slot");
  }
  if (plan.alpha_opt > 0.0 && (plan.alpha_opt != cfg.alpha || plan.p_inl_opt != cfg.p_inl)) {
    throw ConfigError("run: plan was made for a different (alpha, p_inl); see with_operating_point");
  }

  auto [arrival_rng, contention_rng] = detail::make_streams(seed);
  auto devs = detail::make_devices(cfg);
  const int k = static_cast<int>(devs.size());
  const auto slots = slot_durations(tc);
  const std::int64_t d_idle = slots.idle.ns();
  const std::int64_t d_coll = slots.collision.ns();
  const std::int64_t d_succ = slots.success.ns();
  const std::int64_t max_event = std::max({d_idle, d_coll, d_succ});

  SimReport rep;
  rep.variant = Variant::hybrid;
  rep.seed = seed;
  rep.devices = k;
  rep.frames.reserve(static_cast<std::size_t>(frames));

  std::vector<std::int64_t> buf;
  detail::warmup_frame(devs, cfg, tc, arrivals, arrival_rng, buf);

  std::map<double, std::size_t> group_of;
  std::vector<ContentionGroup> groups;
  std::vector<int> active;
  std::vector<std::int64_t> serve(static_cast<std::size_t>(k), -1);

  for (int i = 1; i <= frames; ++i) {
    const auto& target = plan.per_frame[static_cast<std::size_t>(i - 1)];
    FrameTrace f;
    f.frame = i;

    // NP: contenders and their probabilities.
    group_of.clear();
    groups.clear();
    active.clear();
    for (int dv = 0; dv < k; ++dv) {
      const auto& s = devs[static_cast<std::size_t>(dv)].stats;
      if (!s.buffered) continue;
      active.push_back(dv);
      const double p = contending_probability(s.q, s.d, cfg.alpha, cfg.escalation(), cfg.p_inl);
      auto [it, inserted] = group_of.try_emplace(p, groups.size());
      if (inserted) groups.push_back({p, {}});
      groups[it->second].devices.push_back(dv);
    }
    const int l = static_cast<int>(active.size());
    f.active = l;

    // COP.
    const std::int64_t t_cop_opt = detail::us_to_ns_capped(target.t_cop_opt_us);
    std::int64_t elapsed = 0;
    int contenders = l;
    while (f.winners < target.m_opt && contenders > 0) {
      const std::int64_t budget = tc.t_frame.ns() - tc.t_nof.ns() - tc.t_anc.ns() -
                                  static_cast<std::int64_t>(f.winners + 1) * tc.t_r.ns() - max_event;
      const std::int64_t horizon = std::min(budget + 1, t_cop_opt);  // slot may start strictly before
      if (elapsed >= horizon) break;
      const std::int64_t allowed = (horizon - elapsed + d_idle - 1) / d_idle;  // idle slots that may start

      const SlotDraw draw = contention.next(i, groups, contention_rng);
      if (draw.idle_slots >= allowed || draw.transmitters == 0) {
        const std::int64_t n = std::min(draw.idle_slots, allowed);
        detail::push_event(f, opt.record_events, CopEventKind::idle, elapsed, n * d_idle, 0, 0);
        detail::add_idle(f, n, n * d_idle, l);
        elapsed += n * d_idle;
        break;
      }
      const std::int64_t idle_ns = draw.idle_slots * d_idle;
      detail::push_event(f, opt.record_events, CopEventKind::idle, elapsed, idle_ns, 0, 0);
      detail::add_idle(f, draw.idle_slots, idle_ns, l);
      elapsed += idle_ns;
      if (draw.transmitters == 1) {
        detail::push_event(f, opt.record_events, CopEventKind::success, elapsed, d_succ, 1, draw.winner + 1);
        detail::add_busy(f, CopEventKind::success, d_succ, 1, l, idle_ns);
        elapsed += d_succ;
        f.winner_devices.push_back(draw.winner + 1);
        ++f.winners;
        --contenders;
        detail::remove_winner(groups, draw);
      } else {
        detail::push_event(f, opt.record_events, CopEventKind::collision, elapsed, d_coll, draw.transmitters, 0);
        detail::add_busy(f, CopEventKind::collision, d_coll, draw.transmitters, l, idle_ns);
        elapsed += d_coll;
      }
    }
    f.t_cop_ns = elapsed;

    // AP + TOP: winner j transmits in slot j.
    const std::int64_t top_start = tc.t_nof.ns() + elapsed + tc.t_anc.ns();
    if (top_start + static_cast<std::int64_t>(f.winners) * tc.t_r.ns() > tc.t_frame.ns()) {
      throw TraceError("run: frame overrun");
    }
    for (int j = 0; j < f.winners; ++j) {
      serve[static_cast<std::size_t>(f.winner_devices[static_cast<std::size_t>(j)] - 1)] =
          top_start + static_cast<std::int64_t>(j) * tc.t_r.ns();
    }

    // Arrivals during the frame, then escalation of the losers.
    for (int dv = 0; dv < k; ++dv) {
      auto& dev = devs[static_cast<std::size_t>(dv)];
      arrivals.draw(i, dv, cfg.lambda, tc.t_frame, arrival_rng, buf);
      const std::int64_t at = serve[static_cast<std::size_t>(dv)];
      if (at >= 0) {
        const std::int64_t when[] = {at};
        detail::apply_frame(dev, i, buf, when);
        serve[static_cast<std::size_t>(dv)] = -1;
      } else {
        detail::apply_frame(dev, i, buf, {});
      }
    }
    {
      std::size_t w = 0;
      std::vector<int> won(f.winner_devices);
      std::sort(won.begin(), won.end());
      for (int dv : active) {
        while (w < won.size() && won[w] - 1 < dv) ++w;
        if (w < won.size() && won[w] - 1 == dv) continue;
        devs[static_cast<std::size_t>(dv)].stats.d += 1;
      }
    }

    f.energy = energy_per_frame(f, tc, k, Variant::hybrid);
    rep.frames.push_back(std::move(f));
  }

  rep.device_stats.reserve(devs.size());
  for (const auto& d : devs) rep.device_stats.push_back(d.stats);
  return rep;
}

/// Contention-only baseline: every device holding a packet at the frame
/// start contends with the fixed probability p for the whole frame, and a
/// success is followed at once by its T_r data slot. No escalation.
template <class Arrivals = PoissonArrivals, class Contention = BinomialContention>
SimReport run_csma(const ClassConfig& cfg, const TimingConstants& tc, double p, int frames, std::uint64_t seed,
                   Arrivals arrivals = {}, Contention contention = {}, const SimOptions& opt = {}) {
  cfg.validate();
  tc.validate();
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("csma: p must lie in (0, 1]");
  if (frames < 0) throw ConfigError("run: frame count must be non-negative");

  auto [arrival_rng, contention_rng] = detail::make_streams(seed);
  auto devs = detail::make_devices(cfg);
  const int k = static_cast<int>(devs.size());
  const auto slots = slot_durations(tc);
  const std::int64_t d_idle = slots.idle.ns();
  const std::int64_t d_coll = slots.collision.ns();
  const std::int64_t d_succ = slots.success.ns();
  const std::int64_t t_r = tc.t_r.ns();
  const std::int64_t longest = std::max({d_idle, d_coll, d_succ + t_r});

  SimReport rep;
  rep.variant = Variant::csma;
  rep.seed = seed;
  rep.devices = k;
  rep.frames.reserve(static_cast<std::size_t>(frames));

  std::vector<std::int64_t> buf;
  detail::warmup_frame(devs, cfg, tc, arrivals, arrival_rng, buf);
  std::vector<ContentionGroup> groups(1);
  std::vector<std::int64_t> serve(static_cast<std::size_t>(k), -1);

  for (int i = 1; i <= frames; ++i) {
    FrameTrace f;
    f.frame = i;
    groups[0].p = p;
    groups[0].devices.clear();
    for (int dv = 0; dv < k; ++dv) {
      if (devs[static_cast<std::size_t>(dv)].stats.buffered) groups[0].devices.push_back(dv);
    }
    f.active = static_cast<int>(groups[0].devices.size());

    std::int64_t now = 0;  // frame clock
    const std::int64_t last_start = tc.t_frame.ns() - longest;
    while (!groups[0].devices.empty() && now <= last_start) {
      const int awake = static_cast<int>(groups[0].devices.size());
      const std::int64_t allowed = (last_start - now) / d_idle + 1;
      const SlotDraw draw = contention.next(i, groups, contention_rng);
      if (draw.idle_slots >= allowed || draw.transmitters == 0) {
        const std::int64_t n = std::min(draw.idle_slots, allowed);
        detail::push_event(f, opt.record_events, CopEventKind::idle, now, n * d_idle, 0, 0);
        detail::add_idle(f, n, n * d_idle, awake);
        f.t_cop_ns += n * d_idle;
        now += n * d_idle;
        break;
      }
      const std::int64_t idle_ns = draw.idle_slots * d_idle;
      detail::push_event(f, opt.record_events, CopEventKind::idle, now, idle_ns, 0, 0);
      detail::add_idle(f, draw.idle_slots, idle_ns, awake);
      f.t_cop_ns += idle_ns;
      now += idle_ns;
      if (draw.transmitters == 1) {
        detail::push_event(f, opt.record_events, CopEventKind::success, now, d_succ, 1, draw.winner + 1);
        detail::add_busy(f, CopEventKind::success, d_succ, 1, awake, idle_ns);
        f.t_cop_ns += d_succ;
        now += d_succ;
        serve[static_cast<std::size_t>(draw.winner)] = now;
        f.data_listen_device_ns += static_cast<double>(awake - 1) * static_cast<double>(t_r);
        now += t_r;
        f.winner_devices.push_back(draw.winner + 1);
        ++f.winners;
        detail::remove_winner(groups, draw);
      } else {
        detail::push_event(f, opt.record_events, CopEventKind::collision, now, d_coll, draw.transmitters, 0);
        detail::add_busy(f, CopEventKind::collision, d_coll, draw.transmitters, awake, idle_ns);
        f.t_cop_ns += d_coll;
        now += d_coll;
      }
    }

    for (int dv = 0; dv < k; ++dv) {
      auto& dev = devs[static_cast<std::size_t>(dv)];
      arrivals.draw(i, dv, cfg.lambda, tc.t_frame, arrival_rng, buf);
      const std::int64_t at = serve[static_cast<std::size_t>(dv)];
      if (at >= 0) {
        const std::int64_t when[] = {at};
        detail::apply_frame(dev, i, buf, when);
        serve[static_cast<std::size_t>(dv)] = -1;
      } else {
        detail::apply_frame(dev, i, buf, {});
      }
    }
    f.energy = energy_per_frame(f, tc, k, Variant::csma);
    rep.frames.push_back(std::move(f));
  }

  rep.device_stats.reserve(devs.size());
  for (const auto& d : devs) rep.device_stats.push_back(d.stats);
  return rep;
}

/// Slotted baseline: min(K, floor(T_frame / T_r)) slots per frame, owned
/// cyclically by device ids across frames. The owner transmits if its
/// buffer is full when its slot starts; otherwise the slot is wasted.
template <class Arrivals = PoissonArrivals>
SimReport run_tdma(const ClassConfig& cfg, const TimingConstants& tc, int frames, std::uint64_t seed,
                   Arrivals arrivals = {}) {
  cfg.validate();
  tc.validate();
  if (frames < 0) throw ConfigError("run: frame count must be non-negative");

  auto [arrival_rng, contention_rng] = detail::make_streams(seed);
  (void)contention_rng;
  auto devs = detail::make_devices(cfg);
  const int k = static_cast<int>(devs.size());
  const std::int64_t per_frame = std::min<std::int64_t>(k, tc.t_frame.ns() / tc.t_r.ns());

  SimReport rep;
  rep.variant = Variant::tdma;
  rep.seed = seed;
  rep.devices = k;
  rep.frames.reserve(static_cast<std::size_t>(frames));

  std::vector<std::int64_t> buf;
  detail::warmup_frame(devs, cfg, tc, arrivals, arrival_rng, buf);
  std::vector<std::vector<std::int64_t>> owned(static_cast<std::size_t>(k));

  for (int i = 1; i <= frames; ++i) {
    FrameTrace f;
    f.frame = i;
    for (auto& o : owned) o.clear();
    const std::int64_t base = ((static_cast<std::int64_t>(i) - 1) * per_frame) % k;
    for (std::int64_t s = 0; s < per_frame; ++s) {
      owned[static_cast<std::size_t>((base + s) % k)].push_back(s * tc.t_r.ns());
    }
    for (const auto& d : devs) f.active += d.stats.buffered ? 1 : 0;
    for (int dv = 0; dv < k; ++dv) {
      arrivals.draw(i, dv, cfg.lambda, tc.t_frame, arrival_rng, buf);
      f.winners += detail::apply_frame(devs[static_cast<std::size_t>(dv)], i, buf, owned[static_cast<std::size_t>(dv)]);
    }
    f.energy = energy_per_frame(f, tc, k, Variant::tdma);
    rep.frames.push_back(std::move(f));
  }

  rep.device_stats.reserve(devs.size());
  for (const auto& d : devs) rep.device_stats.push_back(d.stats);
  return rep;
}

/// Slot-level statistics of the contention draw on a fixed population.
struct SlotSample {
  std::int64_t busy = 0;
  std::int64_t successes = 0;
  std::int64_t idle_slots = 0;
  double idle_sq = 0.0;  // sum of squared idle-run lengths
};

/// Draws `busy_slots` busy slots from a population that never changes,
/// as the closed-form contention model assumes.
template <class Contention = BinomialContention>
SlotSample sample_slots(std::span<const ContentionGroup> groups, std::int64_t busy_slots, Rng& rng,
                        Contention contention = {}) {
  SlotSample s;
  for (std::int64_t b = 0; b < busy_slots; ++b) {
    const SlotDraw d = contention.next(0, groups, rng);
    if (d.transmitters == 0) throw DegenerateMixture("sample_slots: no device can transmit");
    ++s.busy;
    s.successes += d.transmitters == 1 ? 1 : 0;
    s.idle_slots += d.idle_slots;
    s.idle_sq += static_cast<double>(d.idle_slots) * static_cast<double>(d.idle_slots);
  }
  return s;
}

/// Runs one variant. `csma_p` <= 0 means "use p_inl".
inline SimReport simulate(Variant v, const ClassConfig& cfg, const TimingConstants& tc, const FramePlan& plan,
                          int frames, std::uint64_t seed, double csma_p = 0.0, const SimOptions& opt = {}) {
  switch (v) {
    case Variant::hybrid:
      return run_hybrid(cfg, tc, plan, frames, seed, PoissonArrivals{}, BinomialContention{}, opt);
    case Variant::csma:
      return run_csma(cfg, tc, csma_p > 0.0 ? csma_p : cfg.p_inl, frames, seed, PoissonArrivals{},
                      BinomialContention{}, opt);
    case Variant::tdma:
      return run_tdma(cfg, tc, frames, seed);
  }
  throw ConfigError("unknown variant");
}

/// One report per seed, in seed order.
inline std::vector<SimReport> simulate_seeds(Variant v, const ClassConfig& cfg, const TimingConstants& tc,
                                             const FramePlan& plan, int frames,
                                             const std::vector<std::uint64_t>& seeds, int workers = 1,
                                             double csma_p = 0.0, const SimOptions& opt = {}) {
  std::vector<SimReport> out(seeds.size());
  parallel_for(seeds.size(), workers,
               [&](std::size_t i) { out[i] = simulate(v, cfg, tc, plan, frames, seeds[i], csma_p, opt); });
  return out;
}

}  // namespace hymac

#endif  // HYMAC_SIMULATOR_HPP
