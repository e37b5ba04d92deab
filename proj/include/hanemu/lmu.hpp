#pragma once

// Load management unit: the registry of logged node configurations, the
// dynamic-priority scheduler that keeps demand under the MDL where it can,
// the start-at-alpha baseline, and penalty accounting.
//
// Each interval the scheduler works in this order:
//   1. budget = MDL - forecast NINSL demand (NINSL is never curtailed)
//   2. started NISL loads stay ON (non-interruption) and take budget first
//   3. loads with zero slack (priority 1) are forced ON, even over budget
//   4. remaining candidates by priority, then earlier beta, smaller rating,
//      id; admitted while they fit the budget
//   5. ISL candidates not admitted get OFF; unstarted NISL get nothing
//
// priority = remaining intervals / intervals left in the window.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hanemu/domain.hpp"
#include "hanemu/protocol.hpp"

namespace hanemu::lmu {

using protocol::Relay;

struct LoadState {
  LoadSpec spec;
  int remaining_minutes = 0;
  bool started = false;
  bool running = false;
};

using Registry = std::map<std::string, LoadState, std::less<>>;

struct Decision {
  std::string load_id;
  Relay action = Relay::OFF;
  bool operator==(const Decision&) const = default;
};

using CommandSet = std::vector<Decision>;

inline bool is_on(const CommandSet& cs, std::string_view id) {
  return std::any_of(cs.begin(), cs.end(), [&](const Decision& d) { return d.load_id == id && d.action == Relay::ON; });
}

// Inserts or updates a load from its logged configuration. A load may be
// re-logged until it has started; after that the config is frozen.
inline void register_config(Registry& reg, const protocol::ConfigLog& cfg, const TimeModel& tm) {
  LoadSpec spec{cfg.node_id, cfg.node_id, cfg.cls, cfg.rated_power, std::nullopt, std::nullopt};
  try {
    if (is_schedulable(cfg.cls)) {
      spec.config = validate_config(cfg.cls, {cfg.alpha, cfg.beta, cfg.gamma}, tm);
      if (!(cfg.rated_power > 0.0)) throw Error(Errc::InvalidLoad, "rated power must be > 0");
    } else if (cfg.alpha != 0 || cfg.beta != 0 || cfg.gamma != 0) {
      throw Error(Errc::InvalidConfig, "NINSL config must be (0,0,0)");
    }
  } catch (const Error& e) {
    throw Error(Errc::InvalidConfig, cfg.node_id + ": " + e.what());
  }

  if (auto it = reg.find(cfg.node_id); it != reg.end() && it->second.started)
    throw Error(Errc::DuplicateActiveLoad, cfg.node_id + " already started");

  const int remaining = spec.config ? spec.config->gamma : 0;
  reg.insert_or_assign(cfg.node_id, LoadState{std::move(spec), remaining, false, false});
}

inline double priority(const LoadState& load, int t, const TimeModel& tm) {
  if (!is_schedulable(load.spec.cls) || !load.spec.config)
    throw Error(Errc::NotSchedulable, load.spec.load_id + " is not schedulable");
  if (load.remaining_minutes <= 0) throw Error(Errc::NotSchedulable, load.spec.load_id + " has no run time left");
  const ScheduleConfig& cfg = *load.spec.config;
  if (t < cfg.alpha || t > cfg.beta)
    throw Error(Errc::OutsideWindow, load.spec.load_id + ": interval " + std::to_string(t) + " outside [" +
                                         std::to_string(cfg.alpha) + ", " + std::to_string(cfg.beta) + "]");
  const int remaining_intervals = load.remaining_minutes / tm.interval_minutes();
  return static_cast<double>(remaining_intervals) / static_cast<double>(cfg.beta - t + 1);
}

namespace detail {

inline void check_entry(const std::string& key, const LoadState& s, const TimeModel& tm) {
  auto corrupt = [&](const std::string& why) { throw Error(Errc::CorruptRegistry, key + ": " + why); };
  if (key != s.spec.load_id) corrupt("key does not match load id");
  if (!is_schedulable(s.spec.cls)) {
    if (s.spec.config || s.started || s.running || s.remaining_minutes != 0) corrupt("NINSL entry carries schedule state");
    return;
  }
  if (!s.spec.config) corrupt("schedulable entry without config");
  if (s.remaining_minutes < 0 || s.remaining_minutes > s.spec.config->gamma) corrupt("remaining minutes out of range");
  if (s.remaining_minutes % tm.interval_minutes() != 0) corrupt("remaining minutes not whole intervals");
  if (s.running && !s.started) corrupt("running but never started");
  if (s.spec.cls == LoadClass::NISL && s.started && s.remaining_minutes > 0 && !s.running)
    corrupt("NISL paused mid-run");
}

}  // namespace detail

inline CommandSet schedule_interval(const Registry& reg, int t, const MdlProfile& mdl, double ninsl_total,
                                    const TimeModel& tm) {
  double budget = mdl.at(t) - ninsl_total;

  CommandSet out;
  struct Candidate {
    const LoadState* load;
    double priority;
  };
  std::vector<Candidate> pending;

  for (const auto& [key, s] : reg) {
    detail::check_entry(key, s, tm);
    if (!is_schedulable(s.spec.cls) || s.remaining_minutes == 0) continue;
    const ScheduleConfig& cfg = *s.spec.config;
    if (t < cfg.alpha || t > cfg.beta) {
      if (s.spec.cls == LoadClass::NISL && s.started)
        throw Error(Errc::CorruptRegistry, key + ": unfinished NISL outside its window");
      continue;
    }

    if (s.spec.cls == LoadClass::NISL && s.started) {
      out.push_back({key, Relay::ON});
      budget -= s.spec.rated_power;
      continue;
    }
    const double p = priority(s, t, tm);
    // A load logged late can have less window left than run time; it is
    // forced for the rest of its window.
    if (p >= 1.0) {
      out.push_back({key, Relay::ON});
      budget -= s.spec.rated_power;
      continue;
    }
    pending.push_back({&s, p});
  }

  std::sort(pending.begin(), pending.end(), [](const Candidate& a, const Candidate& b) {
    const auto& sa = a.load->spec;
    const auto& sb = b.load->spec;
    return std::tuple(-a.priority, sa.config->beta, sa.rated_power, std::string_view(sa.load_id)) <
           std::tuple(-b.priority, sb.config->beta, sb.rated_power, std::string_view(sb.load_id));
  });

  for (const Candidate& c : pending) {
    const LoadSpec& spec = c.load->spec;
    if (spec.rated_power <= budget) {
      out.push_back({spec.load_id, Relay::ON});
      budget -= spec.rated_power;
    } else if (spec.cls == LoadClass::ISL) {
      out.push_back({spec.load_id, Relay::OFF});
    }
  }

  std::sort(out.begin(), out.end(), [](const Decision& a, const Decision& b) { return a.load_id < b.load_id; });
  return out;
}

// Books one interval of decisions into the registry.
inline void commit_interval(Registry& reg, const CommandSet& commands, const TimeModel& tm) {
  for (const Decision& d : commands) {
    auto it = reg.find(d.load_id);
    if (it == reg.end()) throw Error(Errc::UnknownLoad, d.load_id);
    LoadState& s = it->second;
    if (!is_schedulable(s.spec.cls)) throw Error(Errc::NinslCommand, d.load_id);
    if (d.action == Relay::ON && s.remaining_minutes > 0) {
      s.started = true;
      s.remaining_minutes -= tm.interval_minutes();
      s.running = s.remaining_minutes > 0;
    } else {
      s.running = false;
    }
  }
  // Loads left out of the command set are idle this interval.
  for (auto& [key, s] : reg)
    if (s.running && !is_on(commands, key)) s.running = false;
}

// Unscheduled consumer: every schedulable load runs from alpha until done.
inline CommandSet baseline_interval(const Registry& reg, int t) {
  CommandSet out;
  for (const auto& [key, s] : reg) {
    if (!is_schedulable(s.spec.cls) || !s.spec.config || s.remaining_minutes <= 0) continue;
    if (t >= s.spec.config->alpha) out.push_back({key, Relay::ON});
  }
  return out;
}

inline std::vector<CommandSet> baseline_schedule(Registry reg, const TimeModel& tm) {
  std::vector<CommandSet> plan;
  if (reg.empty()) return plan;
  plan.reserve(static_cast<std::size_t>(tm.horizon()));
  for (int t = 0; t < tm.horizon(); ++t) {
    plan.push_back(baseline_interval(reg, t));
    commit_interval(reg, plan.back(), tm);
  }
  return plan;
}

struct PenaltyReport {
  double energy_over_mdl = 0.0;  // kWh
  double rate_x = 0.0;  // currency per kWh
  double penalty = 0.0;
  int intervals_over = 0;
  bool operator==(const PenaltyReport&) const = default;
};

inline PenaltyReport penalty_for_energy(double energy_over_mdl, double rate_x, int intervals_over = 0) {
  return {energy_over_mdl, rate_x, energy_over_mdl * rate_x, intervals_over};
}

inline PenaltyReport penalty(std::span<const double> profile, const MdlProfile& mdl, double rate_x,
                             const TimeModel& tm) {
  if (profile.size() != mdl.size())
    throw Error(Errc::LengthMismatch, "profile has " + std::to_string(profile.size()) + " intervals, MDL " +
                                          std::to_string(mdl.size()));
  double over_kw = 0.0;
  int count = 0;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    const double excess = profile[t] - mdl.limits()[t];
    if (excess > 0.0) {
      over_kw += excess;
      ++count;
    }
  }
  return penalty_for_energy(over_kw * tm.interval_hours(), rate_x, count);
}

// Master-side state: the registry plus the latest telemetry per node.
class LoadManagementUnit {
 public:
  explicit LoadManagementUnit(TimeModel tm) : tm_(tm) {}

  const Registry& registry() const noexcept { return registry_; }
  const TimeModel& time_model() const noexcept { return tm_; }

  // Returns the ack to send back; rejected configs leave the registry as it
  // was.
  protocol::Ack ingest(const protocol::ConfigLog& cfg) {
    try {
      register_config(registry_, cfg, tm_);
    } catch (const Error&) {
      ++rejected_configs_;
      return {cfg.node_id, protocol::Kind::CFG, protocol::AckStatus::REJECTED};
    }
    return {cfg.node_id, protocol::Kind::CFG, protocol::AckStatus::OK};
  }

  void ingest(const protocol::Telemetry& tel) { telemetry_.insert_or_assign(tel.node_id, tel); }
  void ingest(const protocol::Ack& ack) {
    if (ack.status == protocol::AckStatus::RUN_COMPLETE) ++run_complete_acks_;
  }

  const std::map<std::string, protocol::Telemetry, std::less<>>& telemetry() const noexcept { return telemetry_; }
  int rejected_configs() const noexcept { return rejected_configs_; }
  int run_complete_acks() const noexcept { return run_complete_acks_; }

  CommandSet decide(int t, const MdlProfile& mdl, double ninsl_forecast, bool use_scheduler) const {
    return use_scheduler ? schedule_interval(registry_, t, mdl, ninsl_forecast, tm_) : baseline_interval(registry_, t);
  }

  void commit(const CommandSet& cs) { commit_interval(registry_, cs, tm_); }

 private:
  TimeModel tm_;
  Registry registry_;
  std::map<std::string, protocol::Telemetry, std::less<>> telemetry_;
  int rejected_configs_ = 0;
  int run_complete_acks_ = 0;
};

}  // namespace hanemu::lmu
