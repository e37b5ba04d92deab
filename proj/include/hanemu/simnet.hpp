#pragma once

// Deterministic day simulation. Nodes and the LMU only talk through encoded
// protocol lines carried by a latency-injecting link.
//
// Timeline for interval t (B_t = start of t, g = guard = ceil(max_delay)):
//   B_t - g   LMU issues commands for t
//   <= B_t    commands arrive and are latched by the nodes
//   B_t       nodes switch relays, ack; interval t runs
//   B_t+1     nodes meter interval t and send telemetry
// Configs are logged one interval plus one guard before midnight.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hanemu/domain.hpp"
#include "hanemu/lmu.hpp"
#include "hanemu/protocol.hpp"
#include "hanemu/sln.hpp"

namespace hanemu::simnet {

struct LinkModel {
  double min_delay = 7.0;  // seconds
  double max_delay = 9.0;
  std::uint64_t seed = 1;
  bool operator==(const LinkModel&) const = default;
};

// Symmetric lossless link; one seeded stream serves both directions.
class Link {
 public:
  explicit Link(LinkModel model) : model_(model), rng_(model.seed) {
    if (!std::isfinite(model.min_delay) || !std::isfinite(model.max_delay) || model.min_delay < 0.0 ||
        model.min_delay > model.max_delay)
      throw Error(Errc::InfeasibleScenario, "link delays must satisfy 0 <= min <= max");
  }

  const LinkModel& model() const noexcept { return model_; }

  // Uniform on [min, max]; built from raw 64-bit draws so the sequence is
  // identical across standard library implementations.
  double sample_delay() {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return model_.min_delay + (model_.max_delay - model_.min_delay) * u;
  }

  // Guard time between issuing a command and the boundary it applies at.
  std::int64_t guard_seconds() const { return static_cast<std::int64_t>(std::ceil(model_.max_delay)); }

 private:
  LinkModel model_;
  std::mt19937_64 rng_;
};

inline const std::string kLmuAddress = "lmu";

struct Envelope {
  double sent_at = 0.0;
  double delivered_at = 0.0;
  std::uint64_t seq = 0;
  std::string from;
  std::string to;
  std::string line;  // encoded, with trailing newline
};

// Deliveries in time order; ties go in send order.
class EventQueue {
 public:
  void send(Link& link, const protocol::Message& msg, double at, std::string from, std::string to) {
    std::string line = protocol::encode(msg);
    const double delay = link.sample_delay();
    queue_.push(Envelope{at, at + delay, next_seq_++, std::move(from), std::move(to), std::move(line)});
  }

  bool has_due(double until) const { return !queue_.empty() && queue_.top().delivered_at <= until; }

  Envelope pop() {
    Envelope e = queue_.top();
    queue_.pop();
    return e;
  }

  bool empty() const noexcept { return queue_.empty(); }
  std::size_t size() const noexcept { return queue_.size(); }

 private:
  struct Later {
    bool operator()(const Envelope& a, const Envelope& b) const {
      if (a.delivered_at != b.delivered_at) return a.delivered_at > b.delivered_at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
  std::uint64_t next_seq_ = 0;
};

struct Scenario {
  TimeModel tm;
  MdlProfile mdl;
  std::vector<LoadSpec> loads;
  LinkModel link;
  double penalty_rate_x = 1.0;
};

// Throws InfeasibleScenario on the first violated rule; returns the scenario
// with canonical configs.
inline Scenario validate_scenario(Scenario sc) {
  auto bad = [](const std::string& why) { throw Error(Errc::InfeasibleScenario, why); };
  if (static_cast<int>(sc.mdl.size()) != sc.tm.horizon())
    bad("MDL length " + std::to_string(sc.mdl.size()) + " != horizon " + std::to_string(sc.tm.horizon()));
  std::set<std::string, std::less<>> ids;
  for (LoadSpec& l : sc.loads) {
    try {
      l = validate_load(std::move(l), sc.tm);
    } catch (const Error& e) {
      bad(e.what());
    }
    if (!ids.insert(l.load_id).second) bad("duplicate load id " + l.load_id);
    if (l.load_id == kLmuAddress) bad("load id '" + kLmuAddress + "' is reserved");
  }
  try {
    Link probe(sc.link);
    if (probe.guard_seconds() >= static_cast<std::int64_t>(sc.tm.interval_seconds()))
      bad("link max delay must stay below one interval");
  } catch (const Error& e) {
    bad(e.what());
  }
  if (!std::isfinite(sc.penalty_rate_x) || sc.penalty_rate_x < 0.0) bad("penalty rate must be finite and >= 0");
  return sc;
}

enum class Algorithm { None, Priority };

constexpr std::string_view to_string(Algorithm a) noexcept { return a == Algorithm::None ? "none" : "priority"; }

inline std::optional<Algorithm> parse_algorithm(std::string_view s) noexcept {
  if (s == "none") return Algorithm::None;
  if (s == "priority") return Algorithm::Priority;
  return std::nullopt;
}

struct SimResult {
  std::vector<double> aggregate_profile;  // kW per interval
  std::vector<double> mdl;
  std::vector<std::string> load_ids;  // scenario order
  std::map<std::string, std::vector<int>, std::less<>> per_load_on_intervals;
  std::map<std::string, double, std::less<>> energy_delivered;  // kWh
  lmu::PenaltyReport penalty_report;
  std::vector<Envelope> event_log;  // delivery order
};

class DaySimulation {
 public:
  DaySimulation(Scenario scenario, Algorithm algorithm)
      : sc_(validate_scenario(std::move(scenario))), algorithm_(algorithm), link_(sc_.link), lmu_(sc_.tm) {
    for (const LoadSpec& l : sc_.loads) {
      nodes_.emplace(l.load_id, SmartLoadNode(l, sc_.tm));
      result_.load_ids.push_back(l.load_id);
      result_.per_load_on_intervals[l.load_id];
    }
    result_.mdl = sc_.mdl.limits();
    result_.aggregate_profile.assign(static_cast<std::size_t>(sc_.tm.horizon()), 0.0);
  }

  const Scenario& scenario() const noexcept { return sc_; }
  const lmu::LoadManagementUnit& lmu() const noexcept { return lmu_; }
  const SmartLoadNode& node(std::string_view id) const { return find_node(id); }
  int next_interval() const noexcept { return next_; }
  bool done() const noexcept { return next_ >= sc_.tm.horizon(); }

  // Called for every delivered envelope, in delivery order.
  void set_observer(std::function<void(const Envelope&)> f) { observer_ = std::move(f); }

  // Consumers log their configurations, then the LMU issues interval 0.
  void begin() {
    if (begun_) return;
    begun_ = true;
    const double cfg_time = -(sc_.tm.interval_seconds() + static_cast<double>(link_.guard_seconds()));
    for (const std::string& id : result_.load_ids)
      send(find_node(id).log_own_config(), cfg_time, id, kLmuAddress);
    now_ = cfg_time;
    issue(0);
  }

  // Runs interval next_interval() through its closing telemetry; returns
  // the profile row for it.
  protocol::ProfileRow step() {
    begin();
    if (done()) throw Error(Errc::MdlMissing, "day already finished");
    const int t = next_++;
    const double start = sc_.tm.interval_start(t);
    const double end = sc_.tm.interval_start(t + 1);

    deliver_until(start);
    now_ = start;
    double aggregate = 0.0;
    for (const std::string& id : result_.load_ids) {
      SmartLoadNode& n = find_node(id);
      for (const protocol::Command& cmd : take_latched(id)) send(n.apply_command(cmd), start, id, kLmuAddress);
      const double kw = n.power_kw(t);
      aggregate += kw;
      const bool on = is_schedulable(n.load_class()) ? n.relay() == protocol::Relay::ON : kw > 0.0;
      if (on) result_.per_load_on_intervals[id].push_back(t);
    }
    result_.aggregate_profile[static_cast<std::size_t>(t)] = aggregate;

    if (t + 1 < sc_.tm.horizon()) issue(t + 1);
    deliver_until(end);
    now_ = end;
    for (const std::string& id : result_.load_ids) send(find_node(id).tick(t), end, id, kLmuAddress);

    const double mdl = sc_.mdl.at(t);
    return {t, aggregate, mdl, std::max(0.0, aggregate - mdl)};
  }

  // Live-mode input, applied between intervals. Returns the messages the
  // node shows back (screen changes, rejections).
  std::vector<protocol::Message> apply_ui_event(const protocol::UiEvent& ev) {
    std::vector<protocol::Message> out;
    auto it = nodes_.find(ev.node_id);
    if (it == nodes_.end()) {
      out.push_back(protocol::ErrorReport{ev.node_id, Errc::UnknownLoad, "no such node"});
      return out;
    }
    SmartLoadNode& n = it->second;
    using protocol::UiEventKind;
    try {
      switch (ev.event) {
        case UiEventKind::MENU: n.press_menu(); break;
        case UiEventKind::NODE_CONFIG: n.select_node_config(); break;
        case UiEventKind::DATA_LOGGING: n.request_data_logging(); break;
        case UiEventKind::BACK: n.back(); break;
        case UiEventKind::SUBMIT: {
          const auto [cls, cfg] = parse_submit_args(ev.args);
          send(n.log_config(cls, cfg.alpha, cfg.beta, cfg.gamma), now_, ev.node_id, kLmuAddress);
          break;
        }
      }
    } catch (const Error& e) {
      out.push_back(protocol::ErrorReport{ev.node_id, e.code(), protocol::sanitize_text(e.what())});
    }
    out.push_back(protocol::ScreenState{ev.node_id, n.screen()});
    return out;
  }

  SimResult finish() {
    while (!done()) step();
    deliver_until(std::numeric_limits<double>::infinity());
    for (const auto& [id, n] : nodes_) result_.energy_delivered[id] = n.energy_delivered();
    result_.penalty_report = lmu::penalty(result_.aggregate_profile, sc_.mdl, sc_.penalty_rate_x, sc_.tm);
    return result_;
  }

  // "CLASS,alpha,beta,gamma"; NINSL may omit the numbers.
  static std::pair<LoadClass, ScheduleConfig> parse_submit_args(std::string_view args) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
      const auto comma = args.find(',', start);
      parts.push_back(args.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const auto cls = parse_load_class(parts[0]);
    if (!cls) throw Error(Errc::InvalidConfig, "unknown load class '" + std::string(parts[0]) + "'");
    if (*cls == LoadClass::NINSL && parts.size() == 1) return {*cls, kEmptyConfig};
    if (parts.size() != 4) throw Error(Errc::InvalidConfig, "expected CLASS,alpha,beta,gamma");
    int v[3];
    for (int k = 0; k < 3; ++k) {
      const auto f = parts[static_cast<std::size_t>(k + 1)];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v[k]);
      if (ec != std::errc{} || p != f.data() + f.size() || f.empty())
        throw Error(Errc::InvalidConfig, "'" + std::string(f) + "' is not an integer");
    }
    return {*cls, ScheduleConfig{v[0], v[1], v[2]}};
  }

 private:
  SmartLoadNode& find_node(std::string_view id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(Errc::UnknownLoad, std::string(id));
    return it->second;
  }
  const SmartLoadNode& find_node(std::string_view id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(Errc::UnknownLoad, std::string(id));
    return it->second;
  }

  void send(const protocol::Message& msg, double at, const std::string& from, const std::string& to) {
    queue_.send(link_, msg, at, from, to);
  }

  double ninsl_forecast(int t) const {
    double total = 0.0;
    for (const std::string& id : result_.load_ids) {
      const SmartLoadNode& n = find_node(id);
      if (!is_schedulable(n.load_class())) total += n.power_kw(t);
    }
    return total;
  }

  void issue(int t) {
    const double at = sc_.tm.interval_start(t) - static_cast<double>(link_.guard_seconds());
    deliver_until(at);
    now_ = at;
    const lmu::CommandSet cs = lmu_.decide(t, sc_.mdl, ninsl_forecast(t), algorithm_ == Algorithm::Priority);
    lmu_.commit(cs);
    for (const lmu::Decision& d : cs)
      send(protocol::Command{d.load_id, d.action, static_cast<std::int64_t>(std::llround(at))}, at, kLmuAddress,
           d.load_id);
  }

  void deliver_until(double until) {
    while (queue_.has_due(until)) {
      Envelope e = queue_.pop();
      const protocol::Message msg = protocol::decode(e.line);
      if (e.to == kLmuAddress) {
        std::visit(
            [&](const auto& m) {
              using T = std::decay_t<decltype(m)>;
              if constexpr (std::is_same_v<T, protocol::ConfigLog>) {
                send(lmu_.ingest(m), e.delivered_at, kLmuAddress, m.node_id);
              } else if constexpr (std::is_same_v<T, protocol::Telemetry> || std::is_same_v<T, protocol::Ack>) {
                lmu_.ingest(m);
              }
            },
            msg);
      } else if (const auto* cmd = std::get_if<protocol::Command>(&msg)) {
        latched_[e.to].push_back(*cmd);
      }
      if (observer_) observer_(e);
      result_.event_log.push_back(std::move(e));
    }
  }

  std::vector<protocol::Command> take_latched(const std::string& id) {
    auto it = latched_.find(id);
    if (it == latched_.end()) return {};
    std::vector<protocol::Command> out = std::move(it->second);
    latched_.erase(it);
    return out;
  }

  Scenario sc_;
  Algorithm algorithm_;
  Link link_;
  lmu::LoadManagementUnit lmu_;
  std::map<std::string, SmartLoadNode, std::less<>> nodes_;
  std::map<std::string, std::vector<protocol::Command>, std::less<>> latched_;
  EventQueue queue_;
  SimResult result_;
  std::function<void(const Envelope&)> observer_;
  double now_ = 0.0;
  int next_ = 0;
  bool begun_ = false;
};

inline SimResult run_day(const Scenario& scenario, Algorithm algorithm) {
  DaySimulation sim(scenario, algorithm);
  return sim.finish();
}

}  // namespace hanemu::simnet
