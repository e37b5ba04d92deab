#pragma once

// Core vocabulary of the home area network: load classes, the interval
// time model, (alpha, beta, gamma) schedule windows, loads and the day-ahead
// maximum demand limit (MDL).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hanemu/error.hpp"

namespace hanemu {

enum class LoadClass { NINSL, NISL, ISL };

constexpr std::string_view to_string(LoadClass c) noexcept {
  switch (c) {
    case LoadClass::NINSL: return "NINSL";
    case LoadClass::NISL: return "NISL";
    case LoadClass::ISL: return "ISL";
  }
  return "?";
}

inline std::optional<LoadClass> parse_load_class(std::string_view s) noexcept {
  if (s == "NINSL") return LoadClass::NINSL;
  if (s == "NISL") return LoadClass::NISL;
  if (s == "ISL") return LoadClass::ISL;
  return std::nullopt;
}

constexpr bool is_schedulable(LoadClass c) noexcept { return c != LoadClass::NINSL; }

constexpr int kMinutesPerDay = 1440;

// One day split into equal intervals. The day starts at local midnight; the
// LMU clock runs at a fixed offset from UTC (+05:30 by default).
class TimeModel {
 public:
  TimeModel() = default;

  explicit TimeModel(int interval_minutes, int utc_offset_minutes = 330)
      : interval_minutes_(interval_minutes), utc_offset_minutes_(utc_offset_minutes) {
    if (interval_minutes <= 0 || 60 % interval_minutes != 0)
      throw Error(Errc::InvalidTimeModel,
                  "interval length must divide 60, got " + std::to_string(interval_minutes));
    if (utc_offset_minutes < -12 * 60 || utc_offset_minutes > 14 * 60)
      throw Error(Errc::InvalidTimeModel,
                  "utc offset out of range: " + std::to_string(utc_offset_minutes));
  }

  int interval_minutes() const noexcept { return interval_minutes_; }
  int horizon() const noexcept { return kMinutesPerDay / interval_minutes_; }
  int utc_offset_minutes() const noexcept { return utc_offset_minutes_; }
  double interval_seconds() const noexcept { return interval_minutes_ * 60.0; }
  double interval_hours() const noexcept { return interval_minutes_ / 60.0; }

  // Sim time is seconds since local midnight.
  double interval_start(int t) const noexcept { return t * interval_seconds(); }

  // Seconds since UTC midnight of the same calendar day; may be negative.
  double to_utc_seconds(double sim_seconds) const noexcept {
    return sim_seconds - utc_offset_minutes_ * 60.0;
  }

  bool operator==(const TimeModel&) const = default;

 private:
  int interval_minutes_ = 60;
  int utc_offset_minutes_ = 330;
};

// alpha: first allowed interval; beta: last allowed interval (inclusive);
// gamma: required run time in minutes.
struct ScheduleConfig {
  int alpha = 0;
  int beta = 0;
  int gamma = 0;

  bool operator==(const ScheduleConfig&) const = default;
};

inline constexpr ScheduleConfig kEmptyConfig{0, 0, 0};

inline ScheduleConfig validate_config(LoadClass cls, const ScheduleConfig& cfg, const TimeModel& tm) {
  if (cls == LoadClass::NINSL) return kEmptyConfig;

  const int horizon = tm.horizon();
  if (cfg.alpha < 0 || cfg.beta < 0 || cfg.alpha >= horizon || cfg.beta >= horizon)
    throw Error(Errc::OutOfHorizon, "window [" + std::to_string(cfg.alpha) + ", " +
                                        std::to_string(cfg.beta) + "] outside 0.." +
                                        std::to_string(horizon - 1));
  if (cfg.alpha > cfg.beta)
    throw Error(Errc::WindowReversed,
                "alpha " + std::to_string(cfg.alpha) + " > beta " + std::to_string(cfg.beta));
  if (cfg.gamma <= 0) throw Error(Errc::NonPositiveGamma, "gamma " + std::to_string(cfg.gamma));
  if (cfg.gamma % tm.interval_minutes() != 0)
    throw Error(Errc::GammaNotWholeIntervals,
                "gamma " + std::to_string(cfg.gamma) + " is not a multiple of " +
                    std::to_string(tm.interval_minutes()) + " minutes");
  const int capacity = (cfg.beta - cfg.alpha + 1) * tm.interval_minutes();
  if (cfg.gamma > capacity)
    throw Error(Errc::InfeasibleGamma, "gamma " + std::to_string(cfg.gamma) +
                                           " exceeds window capacity " + std::to_string(capacity));
  return cfg;
}

inline int required_intervals(const ScheduleConfig& cfg, const TimeModel& tm) noexcept {
  return cfg.gamma / tm.interval_minutes();
}

struct LoadSpec {
  std::string load_id;
  std::string name;
  LoadClass cls = LoadClass::NINSL;
  double rated_power = 0.0;  // kW while ON
  std::optional<ScheduleConfig> config;
  std::optional<std::vector<double>> ninsl_demand;  // kW per interval

  bool operator==(const LoadSpec&) const = default;
};

inline bool valid_node_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  for (char c : id)
    if (c == '|' || c == '\n' || c == '\r' || c == ',' || static_cast<unsigned char>(c) < 0x20)
      return false;
  return true;
}

// Returns the spec with its config canonicalized; throws on any violated
// load invariant.
inline LoadSpec validate_load(LoadSpec spec, const TimeModel& tm) {
  if (!valid_node_id(spec.load_id))
    throw Error(Errc::InvalidLoad, "bad load id '" + spec.load_id + "'");
  if (!std::isfinite(spec.rated_power) || spec.rated_power < 0.0)
    throw Error(Errc::InvalidLoad, spec.load_id + ": rated power must be finite and >= 0");

  if (is_schedulable(spec.cls)) {
    if (!spec.config) throw Error(Errc::InvalidLoad, spec.load_id + ": schedulable load needs a config");
    if (spec.ninsl_demand)
      throw Error(Errc::InvalidLoad, spec.load_id + ": demand series is only for NINSL loads");
    if (spec.rated_power <= 0.0)
      throw Error(Errc::InvalidLoad, spec.load_id + ": rated power must be > 0");
    spec.config = validate_config(spec.cls, *spec.config, tm);
  } else {
    if (!spec.ninsl_demand) throw Error(Errc::InvalidLoad, spec.load_id + ": NINSL load needs a demand series");
    if (static_cast<int>(spec.ninsl_demand->size()) != tm.horizon())
      throw Error(Errc::InvalidLoad, spec.load_id + ": demand series length " +
                                         std::to_string(spec.ninsl_demand->size()) + " != horizon " +
                                         std::to_string(tm.horizon()));
    for (double d : *spec.ninsl_demand)
      if (!std::isfinite(d) || d < 0.0)
        throw Error(Errc::InvalidLoad, spec.load_id + ": demand entries must be finite and >= 0");
    spec.config.reset();
  }
  return spec;
}

// Day-ahead per-interval power ceiling in kW.
class MdlProfile {
 public:
  MdlProfile() = default;

  MdlProfile(std::vector<double> limits, const TimeModel& tm) : limits_(std::move(limits)) {
    if (static_cast<int>(limits_.size()) != tm.horizon())
      throw Error(Errc::InvalidMdl, "MDL length " + std::to_string(limits_.size()) +
                                        " != horizon " + std::to_string(tm.horizon()));
    for (double v : limits_)
      if (!std::isfinite(v) || v <= 0.0) throw Error(Errc::InvalidMdl, "MDL entries must be > 0");
  }

  const std::vector<double>& limits() const noexcept { return limits_; }
  std::size_t size() const noexcept { return limits_.size(); }

  double at(int t) const {
    if (t < 0 || t >= static_cast<int>(limits_.size()))
      throw Error(Errc::MdlMissing, "no MDL for interval " + std::to_string(t));
    return limits_[static_cast<std::size_t>(t)];
  }

 private:
  std::vector<double> limits_;
};

}  // namespace hanemu
