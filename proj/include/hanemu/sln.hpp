#pragma once

// Virtual smart load node: one load behind a relay, a keypad/display screen
// machine for logging (alpha, beta, gamma), a metering loop, and the
// command handler that obeys the LMU.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "hanemu/domain.hpp"
#include "hanemu/metering.hpp"
#include "hanemu/protocol.hpp"

namespace hanemu {

class SmartLoadNode {
 public:
  using Relay = protocol::Relay;
  using Screen = protocol::Screen;

  SmartLoadNode(LoadSpec spec, TimeModel tm, metering::MeterConfig meter = {})
      : spec_(validate_load(std::move(spec), tm)), tm_(tm), meter_(meter) {
    on_params_ = measure(spec_.rated_power * 1000.0);
  }

  const LoadSpec& spec() const noexcept { return spec_; }
  const std::string& id() const noexcept { return spec_.load_id; }
  LoadClass load_class() const noexcept { return spec_.cls; }
  Relay relay() const noexcept { return relay_; }
  Screen screen() const noexcept { return screen_; }
  double energy_delivered() const noexcept { return energy_kwh_; }
  int minutes_run() const noexcept { return minutes_run_; }

  ScheduleConfig config() const noexcept { return spec_.config.value_or(kEmptyConfig); }

  // Screen machine: Default -> Menu -> NodeConfig -> DataLogging; back
  // returns to Default from anywhere.
  void press_menu() { transition(Screen::Default, Screen::Menu); }
  void select_node_config() { transition(Screen::Menu, Screen::NodeConfig); }
  void request_data_logging() { transition(Screen::NodeConfig, Screen::DataLogging); }
  void back() noexcept { screen_ = Screen::Default; }

  // Stores the consumer's input and returns the message for the LMU. NINSL
  // takes no input; its logged triple is always (0,0,0).
  protocol::ConfigLog log_config(LoadClass cls, int alpha, int beta, int gamma) {
    if (screen_ != Screen::DataLogging)
      throw Error(Errc::WrongScreen, id() + ": data logging screen not open");
    const ScheduleConfig cfg = validate_config(cls, {alpha, beta, gamma}, tm_);
    if (minutes_run_ > 0)
      throw Error(Errc::DuplicateActiveLoad, id() + ": load already ran today");
    if (is_schedulable(cls) && !(spec_.rated_power > 0.0))
      throw Error(Errc::InvalidLoad, id() + ": schedulable load needs rated power > 0");

    spec_.cls = cls;
    if (is_schedulable(cls)) {
      spec_.config = cfg;
      spec_.ninsl_demand.reset();
      relay_ = Relay::OFF;
    } else {
      spec_.config.reset();
      if (!spec_.ninsl_demand) spec_.ninsl_demand = std::vector<double>(static_cast<std::size_t>(tm_.horizon()), 0.0);
    }
    screen_ = Screen::Default;
    return {id(), cls, cfg.alpha, cfg.beta, cfg.gamma, spec_.rated_power};
  }

  // Walks the screen machine from Default and logs the load's own spec.
  protocol::ConfigLog log_own_config() {
    back();
    press_menu();
    select_node_config();
    request_data_logging();
    const ScheduleConfig cfg = config();
    return log_config(spec_.cls, cfg.alpha, cfg.beta, cfg.gamma);
  }

  // The LMU is authoritative; the only refusal is running past gamma.
  protocol::Ack apply_command(const protocol::Command& cmd) {
    if (cmd.node_id != id()) throw Error(Errc::WrongNode, id() + ": command addressed to " + cmd.node_id);
    if (!is_schedulable(spec_.cls)) throw Error(Errc::NinslCommand, id() + ": NINSL loads are never commanded");

    if (cmd.action == Relay::ON && minutes_run_ >= config().gamma) {
      relay_ = Relay::OFF;
      return {id(), protocol::Kind::CMD, protocol::AckStatus::RUN_COMPLETE};
    }
    relay_ = cmd.action;
    return {id(), protocol::Kind::CMD, protocol::AckStatus::OK};
  }

  // Power drawn during interval t with the current relay state, in kW.
  double power_kw(int t) const {
    if (!is_schedulable(spec_.cls)) return ninsl_at(t);
    return relay_ == Relay::ON ? spec_.rated_power : 0.0;
  }

  // Meters interval t, emits telemetry at the interval's end, then updates
  // the accumulators. A schedulable load that reaches gamma switches itself
  // off.
  protocol::Telemetry tick(int t) {
    const double kw = power_kw(t);
    const bool on = is_schedulable(spec_.cls) ? relay_ == Relay::ON : kw > 0.0;
    const metering::ElectricalParams p =
        is_schedulable(spec_.cls) ? (on ? on_params_ : idle_params()) : measure(kw * 1000.0);

    protocol::Telemetry tel{id(),
                            static_cast<std::int64_t>(std::llround(tm_.interval_start(t + 1))),
                            p.vrms,
                            p.irms,
                            p.real_power,
                            p.power_factor,
                            on ? Relay::ON : Relay::OFF};

    energy_kwh_ += kw * tm_.interval_hours();
    if (is_schedulable(spec_.cls) && relay_ == Relay::ON) {
      minutes_run_ += tm_.interval_minutes();
      if (minutes_run_ >= config().gamma) relay_ = Relay::OFF;
    }
    return tel;
  }

 private:
  void transition(Screen from, Screen to) {
    if (screen_ != from)
      throw Error(Errc::WrongScreen, id() + ": cannot go to " + std::string(protocol::to_string(to)) + " from " +
                                         std::string(protocol::to_string(screen_)));
    screen_ = to;
  }

  double ninsl_at(int t) const {
    if (!spec_.ninsl_demand || t < 0 || t >= static_cast<int>(spec_.ninsl_demand->size())) return 0.0;
    return (*spec_.ninsl_demand)[static_cast<std::size_t>(t)];
  }

  metering::ElectricalParams measure(double watts) const { return metering::measure_load(watts, 1.0, meter_); }

  metering::ElectricalParams idle_params() const {
    if (!idle_params_) idle_params_ = measure(0.0);
    return *idle_params_;
  }

  LoadSpec spec_;
  TimeModel tm_;
  metering::MeterConfig meter_;
  metering::ElectricalParams on_params_;
  mutable std::optional<metering::ElectricalParams> idle_params_;
  Relay relay_ = Relay::OFF;
  Screen screen_ = Screen::Default;
  double energy_kwh_ = 0.0;
  int minutes_run_ = 0;
};

}  // namespace hanemu
