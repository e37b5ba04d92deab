#pragma once

// Live mode: the day simulation advanced one interval at a time by an
// external pacer, with dashboard input (UIE lines) queued and applied at
// interval boundaries. Outbound traffic is plain protocol lines.
//
// Not thread-safe; the transport must call in from a single thread.

#include <deque>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "hanemu/protocol.hpp"
#include "hanemu/simnet.hpp"

namespace hanemu::live {

class LiveSession {
 public:
  LiveSession(simnet::Scenario scenario, simnet::Algorithm algorithm) : sim_(std::move(scenario), algorithm) {
    sim_.set_observer([this](const simnet::Envelope& e) { outbox_.push_back(e.line); });
  }

  // Panel state for a newly connected dashboard: each node's screen and its
  // logged configuration.
  std::vector<std::string> snapshot() const {
    std::vector<std::string> out;
    for (const std::string& id : sim_.scenario().loads | std::views::transform(&LoadSpec::load_id)) {
      const SmartLoadNode& n = sim_.node(id);
      const ScheduleConfig c = n.config();
      out.push_back(protocol::encode(protocol::ScreenState{id, n.screen()}));
      out.push_back(protocol::encode(protocol::ConfigLog{id, n.load_class(), c.alpha, c.beta, c.gamma, n.spec().rated_power}));
    }
    return out;
  }

  // Queues one inbound line. Anything other than a well-formed UIE is
  // answered with an ERR line on the next advance().
  void submit_line(std::string_view line) {
    try {
      const protocol::Message m = protocol::decode(line);
      if (const auto* ev = std::get_if<protocol::UiEvent>(&m)) {
        inbox_.push_back(*ev);
        return;
      }
      outbox_.push_back(protocol::encode(protocol::ErrorReport{"lmu", Errc::InvalidMessage, "only UIE lines are accepted"}));
    } catch (const Error& e) {
      outbox_.push_back(protocol::encode(protocol::ErrorReport{"lmu", e.code(), protocol::sanitize_text(e.what())}));
    }
  }

  bool done() const noexcept { return sim_.done(); }
  int next_interval() const noexcept { return sim_.next_interval(); }

  // Applies queued input, runs one interval, and returns everything to send:
  // screen/error replies, delivered protocol traffic, then the PRF row.
  std::vector<std::string> advance() {
    sim_.begin();
    while (!inbox_.empty()) {
      const protocol::UiEvent ev = std::move(inbox_.front());
      inbox_.pop_front();
      for (const protocol::Message& m : sim_.apply_ui_event(ev)) outbox_.push_back(protocol::encode(m));
    }
    if (!sim_.done()) outbox_.push_back(protocol::encode(sim_.step()));
    std::vector<std::string> out(std::make_move_iterator(outbox_.begin()), std::make_move_iterator(outbox_.end()));
    outbox_.clear();
    return out;
  }

  const simnet::DaySimulation& simulation() const noexcept { return sim_; }

 private:
  simnet::DaySimulation sim_;
  std::deque<protocol::UiEvent> inbox_;
  std::vector<std::string> outbox_;
};

}  // namespace hanemu::live
