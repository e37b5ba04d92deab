#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hanemu {

enum class Errc {
  // domain
  InvalidTimeModel,
  WindowReversed,
  InfeasibleGamma,
  NonPositiveGamma,
  GammaNotWholeIntervals,
  OutOfHorizon,
  InvalidLoad,
  InvalidMdl,
  // metering
  InvalidSpec,
  EmptySeries,
  LengthMismatch,
  TooFewSamples,
  ZeroSignal,
  // protocol
  InvalidMessage,
  UnknownTag,
  FieldCount,
  FieldParse,
  EmptyLine,
  // sln
  WrongScreen,
  WrongNode,
  NinslCommand,
  // lmu
  DuplicateActiveLoad,
  InvalidConfig,
  NotSchedulable,
  OutsideWindow,
  MdlMissing,
  CorruptRegistry,
  UnknownLoad,
  // simnet
  InfeasibleScenario,
  ScenarioError,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidTimeModel: return "InvalidTimeModel";
    case Errc::WindowReversed: return "WindowReversed";
    case Errc::InfeasibleGamma: return "InfeasibleGamma";
    case Errc::NonPositiveGamma: return "NonPositiveGamma";
    case Errc::GammaNotWholeIntervals: return "GammaNotWholeIntervals";
    case Errc::OutOfHorizon: return "OutOfHorizon";
    case Errc::InvalidLoad: return "InvalidLoad";
    case Errc::InvalidMdl: return "InvalidMdl";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::ZeroSignal: return "ZeroSignal";
    case Errc::InvalidMessage: return "InvalidMessage";
    case Errc::UnknownTag: return "UnknownTag";
    case Errc::FieldCount: return "FieldCount";
    case Errc::FieldParse: return "FieldParse";
    case Errc::EmptyLine: return "EmptyLine";
    case Errc::WrongScreen: return "WrongScreen";
    case Errc::WrongNode: return "WrongNode";
    case Errc::NinslCommand: return "NinslCommand";
    case Errc::DuplicateActiveLoad: return "DuplicateActiveLoad";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::NotSchedulable: return "NotSchedulable";
    case Errc::OutsideWindow: return "OutsideWindow";
    case Errc::MdlMissing: return "MdlMissing";
    case Errc::CorruptRegistry: return "CorruptRegistry";
    case Errc::UnknownLoad: return "UnknownLoad";
    case Errc::InfeasibleScenario: return "InfeasibleScenario";
    case Errc::ScenarioError: return "ScenarioError";
  }
  return "Unknown";
}

// All module errors are reported through this one exception type; callers
// dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hanemu
