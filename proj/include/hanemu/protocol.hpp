#pragma once

// Node <-> LMU wire protocol. One message per line, fields separated by '|',
// first field a three-letter tag:
//
//   CFG|node|class|alpha|beta|gamma|rated_kw
//   TEL|node|timestamp|vrms|irms|real_power_w|power_factor|ON/OFF
//   CMD|node|ON/OFF|issued_at
//   ACK|node|ref_tag|OK/RUN_COMPLETE/REJECTED
//
// Live mode adds:
//
//   UIE|node|event|args          dashboard -> node screen machine
//   SCR|node|screen              node screen changed
//   PRF|interval|aggregate_kw|mdl_kw|over_kw
//   ERR|node|code|detail         rejected UI input
//
// Reals are rendered in shortest round-trip form, so decode(encode(m)) == m.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include "hanemu/domain.hpp"
#include "hanemu/error.hpp"

namespace hanemu::protocol {

enum class Relay { OFF, ON };

constexpr std::string_view to_string(Relay r) noexcept { return r == Relay::ON ? "ON" : "OFF"; }

enum class Screen { Default, Menu, NodeConfig, DataLogging };

constexpr std::string_view to_string(Screen s) noexcept {
  switch (s) {
    case Screen::Default: return "DEFAULT";
    case Screen::Menu: return "MENU";
    case Screen::NodeConfig: return "NODE_CONFIG";
    case Screen::DataLogging: return "DATA_LOGGING";
  }
  return "?";
}

enum class AckStatus { OK, RUN_COMPLETE, REJECTED };

constexpr std::string_view to_string(AckStatus s) noexcept {
  switch (s) {
    case AckStatus::OK: return "OK";
    case AckStatus::RUN_COMPLETE: return "RUN_COMPLETE";
    case AckStatus::REJECTED: return "REJECTED";
  }
  return "?";
}

enum class UiEventKind { MENU, NODE_CONFIG, DATA_LOGGING, BACK, SUBMIT };

constexpr std::string_view to_string(UiEventKind e) noexcept {
  switch (e) {
    case UiEventKind::MENU: return "MENU";
    case UiEventKind::NODE_CONFIG: return "NODE_CONFIG";
    case UiEventKind::DATA_LOGGING: return "DATA_LOGGING";
    case UiEventKind::BACK: return "BACK";
    case UiEventKind::SUBMIT: return "SUBMIT";
  }
  return "?";
}

struct ConfigLog {
  std::string node_id;
  LoadClass cls = LoadClass::NINSL;
  int alpha = 0;
  int beta = 0;
  int gamma = 0;  // minutes
  double rated_power = 0.0;  // kW
  bool operator==(const ConfigLog&) const = default;
};

struct Telemetry {
  std::string node_id;
  std::int64_t timestamp = 0;  // sim seconds
  double vrms = 0.0;
  double irms = 0.0;
  double real_power = 0.0;  // W
  double power_factor = 0.0;
  Relay relay_state = Relay::OFF;
  bool operator==(const Telemetry&) const = default;
};

struct Command {
  std::string node_id;
  Relay action = Relay::OFF;
  std::int64_t issued_at = 0;  // sim seconds
  bool operator==(const Command&) const = default;
};

enum class Kind { CFG, TEL, CMD, ACK, UIE, SCR, PRF, ERR };

struct Ack {
  std::string node_id;
  Kind ref_kind = Kind::CMD;
  AckStatus status = AckStatus::OK;
  bool operator==(const Ack&) const = default;
};

struct UiEvent {
  std::string node_id;
  UiEventKind event = UiEventKind::MENU;
  std::string args;  // comma-separated; SUBMIT carries "CLASS,alpha,beta,gamma"
  bool operator==(const UiEvent&) const = default;
};

struct ScreenState {
  std::string node_id;
  Screen screen = Screen::Default;
  bool operator==(const ScreenState&) const = default;
};

struct ProfileRow {
  int interval = 0;
  double aggregate_kw = 0.0;
  double mdl_kw = 0.0;
  double over_kw = 0.0;
  bool operator==(const ProfileRow&) const = default;
};

struct ErrorReport {
  std::string node_id;
  Errc code = Errc::InvalidConfig;
  std::string detail;
  bool operator==(const ErrorReport&) const = default;
};

using Message = std::variant<ConfigLog, Telemetry, Command, Ack, UiEvent, ScreenState, ProfileRow, ErrorReport>;

constexpr std::string_view tag_of(Kind k) noexcept {
  switch (k) {
    case Kind::CFG: return "CFG";
    case Kind::TEL: return "TEL";
    case Kind::CMD: return "CMD";
    case Kind::ACK: return "ACK";
    case Kind::UIE: return "UIE";
    case Kind::SCR: return "SCR";
    case Kind::PRF: return "PRF";
    case Kind::ERR: return "ERR";
  }
  return "?";
}

inline Kind kind_of(const Message& m) noexcept { return static_cast<Kind>(m.index()); }

// Decode failures carry the offending field position (0 = tag) and what was
// expected there.
class ProtocolError : public Error {
 public:
  ProtocolError(Errc code, std::size_t field, std::string expected, const std::string& detail)
      : Error(code, "field " + std::to_string(field) + " (" + expected + "): " + detail),
        field_(field),
        expected_(std::move(expected)) {}

  std::size_t field() const noexcept { return field_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t field_;
  std::string expected_;
};

// Free text fields (UI args, error detail) may not hold the delimiter or
// line breaks.
inline bool valid_text(std::string_view s) noexcept {
  for (char c : s)
    if (c == '|' || c == '\n' || c == '\r') return false;
  return true;
}

// Replaces characters that cannot travel inside a field.
inline std::string sanitize_text(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '|' || c == '\n' || c == '\r') c = ' ';
  return out;
}

namespace detail {

inline void invalid(const std::string& why) { throw Error(Errc::InvalidMessage, why); }

inline void check_id(const std::string& id) {
  if (!valid_node_id(id)) invalid("bad node id '" + sanitize_text(id) + "'");
}

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) invalid(std::string(what) + " is not finite");
}

inline void check(const ConfigLog& m) {
  check_id(m.node_id);
  check_finite(m.rated_power, "rated_power");
  if (m.rated_power < 0.0) invalid("rated_power < 0");
  if (m.cls == LoadClass::NINSL) {
    if (m.alpha != 0 || m.beta != 0 || m.gamma != 0) invalid("NINSL config must be (0,0,0)");
  } else {
    if (m.alpha < 0 || m.alpha > m.beta) invalid("window must satisfy 0 <= alpha <= beta");
    if (m.gamma <= 0) invalid("gamma must be > 0");
    if (m.rated_power <= 0.0) invalid("schedulable load needs rated_power > 0");
  }
}

inline void check(const Telemetry& m) {
  check_id(m.node_id);
  check_finite(m.vrms, "vrms");
  check_finite(m.irms, "irms");
  check_finite(m.real_power, "real_power");
  check_finite(m.power_factor, "power_factor");
  if (m.vrms < 0.0 || m.irms < 0.0) invalid("rms values must be >= 0");
  if (m.power_factor < 0.0 || m.power_factor > 1.0) invalid("power factor outside [0,1]");
}

inline void check(const Command& m) { check_id(m.node_id); }
inline void check(const Ack& m) { check_id(m.node_id); }
inline void check(const ScreenState& m) { check_id(m.node_id); }

inline void check(const UiEvent& m) {
  check_id(m.node_id);
  if (!valid_text(m.args)) invalid("UI args hold a delimiter or line break");
}

inline void check(const ProfileRow& m) {
  if (m.interval < 0) invalid("interval < 0");
  check_finite(m.aggregate_kw, "aggregate_kw");
  check_finite(m.mdl_kw, "mdl_kw");
  check_finite(m.over_kw, "over_kw");
}

inline void check(const ErrorReport& m) {
  check_id(m.node_id);
  if (!valid_text(m.detail)) invalid("error detail holds a delimiter or line break");
}

inline void put(std::string& out, std::string_view s) {
  out += '|';
  out += s;
}

template <typename T>
void put_number(std::string& out, T v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out += '|';
  out.append(buf, end);
}

}  // namespace detail

inline std::string encode(const Message& msg) {
  using namespace detail;
  std::visit([](const auto& m) { check(m); }, msg);

  std::string out(tag_of(kind_of(msg)));
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConfigLog>) {
          put(out, m.node_id);
          put(out, to_string(m.cls));
          put_number(out, m.alpha);
          put_number(out, m.beta);
          put_number(out, m.gamma);
          put_number(out, m.rated_power);
        } else if constexpr (std::is_same_v<T, Telemetry>) {
          put(out, m.node_id);
          put_number(out, m.timestamp);
          put_number(out, m.vrms);
          put_number(out, m.irms);
          put_number(out, m.real_power);
          put_number(out, m.power_factor);
          put(out, to_string(m.relay_state));
        } else if constexpr (std::is_same_v<T, Command>) {
          put(out, m.node_id);
          put(out, to_string(m.action));
          put_number(out, m.issued_at);
        } else if constexpr (std::is_same_v<T, Ack>) {
          put(out, m.node_id);
          put(out, tag_of(m.ref_kind));
          put(out, to_string(m.status));
        } else if constexpr (std::is_same_v<T, UiEvent>) {
          put(out, m.node_id);
          put(out, to_string(m.event));
          put(out, m.args);
        } else if constexpr (std::is_same_v<T, ScreenState>) {
          put(out, m.node_id);
          put(out, to_string(m.screen));
        } else if constexpr (std::is_same_v<T, ProfileRow>) {
          put_number(out, m.interval);
          put_number(out, m.aggregate_kw);
          put_number(out, m.mdl_kw);
          put_number(out, m.over_kw);
        } else if constexpr (std::is_same_v<T, ErrorReport>) {
          put(out, m.node_id);
          put(out, to_string(m.code));
          put(out, m.detail);
        }
      },
      msg);
  out += '\n';
  return out;
}

namespace detail {

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string_view> fields) : fields_(std::move(fields)) {}

  std::string_view raw(std::size_t i) const { return fields_[i]; }

  std::string id(std::size_t i) const {
    if (!valid_node_id(fields_[i])) fail(i, "node id");
    return std::string(fields_[i]);
  }

  std::string text(std::size_t i) const {
    // Split on '|' already guarantees no delimiter; line breaks are not.
    if (!valid_text(fields_[i])) fail(i, "text");
    return std::string(fields_[i]);
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    Int v{};
    auto f = fields_[i];
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || p != f.data() + f.size() || f.empty()) fail(i, "integer");
    return v;
  }

  double real(std::size_t i) const {
    double v{};
    auto f = fields_[i];
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || p != f.data() + f.size() || f.empty() || !std::isfinite(v)) fail(i, "finite real");
    return v;
  }

  template <typename Enum, typename Parse>
  Enum keyword(std::size_t i, const char* expected, Parse parse) const {
    auto v = parse(fields_[i]);
    if (!v) fail(i, expected);
    return *v;
  }

  [[noreturn]] void fail(std::size_t i, std::string expected) const {
    throw ProtocolError(Errc::FieldParse, i, std::move(expected),
                        "cannot parse '" + sanitize_text(fields_[i].substr(0, 32)) + "'");
  }

 private:
  std::vector<std::string_view> fields_;
};

inline std::optional<Kind> parse_kind(std::string_view s) noexcept {
  for (Kind k : {Kind::CFG, Kind::TEL, Kind::CMD, Kind::ACK, Kind::UIE, Kind::SCR, Kind::PRF, Kind::ERR})
    if (tag_of(k) == s) return k;
  return std::nullopt;
}

inline std::optional<Relay> parse_relay(std::string_view s) noexcept {
  if (s == "ON") return Relay::ON;
  if (s == "OFF") return Relay::OFF;
  return std::nullopt;
}

inline std::optional<AckStatus> parse_ack_status(std::string_view s) noexcept {
  for (AckStatus a : {AckStatus::OK, AckStatus::RUN_COMPLETE, AckStatus::REJECTED})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

inline std::optional<UiEventKind> parse_ui_event(std::string_view s) noexcept {
  for (auto e : {UiEventKind::MENU, UiEventKind::NODE_CONFIG, UiEventKind::DATA_LOGGING, UiEventKind::BACK,
                 UiEventKind::SUBMIT})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

inline std::optional<Screen> parse_screen(std::string_view s) noexcept {
  for (auto e : {Screen::Default, Screen::Menu, Screen::NodeConfig, Screen::DataLogging})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

inline std::optional<Errc> parse_errc(std::string_view s) noexcept {
  for (int i = 0; i <= static_cast<int>(Errc::ScenarioError); ++i)
    if (to_string(static_cast<Errc>(i)) == s) return static_cast<Errc>(i);
  return std::nullopt;
}

constexpr std::size_t field_count(Kind k) noexcept {
  switch (k) {
    case Kind::CFG: return 7;
    case Kind::TEL: return 8;
    case Kind::CMD: return 4;
    case Kind::ACK: return 4;
    case Kind::UIE: return 4;
    case Kind::SCR: return 3;
    case Kind::PRF: return 5;
    case Kind::ERR: return 4;
  }
  return 0;
}

}  // namespace detail

// Accepts a line with or without its trailing '\n'. Every failure is a
// ProtocolError; decoded messages also satisfy the encode-side invariants.
inline Message decode(std::string_view line) {
  using namespace detail;
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.empty()) throw ProtocolError(Errc::EmptyLine, 0, "tag", "empty line");

  std::vector<std::string_view> fields;
  for (std::size_t start = 0;;) {
    const auto bar = line.find('|', start);
    if (bar == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, bar - start));
    start = bar + 1;
  }

  const auto kind = parse_kind(fields[0]);
  if (!kind) throw ProtocolError(Errc::UnknownTag, 0, "tag", "unknown tag '" + sanitize_text(fields[0].substr(0, 16)) + "'");
  const std::size_t want = field_count(*kind);
  if (fields.size() != want)
    throw ProtocolError(Errc::FieldCount, fields.size(), std::to_string(want) + " fields",
                        std::string(tag_of(*kind)) + " has " + std::to_string(fields.size()) + " fields");

  const FieldReader r(std::move(fields));
  Message msg;
  switch (*kind) {
    case Kind::CFG:
      msg = ConfigLog{r.id(1), r.keyword<LoadClass>(2, "load class", parse_load_class), r.integer<int>(3),
                      r.integer<int>(4), r.integer<int>(5), r.real(6)};
      break;
    case Kind::TEL:
      msg = Telemetry{r.id(1), r.integer<std::int64_t>(2), r.real(3), r.real(4), r.real(5), r.real(6),
                      r.keyword<Relay>(7, "ON/OFF", parse_relay)};
      break;
    case Kind::CMD:
      msg = Command{r.id(1), r.keyword<Relay>(2, "ON/OFF", parse_relay), r.integer<std::int64_t>(3)};
      break;
    case Kind::ACK:
      msg = Ack{r.id(1), r.keyword<Kind>(2, "message tag", parse_kind),
                r.keyword<AckStatus>(3, "ack status", parse_ack_status)};
      break;
    case Kind::UIE:
      msg = UiEvent{r.id(1), r.keyword<UiEventKind>(2, "UI event", parse_ui_event), r.text(3)};
      break;
    case Kind::SCR:
      msg = ScreenState{r.id(1), r.keyword<Screen>(2, "screen", parse_screen)};
      break;
    case Kind::PRF:
      msg = ProfileRow{r.integer<int>(1), r.real(2), r.real(3), r.real(4)};
      break;
    case Kind::ERR:
      msg = ErrorReport{r.id(1), r.keyword<Errc>(2, "error code", parse_errc), r.text(3)};
      break;
  }

  try {
    std::visit([](const auto& m) { check(m); }, msg);
  } catch (const Error& e) {
    throw ProtocolError(Errc::InvalidMessage, 0, "valid message", e.what());
  }
  return msg;
}

// Per-connection reassembly of a byte stream into lines.
class LineFramer {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }

  // Next complete line without its terminator.
  std::optional<std::string> next_line() {
    const auto nl = buffer_.find('\n', scanned_);
    if (nl == std::string::npos) {
      scanned_ = buffer_.size();
      return std::nullopt;
    }
    std::string line = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    scanned_ = 0;
    return line;
  }

  std::size_t pending() const noexcept { return buffer_.size(); }

 private:
  std::string buffer_;
  std::size_t scanned_ = 0;
};

}  // namespace hanemu::protocol
