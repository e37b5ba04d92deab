#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hanemu/protocol.hpp"

namespace hanemu::test_support {

class MessageGen {
 public:
  explicit MessageGen(std::uint64_t seed) : rng_(seed) {}

  protocol::Message next() {
    using namespace protocol;
    switch (pick(0, 7)) {
      case 0: {
        const auto cls = static_cast<LoadClass>(pick(0, 2));
        if (cls == LoadClass::NINSL) return ConfigLog{id(), cls, 0, 0, 0, real(0.0, 5.0)};
        const int a = pick(0, 95);
        return ConfigLog{id(), cls, a, pick(a, 95), pick(1, 1440), real(0.01, 20.0)};
      }
      case 1:
        return Telemetry{id(), static_cast<std::int64_t>(pick(-100000, 100000)) * 7,
                         real(0.0, 260.0), real(0.0, 40.0), real(-1e4, 1e4), real(0.0, 1.0),
                         pick(0, 1) ? Relay::ON : Relay::OFF};
      case 2:
        return Command{id(), pick(0, 1) ? Relay::ON : Relay::OFF, static_cast<std::int64_t>(pick(-100000, 100000))};
      case 3:
        return Ack{id(), static_cast<Kind>(pick(0, 7)), static_cast<AckStatus>(pick(0, 2))};
      case 4:
        return UiEvent{id(), static_cast<UiEventKind>(pick(0, 4)), text()};
      case 5:
        return ScreenState{id(), static_cast<Screen>(pick(0, 3))};
      case 6:
        return ProfileRow{pick(0, 95), real(0.0, 30.0), real(0.1, 10.0), real(0.0, 20.0)};
      default:
        return ErrorReport{id(), static_cast<Errc>(pick(0, static_cast<int>(Errc::ScenarioError))), text()};
    }
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Mixes smooth values with awkward ones (tiny, huge, many digits).
  double real(double lo, double hi) {
    const double v = std::uniform_real_distribution<double>(lo, hi)(rng_);
    switch (pick(0, 5)) {
      case 0: return std::max(lo, std::round(v * 4) / 4);
      case 1: return lo;
      default: return v;
    }
  }

  std::string id() {
    static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.:";
    std::string s(static_cast<std::size_t>(pick(1, 12)), 'x');
    for (char& c : s) c = alphabet[static_cast<std::size_t>(pick(0, static_cast<int>(alphabet.size()) - 1))];
    return s;
  }

  std::string text() {
    static constexpr std::string_view alphabet = "abc XYZ 0123,;:=()";
    std::string s(static_cast<std::size_t>(pick(0, 20)), 'x');
    for (char& c : s) c = alphabet[static_cast<std::size_t>(pick(0, static_cast<int>(alphabet.size()) - 1))];
    return s;
  }

  std::mt19937_64 rng_;
};

}  // namespace hanemu::test_support
