#pragma once

// Software stand-in for the node's voltage/current sensing path: sampled
// sines with a DC bias, bias removal, and RMS / power / power-factor
// estimation over whole cycles.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "hanemu/error.hpp"

namespace hanemu::metering {

struct WaveformSpec {
  double amplitude = 0.0;  // peak
  double frequency = 50.0;  // Hz
  double phase = 0.0;  // radians
  double dc_offset = 0.0;
  double sample_rate = 3200.0;  // samples per second
  double duration = 0.2;  // seconds
};

struct ElectricalParams {
  double vrms = 0.0;
  double irms = 0.0;
  double real_power = 0.0;  // W
  double apparent_power = 0.0;  // VA
  double power_factor = 0.0;
};

namespace detail {

inline bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

}  // namespace detail

inline std::size_t sample_count(const WaveformSpec& spec) {
  if (!std::isfinite(spec.amplitude) || !std::isfinite(spec.phase) || !std::isfinite(spec.dc_offset))
    throw Error(Errc::InvalidSpec, "non-finite waveform parameter");
  if (!(spec.frequency > 0.0) || !std::isfinite(spec.frequency))
    throw Error(Errc::InvalidSpec, "frequency must be > 0");
  if (!(spec.sample_rate >= 32.0 * spec.frequency) || !std::isfinite(spec.sample_rate))
    throw Error(Errc::InvalidSpec, "sample rate below 32 samples per cycle");
  if (!(spec.duration > 0.0) || !std::isfinite(spec.duration))
    throw Error(Errc::InvalidSpec, "duration must be > 0");
  const double cycles = spec.duration * spec.frequency;
  if (!detail::near_integer(cycles)) throw Error(Errc::InvalidSpec, "duration is not a whole number of cycles");
  const double samples = spec.duration * spec.sample_rate;
  if (!detail::near_integer(samples)) throw Error(Errc::InvalidSpec, "duration is not a whole number of samples");
  return static_cast<std::size_t>(std::llround(samples));
}

inline std::vector<double> synthesize(const WaveformSpec& spec) {
  const std::size_t n = sample_count(spec);
  std::vector<double> out(n);
  const double w = 2.0 * std::numbers::pi * spec.frequency / spec.sample_rate;
  for (std::size_t k = 0; k < n; ++k)
    out[k] = spec.dc_offset + spec.amplitude * std::sin(w * static_cast<double>(k) + spec.phase);
  return out;
}

inline std::vector<double> remove_dc_offset(std::span<const double> samples) {
  if (samples.empty()) throw Error(Errc::EmptySeries, "cannot remove offset of an empty series");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  std::vector<double> out(samples.begin(), samples.end());
  for (double& x : out) x -= mean;
  return out;
}

inline double rms(std::span<const double> samples) {
  if (samples.empty()) throw Error(Errc::EmptySeries, "rms of an empty series");
  const double sq = std::inner_product(samples.begin(), samples.end(), samples.begin(), 0.0);
  return std::sqrt(sq / static_cast<double>(samples.size()));
}

// Both series must be offset-free and span whole cycles.
inline ElectricalParams compute_params(std::span<const double> v, std::span<const double> i) {
  if (v.size() != i.size())
    throw Error(Errc::LengthMismatch,
                "voltage has " + std::to_string(v.size()) + " samples, current " + std::to_string(i.size()));
  if (v.size() < 32) throw Error(Errc::TooFewSamples, "need at least 32 samples, got " + std::to_string(v.size()));

  const double n = static_cast<double>(v.size());
  ElectricalParams p;
  p.vrms = rms(v);
  p.irms = rms(i);
  p.real_power = std::inner_product(v.begin(), v.end(), i.begin(), 0.0) / n;
  p.apparent_power = p.vrms * p.irms;
  if (!(p.apparent_power > 0.0)) throw Error(Errc::ZeroSignal, "apparent power is zero; power factor undefined");
  // |P| <= S holds mathematically (Cauchy-Schwarz); clamp rounding.
  p.power_factor = std::min(1.0, std::abs(p.real_power) / p.apparent_power);
  return p;
}

// Sensing configuration of a node: nominal supply and the sampling window.
struct MeterConfig {
  double supply_vrms = 230.0;
  double frequency = 50.0;
  double sample_rate = 3200.0;
  int cycles = 10;
  double v_offset = 2.5;  // sensing-chain bias, removed before estimation
  double i_offset = 2.5;
};

// Runs the full sensing path for a load drawing `power_w` at a given power
// factor. An idle load yields zero current and zero power factor.
inline ElectricalParams measure_load(double power_w, double power_factor, const MeterConfig& cfg) {
  const double duration = cfg.cycles / cfg.frequency;
  const double v_peak = cfg.supply_vrms * std::numbers::sqrt2;
  const auto v = remove_dc_offset(synthesize({v_peak, cfg.frequency, 0.0, cfg.v_offset, cfg.sample_rate, duration}));

  if (!(power_w > 0.0)) {
    ElectricalParams idle;
    idle.vrms = rms(v);
    return idle;
  }
  const double irms = power_w / (cfg.supply_vrms * power_factor);
  const double lag = std::acos(std::clamp(power_factor, 0.0, 1.0));
  const auto i = remove_dc_offset(
      synthesize({irms * std::numbers::sqrt2, cfg.frequency, -lag, cfg.i_offset, cfg.sample_rate, duration}));
  return compute_params(v, i);
}

}  // namespace hanemu::metering
