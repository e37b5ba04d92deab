#pragma once

// Seeded random scenarios for property tests. Every generated config is
// feasible by construction.

#include <random>
#include <string>
#include <vector>

#include "hanemu/simnet.hpp"

namespace hanemu::test_support {

struct GenOptions {
  int interval_minutes = 60;
  int max_loads = 8;
  int window_limit = -1;  // last interval windows may reach; -1 = horizon - 1
  double ninsl_probability = 0.35;
};

inline simnet::Scenario random_scenario(std::uint64_t seed, const GenOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform_real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  // Quarter-kW steps keep sums exact in binary floating point.
  auto quarter = [&](int lo, int hi) { return uniform_int(lo, hi) * 0.25; };

  simnet::Scenario sc;
  sc.tm = TimeModel(opt.interval_minutes);
  const int horizon = sc.tm.horizon();
  const int last = opt.window_limit < 0 ? horizon - 1 : opt.window_limit;

  std::vector<double> mdl(static_cast<std::size_t>(horizon));
  for (double& m : mdl) m = quarter(4, 16);
  sc.mdl = MdlProfile(mdl, sc.tm);

  const int n = uniform_int(0, opt.max_loads);
  for (int k = 0; k < n; ++k) {
    LoadSpec l;
    l.load_id = "L" + std::to_string(k);
    l.name = l.load_id;
    if (uniform_real(0.0, 1.0) < opt.ninsl_probability) {
      l.cls = LoadClass::NINSL;
      std::vector<double> d(static_cast<std::size_t>(horizon));
      for (double& x : d) x = uniform_int(0, 2) == 0 ? 0.0 : quarter(1, 6);
      l.ninsl_demand = d;
    } else {
      l.cls = uniform_int(0, 1) == 0 ? LoadClass::NISL : LoadClass::ISL;
      l.rated_power = quarter(1, 14);
      const int alpha = uniform_int(0, last);
      const int beta = uniform_int(alpha, last);
      const int gamma_intervals = uniform_int(1, beta - alpha + 1);
      l.config = ScheduleConfig{alpha, beta, gamma_intervals * opt.interval_minutes};
    }
    sc.loads.push_back(std::move(l));
  }
  sc.link = {7.0, 9.0, seed};
  sc.penalty_rate_x = 1.0;
  return sc;
}

inline double ninsl_total(const simnet::Scenario& sc, int t) {
  double s = 0.0;
  for (const auto& l : sc.loads)
    if (l.cls == LoadClass::NINSL) s += (*l.ninsl_demand)[static_cast<std::size_t>(t)];
  return s;
}

}  // namespace hanemu::test_support
