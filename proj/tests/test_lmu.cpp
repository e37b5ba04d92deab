#include <gtest/gtest.h>

#include "hanemu/lmu.hpp"
#include "support/drive.hpp"
#include "support/oracle.hpp"
#include "support/scenario_gen.hpp"

using namespace hanemu;
using namespace hanemu::lmu;
using protocol::ConfigLog;
using protocol::Relay;

namespace {

const TimeModel kHourly(60);

MdlProfile flat_mdl(double kw) { return MdlProfile(std::vector<double>(24, kw), kHourly); }

LoadState state(const std::string& id, LoadClass cls, double kw, ScheduleConfig cfg, int remaining) {
  return {LoadSpec{id, id, cls, kw, cfg, std::nullopt}, remaining, false, false};
}

Errc code_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::InvalidConfig;
}

simnet::Scenario scenario(std::vector<LoadSpec> loads, std::vector<double> mdl) {
  simnet::Scenario sc;
  sc.tm = kHourly;
  sc.mdl = MdlProfile(std::move(mdl), kHourly);
  sc.loads = std::move(loads);
  return simnet::validate_scenario(sc);
}

}  // namespace

TEST(Register, FreshLoad) {
  Registry reg;
  register_config(reg, ConfigLog{"n1", LoadClass::NISL, 10, 14, 120, 1.5}, kHourly);
  ASSERT_TRUE(reg.contains("n1"));
  EXPECT_EQ(reg.at("n1").remaining_minutes, 120);
  EXPECT_FALSE(reg.at("n1").started);
}

TEST(Register, ReRegistrationBeforeStartResets) {
  Registry reg;
  register_config(reg, ConfigLog{"n1", LoadClass::NISL, 10, 14, 120, 1.5}, kHourly);
  register_config(reg, ConfigLog{"n1", LoadClass::NISL, 10, 14, 60, 1.5}, kHourly);
  EXPECT_EQ(reg.at("n1").remaining_minutes, 60);
}

TEST(Register, ReRegistrationAfterStartRejected) {
  Registry reg;
  register_config(reg, ConfigLog{"n1", LoadClass::NISL, 10, 14, 120, 1.5}, kHourly);
  commit_interval(reg, {{"n1", Relay::ON}}, kHourly);
  EXPECT_EQ(code_of([&] { register_config(reg, ConfigLog{"n1", LoadClass::NISL, 10, 14, 60, 1.5}, kHourly); }),
            Errc::DuplicateActiveLoad);
  EXPECT_EQ(reg.at("n1").remaining_minutes, 60);
}

TEST(Register, InvalidConfig) {
  Registry reg;
  EXPECT_EQ(code_of([&] { register_config(reg, ConfigLog{"n1", LoadClass::ISL, 5, 6, 180, 1.0}, kHourly); }),
            Errc::InvalidConfig);
  EXPECT_EQ(code_of([&] { register_config(reg, ConfigLog{"n1", LoadClass::NINSL, 1, 2, 60, 0.0}, kHourly); }),
            Errc::InvalidConfig);
  EXPECT_TRUE(reg.empty());
}

TEST(Priority, Examples) {
  // remaining 2 intervals, two window intervals left -> zero slack
  EXPECT_DOUBLE_EQ(priority(state("a", LoadClass::ISL, 1, {0, 5, 120}, 120), 4, kHourly), 1.0);
  EXPECT_DOUBLE_EQ(priority(state("a", LoadClass::ISL, 1, {0, 5, 120}, 60), 2, kHourly), 0.25);
  EXPECT_EQ(code_of([] { priority(state("a", LoadClass::ISL, 1, {0, 5, 120}, 0), 2, kHourly); }),
            Errc::NotSchedulable);
  EXPECT_EQ(code_of([] { priority(state("a", LoadClass::ISL, 1, {3, 5, 60}, 60), 2, kHourly); }),
            Errc::OutsideWindow);
  LoadState tv{LoadSpec{"tv", "tv", LoadClass::NINSL, 0.0, std::nullopt, std::vector<double>(24, 0.0)}, 0, false,
               false};
  EXPECT_EQ(code_of([&] { priority(tv, 2, kHourly); }), Errc::NotSchedulable);
}

TEST(Priority, InUnitIntervalForFeasibleStates) {
  for (int beta = 0; beta < 24; ++beta)
    for (int t = 0; t <= beta; ++t)
      for (int n = 1; n <= beta - t + 1; ++n) {
        const double p = priority(state("a", LoadClass::ISL, 1, {0, beta, 60 * (beta + 1)}, 60 * n), t, kHourly);
        EXPECT_GT(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_EQ(p == 1.0, n == beta - t + 1);
      }
}

// One NISL, 1 kW, window [0,3], gamma 2 intervals, MDL 1 kW. Brute force over
// start choices {0,1,2}: every one is penalty-free, so the tie-break picks the
// earliest.
TEST(ScheduleInterval, SingleNislStartsEarliest) {
  const auto sc = scenario({{"w", "w", LoadClass::NISL, 1.0, ScheduleConfig{0, 3, 120}, std::nullopt}},
                           std::vector<double>(24, 1.0));
  for (const auto& placement : test_support::legal_placements(sc.loads[0], sc.tm)) {
    std::vector<double> profile(24, 0.0);
    for (int t : placement) profile[static_cast<std::size_t>(t)] += 1.0;
    EXPECT_EQ(penalty(profile, sc.mdl, 1.0, sc.tm).energy_over_mdl, 0.0);
  }
  EXPECT_EQ(test_support::legal_placements(sc.loads[0], sc.tm).size(), 3u);

  const auto r = test_support::drive(sc, true);
  EXPECT_EQ(r.on.at("w"), (std::vector<int>{0, 1}));
}

TEST(ScheduleInterval, ZeroSlackLoadForcedOverBudget) {
  Registry reg;
  register_config(reg, ConfigLog{"ev", LoadClass::ISL, 5, 6, 120, 3.0}, kHourly);
  // MDL 1 kW fully used by NINSL demand -> budget 0
  const auto cs = schedule_interval(reg, 5, flat_mdl(1.0), 1.0, kHourly);
  EXPECT_EQ(cs, (CommandSet{{"ev", Relay::ON}}));
}

TEST(ScheduleInterval, TieBrokenByEarlierBeta) {
  Registry reg;
  register_config(reg, ConfigLog{"b", LoadClass::ISL, 0, 3, 60, 1.0}, kHourly);
  register_config(reg, ConfigLog{"a", LoadClass::ISL, 0, 7, 120, 1.0}, kHourly);
  // priorities: b = 1/4, a = 2/8
  const auto cs = schedule_interval(reg, 0, flat_mdl(1.5), 0.0, kHourly);
  EXPECT_EQ(cs, (CommandSet{{"a", Relay::OFF}, {"b", Relay::ON}}));
}

TEST(ScheduleInterval, TieBrokenByRatingThenId) {
  Registry reg;
  register_config(reg, ConfigLog{"big", LoadClass::ISL, 0, 3, 60, 2.0}, kHourly);
  register_config(reg, ConfigLog{"small", LoadClass::ISL, 0, 3, 60, 1.0}, kHourly);
  EXPECT_EQ(schedule_interval(reg, 0, flat_mdl(2.5), 0.0, kHourly),
            (CommandSet{{"big", Relay::OFF}, {"small", Relay::ON}}));

  Registry same;
  register_config(same, ConfigLog{"y", LoadClass::ISL, 0, 3, 60, 1.0}, kHourly);
  register_config(same, ConfigLog{"x", LoadClass::ISL, 0, 3, 60, 1.0}, kHourly);
  EXPECT_EQ(schedule_interval(same, 0, flat_mdl(1.0), 0.0, kHourly),
            (CommandSet{{"x", Relay::ON}, {"y", Relay::OFF}}));
}

TEST(ScheduleInterval, StartedNislIsLockedOn) {
  Registry reg;
  register_config(reg, ConfigLog{"w", LoadClass::NISL, 0, 9, 180, 2.0}, kHourly);
  commit_interval(reg, {{"w", Relay::ON}}, kHourly);
  // No budget at all, slack remains, still ON.
  EXPECT_EQ(schedule_interval(reg, 1, flat_mdl(1.0), 5.0, kHourly), (CommandSet{{"w", Relay::ON}}));
}

TEST(ScheduleInterval, UnstartedNislGetsNoCommand) {
  Registry reg;
  register_config(reg, ConfigLog{"w", LoadClass::NISL, 0, 9, 60, 2.0}, kHourly);
  EXPECT_TRUE(schedule_interval(reg, 0, flat_mdl(1.0), 0.0, kHourly).empty());
}

TEST(ScheduleInterval, NeverAddressesNinslOrOutOfWindow) {
  Registry reg;
  register_config(reg, ConfigLog{"tv", LoadClass::NINSL, 0, 0, 0, 0.0}, kHourly);
  register_config(reg, ConfigLog{"ev", LoadClass::ISL, 5, 8, 60, 1.0}, kHourly);
  for (int t : {0, 4, 9, 23}) EXPECT_TRUE(schedule_interval(reg, t, flat_mdl(10.0), 0.0, kHourly).empty()) << t;
  EXPECT_EQ(schedule_interval(reg, 5, flat_mdl(10.0), 0.0, kHourly), (CommandSet{{"ev", Relay::ON}}));
}

TEST(ScheduleInterval, Errors) {
  Registry reg;
  EXPECT_EQ(code_of([&] { schedule_interval(reg, 24, flat_mdl(1.0), 0.0, kHourly); }), Errc::MdlMissing);
  reg["x"] = state("y", LoadClass::ISL, 1.0, {0, 3, 60}, 60);
  EXPECT_EQ(code_of([&] { schedule_interval(reg, 0, flat_mdl(1.0), 0.0, kHourly); }), Errc::CorruptRegistry);
  Registry paused;
  paused["w"] = state("w", LoadClass::NISL, 1.0, {0, 3, 120}, 60);
  paused["w"].started = true;
  EXPECT_EQ(code_of([&] { schedule_interval(paused, 1, flat_mdl(1.0), 0.0, kHourly); }), Errc::CorruptRegistry);
}

TEST(Penalty, SavingsArithmetic) {
  for (double x : {1.0, 2.0, 0.5, 3.0, 10.0, 0.25}) {
    const auto e1 = penalty_for_energy(5.5, x);
    const auto e2 = penalty_for_energy(1.0, x);
    EXPECT_EQ(e1.penalty, 5.5 * x);
    EXPECT_EQ(e2.penalty, 1.0 * x);
    EXPECT_EQ(e1.penalty - e2.penalty, 4.5 * x);
  }
}

TEST(Penalty, FromProfile) {
  std::vector<double> mdl(24, 2.0);
  std::vector<double> profile(24, 1.0);
  profile[3] = 4.5;
  profile[7] = 3.0;
  profile[8] = 2.0;  // equal is not over
  const auto r = penalty(profile, MdlProfile(mdl, kHourly), 2.0, kHourly);
  EXPECT_EQ(r.energy_over_mdl, 3.5);
  EXPECT_EQ(r.penalty, 7.0);
  EXPECT_EQ(r.intervals_over, 2);

  const TimeModel quarter(15);
  std::vector<double> p96(96, 3.0);
  const auto q = penalty(p96, MdlProfile(std::vector<double>(96, 2.0), quarter), 1.0, quarter);
  EXPECT_EQ(q.energy_over_mdl, 24.0);
}

TEST(Penalty, UnderLimitIsFree) {
  const auto r = penalty(std::vector<double>(24, 1.0), flat_mdl(2.0), 5.0, kHourly);
  EXPECT_EQ(r.energy_over_mdl, 0.0);
  EXPECT_EQ(r.penalty, 0.0);
  EXPECT_EQ(r.intervals_over, 0);
}

TEST(Penalty, LengthMismatch) {
  EXPECT_EQ(code_of([] { penalty(std::vector<double>(23, 1.0), flat_mdl(2.0), 1.0, kHourly); }),
            Errc::LengthMismatch);
}

TEST(Baseline, Examples) {
  Registry reg;
  register_config(reg, ConfigLog{"w", LoadClass::NISL, 2, 9, 120, 1.0}, kHourly);
  register_config(reg, ConfigLog{"p", LoadClass::ISL, 0, 9, 60, 1.0}, kHourly);
  const auto plan = baseline_schedule(reg, kHourly);
  ASSERT_EQ(plan.size(), 24u);
  EXPECT_EQ(plan[0], (CommandSet{{"p", Relay::ON}}));
  EXPECT_TRUE(plan[1].empty());
  EXPECT_EQ(plan[2], (CommandSet{{"w", Relay::ON}}));
  EXPECT_EQ(plan[3], (CommandSet{{"w", Relay::ON}}));
  for (std::size_t t = 4; t < 24; ++t) EXPECT_TRUE(plan[t].empty());
  EXPECT_TRUE(baseline_schedule(Registry{}, kHourly).empty());
}

// Deadline, window containment, run-time conservation and NISL
// non-interruption over random feasible scenarios.
TEST(ScheduleInterval, ContractsOverRandomScenarios) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto sc = test_support::random_scenario(seed, {seed % 3 == 0 ? 30 : 60, 8, -1, 0.3});
    for (bool sched : {true, false}) {
      const auto r = test_support::drive(sc, sched);
      ASSERT_EQ(test_support::contract_violation(sc, r.on), "") << "seed " << seed << " scheduler " << sched;
    }
  }
}

// With zero-slack windows both policies have no freedom and must agree.
TEST(Dominance, DegenerateWindowsMatchBaseline) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto sc = test_support::random_scenario(seed);
    for (auto& l : sc.loads)
      if (l.config) l.config->beta = l.config->alpha + l.config->gamma / 60 - 1;
    const auto sched = test_support::drive(sc, true);
    const auto base = test_support::drive(sc, false);
    EXPECT_EQ(sched.report.energy_over_mdl, base.report.energy_over_mdl) << seed;
    EXPECT_EQ(sched.on, base.on) << seed;
  }
}

// Deferring a load that does not fit can land it in a tighter interval: the
// greedy policy is not dominant in general.
TEST(Dominance, KnownCounterexample) {
  std::vector<double> mdl(24, 5.0);
  mdl[0] = 1.0;
  mdl[1] = 0.5;
  const auto sc = scenario({{"a", "a", LoadClass::ISL, 2.0, ScheduleConfig{0, 1, 60}, std::nullopt}}, mdl);
  EXPECT_EQ(test_support::drive(sc, false).report.energy_over_mdl, 1.0);
  EXPECT_EQ(test_support::drive(sc, true).report.energy_over_mdl, 1.5);
}

TEST(Dominance, EmpiricalRateOverRandomScenarios) {
  int not_worse = 0;
  const int total = 500;
  for (std::uint64_t seed = 0; seed < total; ++seed) {
    const auto sc = test_support::random_scenario(seed);
    if (test_support::drive(sc, true).report.energy_over_mdl <= test_support::drive(sc, false).report.energy_over_mdl)
      ++not_worse;
  }
  std::cout << "[ dominance ] scheduler <= baseline on " << not_worse << "/" << total << " random scenarios\n";
  EXPECT_GE(not_worse, total * 8 / 10);
}

namespace {

simnet::Scenario oracle_case(double mdl_kw, std::vector<LoadSpec> loads) {
  simnet::Scenario sc;
  sc.tm = kHourly;
  sc.mdl = MdlProfile(std::vector<double>(24, mdl_kw), kHourly);
  sc.loads = std::move(loads);
  return sc;
}

}  // namespace

TEST(Oracle, HandComputedOptima) {
  // Two 1 kW one-hour loads sharing [0, 1] under a 1 kW MDL: run them apart.
  auto sc = oracle_case(1.0, {{"a", "a", LoadClass::NISL, 1.0, ScheduleConfig{0, 1, 60}, std::nullopt},
                              {"b", "b", LoadClass::ISL, 1.0, ScheduleConfig{0, 1, 60}, std::nullopt}});
  EXPECT_EQ(test_support::assignment_count(sc), 4u);
  EXPECT_EQ(test_support::optimal_energy_over_mdl(sc), 0.0);

  // A 1 kW load that must run under a 0.5 kW MDL: 0.5 kWh is unavoidable.
  sc = oracle_case(0.5, {{"a", "a", LoadClass::ISL, 1.0, ScheduleConfig{3, 6, 60}, std::nullopt}});
  EXPECT_EQ(test_support::optimal_energy_over_mdl(sc), 0.5);

  // NISL 2 h in [0, 2] has two placements, ISL 2 h in [0, 2] has three;
  // any pair overlaps in at least one hour.
  sc = oracle_case(1.0, {{"a", "a", LoadClass::NISL, 1.0, ScheduleConfig{0, 2, 120}, std::nullopt},
                         {"b", "b", LoadClass::ISL, 1.0, ScheduleConfig{0, 2, 120}, std::nullopt}});
  EXPECT_EQ(test_support::assignment_count(sc), 6u);
  EXPECT_EQ(test_support::optimal_energy_over_mdl(sc), 1.0);
}

TEST(Oracle, BoundsBothPolicies) {
  test_support::GenOptions opt;
  opt.window_limit = 9;
  opt.max_loads = 4;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto sc = test_support::random_scenario(seed, opt);
    const double best = test_support::optimal_energy_over_mdl(sc);
    EXPECT_LE(best, test_support::drive(sc, true).report.energy_over_mdl + 1e-12) << seed;
    EXPECT_LE(best, test_support::drive(sc, false).report.energy_over_mdl + 1e-12) << seed;
  }
}
