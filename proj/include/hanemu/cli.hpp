#pragma once

// Operator entry point.
//
//   hanemu run     --scenario F --algorithm none|priority [--seed N] --out DIR
//   hanemu compare --scenario F [--seed N] [--out DIR]
//   hanemu serve   --scenario F --listen HOST:PORT [--algorithm A] [--seed N] [--tick-ms MS]
//
// HANEMU_SEED and HANEMU_OUT supply --seed / --out when the flags are absent.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hanemu/live.hpp"
#include "hanemu/report.hpp"
#include "hanemu/scenario.hpp"
#include "hanemu/simnet.hpp"
#include "hanemu/ws_server.hpp"

namespace hanemu::cli {

enum ExitCode : int {
  kOk = 0,
  kBadFlags = 2,
  kScenarioError = 3,
  kIoError = 4,
  kRuntimeError = 5,
};

namespace detail {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw IoFailure("write failed for " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());
}

inline simnet::Scenario load(const std::string& path, std::optional<std::uint64_t> seed) {
  simnet::Scenario sc = load_scenario(path);
  if (seed) sc.link.seed = *seed;
  return sc;
}

inline std::string render_csv(const simnet::SimResult& r) {
  std::ostringstream os;
  report::write_profile_csv(os, r);
  return os.str();
}

inline std::string render_log(const simnet::SimResult& r) {
  std::ostringstream os;
  report::write_event_log(os, r);
  return os.str();
}

inline std::pair<std::string, unsigned short> split_listen(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--listen", "expected HOST:PORT");
  const std::string host = addr.substr(0, colon);
  const std::string port = addr.substr(colon + 1);
  unsigned value = 0;
  auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc{} || p != port.data() + port.size() || port.empty() || value > 65535)
    throw CLI::ValidationError("--listen", "bad port '" + port + "'");
  return {host.empty() ? "127.0.0.1" : host, static_cast<unsigned short>(value)};
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Home area network emulator: smart load nodes scheduled by a load management unit"};
  app.name("hanemu");
  app.require_subcommand(1);

  std::string scenario_path;
  std::string algorithm_text = "priority";
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string listen;
  int tick_ms = 1000;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--seed", seed, "link RNG seed (overrides the scenario)")->envname("HANEMU_SEED");
  };

  auto* run = app.add_subcommand("run", "simulate one day and write profile.csv, events.log, report.json");
  add_common(run);
  run->add_option("--algorithm", algorithm_text, "none | priority")->required()->check(CLI::IsMember({"none", "priority"}));
  run->add_option("--out", out_dir, "output directory")->envname("HANEMU_OUT")->required();

  auto* compare = app.add_subcommand("compare", "run both algorithms and report penalty savings");
  add_common(compare);
  compare->add_option("--out", out_dir, "output directory for compare.json")->envname("HANEMU_OUT");

  auto* serve = app.add_subcommand("serve", "live mode: WebSocket endpoint for the dashboard");
  add_common(serve);
  serve->add_option("--listen", listen, "HOST:PORT")->required();
  serve->add_option("--algorithm", algorithm_text, "none | priority")->check(CLI::IsMember({"none", "priority"}));
  serve->add_option("--tick-ms", tick_ms, "wall-clock milliseconds per interval")->check(CLI::Range(1, 3600000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kBadFlags;
  }

  try {
    const simnet::Scenario sc = detail::load(scenario_path, seed);
    const simnet::Algorithm algorithm = *simnet::parse_algorithm(algorithm_text);

    if (run->parsed()) {
      const simnet::SimResult r = simnet::run_day(sc, algorithm);
      const std::filesystem::path dir(out_dir);
      detail::ensure_dir(dir);
      detail::write_file(dir / "profile.csv", detail::render_csv(r));
      detail::write_file(dir / "events.log", detail::render_log(r));
      nlohmann::json rep = report::to_json(r.penalty_report);
      rep["algorithm"] = std::string(simnet::to_string(algorithm));
      rep["seed"] = sc.link.seed;
      detail::write_file(dir / "report.json", rep.dump(2) + "\n");
      out << rep.dump(2) << '\n';
    } else if (compare->parsed()) {
      const auto case1 = simnet::run_day(sc, simnet::Algorithm::None);
      const auto case2 = simnet::run_day(sc, simnet::Algorithm::Priority);
      nlohmann::json rep = report::to_json(report::make_run_report(case1.penalty_report, case2.penalty_report));
      rep["seed"] = sc.link.seed;
      if (!out_dir.empty()) {
        const std::filesystem::path dir(out_dir);
        detail::ensure_dir(dir);
        detail::write_file(dir / "compare.json", rep.dump(2) + "\n");
      }
      out << rep.dump(2) << '\n';
    } else if (serve->parsed()) {
      const auto [host, port] = detail::split_listen(listen);
      live::LiveSession session(sc, algorithm);
      live::net::io_context ioc;
      live::WsLiveServer server(ioc, {live::net::ip::make_address(host), port}, session,
                                std::chrono::milliseconds(tick_ms));
      server.start();
      err << "listening on ws://" << host << ':' << server.port() << '\n';
      ioc.run();
      if (!server.error().empty()) throw detail::IoFailure(server.error());
    }
  } catch (const CLI::ValidationError& e) {
    err << "hanemu: " << e.what() << '\n';
    return kBadFlags;
  } catch (const Error& e) {
    err << "hanemu: " << e.what() << '\n';
    const bool scenario = e.code() == Errc::ScenarioError || e.code() == Errc::InfeasibleScenario;
    return scenario ? kScenarioError : kRuntimeError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hanemu: " << e.what() << '\n';
    return kIoError;
  } catch (const detail::IoFailure& e) {
    err << "hanemu: " << e.what() << '\n';
    return kIoError;
  } catch (const boost::system::system_error& e) {
    err << "hanemu: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}

}  // namespace hanemu::cli
