#pragma once

// Scenario files (JSON):
//
//   {
//     "time_model": {"interval_minutes": 60, "utc_offset_minutes": 330},
//     "mdl": [kW x horizon],
//     "loads": [{"id", "name", "class", "rated_kw",
//                "alpha", "beta", "gamma_minutes",   // NISL / ISL
//                "ninsl_demand": [kW x horizon]}],    // NINSL
//     "link": {"min_s": 7, "max_s": 9, "seed": 1},
//     "penalty_rate_x": 1.0
//   }

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hanemu/domain.hpp"
#include "hanemu/simnet.hpp"

namespace hanemu {

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(Errc::ScenarioError, where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ScenarioError, where + "." + key + ": " + e.what());
  }
}

template <typename T>
T json_get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? json_get<T>(j, key, where) : fallback;
}

}  // namespace detail

inline simnet::Scenario scenario_from_json(const nlohmann::json& j) {
  using detail::json_get;
  using detail::json_get_or;
  if (!j.is_object()) throw Error(Errc::ScenarioError, "scenario must be a JSON object");

  simnet::Scenario sc;
  try {
    const auto tmj = json_get<nlohmann::json>(j, "time_model", "scenario");
    sc.tm = TimeModel(json_get<int>(tmj, "interval_minutes", "time_model"),
                      json_get_or<int>(tmj, "utc_offset_minutes", 330, "time_model"));
    sc.mdl = MdlProfile(json_get<std::vector<double>>(j, "mdl", "scenario"), sc.tm);
  } catch (const Error& e) {
    if (e.code() == Errc::ScenarioError) throw;
    throw Error(Errc::ScenarioError, e.what());
  }

  const auto loads = json_get_or<nlohmann::json>(j, "loads", nlohmann::json::array(), "scenario");
  if (!loads.is_array()) throw Error(Errc::ScenarioError, "'loads' must be an array");
  for (std::size_t k = 0; k < loads.size(); ++k) {
    const auto& lj = loads[k];
    const std::string where = "loads[" + std::to_string(k) + "]";
    if (!lj.is_object()) throw Error(Errc::ScenarioError, where + " must be an object");
    LoadSpec spec;
    spec.load_id = json_get<std::string>(lj, "id", where);
    spec.name = json_get_or<std::string>(lj, "name", spec.load_id, where);
    const auto cls_text = json_get<std::string>(lj, "class", where);
    const auto cls = parse_load_class(cls_text);
    if (!cls) throw Error(Errc::ScenarioError, where + ": unknown class '" + cls_text + "'");
    spec.cls = *cls;
    spec.rated_power = json_get_or<double>(lj, "rated_kw", 0.0, where);
    if (is_schedulable(spec.cls)) {
      spec.config = ScheduleConfig{json_get<int>(lj, "alpha", where), json_get<int>(lj, "beta", where),
                                   json_get<int>(lj, "gamma_minutes", where)};
    }
    if (lj.contains("ninsl_demand")) spec.ninsl_demand = json_get<std::vector<double>>(lj, "ninsl_demand", where);
    sc.loads.push_back(std::move(spec));
  }

  if (j.contains("link")) {
    const auto lk = json_get<nlohmann::json>(j, "link", "scenario");
    sc.link.min_delay = json_get_or<double>(lk, "min_s", sc.link.min_delay, "link");
    sc.link.max_delay = json_get_or<double>(lk, "max_s", sc.link.max_delay, "link");
    sc.link.seed = json_get_or<std::uint64_t>(lk, "seed", sc.link.seed, "link");
  }
  sc.penalty_rate_x = json_get_or<double>(j, "penalty_rate_x", 1.0, "scenario");
  return simnet::validate_scenario(std::move(sc));
}

inline nlohmann::json scenario_to_json(const simnet::Scenario& sc) {
  nlohmann::json loads = nlohmann::json::array();
  for (const LoadSpec& l : sc.loads) {
    nlohmann::json lj{{"id", l.load_id}, {"name", l.name}, {"class", to_string(l.cls)}, {"rated_kw", l.rated_power}};
    if (l.config) {
      lj["alpha"] = l.config->alpha;
      lj["beta"] = l.config->beta;
      lj["gamma_minutes"] = l.config->gamma;
    }
    if (l.ninsl_demand) lj["ninsl_demand"] = *l.ninsl_demand;
    loads.push_back(std::move(lj));
  }
  return {{"time_model",
           {{"interval_minutes", sc.tm.interval_minutes()}, {"utc_offset_minutes", sc.tm.utc_offset_minutes()}}},
          {"mdl", sc.mdl.limits()},
          {"loads", std::move(loads)},
          {"link", {{"min_s", sc.link.min_delay}, {"max_s", sc.link.max_delay}, {"seed", sc.link.seed}}},
          {"penalty_rate_x", sc.penalty_rate_x}};
}

// I/O failures are reported as std::filesystem::filesystem_error; content
// problems as Error.
inline simnet::Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::filesystem::filesystem_error("cannot open scenario", path,
                                            std::make_error_code(std::errc::no_such_file_or_directory));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ScenarioError, path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace hanemu
