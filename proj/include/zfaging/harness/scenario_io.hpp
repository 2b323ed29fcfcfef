#pragma once

// Scenario JSON:
//   {"L":7,"K":10,"N":100,"T":200,"tau":10,
//    "a":0.1 | "beta":[[...K...], ...L rows...],
//    "alpha":0.9 | {"v":30,"fc":2e9,"Ts":1e-3},
//    "snr_db":0, "scaling":"fixed" | "inv_sqrt_n", "reference_cell":0}
// Under inv_sqrt_n, snr_db sets E in p_r = E / sqrt(N).

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "../errors.hpp"
#include "../scenario.hpp"

namespace zfaging::harness {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("scenario: missing field '") + key + "'");
  return j.at(key);
}

inline int get_int(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw InvalidArgument(std::string("scenario: '") + key + "' must be an integer");
  return v.get<int>();
}

inline double get_number(const json& j, const char* key) {
  if (!j.is_number()) throw InvalidArgument(std::string("scenario: '") + key + "' must be a number");
  return j.get<double>();
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario: top level must be an object");
  static const std::set<std::string> known = {"L", "K", "N", "T", "tau", "a", "beta", "alpha", "snr_db", "scaling", "reference_cell"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw InvalidArgument("scenario: unknown field '" + item.key() + "'");
  }
  Scenario s;
  s.topology = CellTopology{detail::get_int(j, "L"), detail::get_int(j, "K"), detail::get_int(j, "N"),
                            detail::get_int(j, "T"), detail::get_int(j, "tau")};
  const int ref = j.contains("reference_cell") ? detail::get_int(j, "reference_cell") : 0;
  if (j.contains("a") == j.contains("beta")) throw InvalidArgument("scenario: give exactly one of 'a' and 'beta'");
  if (j.contains("a")) {
    s.fading = build_simple_profile(s.topology.L, s.topology.K, detail::get_number(j.at("a"), "a"), ref);
  } else {
    const json& rows = j.at("beta");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(s.topology.L)) {
      throw InvalidArgument("scenario: 'beta' must be an array of L rows");
    }
    std::vector<double> beta;
    for (const json& row : rows) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(s.topology.K)) {
        throw InvalidArgument("scenario: every 'beta' row must have K entries");
      }
      for (const json& v : row) beta.push_back(detail::get_number(v, "beta"));
    }
    s.fading = FadingProfile(s.topology.L, s.topology.K, std::move(beta), ref);
  }
  const json& al = detail::require(j, "alpha");
  if (al.is_number()) {
    s.aging = AgingSpec::direct(al.get<double>());
  } else if (al.is_object()) {
    Mobility m{detail::get_number(detail::require(al, "v"), "v"), detail::get_number(detail::require(al, "fc"), "fc"),
               detail::get_number(detail::require(al, "Ts"), "Ts")};
    s.aging = AgingSpec::from_mobility(m);
  } else {
    throw InvalidArgument("scenario: 'alpha' must be a number or a {v, fc, Ts} object");
  }
  const double snr_db = detail::get_number(detail::require(j, "snr_db"), "snr_db");
  s.power = PowerSpec::fixed_db(snr_db);
  if (j.contains("scaling")) {
    const json& sc = j.at("scaling");
    if (sc == "inv_sqrt_n") {
      s.power.scaling = PowerScaling::inverse_sqrt_n;
    } else if (sc != "fixed") {
      throw InvalidArgument("scenario: 'scaling' must be \"fixed\" or \"inv_sqrt_n\"");
    }
  }
  s.validate();
  s.aging.resolve();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("scenario '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["L"] = s.topology.L;
  j["K"] = s.topology.K;
  j["N"] = s.topology.N;
  j["T"] = s.topology.T;
  j["tau"] = s.topology.tau;
  json rows = json::array();
  for (int i = 0; i < s.fading.cells(); ++i) {
    json row = json::array();
    for (int k = 0; k < s.fading.users(); ++k) row.push_back(s.fading(i, k));
    rows.push_back(row);
  }
  j["beta"] = rows;
  j["reference_cell"] = s.fading.reference_cell();
  if (s.aging.alpha) {
    j["alpha"] = *s.aging.alpha;
  } else {
    j["alpha"] = {{"v", s.aging.mobility->speed_mps}, {"fc", s.aging.mobility->carrier_hz}, {"Ts", s.aging.mobility->sampling_period_s}};
  }
  j["snr_db"] = 10.0 * std::log10(s.power.level);
  j["scaling"] = s.power.scaling == PowerScaling::fixed ? "fixed" : "inv_sqrt_n";
  return j;
}

}  // namespace zfaging::harness
