#include "ncim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ncim/codebook.hpp"

namespace ncim {

using nlohmann::json;

double SimConfig::effective_snr_db() const { return link_budget ? snr_from_link_budget(*link_budget) : snr_db; }

ChannelParams SimConfig::channel_params() const {
  ChannelParams p;
  p.antennas = M;
  p.num_subcarriers = N;
  p.cp_length = N_cp;
  p.bandwidth_hz = B_s;
  p.carrier_hz = f_c;
  p.max_doppler_hz = max_doppler_hz(v_max, f_c);
  p.min_paths = P_min;
  p.max_paths = P_max;
  p.angular_spread_deg = angular_spread_deg;
  return p;
}

const std::vector<std::string>& algorithm_ids() {
  static const std::vector<std::string> ids{"stf", "stf_slab", "ae", "bench1", "somp"};
  return ids;
}

std::vector<std::string> validate(const SimConfig& c) {
  std::vector<std::string> v;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  check(c.K >= 1, "K: must be >= 1");
  check(c.Ka >= 0 && c.Ka <= c.K, "Ka: must lie in [0, K]");
  check(c.M >= 1, "M: must be >= 1");
  check(c.N >= 1, "N: must be >= 1");
  check(c.N_cp >= 0, "N_cp: must be >= 0");
  check(c.I >= 2 && is_power_of_two(c.I), "I: must be a power of two >= 2");
  check(c.L >= 1, "L: must be >= 1");
  check(c.J >= 1, "J: must be >= 1");
  check(c.N_tilde >= 1 && c.N_tilde <= c.N, "N_tilde: must lie in [1, N]");
  check(c.delta_f > 0, "delta_f: must be positive");
  check(c.f_c > 0, "f_c: must be positive");
  check(c.B_s > 0, "B_s: must be positive");
  check(std::isfinite(c.snr_db) || c.link_budget.has_value(), "snr_db: must be finite");
  if (c.link_budget) {
    check(c.link_budget->uav_height_m > 0, "link_budget: h_u must be positive");
    check(c.link_budget->horizontal_distance_m >= 0, "link_budget: r_u must be >= 0");
    check(c.link_budget->bandwidth_hz > 0, "link_budget: B_s must be positive");
  }
  check(c.v_max >= 0, "v_max: must be >= 0");
  check(c.P_min >= 1 && c.P_max >= c.P_min, "P_range: need 1 <= P_min <= P_max");
  check(c.angular_spread_deg >= 0, "angular_spread_deg: must be >= 0");
  check(c.L_F >= 1 && c.L >= 1 && c.L % c.L_F == 0, "L_F: L must be divisible by L_F");
  check(!c.tfst || (c.J == 1 && c.N_tilde == 1), "tfst: TFST frames need J = 1 and N_tilde = 1");
  check(c.tfst || c.L_F == 1, "L_F: L_F > 1 requires tfst");
  check(c.first_subcarrier >= 0 && c.first_subcarrier + std::max(c.N_tilde, c.L_F) <= c.N,
        "first_subcarrier: occupied subcarriers exceed N");
  check(!c.algorithms.empty(), "algorithms: need at least one algorithm");
  for (const auto& a : c.algorithms)
    check(std::find(algorithm_ids().begin(), algorithm_ids().end(), a) != algorithm_ids().end(),
          "algorithms: unknown id '" + a + "'");
  check(c.T0 >= 1, "T0: must be >= 1");
  check(c.kappa >= 0 && c.kappa < 1, "kappa: must lie in [0, 1)");
  check(c.T_h1 > 0 && c.T_h1 < 1, "T_h1: must lie in (0, 1)");
  check(c.T_h2 > 0 && c.T_h2 < 1, "T_h2: must lie in (0, 1)");
  check(c.epsilon > 0, "epsilon: must be positive");
  check(c.Q >= 0 && static_cast<int>(c.zeta.size()) == c.Q, "zeta: need exactly Q weights");
  bool zeta_ok = true;
  for (std::size_t q = 0; q < c.zeta.size(); ++q)
    zeta_ok = zeta_ok && c.zeta[q] > 0 && c.zeta[q] <= 1 && (q == 0 || c.zeta[q] <= c.zeta[q - 1]);
  check(zeta_ok, "zeta: weights must lie in (0, 1] and be nonincreasing");
  check(c.trials >= 1, "trials: must be >= 1");
  return v;
}

void require_valid(const SimConfig& cfg) {
  const auto v = validate(cfg);
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : v) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

namespace {

using Setter = std::function<void(SimConfig&, const json&)>;

template <typename T>
Setter field(T SimConfig::*member) {
  return [member](SimConfig& c, const json& j) { c.*member = j.get<T>(); };
}

LinkBudget parse_link_budget(const json& j) {
  static const std::map<std::string, double LinkBudget::*> keys{
      {"P_t", &LinkBudget::tx_power_dbm},     {"h_u", &LinkBudget::uav_height_m},
      {"r_u", &LinkBudget::horizontal_distance_m}, {"eta_los", &LinkBudget::eta_los_db},
      {"eta_nlos", &LinkBudget::eta_nlos_db}, {"a", &LinkBudget::env_a},
      {"b", &LinkBudget::env_b},              {"f_c_mhz", &LinkBudget::carrier_mhz},
      {"B_s", &LinkBudget::bandwidth_hz}};
  if (!j.is_object()) throw std::invalid_argument("link_budget: expected an object");
  LinkBudget lb;
  for (const auto& [k, v] : j.items()) {
    auto it = keys.find(k);
    if (it == keys.end()) throw std::invalid_argument("link_budget: unknown key '" + k + "'");
    lb.*(it->second) = v.get<double>();
  }
  return lb;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"K", field(&SimConfig::K)},
      {"Ka", field(&SimConfig::Ka)},
      {"M", field(&SimConfig::M)},
      {"N", field(&SimConfig::N)},
      {"N_cp", field(&SimConfig::N_cp)},
      {"I", field(&SimConfig::I)},
      {"L", field(&SimConfig::L)},
      {"J", field(&SimConfig::J)},
      {"N_tilde", field(&SimConfig::N_tilde)},
      {"delta_f", field(&SimConfig::delta_f)},
      {"f_c", field(&SimConfig::f_c)},
      {"B_s", field(&SimConfig::B_s)},
      {"snr_db", field(&SimConfig::snr_db)},
      {"link_budget", [](SimConfig& c, const json& j) { c.link_budget = parse_link_budget(j); }},
      {"v_max", field(&SimConfig::v_max)},
      {"P_min", field(&SimConfig::P_min)},
      {"P_max", field(&SimConfig::P_max)},
      {"angular_spread_deg", field(&SimConfig::angular_spread_deg)},
      {"L_F", field(&SimConfig::L_F)},
      {"tfst", field(&SimConfig::tfst)},
      {"first_subcarrier", field(&SimConfig::first_subcarrier)},
      {"algorithms", field(&SimConfig::algorithms)},
      {"T0", field(&SimConfig::T0)},
      {"kappa", field(&SimConfig::kappa)},
      {"T_h1", field(&SimConfig::T_h1)},
      {"T_h2", field(&SimConfig::T_h2)},
      {"epsilon", field(&SimConfig::epsilon)},
      {"Q", field(&SimConfig::Q)},
      {"zeta", field(&SimConfig::zeta)},
      {"trials", field(&SimConfig::trials)},
      {"master_seed", field(&SimConfig::master_seed)},
  };
  return s;
}

}  // namespace

SimConfig parse_config(const std::string& json_text, SimConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  std::vector<std::string> errors;
  for (const auto& [key, value] : j.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) {
      errors.push_back(key + ": unknown key");
      continue;
    }
    try {
      it->second(base, value);
    } catch (const json::exception& e) {
      errors.push_back(key + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "config rejected:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return base;
}

SimConfig load_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const SimConfig& c) {
  json j{{"K", c.K},         {"Ka", c.Ka},
         {"M", c.M},         {"N", c.N},
         {"N_cp", c.N_cp},   {"I", c.I},
         {"L", c.L},         {"J", c.J},
         {"N_tilde", c.N_tilde}, {"delta_f", c.delta_f},
         {"f_c", c.f_c},     {"B_s", c.B_s},
         {"snr_db", c.snr_db}, {"v_max", c.v_max},
         {"P_min", c.P_min}, {"P_max", c.P_max},
         {"angular_spread_deg", c.angular_spread_deg},
         {"L_F", c.L_F},     {"tfst", c.tfst},
         {"first_subcarrier", c.first_subcarrier},
         {"algorithms", c.algorithms},
         {"T0", c.T0},       {"kappa", c.kappa},
         {"T_h1", c.T_h1},   {"T_h2", c.T_h2},
         {"epsilon", c.epsilon}, {"Q", c.Q},
         {"zeta", c.zeta},   {"trials", c.trials},
         {"master_seed", c.master_seed}};
  if (c.link_budget) {
    const auto& lb = *c.link_budget;
    j["link_budget"] = {{"P_t", lb.tx_power_dbm}, {"h_u", lb.uav_height_m}, {"r_u", lb.horizontal_distance_m},
                        {"eta_los", lb.eta_los_db}, {"eta_nlos", lb.eta_nlos_db}, {"a", lb.env_a},
                        {"b", lb.env_b}, {"f_c_mhz", lb.carrier_mhz}, {"B_s", lb.bandwidth_hz}};
  }
  return j.dump(2);
}

namespace {

int as_int(const std::string& name, double value) {
  const double r = std::round(value);
  if (std::abs(r - value) > 1e-9) throw std::invalid_argument(name + ": sweep value must be an integer");
  return static_cast<int>(r);
}

}  // namespace

bool is_sweep_parameter(const std::string& name) {
  static const std::vector<std::string> names{"L", "snr_db", "M", "L_F", "v_max", "v_max_kmh",
                                              "K", "Ka", "I", "J", "N_tilde"};
  return std::find(names.begin(), names.end(), name) != names.end();
}

void apply_parameter(SimConfig& cfg, const std::string& name, double value) {
  if (name == "L") cfg.L = as_int(name, value);
  else if (name == "snr_db") cfg.snr_db = value, cfg.link_budget.reset();
  else if (name == "M") cfg.M = as_int(name, value);
  else if (name == "L_F") cfg.L_F = as_int(name, value);
  else if (name == "v_max") cfg.v_max = value;
  else if (name == "v_max_kmh") cfg.v_max = value / 3.6;
  else if (name == "K") cfg.K = as_int(name, value);
  else if (name == "Ka") cfg.Ka = as_int(name, value);
  else if (name == "I") cfg.I = as_int(name, value);
  else if (name == "J") cfg.J = as_int(name, value);
  else if (name == "N_tilde") cfg.N_tilde = as_int(name, value);
  else throw std::invalid_argument("unknown sweep parameter: " + name);
}

void validate_axis(const SweepAxis& axis) {
  if (!is_sweep_parameter(axis.param)) throw std::invalid_argument("unknown sweep parameter: " + axis.param);
  if (axis.values.empty()) throw std::invalid_argument(axis.param + ": sweep needs at least one value");
  for (std::size_t i = 1; i < axis.values.size(); ++i)
    if (!(axis.values[i] > axis.values[i - 1]))
      throw std::invalid_argument(axis.param + ": sweep values must be strictly increasing");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig5", "fig6", "fig7", "fig8", "fig9"};
  return names;
}

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec e;
  e.name = name;
  SimConfig& c = e.base;
  c.K = 100;
  c.Ka = 10;
  c.trials = 500;
  if (name == "fig5") {
    c.M = 2, c.I = 2, c.J = 2, c.N_tilde = 8, c.snr_db = 15;
    c.algorithms = {"stf", "stf_slab", "somp"};
    e.sweep = {"L", {16, 24, 32, 40, 48}};
  } else if (name == "fig6") {
    c.M = 2, c.I = 4, c.L = 40, c.J = 2, c.N_tilde = 8;
    c.algorithms = {"stf", "stf_slab", "somp"};
    e.sweep = {"snr_db", {0, 5, 10, 15, 20}};
  } else if (name == "fig7") {
    c.M = 32, c.I = 2, c.snr_db = 5;
    c.algorithms = {"ae", "bench1", "somp"};
    e.sweep = {"L", {20, 25, 30, 35, 40}};
  } else if (name == "fig8") {
    c.L = 30, c.I = 2, c.snr_db = 5;
    c.algorithms = {"ae", "bench1", "somp"};
    e.sweep = {"M", {8, 16, 32, 64}};
  } else if (name == "fig9") {
    c.L = 32, c.I = 2, c.M = 32, c.snr_db = 10, c.tfst = true;
    c.algorithms = {"ae"};
    e.sweep = {"L_F", {1, 2, 4, 8}};
    e.outer = SweepAxis{"v_max_kmh", {0, 120, 180}};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return e;
}

}  // namespace ncim
