#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncim/channel.hpp"

namespace ncim {

/// Every scenario parameter. Speeds in m/s, frequencies in Hz.
struct SimConfig {
  int K = 100;
  int Ka = 10;
  int M = 2;
  int N = 512;
  int N_cp = 32;
  int I = 2;
  int L = 40;
  int J = 1;
  int N_tilde = 1;
  double delta_f = 15e3;
  double f_c = 1e9;
  double B_s = 10e6;
  double snr_db = 10.0;
  std::optional<LinkBudget> link_budget;  // overrides snr_db when present
  double v_max = 0.0;
  int P_min = 8;
  int P_max = 14;
  double angular_spread_deg = 10.0;
  int L_F = 1;
  bool tfst = false;
  int first_subcarrier = 0;
  std::vector<std::string> algorithms{"stf"};
  int T0 = 200;
  double kappa = 0.3;
  double T_h1 = 0.7;
  double T_h2 = 0.9;
  double epsilon = 1e-6;
  int Q = 4;
  std::vector<double> zeta{1.0, 0.8, 0.6, 0.4};
  int trials = 500;
  std::uint64_t master_seed = 1;

  double effective_snr_db() const;
  ChannelParams channel_params() const;
};

/// Known detector ids: stf, stf_slab, ae, bench1, somp.
const std::vector<std::string>& algorithm_ids();

/// Every violated invariant, each message starting with the offending field name. Empty when valid.
std::vector<std::string> validate(const SimConfig& cfg);

/// Throws std::invalid_argument listing all violations.
void require_valid(const SimConfig& cfg);

/// JSON object with SimConfig field names as keys; unknown keys are rejected. Missing keys keep defaults.
SimConfig parse_config(const std::string& json_text, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});
std::string dump_config(const SimConfig& cfg);

/// Sweepable parameters: L, snr_db, M, L_F, v_max (m/s), v_max_kmh, K, Ka, I, J, N_tilde.
void apply_parameter(SimConfig& cfg, const std::string& name, double value);
bool is_sweep_parameter(const std::string& name);

struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string name;
  SimConfig base;
  SweepAxis sweep;
  std::optional<SweepAxis> outer;  // e.g. v_max_kmh for the TFST grid
};

/// Throws std::invalid_argument unless the axis names a sweepable parameter with strictly increasing values.
void validate_axis(const SweepAxis& axis);

const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for an unknown name.
ExperimentSpec preset(const std::string& name);

}  // namespace ncim
