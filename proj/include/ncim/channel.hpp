#pragma once

#include <vector>

#include "ncim/types.hpp"

namespace ncim {

/// OFDM numerology and the statistics of the geometric multipath channel.
struct ChannelParams {
  int antennas = 2;             // M
  int num_subcarriers = 512;    // N
  int cp_length = 32;           // N_cp
  double bandwidth_hz = 10e6;   // B_s (double-sided)
  double carrier_hz = 1e9;      // f_c
  double max_doppler_hz = 0.0;  // nu_max
  int min_paths = 8;
  int max_paths = 14;
  double angular_spread_deg = 10.0;

  double sample_period() const { return 1.0 / bandwidth_hz; }
  double max_delay_s() const { return cp_length / bandwidth_hz; }
  /// Baseband frequency of 0-based subcarrier n: -B_s/2 + B_s*n/N.
  double subcarrier_frequency(int n) const;
  /// Duration of one OFDM symbol including the cyclic prefix.
  double symbol_duration() const { return (num_subcarriers + cp_length) / bandwidth_hz; }
};

struct Path {
  Complex gain;       // CN(0,1)
  double delay_s = 0;
  double aoa_rad = 0;
  double doppler_hz = 0;
};

struct DevicePaths {
  std::vector<Path> paths;
  double aoa_center_rad = 0;
  double angular_spread_deg = 0;
};

using PathSet = std::vector<DevicePaths>;

/// Air-to-ground link budget. Frequencies: carrier in MHz, bandwidth in Hz.
struct LinkBudget {
  double tx_power_dbm = 14.0;
  double uav_height_m = 100.0;
  double horizontal_distance_m = 500.0;
  double eta_los_db = 2.3;
  double eta_nlos_db = 34.0;
  double env_a = 5.0188;
  double env_b = 0.3511;
  double carrier_mhz = 1000.0;
  double bandwidth_hz = 1e7;
};

/// ULA steering vector with half-wavelength spacing, unit norm.
CVec steering_vector(double theta_rad, int antennas);

/// nu_max = v_max * f_c / c with c = 3e8 m/s.
double max_doppler_hz(double max_speed_mps, double carrier_hz);

PathSet draw_paths(int num_devices, const ChannelParams& params, Rng& rng);

/// Frequency-domain channel of one device on 0-based subcarrier `subcarrier`, evaluated at
/// absolute time `time_s` (only the Doppler phase depends on time).
CVec freq_channel(const DevicePaths& device, int subcarrier, double time_s, const ChannelParams& params);

/// Absolute time of the 0-based sample `sample` (0..N-1, after CP removal) of 0-based OFDM symbol `symbol`.
double ofdm_sample_time(int symbol, int sample, const ChannelParams& params);

/// Channel seen by the 0-based symbol `symbol` on block subcarrier `block_subcarrier`, where the
/// TFST block starts at absolute subcarrier `first_subcarrier`. The Doppler phase uses
/// dT = (symbol*N + (symbol+1)*N_cp + block_subcarrier + 1) * T_s.
CVec doubly_selective_channel(const DevicePaths& device, int symbol, int block_subcarrier, const ChannelParams& params,
                              int first_subcarrier = 0);

/// m-th (0-based) virtual angle (m + 1 - (M+1)/2) / M, a normalized spatial frequency.
double virtual_angle(int m, int antennas);
/// Physical AoA that falls exactly on virtual angle m: asin(2 * virtual_angle).
double on_grid_aoa(int m, int antennas);

/// Unitary DFT matrix A_R whose m-th column is exp(j 2 pi m' theta_m) / sqrt(M).
CMat angular_basis(int antennas);

/// Right-multiplies every row of `spatial` (rows x M) by conj(A_R).
CMat angular_transform(const CMat& spatial);

/// SNR [dB] = P_t - P_L - P_n. Throws std::domain_error when the device sits at the UAV.
double snr_from_link_budget(const LinkBudget& lb);

}  // namespace ncim
