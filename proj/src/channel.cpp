#include "ncim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ncim {

double ChannelParams::subcarrier_frequency(int n) const {
  return -bandwidth_hz / 2.0 + bandwidth_hz * static_cast<double>(n) / num_subcarriers;
}

CVec steering_vector(double theta_rad, int antennas) {
  if (antennas < 1) throw std::invalid_argument("steering vector needs M >= 1");
  CVec a(antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  const double s = std::sin(theta_rad);
  for (int m = 0; m < antennas; ++m) a(m) = std::polar(scale, kPi * m * s);
  return a;
}

double max_doppler_hz(double max_speed_mps, double carrier_hz) { return max_speed_mps * carrier_hz / 3e8; }

PathSet draw_paths(int num_devices, const ChannelParams& params, Rng& rng) {
  if (params.min_paths < 1 || params.max_paths < params.min_paths)
    throw std::invalid_argument("invalid path-count range");
  std::uniform_int_distribution<int> path_count(params.min_paths, params.max_paths);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double spread = params.angular_spread_deg * kPi / 180.0;

  PathSet set(num_devices);
  for (auto& dev : set) {
    const int P = path_count(rng);
    dev.aoa_center_rad = -kPi / 2 + kPi * unit(rng);
    dev.angular_spread_deg = params.angular_spread_deg;
    dev.paths.resize(P);
    for (auto& p : dev.paths) {
      p.gain = complex_normal(rng, 1.0);
      p.delay_s = params.max_delay_s() * unit(rng);
      p.aoa_rad = dev.aoa_center_rad + spread * (unit(rng) - 0.5);
      p.doppler_hz = params.max_doppler_hz * (2.0 * unit(rng) - 1.0);
    }
  }
  return set;
}

CVec freq_channel(const DevicePaths& device, int subcarrier, double time_s, const ChannelParams& params) {
  const int M = params.antennas;
  CVec h = CVec::Zero(M);
  if (device.paths.empty()) return h;
  const double f = params.subcarrier_frequency(subcarrier);
  for (const auto& p : device.paths) {
    const double phase = 2.0 * kPi * (p.doppler_hz * time_s - p.delay_s * f);
    h += (p.gain * std::polar(1.0, phase)) * steering_vector(p.aoa_rad, M);
  }
  return h * std::sqrt(static_cast<double>(M) / device.paths.size());
}

double ofdm_sample_time(int symbol, int sample, const ChannelParams& params) {
  const double n = static_cast<double>(symbol) * params.num_subcarriers +
                   static_cast<double>(symbol + 1) * params.cp_length + sample + 1;
  return n * params.sample_period();
}

CVec doubly_selective_channel(const DevicePaths& device, int symbol, int block_subcarrier, const ChannelParams& params,
                              int first_subcarrier) {
  return freq_channel(device, first_subcarrier + block_subcarrier, ofdm_sample_time(symbol, block_subcarrier, params),
                      params);
}

double virtual_angle(int m, int antennas) {
  return (static_cast<double>(m + 1) - (antennas + 1) / 2.0) / antennas;
}

double on_grid_aoa(int m, int antennas) { return std::asin(2.0 * virtual_angle(m, antennas)); }

CMat angular_basis(int antennas) {
  if (antennas < 1) throw std::invalid_argument("angular basis needs M >= 1");
  CMat A(antennas, antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  for (int m = 0; m < antennas; ++m) {
    const double psi = virtual_angle(m, antennas);
    for (int mp = 0; mp < antennas; ++mp) A(mp, m) = std::polar(scale, 2.0 * kPi * mp * psi);
  }
  return A;
}

CMat angular_transform(const CMat& spatial) {
  const auto M = static_cast<int>(spatial.cols());
  if (M < 1) throw std::invalid_argument("angular transform needs at least one antenna column");
  return spatial * angular_basis(M).conjugate();
}

double snr_from_link_budget(const LinkBudget& lb) {
  if (lb.uav_height_m <= 0.0 && lb.horizontal_distance_m <= 0.0)
    throw std::domain_error("link budget undefined at zero distance");
  if (lb.uav_height_m <= 0.0 || lb.horizontal_distance_m < 0.0 || lb.bandwidth_hz <= 0.0)
    throw std::domain_error("link budget requires h_u > 0, r_u >= 0, B_s > 0");
  const double d = std::hypot(lb.uav_height_m, lb.horizontal_distance_m);
  const double elevation_deg = 180.0 * std::asin(lb.uav_height_m / d) / kPi;
  const double A = lb.eta_los_db - lb.eta_nlos_db;
  const double B = 20.0 * std::log10(d) + 20.0 * std::log10(4.0 * kPi * lb.carrier_mhz / 300.0) + lb.eta_nlos_db;
  const double path_loss = A / (1.0 + lb.env_a * std::exp(-lb.env_b * (elevation_deg - lb.env_a))) + B;
  const double noise_dbm = -174.0 + 10.0 * std::log10(lb.bandwidth_hz);
  return lb.tx_power_dbm - path_loss - noise_dbm;
}

}  // namespace ncim
