#include "ncim/metrics.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncim {

double nmse(const CMat& estimate, const CMat& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) throw std::invalid_argument("nmse shape mismatch");
  const double denom = truth.norm();
  if (denom == 0.0) throw std::domain_error("nmse undefined for a zero reference");
  return (estimate - truth).norm() / denom;
}

double nmse_db(double linear_nmse) { return 10.0 * std::log10(linear_nmse); }

ErrorCounts count_errors(const GroundTruth& gt, const Detection& det) {
  ErrorCounts c;
  std::vector<char> detected(gt.num_devices, 0);
  for (int k : det.active) {
    if (k < 0 || k >= gt.num_devices) throw std::out_of_range("detected device out of range");
    detected[k] = 1;
  }
  const int S = gt.num_slabs;
  if (det.num_slabs != S) throw std::invalid_argument("detection and ground truth disagree on slab count");
  for (int k = 0; k < gt.num_devices; ++k) {
    if (gt.active[k] && !detected[k]) ++c.missed;
    if (!gt.active[k] && detected[k]) ++c.false_alarm;
    if (gt.active[k] && detected[k]) {
      for (int s = 0; s < S; ++s) {
        const int t = gt.selection_of(k, s);
        const int e = det.selection_of(k, s);
        if (e < 0) throw std::invalid_argument("detected device without a selection");
        c.bit_errors += std::popcount(static_cast<unsigned>(t ^ e));
      }
    }
  }
  return c;
}

double ader(int missed, int false_alarm, int num_devices) {
  if (num_devices < 1) throw std::invalid_argument("K must be positive");
  return static_cast<double>(missed + false_alarm) / num_devices;
}

double ader(const std::vector<int>& detected, const std::vector<int>& truth, int num_devices) {
  std::vector<int> d = detected, t = truth;
  std::sort(d.begin(), d.end());
  std::sort(t.begin(), t.end());
  std::vector<int> miss, fa;
  std::set_difference(t.begin(), t.end(), d.begin(), d.end(), std::back_inserter(miss));
  std::set_difference(d.begin(), d.end(), t.begin(), t.end(), std::back_inserter(fa));
  return ader(static_cast<int>(miss.size()), static_cast<int>(fa.size()), num_devices);
}

double ber_total(const ErrorCounts& c, int num_active, int bits_per_selection, int selections_per_device) {
  const double rs = static_cast<double>(bits_per_selection) * selections_per_device;
  const double denom = (num_active + c.false_alarm) * rs;
  if (denom == 0.0) return 0.0;
  return ((c.missed + c.false_alarm) * rs + static_cast<double>(c.bit_errors)) / denom;
}

TrialMetrics evaluate(const GroundTruth& gt, const Detection& det, const CMat& truth) {
  TrialMetrics m;
  m.counts = count_errors(gt, det);
  m.ader = ader(m.counts.missed, m.counts.false_alarm, gt.num_devices);
  m.ber_total = ber_total(m.counts, static_cast<int>(gt.active_list.size()), log2_exact(gt.sequences_per_device),
                          gt.num_slabs);
  m.nmse = truth.norm() > 0 ? nmse(det.estimate, truth) : 0.0;
  m.iterations = det.iterations;
  return m;
}

double complexity_count(const std::string& algorithm, const ComplexityParams& p) {
  const double K = p.K, I = p.I, L = p.L, M = p.M, JN = p.J * p.N_tilde, T = p.T;
  if (algorithm == "ae_jabid") return JN * T * (4 * K * I * L * M + 7.75 * K * I * M + 0.5 * p.Q * K * I * M);
  if (algorithm == "benchmark1" || algorithm == "gmmv_amp") return JN * T * (4 * K * I * L * M + 8 * K * I * M);
  if (algorithm == "section_wise_amp") return JN * T * (2 * K * I * L * M);
  if (algorithm == "stf_jabid") {
    const double Mp = JN * M;
    return T * (4 * K * I * L * Mp + 7.25 * K * I * Mp + 1.25 * K * I * I * Mp + 0.75 * K * I * I * Mp * Mp);
  }
  if (algorithm == "somp") {
    double tail = 0.0;
    for (int t = 1; t <= static_cast<int>(p.Ka); ++t) tail += double(t) * t * t + 2 * L * t * t + 2 * L * M * t;
    return JN * (p.Ka * K * I * L * M + tail);
  }
  throw std::invalid_argument("unknown algorithm id: " + algorithm);
}

double efficiency(double ber, double cm) {
  if (ber < 0 || ber > 1) throw std::invalid_argument("BER must lie in [0, 1]");
  if (!(cm > 1)) throw std::invalid_argument("complexity must exceed 1");
  if (ber == 0) return std::numeric_limits<double>::infinity();
  return -std::log10(ber) / std::log10(cm);
}

}  // namespace ncim
