#pragma once

#include <vector>

#include "ncim/amp_core.hpp"
#include "ncim/codebook.hpp"
#include "ncim/detection.hpp"

namespace ncim {

/// Circular neighbourhood along the angle axis: offsets +-1..+-Q with weights zeta[q-1].
struct NeighborScheme {
  int radius = 4;
  std::vector<double> weights{1.0, 0.8, 0.6, 0.4};

  /// Throws std::invalid_argument unless weights.size() == radius, each weight in (0, 1] and nonincreasing.
  void validate() const;
  /// Largest usable radius for M angles (2Q < M), never above `radius`.
  NeighborScheme clamped(int antennas) const;
};

struct AeHyper {
  Complex mu0{0.0, 0.0};
  double tau0 = 1.0;
  double sigma2 = 1.0;
  RMat rho;  // KI x M
};

struct AePosterior {
  RMat pi;
  CMat mu;
  RMat tau;
};

enum class ActivityRule { NeighborSmoothing, AntennaAverage };

/// Which indicator the activity and EID decisions read: the final posterior pi or the smoothed prior rho.
enum class DecisionStatistic { Posterior, Prior };

/// Elementwise Bernoulli-Gaussian posterior.
void ae_denoise(const CMat& r, const RMat& xi, const AeHyper& hyper, CMat& w_hat, RMat& u_hat, AePosterior& post);

/// Weighted average of the 2Q circular neighbours (centre excluded). Radius 0 returns the input.
RMat neighbor_smooth(const RMat& rho, const NeighborScheme& scheme);

/// rho <- pi, then smoothing or antenna averaging; mu0/tau0 held when the posterior carries no mass.
AeHyper ae_em_update(const AePosterior& post, const AeHyper& prev, const NeighborScheme& scheme, ActivityRule rule);

struct AeOptions {
  AmpOptions amp;
  double activity_threshold = 0.9;  // T_h2
  NeighborScheme scheme;
  ActivityRule rule = ActivityRule::NeighborSmoothing;
  DecisionStatistic statistic = DecisionStatistic::Posterior;
};

struct AeResult : Detection {
  RMat rho;  // final prior indicators after smoothing/averaging, KI x (S*M)
  RMat pi;   // final posterior indicators used for activity and EID
};

/// Single-slab detector on an L x M angular observation. Activity: max_{i,m} s > T_h2; EID: argmax_i max_m s,
/// with s = pi or rho per opt.statistic.
AeResult run_ae_jabid(const CMat& R, const Codebook& cb, double sigma2, const AeOptions& opt = {});

/// Runs the single-slab detector on every M-wide slab; a device is declared active when at least half of
/// the slabs detect it, and selections are taken per slab.
AeResult run_ae_frame(const CMat& R, const Codebook& cb, double sigma2, int slab_width, const AeOptions& opt = {});

}  // namespace ncim
