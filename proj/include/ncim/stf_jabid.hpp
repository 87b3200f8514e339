#pragma once

#include "ncim/amp_core.hpp"
#include "ncim/codebook.hpp"
#include "ncim/detection.hpp"

namespace ncim {

struct StfHyper {
  Complex mu0{0.0, 0.0};
  double tau0 = 1.0;
  double sigma2 = 1.0;
  RVec lambda;  // length K
};

/// Quantities kept from the last denoising pass for EM.
struct StfPosterior {
  RMat pi;       // activity beliefs
  CMat mu_bar;   // Gaussian-branch posterior mean
  RMat tau_bar;  // Gaussian-branch posterior variance
  RMat llr;      // log-metric per entry
};

/// Sparsity-undersampling initializer shared by both detectors.
double lambda_init(int num_devices, int sequences_per_device, int length);

/// Structured Bernoulli-Gaussian denoiser: one active row per device block and column, device activity
/// common to all columns.
void stf_denoise(const CMat& r, const RMat& phi, const StfHyper& hyper, int sequences_per_device, CMat& x_hat,
                 RMat& v_hat, StfPosterior& post);

/// EM refresh of (mu0, tau0, lambda). mu0/tau0 are held when the posterior carries no mass.
StfHyper stf_em_update(const StfPosterior& post, const StfHyper& prev, int sequences_per_device);

struct StfOptions {
  AmpOptions amp;
  double activity_threshold = 0.7;  // T_h1
};

struct StfResult : Detection {
  RVec lambda;
  StfHyper hyper;
};

/// Joint detector over an L x (S*M) frame.
StfResult run_stf_jabid(const CMat& Y, const Codebook& cb, double sigma2, int slab_width, const StfOptions& opt = {});

}  // namespace ncim
