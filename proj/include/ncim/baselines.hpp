#pragma once

#include <vector>

#include "ncim/ae_jabid.hpp"
#include "ncim/codebook.hpp"
#include "ncim/detection.hpp"

namespace ncim {

struct SompConfig {
  double noise_power = 1.0;  // stop once mean residual power falls below this
  int max_atoms = -1;        // <= 0 means L - 1
};

struct SompResult {
  std::vector<Index> support;  // selection order
  CMat estimate;               // KI x C, least squares on the support
  CMat residual;
  std::vector<double> residual_power;  // after each selection
};

/// Simultaneous OMP over all columns of Y.
SompResult run_somp(const CMat& Y, const CMat& Phi, const SompConfig& cfg);

/// SOMP applied per M-wide slab. Devices owning a selected column in at least half of the slabs are
/// declared active; selections follow the maximum row power per slab.
Detection somp_detect(const CMat& Y, const Codebook& cb, double noise_power, int slab_width, int max_atoms = -1);

/// AE detector with antenna-averaged activity indicators in place of neighbour smoothing.
AeResult run_benchmark1(const CMat& R, const Codebook& cb, double sigma2, int slab_width, AeOptions opt = {});

}  // namespace ncim
