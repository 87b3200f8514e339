#include "ncim/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncim {

SompResult run_somp(const CMat& Y, const CMat& Phi, const SompConfig& cfg) {
  if (Phi.rows() != Y.rows()) throw std::invalid_argument("sensing matrix and observation disagree on L");
  if (!(cfg.noise_power > 0)) throw std::invalid_argument("noise power must be positive");
  const Index L = Y.rows(), C = Y.cols(), cols = Phi.cols();
  const Index cap = std::min<Index>(cols, cfg.max_atoms > 0 ? cfg.max_atoms : std::max<Index>(1, L - 1));

  SompResult res;
  res.residual = Y;
  res.estimate = CMat::Zero(cols, C);
  std::vector<char> used(cols, 0);
  auto mean_power = [&](const CMat& R) { return R.squaredNorm() / static_cast<double>(R.size()); };

  while (static_cast<Index>(res.support.size()) < cap && mean_power(res.residual) >= cfg.noise_power) {
    const RVec score = (Phi.adjoint() * res.residual).rowwise().squaredNorm();
    Index best = -1;
    double best_score = -1.0;
    for (Index c = 0; c < cols; ++c)
      if (!used[c] && score(c) > best_score) best = c, best_score = score(c);
    if (best < 0) break;
    used[best] = 1;
    res.support.push_back(best);

    CMat A(L, static_cast<Index>(res.support.size()));
    for (std::size_t i = 0; i < res.support.size(); ++i) A.col(static_cast<Index>(i)) = Phi.col(res.support[i]);
    const CMat coef = A.completeOrthogonalDecomposition().solve(Y);
    res.residual = Y - A * coef;
    res.residual_power.push_back(mean_power(res.residual));
    res.estimate.setZero();
    for (std::size_t i = 0; i < res.support.size(); ++i) res.estimate.row(res.support[i]) = coef.row(static_cast<Index>(i));
  }
  return res;
}

Detection somp_detect(const CMat& Y, const Codebook& cb, double noise_power, int slab_width, int max_atoms) {
  if (slab_width < 1 || Y.cols() % slab_width != 0) throw std::invalid_argument("observation columns not a multiple of M");
  const int S = static_cast<int>(Y.cols() / slab_width);
  const int K = cb.num_devices, I = cb.sequences_per_device;

  Detection det;
  det.num_slabs = S;
  det.estimate = CMat::Zero(cb.phi.cols(), Y.cols());
  std::vector<int> votes(K, 0);
  std::vector<CMat> correlation(S);
  for (int s = 0; s < S; ++s) {
    const CMat Ys = Y.middleCols(static_cast<Index>(s) * slab_width, slab_width);
    const auto r = run_somp(Ys, cb.phi, {noise_power, max_atoms});
    det.estimate.middleCols(static_cast<Index>(s) * slab_width, slab_width) = r.estimate;
    std::vector<char> owner(K, 0);
    for (Index c : r.support) owner[c / I] = 1;
    for (int k = 0; k < K; ++k) votes[k] += owner[k];
    det.iterations += static_cast<int>(r.support.size());
    correlation[s] = cb.phi.adjoint() * Ys;
  }
  det.iterations /= S;
  for (int k = 0; k < K; ++k)
    if (2 * votes[k] >= S && votes[k] > 0) det.active.push_back(k);

  det.selection.assign(static_cast<std::size_t>(K) * S, -1);
  for (int k : det.active) {
    for (int s = 0; s < S; ++s) {
      const auto block = det.estimate.block(static_cast<Index>(k) * I, static_cast<Index>(s) * slab_width, I, slab_width);
      Index best = 0;
      if (block.squaredNorm() > 0)
        block.rowwise().squaredNorm().maxCoeff(&best);
      else
        correlation[s].middleRows(static_cast<Index>(k) * I, I).rowwise().squaredNorm().maxCoeff(&best);
      det.selection[static_cast<std::size_t>(k) * S + s] = static_cast<int>(best);
    }
  }
  return det;
}

AeResult run_benchmark1(const CMat& R, const Codebook& cb, double sigma2, int slab_width, AeOptions opt) {
  opt.rule = ActivityRule::AntennaAverage;
  return run_ae_frame(R, cb, sigma2, slab_width, opt);
}

}  // namespace ncim
