#include "ncim/ae_jabid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ncim/stf_jabid.hpp"

namespace ncim {

void NeighborScheme::validate() const {
  if (radius < 0) throw std::invalid_argument("neighbour radius must be >= 0");
  if (static_cast<int>(weights.size()) != radius) throw std::invalid_argument("need one weight per neighbour offset");
  for (std::size_t q = 0; q < weights.size(); ++q) {
    if (!(weights[q] > 0.0 && weights[q] <= 1.0)) throw std::invalid_argument("neighbour weights must lie in (0, 1]");
    if (q > 0 && weights[q] > weights[q - 1]) throw std::invalid_argument("neighbour weights must be nonincreasing");
  }
}

NeighborScheme NeighborScheme::clamped(int antennas) const {
  NeighborScheme out = *this;
  out.radius = std::max(0, std::min(radius, (antennas - 1) / 2));
  out.weights.resize(out.radius);
  return out;
}

void ae_denoise(const CMat& r, const RMat& xi, const AeHyper& hyper, CMat& w_hat, RMat& u_hat, AePosterior& post) {
  const Index rows = r.rows(), cols = r.cols();
  if (xi.rows() != rows || xi.cols() != cols || hyper.rho.rows() != rows || hyper.rho.cols() != cols)
    throw std::invalid_argument("denoiser shape mismatch");
  post.pi.resize(rows, cols);
  post.mu.resize(rows, cols);
  post.tau.resize(rows, cols);
  w_hat.resize(rows, cols);
  u_hat.resize(rows, cols);
  const double tau0 = hyper.tau0;
  for (Index c = 0; c < cols; ++c) {
    for (Index q = 0; q < rows; ++q) {
      const double x = xi(q, c);
      const double s = tau0 + x;
      const Complex rv = r(q, c);
      const Complex mu = (hyper.mu0 * x + tau0 * rv) / s;
      const double tau = tau0 * x / s;
      const double llr = std::log(x / s) - std::norm(rv - hyper.mu0) / s + std::norm(rv) / x;
      const double rho = hyper.rho(q, c);
      double p;
      if (rho <= 0.0) {
        p = 0.0;
      } else if (rho >= 1.0) {
        p = 1.0;
      } else {
        const double z = std::log(rho) - std::log1p(-rho) + llr;
        p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      }
      post.pi(q, c) = p;
      post.mu(q, c) = mu;
      post.tau(q, c) = tau;
      w_hat(q, c) = p * mu;
      u_hat(q, c) = std::max(0.0, p * tau + p * (1.0 - p) * std::norm(mu));
    }
  }
}

RMat neighbor_smooth(const RMat& rho, const NeighborScheme& scheme) {
  scheme.validate();
  const Index M = rho.cols();
  if (scheme.radius == 0) return rho;
  if (2 * scheme.radius >= M) throw std::invalid_argument("neighbourhood 2Q must be smaller than M");
  double norm = 0.0;
  for (double z : scheme.weights) norm += 2.0 * z;
  RMat out = RMat::Zero(rho.rows(), M);
  for (Index m = 0; m < M; ++m) {
    for (int q = 1; q <= scheme.radius; ++q) {
      const double z = scheme.weights[q - 1];
      out.col(m) += z * (rho.col((m + q) % M) + rho.col((m - q + M) % M));
    }
  }
  return out / norm;
}

AeHyper ae_em_update(const AePosterior& post, const AeHyper& prev, const NeighborScheme& scheme, ActivityRule rule) {
  AeHyper h = prev;
  const double mass = post.pi.sum();
  if (mass >= 1e-12) {
    Complex num(0.0, 0.0);
    for (Index c = 0; c < post.pi.cols(); ++c)
      for (Index q = 0; q < post.pi.rows(); ++q) num += post.pi(q, c) * post.mu(q, c);
    h.mu0 = num / mass;
    double tnum = 0.0;
    for (Index c = 0; c < post.pi.cols(); ++c)
      for (Index q = 0; q < post.pi.rows(); ++q)
        tnum += post.pi(q, c) * (std::norm(h.mu0 - post.mu(q, c)) + post.tau(q, c));
    h.tau0 = tnum / mass;
  }
  if (rule == ActivityRule::NeighborSmoothing) {
    h.rho = neighbor_smooth(post.pi, scheme);
  } else {
    const RVec mean = post.pi.rowwise().mean();
    h.rho = mean.replicate(1, post.pi.cols());
  }
  return h;
}

namespace {

struct AeDenoiser {
  AeHyper hyper;
  AePosterior post;
  NeighborScheme scheme;
  ActivityRule rule;

  void denoise(const CMat& r, const RMat& xi, CMat& w, RMat& u) { ae_denoise(r, xi, hyper, w, u, post); }
  void learn() { hyper = ae_em_update(post, hyper, scheme, rule); }
};

}  // namespace

AeResult run_ae_jabid(const CMat& R, const Codebook& cb, double sigma2, const AeOptions& opt) {
  if (R.rows() != cb.length) throw std::invalid_argument("observation rows must equal L");
  if (R.cols() < 1) throw std::invalid_argument("observation has no columns");
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  opt.scheme.validate();
  if (opt.rule == ActivityRule::NeighborSmoothing && opt.scheme.radius > 0 && 2 * opt.scheme.radius >= R.cols())
    throw std::invalid_argument("neighbourhood 2Q must be smaller than M");
  const int K = cb.num_devices, I = cb.sequences_per_device, L = cb.length;
  const Index M = R.cols();

  const double rho0 = lambda_init(K, I, L);
  AeDenoiser den;
  den.scheme = opt.scheme;
  den.rule = opt.rule;
  den.hyper.sigma2 = sigma2;
  den.hyper.tau0 = std::max(1e-6, (R.norm() - L * sigma2) / (cb.phi.norm() * rho0));
  den.hyper.rho = RMat::Constant(cb.phi.cols(), M, rho0);

  const auto run = run_amp<double>(R, cb.phi, sigma2, opt.amp, den);

  AeResult res;
  res.estimate = run.state.x_hat;
  res.num_slabs = 1;
  res.iterations = run.iterations;
  res.rho = den.hyper.rho;
  res.pi = den.post.pi;
  res.selection.assign(K, -1);
  const RMat& stat = opt.statistic == DecisionStatistic::Posterior ? res.pi : res.rho;
  for (int k = 0; k < K; ++k) {
    const auto block = stat.middleRows(static_cast<Index>(k) * I, I);
    if (!(block.maxCoeff() > opt.activity_threshold)) continue;
    res.active.push_back(k);
    int best = 0;
    double best_rho = -1.0, best_pow = -1.0;
    for (int i = 0; i < I; ++i) {
      const double peak = block.row(i).maxCoeff();
      const double pow = res.estimate.row(static_cast<Index>(k) * I + i).squaredNorm();
      if (peak > best_rho + 1e-9 || (std::abs(peak - best_rho) <= 1e-9 && pow > best_pow)) {
        best = i;
        best_rho = peak;
        best_pow = pow;
      }
    }
    res.selection[k] = best;
  }
  return res;
}

AeResult run_ae_frame(const CMat& R, const Codebook& cb, double sigma2, int slab_width, const AeOptions& opt) {
  if (slab_width < 1 || R.cols() % slab_width != 0) throw std::invalid_argument("observation columns not a multiple of M");
  const int S = static_cast<int>(R.cols() / slab_width);
  if (S == 1) return run_ae_jabid(R, cb, sigma2, opt);
  const int K = cb.num_devices;

  AeResult res;
  res.num_slabs = S;
  res.estimate.resize(cb.phi.cols(), R.cols());
  res.rho.resize(cb.phi.cols(), R.cols());
  res.pi.resize(cb.phi.cols(), R.cols());
  std::vector<int> votes(K, 0);
  std::vector<AeResult> per_slab;
  per_slab.reserve(S);
  for (int s = 0; s < S; ++s) {
    per_slab.push_back(run_ae_jabid(R.middleCols(static_cast<Index>(s) * slab_width, slab_width), cb, sigma2, opt));
    const auto& r = per_slab.back();
    res.estimate.middleCols(static_cast<Index>(s) * slab_width, slab_width) = r.estimate;
    res.rho.middleCols(static_cast<Index>(s) * slab_width, slab_width) = r.rho;
    res.pi.middleCols(static_cast<Index>(s) * slab_width, slab_width) = r.pi;
    res.iterations += r.iterations;
    for (int k : r.active) ++votes[k];
  }
  res.iterations /= S;
  res.selection.assign(static_cast<std::size_t>(K) * S, -1);
  const int I = cb.sequences_per_device;
  for (int k = 0; k < K; ++k) {
    if (2 * votes[k] < S) continue;
    res.active.push_back(k);
    for (int s = 0; s < S; ++s) {
      int sel = per_slab[s].selection[k];
      if (sel < 0) {
        Index best = 0;
        per_slab[s].pi.middleRows(static_cast<Index>(k) * I, I).rowwise().maxCoeff().maxCoeff(&best);
        sel = static_cast<int>(best);
      }
      res.selection[static_cast<std::size_t>(k) * S + s] = sel;
    }
  }
  return res;
}

}  // namespace ncim
