#include "ncim/stf_jabid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncim {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double lambda_objective(double c, double KI, double L) {
  const double g = (1.0 + c * c) * std_normal_cdf(-c) - c * std_normal_pdf(c);
  return (1.0 - 2.0 * KI * g / L) / (1.0 + c * c - 2.0 * g);
}

double sigmoid(double log_odds) {
  return log_odds >= 0 ? 1.0 / (1.0 + std::exp(-log_odds)) : std::exp(log_odds) / (1.0 + std::exp(log_odds));
}

constexpr double kProbClamp = 1e-12;

}  // namespace

double lambda_init(int num_devices, int sequences_per_device, int length) {
  if (num_devices < 1 || sequences_per_device < 1 || length < 1) throw std::invalid_argument("K, I, L must be >= 1");
  const double KI = static_cast<double>(num_devices) * sequences_per_device;
  const double L = length;
  // Coarse scan then golden-section refinement around the best grid point.
  double best_c = 0.01, best = lambda_objective(best_c, KI, L);
  for (double c = 0.01; c <= 10.0; c += 0.01) {
    const double v = lambda_objective(c, KI, L);
    if (v > best) best = v, best_c = c;
  }
  double a = std::max(1e-6, best_c - 0.01), b = best_c + 0.01;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = lambda_objective(x1, KI, L), f2 = lambda_objective(x2, KI, L);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + gr * (b - a);
      f2 = lambda_objective(x2, KI, L);
    } else {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - gr * (b - a);
      f1 = lambda_objective(x1, KI, L);
    }
  }
  best = std::max(best, lambda_objective(0.5 * (a + b), KI, L));
  const double lam = L / KI * best;
  return std::clamp(lam, kProbClamp, 1.0 - kProbClamp);
}

void stf_denoise(const CMat& r, const RMat& phi, const StfHyper& hyper, int I, CMat& x_hat, RMat& v_hat,
                 StfPosterior& post) {
  const Index rows = r.rows(), cols = r.cols();
  if (rows % I != 0 || phi.rows() != rows || phi.cols() != cols) throw std::invalid_argument("denoiser shape mismatch");
  const Index K = rows / I;
  if (hyper.lambda.size() != K) throw std::invalid_argument("lambda must have one entry per device");

  const double tau0 = hyper.tau0;
  const Complex mu0 = hyper.mu0;
  post.pi.resize(rows, cols);
  post.mu_bar.resize(rows, cols);
  post.tau_bar.resize(rows, cols);
  post.llr.resize(rows, cols);
  x_hat.resize(rows, cols);
  v_hat.resize(rows, cols);

  for (Index c = 0; c < cols; ++c) {
    for (Index q = 0; q < rows; ++q) {
      const double ph = phi(q, c);
      const double s = tau0 + ph;
      const Complex rv = r(q, c);
      post.mu_bar(q, c) = (mu0 * ph + tau0 * rv) / s;
      post.tau_bar(q, c) = tau0 * ph / s;
      post.llr(q, c) = std::log(ph / s) - std::norm(rv - mu0) / s + std::norm(rv) / ph;
    }
  }

  const double log_I = std::log(static_cast<double>(I));
  RMat lse(K, cols);
  for (Index k = 0; k < K; ++k) {
    double evidence = 0.0;
    for (Index c = 0; c < cols; ++c) {
      const auto block = post.llr.col(c).segment(k * I, I);
      const double mx = block.maxCoeff();
      lse(k, c) = mx + std::log((block.array() - mx).exp().sum());
      evidence += lse(k, c) - log_I;
    }
    const double lam = std::clamp(hyper.lambda(k), kProbClamp, 1.0 - kProbClamp);
    const double p_active = sigmoid(std::log(lam) - std::log1p(-lam) + evidence);
    for (Index c = 0; c < cols; ++c)
      for (Index i = 0; i < I; ++i) post.pi(k * I + i, c) = p_active * std::exp(post.llr(k * I + i, c) - lse(k, c));
  }

  for (Index c = 0; c < cols; ++c) {
    for (Index q = 0; q < rows; ++q) {
      const double p = post.pi(q, c);
      x_hat(q, c) = p * post.mu_bar(q, c);
      v_hat(q, c) = std::max(0.0, p * post.tau_bar(q, c) + p * (1.0 - p) * std::norm(post.mu_bar(q, c)));
    }
  }
}

StfHyper stf_em_update(const StfPosterior& post, const StfHyper& prev, int I) {
  StfHyper h = prev;
  const double mass = post.pi.sum();
  if (mass >= 1e-12) {
    Complex num(0.0, 0.0);
    for (Index c = 0; c < post.pi.cols(); ++c)
      for (Index q = 0; q < post.pi.rows(); ++q) num += post.pi(q, c) * post.mu_bar(q, c);
    h.mu0 = num / mass;
    double tnum = 0.0;
    for (Index c = 0; c < post.pi.cols(); ++c)
      for (Index q = 0; q < post.pi.rows(); ++q)
        tnum += post.pi(q, c) * (std::norm(h.mu0 - post.mu_bar(q, c)) + post.tau_bar(q, c));
    h.tau0 = tnum / mass;
  }

  const Index K = post.pi.rows() / I;
  const Index cols = post.pi.cols();
  h.lambda.resize(K);
  for (Index k = 0; k < K; ++k) {
    double acc = 0.0;
    for (Index c = 0; c < cols; ++c) {
      double w = 0.0;
      for (Index i = 0; i < I; ++i) {
        const double p = std::min(post.pi(k * I + i, c), 1.0 - kProbClamp);
        w += p / (1.0 - p);
      }
      acc += w / (1.0 + w);
    }
    h.lambda(k) = std::clamp(acc / cols, 0.0, 1.0);
  }
  return h;
}

namespace {

struct StfDenoiser {
  StfHyper hyper;
  StfPosterior post;
  int I;

  void denoise(const CMat& r, const RMat& phi, CMat& x_hat, RMat& v_hat) { stf_denoise(r, phi, hyper, I, x_hat, v_hat, post); }
  void learn() { hyper = stf_em_update(post, hyper, I); }
};

}  // namespace

StfResult run_stf_jabid(const CMat& Y, const Codebook& cb, double sigma2, int slab_width, const StfOptions& opt) {
  if (Y.rows() != cb.length) throw std::invalid_argument("observation rows must equal L");
  if (slab_width < 1 || Y.cols() % slab_width != 0) throw std::invalid_argument("observation columns not a multiple of M");
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  const int K = cb.num_devices, I = cb.sequences_per_device, L = cb.length;

  const double lam0 = lambda_init(K, I, L);
  StfDenoiser den;
  den.I = I;
  den.hyper.sigma2 = sigma2;
  den.hyper.mu0 = Complex(0.0, 0.0);
  den.hyper.tau0 = std::max(1e-6, (Y.norm() - L * sigma2) / (cb.phi.norm() * lam0));
  den.hyper.lambda = RVec::Constant(K, lam0);

  const auto run = run_amp<double>(Y, cb.phi, sigma2, opt.amp, den);

  StfResult res;
  res.estimate = run.state.x_hat;
  res.num_slabs = static_cast<int>(Y.cols() / slab_width);
  res.iterations = run.iterations;
  res.lambda = den.hyper.lambda;
  res.hyper = den.hyper;
  for (int k = 0; k < K; ++k)
    if (res.lambda(k) > opt.activity_threshold) res.active.push_back(k);
  select_by_row_power(res, I, slab_width);
  return res;
}

}  // namespace ncim
