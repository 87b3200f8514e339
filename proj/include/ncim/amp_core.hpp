#pragma once

#include <algorithm>
#include <concepts>
#include <stdexcept>

#include "ncim/types.hpp"

namespace ncim {

inline constexpr double kVarianceFloor = 1e-15;

template <typename Real>
struct AmpState {
  CMatT<Real> x_hat;  // KI x C
  RMatT<Real> v_hat;
  CMatT<Real> Z;      // L x C
  RMatT<Real> V;
  CMatT<Real> r;      // KI x C
  RMatT<Real> phi;
  int t = 1;
};

struct AmpOptions {
  int max_iterations = 200;  // T0
  double damping = 0.3;      // kappa
  double tolerance = 1e-6;   // epsilon
};

template <typename Real>
AmpState<Real> init_state(const CMatT<Real>& Y, Index unknowns) {
  if (Y.size() == 0 || unknowns < 1) throw std::invalid_argument("empty AMP problem");
  AmpState<Real> s;
  s.Z = Y;
  s.V = RMatT<Real>::Ones(Y.rows(), Y.cols());
  s.x_hat = CMatT<Real>::Zero(unknowns, Y.cols());
  s.v_hat = RMatT<Real>::Ones(unknowns, Y.cols());
  s.r = CMatT<Real>::Zero(unknowns, Y.cols());
  s.phi = RMatT<Real>::Ones(unknowns, Y.cols());
  return s;
}

/// Factor-node step. `Z_prev`, `V_prev` are the previous iteration's values used by the Onsager term.
template <typename Real>
void factor_update(AmpState<Real>& s, const CMatT<Real>& Phi, const RMatT<Real>& Phi_abs2, const CMatT<Real>& Y,
                   Real sigma2, const CMatT<Real>& Z_prev, const RMatT<Real>& V_prev) {
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  s.V.noalias() = Phi_abs2 * s.v_hat;
  const RMatT<Real> denom = (V_prev.array() + sigma2).max(Real(kVarianceFloor)).matrix();
  CMatT<Real> onsager = ((Y - Z_prev).array() / denom.array().template cast<std::complex<Real>>()).matrix();
  s.Z.noalias() = Phi * s.x_hat;
  s.Z.array() -= s.V.array().template cast<std::complex<Real>>() * onsager.array();
}

template <typename Real>
void damp(AmpState<Real>& s, const CMatT<Real>& Z_prev, const RMatT<Real>& V_prev, Real kappa) {
  if (!(kappa >= 0 && kappa < 1)) throw std::invalid_argument("damping must lie in [0, 1)");
  if (kappa == 0) return;
  s.V = kappa * V_prev + (1 - kappa) * s.V;
  s.Z = std::complex<Real>(kappa) * Z_prev + std::complex<Real>(1 - kappa) * s.Z;
}

template <typename Real>
void variable_update(AmpState<Real>& s, const CMatT<Real>& Phi, const RMatT<Real>& Phi_abs2, const CMatT<Real>& Y,
                     Real sigma2) {
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  const RMatT<Real> inv = (s.V.array() + sigma2).max(Real(kVarianceFloor)).inverse().matrix();
  s.phi.noalias() = Phi_abs2.transpose() * inv;
  s.phi = s.phi.array().max(Real(kVarianceFloor)).inverse().matrix();
  const CMatT<Real> weighted = ((Y - s.Z).array() * inv.array().template cast<std::complex<Real>>()).matrix();
  s.r.noalias() = Phi.adjoint() * weighted;
  s.r.array() *= s.phi.array().template cast<std::complex<Real>>();
  s.r += s.x_hat;
}

/// Relative Frobenius change below `epsilon`; false while the previous iterate is zero.
template <typename Derived1, typename Derived2>
bool converged(const Eigen::MatrixBase<Derived1>& current, const Eigen::MatrixBase<Derived2>& previous, double epsilon) {
  const double prev = static_cast<double>(previous.norm());
  if (prev == 0.0) return false;
  return static_cast<double>((current - previous).norm()) / prev < epsilon;
}

/// Elementwise posterior computation plus hyperparameter learning.
template <typename D, typename Real>
concept AmpDenoiser = requires(D d, const CMatT<Real>& r, const RMatT<Real>& phi, CMatT<Real>& x, RMatT<Real>& v) {
  d.denoise(r, phi, x, v);
  d.learn();
};

template <typename Real>
struct AmpRun {
  AmpState<Real> state;
  int iterations = 0;
  bool converged = false;
};

/// Damped AMP loop: factor update, damping, variable update, denoising, EM, convergence test.
template <typename Real, typename Denoiser>
  requires AmpDenoiser<Denoiser, Real>
AmpRun<Real> run_amp(const CMatT<Real>& Y, const CMatT<Real>& Phi, Real sigma2, const AmpOptions& opt, Denoiser& den) {
  if (Phi.rows() != Y.rows()) throw std::invalid_argument("sensing matrix and observation disagree on L");
  if (opt.max_iterations < 1) throw std::invalid_argument("need at least one iteration");
  const RMatT<Real> abs2 = Phi.cwiseAbs2();
  AmpRun<Real> run{init_state<Real>(Y, Phi.cols()), 0, false};
  auto& s = run.state;
  CMatT<Real> Z_prev, x_prev;
  RMatT<Real> V_prev;
  for (int t = 1; t <= opt.max_iterations; ++t) {
    Z_prev = s.Z;
    V_prev = s.V;
    x_prev = s.x_hat;
    factor_update(s, Phi, abs2, Y, sigma2, Z_prev, V_prev);
    damp(s, Z_prev, V_prev, Real(opt.damping));
    variable_update(s, Phi, abs2, Y, sigma2);
    den.denoise(s.r, s.phi, s.x_hat, s.v_hat);
    den.learn();
    s.t = t;
    run.iterations = t;
    if (converged(s.x_hat, x_prev, opt.tolerance)) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace ncim
