#include <catch_amalgamated.hpp>

#include "ncim/ae_jabid.hpp"
#include "ncim/baselines.hpp"
#include "ncim/channel.hpp"
#include "ncim/signal.hpp"
#include "ncim/stf_jabid.hpp"
#include "oracles.hpp"

using namespace ncim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("elementwise posterior at the prior extremes", "[ae]") {
  AeHyper h;
  h.tau0 = 1.0;
  h.rho = RMat(1, 2);
  h.rho << 1.0, 0.0;
  CMat r(1, 2);
  r << Complex(1e-3, 0.0), Complex(5.0, 1.0);
  const RMat xi = RMat::Constant(1, 2, 0.2);
  CMat w;
  RMat u;
  AePosterior post;
  ae_denoise(r, xi, h, w, u, post);
  CHECK(post.pi(0, 0) == 1.0);
  CHECK(post.pi(0, 1) == 0.0);
  CHECK(w(0, 1) == Complex(0.0, 0.0));
  CHECK(u(0, 1) == 0.0);
}

TEST_CASE("elementwise posterior matches the straight-line evaluation", "[ae]") {
  Rng rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 10000;
  AeHyper h;
  h.mu0 = Complex(0.05, -0.1);
  h.tau0 = 1.3;
  h.rho = RMat::NullaryExpr(n, 1, [&]() { return 0.01 + 0.98 * u(rng); });
  CMat r(n, 1);
  RMat xi(n, 1);
  for (int i = 0; i < n; ++i) r(i, 0) = complex_normal(rng, 0.2 + u(rng)), xi(i, 0) = 0.05 + u(rng);
  CMat w;
  RMat v;
  AePosterior post;
  ae_denoise(r, xi, h, w, v, post);
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const auto ref = oracle::bg_scalar({r(i, 0).real(), r(i, 0).imag()}, xi(i, 0), {h.mu0.real(), h.mu0.imag()}, h.tau0,
                                       h.rho(i, 0));
    worst = std::max<double>(worst, std::abs(post.pi(i, 0) - ref.pi) / ref.pi);
    worst = std::max<double>(worst, std::abs(oracle::CLD(w(i, 0).real(), w(i, 0).imag()) - ref.mean) / std::abs(ref.mean));
    worst = std::max<double>(worst, std::abs(v(i, 0) - ref.var) / ref.var);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("neighbour smoothing", "[ae]") {
  const RMat flat = RMat::Constant(3, 12, 0.37);
  CHECK((neighbor_smooth(flat, NeighborScheme{}) - flat).norm() < 1e-15);

  RMat spike = RMat::Zero(1, 4);
  spike(0, 0) = 1.0;
  const RMat s = neighbor_smooth(spike, NeighborScheme{1, {1.0}});
  CHECK_THAT(s(0, 1), WithinAbs(0.5, 1e-15));
  CHECK_THAT(s(0, 3), WithinAbs(0.5, 1e-15));
  CHECK(s(0, 0) == 0.0);
  CHECK(s(0, 2) == 0.0);

  RMat wide = RMat::Zero(1, 16);
  wide(0, 0) = 1.0;
  const RMat p = neighbor_smooth(wide, NeighborScheme{});
  CHECK_THAT(p(0, 1), WithinAbs(1.0 / 5.6, 1e-15));
  CHECK_THAT(p(0, 15), WithinAbs(1.0 / 5.6, 1e-15));
  CHECK_THAT(p(0, 4), WithinAbs(0.4 / 5.6, 1e-15));
  CHECK(p(0, 5) == 0.0);

  CHECK_THROWS_AS(neighbor_smooth(RMat::Zero(1, 8), NeighborScheme{}), std::invalid_argument);
  CHECK((neighbor_smooth(spike, NeighborScheme{0, {}}) - spike).norm() == 0.0);

  Rng rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RMat rnd = RMat::NullaryExpr(5, 32, [&]() { return u(rng); });
  const RMat out = neighbor_smooth(rnd, NeighborScheme{});
  CHECK(out.minCoeff() >= rnd.minCoeff());
  CHECK(out.maxCoeff() <= rnd.maxCoeff());
}

TEST_CASE("neighbour scheme validation", "[ae]") {
  CHECK_NOTHROW(NeighborScheme{}.validate());
  CHECK_THROWS_AS((NeighborScheme{2, {1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NeighborScheme{2, {0.5, 0.8}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NeighborScheme{1, {1.5}}.validate()), std::invalid_argument);
  CHECK(NeighborScheme{}.clamped(8).radius == 3);
  CHECK(NeighborScheme{}.clamped(32).radius == 4);
  CHECK(NeighborScheme{}.clamped(2).radius == 0);
}

TEST_CASE("angular EM update", "[ae]") {
  AeHyper prev;
  prev.mu0 = Complex(0.2, 0.0);
  prev.tau0 = 4.0;
  AePosterior post;
  post.pi = RMat::Zero(4, 12);
  post.mu = CMat::Ones(4, 12);
  post.tau = RMat::Ones(4, 12);
  AeHyper h = ae_em_update(post, prev, NeighborScheme{}, ActivityRule::NeighborSmoothing);
  CHECK(h.rho.isZero());
  CHECK(h.tau0 == 4.0);
  CHECK(h.mu0 == prev.mu0);

  post.pi.setOnes();
  post.mu.setConstant(Complex(0.3, -0.4));
  post.tau.setConstant(0.7);
  h = ae_em_update(post, prev, NeighborScheme{}, ActivityRule::NeighborSmoothing);
  CHECK(std::abs(h.mu0 - Complex(0.3, -0.4)) < 1e-15);
  CHECK_THAT(h.tau0, WithinRel(0.7, 1e-14));

  Rng rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  post.pi = RMat::NullaryExpr(4, 12, [&]() { return u(rng); });
  post.mu = complex_normal_matrix(4, 12, 1.0, rng);
  post.tau = RMat::NullaryExpr(4, 12, [&]() { return u(rng); });
  h = ae_em_update(post, prev, NeighborScheme{}, ActivityRule::AntennaAverage);
  Complex num(0, 0);
  double den = 0;
  for (Index i = 0; i < post.pi.size(); ++i) num += post.pi(i) * post.mu(i), den += post.pi(i);
  const Complex mu0 = num / den;
  double tn = 0;
  for (Index i = 0; i < post.pi.size(); ++i) tn += post.pi(i) * (std::norm(mu0 - post.mu(i)) + post.tau(i));
  CHECK(std::abs(h.mu0 - mu0) < 1e-12);
  CHECK_THAT(h.tau0, WithinRel(tn / den, 1e-12));
  for (Index q = 0; q < 4; ++q)
    for (Index m = 0; m < 12; ++m) CHECK_THAT(h.rho(q, m), WithinAbs(post.pi.row(q).mean(), 1e-15));
}

namespace {

// Independent single-column Bernoulli-Gaussian AMP with EM and rho <- pi, written with plain loops.
CVec bg_amp_column(const CVec& y, const CMat& Phi, double sigma2, double rho0, double tau0, int iters, double kappa,
                   double eps) {
  const Index L = Phi.rows(), N = Phi.cols();
  std::vector<Complex> x(N, 0.0), r(N), Z(L), mu(N);
  std::vector<double> v(N, 1.0), V(L, 1.0), xi(N), rho(N, rho0), pi(N), tau(N);
  for (Index l = 0; l < L; ++l) Z[l] = y(l);
  Complex mu0(0.0, 0.0);
  for (int t = 0; t < iters; ++t) {
    const std::vector<Complex> Zp = Z, xp = x;
    const std::vector<double> Vp = V;
    for (Index l = 0; l < L; ++l) {
      double Vn = 0;
      Complex Zn(0, 0);
      for (Index q = 0; q < N; ++q) Vn += std::norm(Phi(l, q)) * v[q], Zn += Phi(l, q) * x[q];
      Zn -= Vn * (y(l) - Zp[l]) / (sigma2 + Vp[l]);
      V[l] = kappa * Vp[l] + (1 - kappa) * Vn;
      Z[l] = kappa * Zp[l] + (1 - kappa) * Zn;
    }
    for (Index q = 0; q < N; ++q) {
      double a = 0;
      Complex b(0, 0);
      for (Index l = 0; l < L; ++l) {
        a += std::norm(Phi(l, q)) / (sigma2 + V[l]);
        b += std::conj(Phi(l, q)) * (y(l) - Z[l]) / (sigma2 + V[l]);
      }
      xi[q] = 1 / a;
      r[q] = x[q] + xi[q] * b;
    }
    double mass = 0;
    Complex mnum(0, 0);
    for (Index q = 0; q < N; ++q) {
      const auto post = oracle::bg_scalar({r[q].real(), r[q].imag()}, xi[q], {mu0.real(), mu0.imag()}, tau0, rho[q]);
      pi[q] = static_cast<double>(post.pi);
      mu[q] = (mu0 * xi[q] + tau0 * r[q]) / (tau0 + xi[q]);
      tau[q] = tau0 * xi[q] / (tau0 + xi[q]);
      x[q] = pi[q] * mu[q];
      v[q] = std::max(0.0, pi[q] * (std::norm(mu[q]) + tau[q]) - std::norm(x[q]));
      mass += pi[q];
      mnum += pi[q] * mu[q];
    }
    if (mass >= 1e-12) {
      mu0 = mnum / mass;
      double tn = 0;
      for (Index q = 0; q < N; ++q) tn += pi[q] * (std::norm(mu0 - mu[q]) + tau[q]);
      tau0 = tn / mass;
    }
    rho = pi;
    double dn = 0, pn = 0;
    for (Index q = 0; q < N; ++q) dn += std::norm(x[q] - xp[q]), pn += std::norm(xp[q]);
    if (pn > 0 && std::sqrt(dn / pn) < eps) break;
  }
  return Eigen::Map<CVec>(x.data(), N);
}

}  // namespace

TEST_CASE("single antenna without smoothing is plain Bernoulli-Gaussian AMP", "[ae]") {
  Rng rng(44);
  const Codebook cb = generate_codebook(12, 2, 16, 9);
  CMat X = CMat::Zero(24, 1);
  X(3, 0) = Complex(1.2, -0.4);
  X(17, 0) = Complex(-0.5, 0.9);
  const double sigma2 = 0.01;
  const CMat R = cb.phi * X + complex_normal_matrix(16, 1, sigma2, rng);
  AeOptions opt;
  opt.scheme = NeighborScheme{0, {}};
  const AeResult res = run_ae_jabid(R, cb, sigma2, opt);

  const double rho0 = lambda_init(12, 2, 16);
  const double tau0 = std::max(1e-6, (R.norm() - 16 * sigma2) / (cb.phi.norm() * rho0));
  const CVec ref = bg_amp_column(R.col(0), cb.phi, sigma2, rho0, tau0, opt.amp.max_iterations, opt.amp.damping,
                                 opt.amp.tolerance);
  CHECK((res.estimate.col(0) - ref).norm() < 1e-8 * std::max(1.0, ref.norm()));
}

namespace {

struct AngularScenario {
  Codebook cb;
  GroundTruth gt;
  CMat R;
  double sigma2;
};

AngularScenario angular_scenario(int K, int Ka, int L, int M, double snr, std::uint64_t seed) {
  ChannelParams p;
  p.antennas = M;
  Rng rng(seed);
  AngularScenario s{generate_codebook(K, 2, L, seed + 7), {}, {}, 0};
  s.gt = draw_ground_truth(K, Ka, 2, 1, rng);
  const PathSet paths = draw_paths(K, p, rng);
  s.gt.X = assemble_X(s.gt, frame_channels(paths, p, FrameLayout{M, 1, 1, 0}, L), M);
  const ReceivedSignal rx = synthesize_received(s.cb, s.gt.X, snr, M, rng);
  s.R = to_angular(rx.Y, M);
  s.sigma2 = rx.noise_var;
  return s;
}

}  // namespace

TEST_CASE("AE detector at high SNR", "[ae]") {
  int errors = 0;
  for (int t = 0; t < 10; ++t) {
    const auto s = angular_scenario(50, 5, 40, 8, 30.0, 700 + t);
    AeOptions opt;
    opt.scheme = NeighborScheme{}.clamped(8);
    const AeResult r = run_ae_jabid(s.R, s.cb, s.sigma2, opt);
    errors += r.active != s.gt.active_list;
    for (int k : r.active)
      if (s.gt.active[k]) errors += r.selection_of(k, 0) != s.gt.selection_of(k, 0);
  }
  CHECK(errors <= 1);
}

TEST_CASE("AE detector on an empty observation and bad shapes", "[ae]") {
  const Codebook cb = generate_codebook(10, 2, 16, 2);
  AeOptions opt;
  opt.scheme = NeighborScheme{}.clamped(16);
  const AeResult r = run_ae_jabid(CMat::Zero(16, 16), cb, 0.01, opt);
  CHECK(r.active.empty());
  opt.statistic = DecisionStatistic::Prior;
  CHECK(run_ae_jabid(CMat::Zero(16, 16), cb, 0.01, opt).active.empty());
  CHECK_THROWS_AS(run_ae_jabid(CMat::Zero(15, 16), cb, 0.01, opt), std::invalid_argument);
  opt.scheme = NeighborScheme{};
  CHECK_THROWS_AS(run_ae_jabid(CMat::Zero(16, 8), cb, 0.01, opt), std::invalid_argument);
}

TEST_CASE("prior-based decisions read the smoothed indicators", "[ae]") {
  const auto s = angular_scenario(30, 3, 32, 16, 20.0, 900);
  AeOptions opt;
  opt.scheme = NeighborScheme{}.clamped(16);
  opt.statistic = DecisionStatistic::Prior;
  const AeResult r = run_ae_jabid(s.R, s.cb, s.sigma2, opt);
  for (int k = 0; k < 30; ++k) {
    const bool on = r.rho.middleRows(k * 2, 2).maxCoeff() > opt.activity_threshold;
    CHECK(on == std::binary_search(r.active.begin(), r.active.end(), k));
  }
}

TEST_CASE("antenna averaging benchmark", "[ae]") {
  Rng rng(45);
  const Codebook cb = generate_codebook(10, 2, 16, 4);
  CMat X = CMat::Zero(20, 1);
  X(6, 0) = Complex(0.8, 0.8);
  const CMat R = cb.phi * X + complex_normal_matrix(16, 1, 0.01, rng);
  AeOptions none;
  none.scheme = NeighborScheme{0, {}};
  const AeResult a = run_ae_jabid(R, cb, 0.01, none);
  const AeResult b = run_benchmark1(R, cb, 0.01, 1, none);
  CHECK((a.estimate - b.estimate).norm() < 1e-12);
  CHECK(a.active == b.active);
}

TEST_CASE("frame-level AE voting", "[ae]") {
  const auto s = angular_scenario(20, 2, 32, 8, 30.0, 950);
  CMat R2(s.R.rows(), 16);
  R2 << s.R, s.R;
  AeOptions opt;
  opt.scheme = NeighborScheme{}.clamped(8);
  const AeResult one = run_ae_jabid(s.R, s.cb, s.sigma2, opt);
  const AeResult two = run_ae_frame(R2, s.cb, s.sigma2, 8, opt);
  CHECK(two.active == one.active);
  CHECK(two.num_slabs == 2);
  for (int k : two.active) CHECK(two.selection_of(k, 1) == one.selection_of(k, 0));
  CHECK_THROWS_AS(run_ae_frame(R2, s.cb, s.sigma2, 5, opt), std::invalid_argument);
}
