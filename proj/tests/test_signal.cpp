#include <catch_amalgamated.hpp>

#include <algorithm>

#include "ncim/signal.hpp"
#include "oracles.hpp"

using namespace ncim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ground truth activity", "[signal]") {
  Rng rng(1);
  const GroundTruth all = draw_ground_truth(10, 10, 2, 1, rng);
  CHECK(std::all_of(all.active.begin(), all.active.end(), [](auto a) { return a == 1; }));
  CHECK_THROWS_AS(draw_ground_truth(10, 11, 2, 1, rng), std::invalid_argument);

  std::vector<int> hits(100, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const GroundTruth gt = draw_ground_truth(100, 10, 2, 1, rng);
    REQUIRE(gt.active_list.size() == 10);
    REQUIRE(std::is_sorted(gt.active_list.begin(), gt.active_list.end()));
    for (int k : gt.active_list) ++hits[k];
  }
  const double sd = std::sqrt(0.1 * 0.9 / draws);
  for (int k = 0; k < 100; ++k) CHECK(std::abs(hits[k] / double(draws) - 0.1) < 4 * sd);

  const GroundTruth four = draw_ground_truth(3, 1, 2, 4, rng);
  const int k = four.active_list[0];
  for (int s = 0; s < 4; ++s) {
    CHECK(four.selection_of(k, s) >= 0);
    CHECK(four.selection_of(k, s) < 2);
  }
  for (int j = 0; j < 3; ++j)
    if (j != k) CHECK(four.selection_of(j, 0) == -1);
}

TEST_CASE("equivalent channel matrix structure", "[signal]") {
  ChannelParams p;
  p.antennas = 2;
  Rng rng(3);
  const PathSet paths = draw_paths(6, p, rng);
  const FrameLayout one{2, 1, 1, 0};

  GroundTruth none = draw_ground_truth(6, 0, 2, 1, rng);
  CHECK(assemble_X(none, frame_channels(paths, p, one, 16), 2).norm() == 0.0);

  GroundTruth single = draw_ground_truth(6, 1, 2, 1, rng);
  const FrameChannels ch = frame_channels(paths, p, one, 16);
  const CMat X = assemble_X(single, ch, 2);
  const int k = single.active_list[0];
  int nonzero = 0;
  for (Index r = 0; r < X.rows(); ++r) nonzero += X.row(r).norm() > 0;
  CHECK(nonzero == 1);
  CHECK((X.row(k * 2 + single.selection_of(k, 0)) - ch[k].row(0)).norm() == 0.0);

  const FrameLayout wide{2, 2, 2, 0};
  GroundTruth three = draw_ground_truth(6, 3, 2, wide.num_slabs(), rng);
  const CMat X3 = assemble_X(three, frame_channels(paths, p, wide, 16), 2);
  REQUIRE(X3.cols() == 8);
  for (int s = 0; s < 4; ++s) {
    int rows = 0;
    for (Index r = 0; r < X3.rows(); ++r) rows += X3.block(r, s * 2, 1, 2).norm() > 0;
    CHECK(rows == 3);
  }
}

TEST_CASE("received signal noise and SNR", "[signal]") {
  Rng rng(4);
  const Codebook cb = generate_codebook(8, 2, 40, 2);
  const double nv = noise_variance(10.0, 40);
  CHECK_THAT(nv, WithinRel(0.1 / 40.0, 1e-12));

  const ReceivedSignal pure = synthesize_received(cb, CMat::Zero(16, 200), 10.0, 2, rng);
  CHECK_THAT(pure.Y.cwiseAbs2().mean(), WithinRel(nv, 0.03));

  CMat X = CMat::Zero(16, 2);
  X.row(5) << Complex(0.3, 1.0), Complex(-0.7, 0.2);
  const ReceivedSignal clean = synthesize_received(cb, X, std::numeric_limits<double>::infinity(), 2, rng);
  CHECK(clean.noise_var == 0.0);
  CHECK((clean.Y - cb.phi.col(5) * X.row(5)).norm() < 1e-14);
  Eigen::JacobiSVD<CMat> svd(clean.Y);
  CHECK(svd.singularValues()(1) < 1e-12);

  // 0 dB: per-sample signal power equals noise power.
  double sig = 0, noise = 0;
  for (int t = 0; t < 400; ++t) {
    CMat Xr = CMat::Zero(16, 4);
    Xr.row(3) = complex_normal_matrix(1, 4, 1.0, rng);
    const ReceivedSignal rx = synthesize_received(cb, Xr, 0.0, 4, rng);
    const CMat S = cb.phi * Xr;
    sig += S.cwiseAbs2().sum();
    noise += (rx.Y - S).cwiseAbs2().sum();
  }
  CHECK_THAT(sig / noise, WithinAbs(1.0, 0.05));
}

TEST_CASE("angular conversion of received slabs", "[signal]") {
  Rng rng(6);
  ReceivedSignal rx;
  rx.Y = complex_normal_matrix(10, 8, 1.0, rng);
  rx.slab_width = 4;
  const ReceivedSignal ang = to_angular(rx);
  CHECK(ang.angular);
  CHECK_THAT(ang.Y.norm(), WithinRel(rx.Y.norm(), 1e-10));
  CHECK((ang.Y.middleCols(4, 4) - angular_transform(rx.Y.middleCols(4, 4))).norm() < 1e-12);
  CHECK(to_angular(CMat::Zero(3, 8), 4).norm() == 0.0);
  CHECK_THROWS_AS(to_angular(rx.Y, 3), std::invalid_argument);
}

TEST_CASE("TFST segment mapping", "[signal]") {
  CVec s(32);
  for (int l = 0; l < 32; ++l) s(l) = Complex(l, 0);
  const auto one = tfst_map(s, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == s);
  const auto four = tfst_map(s, 4);
  REQUIRE(four.size() == 4);
  CHECK(four[1](0) == Complex(8, 0));
  CHECK(four[1](7) == Complex(15, 0));
  CHECK(tfst_concat(four) == s);
  CHECK_THROWS_AS(tfst_map(s, 5), std::invalid_argument);
}

TEST_CASE("TFST closed form equals a time-domain OFDM simulation", "[signal]") {
  ChannelParams p;
  p.antennas = 3;
  p.num_subcarriers = 64;
  p.cp_length = 8;
  p.max_doppler_hz = 4000.0;
  Rng rng(12);
  const int K = 3, L = 12, LF = 4;
  const Codebook cb = generate_codebook(K, 2, L, 8);
  const PathSet paths = draw_paths(K, p, rng);
  GroundTruth gt = draw_ground_truth(K, 2, 2, 1, rng);
  const TfstLayout tl{LF, 5};
  const CMat Y = tfst_noiseless(cb, gt, paths, p, tl);

  const int LT = L / LF;
  CMat expect = CMat::Zero(L, 3);
  for (int k : gt.active_list) {
    const CVec s = cb.sequence_of(k, gt.selection_of(k, 0));
    for (int t = 0; t < LT; ++t) {
      std::vector<Complex> tx(LF);
      for (int f = 0; f < LF; ++f) tx[f] = s(f * LT + t);
      const auto rx = oracle::ofdm_time_domain(paths[k], p, t, tl.first_subcarrier, tx);
      for (int f = 0; f < LF; ++f) expect.row(f * LT + t) += rx[f].transpose();
    }
  }
  CHECK((Y - expect).norm() < 1e-9 * expect.norm());
}

TEST_CASE("TFST degenerate cases reduce to the static model", "[signal]") {
  ChannelParams p;
  p.antennas = 4;
  Rng rng(13);
  const Codebook cb = generate_codebook(6, 2, 32, 3);
  const PathSet paths = draw_paths(6, p, rng);
  GroundTruth gt = draw_ground_truth(6, 3, 2, 1, rng);
  const TfstLayout one{1, 0};
  gt.X = tfst_reference_X(gt, paths, p, one);
  double beta = 0;
  CHECK((tfst_noiseless(cb, gt, paths, p, one, &beta) - cb.phi * gt.X).norm() < 1e-9);
  CHECK_THAT(beta, WithinAbs(1.0, 1e-12));

  PathSet flat = paths;
  for (auto& d : flat)
    for (auto& path : d.paths) path.delay_s = 0.0;
  const TfstLayout four{4, 0};
  gt.X = tfst_reference_X(gt, flat, p, four);
  CHECK((tfst_noiseless(cb, gt, flat, p, four) - cb.phi * gt.X).norm() < 1e-9);
  CHECK_THROWS_AS(tfst_noiseless(cb, gt, paths, p, TfstLayout{5, 0}), std::invalid_argument);
}

TEST_CASE("Doppler ICI attenuates the desired signal", "[signal]") {
  const Codebook cb = generate_codebook(1, 2, 32, 3);
  double prev = 1.0;
  for (double nu : {2000.0, 6000.0, 12000.0}) {
    ChannelParams p;
    p.antennas = 2;
    p.max_doppler_hz = nu;
    Rng rng(21);
    double sum = 0;
    for (int t = 0; t < 50; ++t) {
      const PathSet paths = draw_paths(1, p, rng);
      GroundTruth gt = draw_ground_truth(1, 1, 2, 1, rng);
      double beta = 0;
      tfst_noiseless(cb, gt, paths, p, TfstLayout{4, 0}, &beta);
      sum += beta;
    }
    const double mean = sum / 50;
    CHECK(mean < 1.0);
    CHECK(mean < prev);
    prev = mean;
  }
}
