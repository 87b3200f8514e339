#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ncim {

template <typename Real>
using CMatT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RMatT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVecT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMat = CMatT<double>;
using RMat = RMatT<double>;
using CVec = CVecT<double>;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

// splitmix64 finalizer; used to derive independent per-trial streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = variance.
inline Complex complex_normal(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

inline CMat complex_normal_matrix(Index rows, Index cols, double variance, Rng& rng) {
  CMat out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = complex_normal(rng, variance);
  return out;
}

}  // namespace ncim
