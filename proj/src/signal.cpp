#include "ncim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ncim {

std::vector<std::uint8_t> GroundTruth::bits_of(int device, int slab) const {
  const int sel = selection_of(device, slab);
  if (sel < 0) throw std::out_of_range("device is inactive");
  return selection_to_bits(sel, sequences_per_device);
}

GroundTruth draw_ground_truth(int num_devices, int num_active, int sequences_per_device, int num_slabs, Rng& rng) {
  if (num_devices < 1) throw std::invalid_argument("K must be positive");
  if (num_active < 0 || num_active > num_devices) throw std::invalid_argument("Ka must lie in [0, K]");
  if (num_slabs < 1) throw std::invalid_argument("need at least one slab");
  log2_exact(sequences_per_device);

  GroundTruth gt;
  gt.num_devices = num_devices;
  gt.sequences_per_device = sequences_per_device;
  gt.num_slabs = num_slabs;
  gt.active.assign(num_devices, 0);
  gt.selection.assign(static_cast<std::size_t>(num_devices) * num_slabs, -1);

  // Partial Fisher-Yates: the first Ka entries form a uniform subset.
  std::vector<int> idx(num_devices);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < num_active; ++i) {
    std::uniform_int_distribution<int> pick(i, num_devices - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  gt.active_list.assign(idx.begin(), idx.begin() + num_active);
  std::sort(gt.active_list.begin(), gt.active_list.end());

  std::uniform_int_distribution<int> sel(0, sequences_per_device - 1);
  for (int k : gt.active_list) {
    gt.active[k] = 1;
    for (int s = 0; s < num_slabs; ++s) gt.selection[static_cast<std::size_t>(k) * num_slabs + s] = sel(rng);
  }
  return gt;
}

FrameChannels frame_channels(const PathSet& paths, const ChannelParams& params, const FrameLayout& layout,
                             int sequence_length) {
  if (layout.antennas != params.antennas) throw std::invalid_argument("layout and channel disagree on M");
  if (layout.first_subcarrier < 0 || layout.first_subcarrier + layout.num_subcarriers_used > params.num_subcarriers)
    throw std::invalid_argument("frame subcarriers exceed N");
  FrameChannels out(paths.size());
  const double subframe_s = static_cast<double>(sequence_length) * params.symbol_duration();
  for (std::size_t k = 0; k < paths.size(); ++k) {
    out[k].resize(layout.num_slabs(), layout.antennas);
    for (int n = 0; n < layout.num_subcarriers_used; ++n)
      for (int j = 0; j < layout.num_subframes; ++j)
        out[k].row(layout.slab(n, j)) =
            freq_channel(paths[k], layout.first_subcarrier + n, j * subframe_s, params).transpose();
  }
  return out;
}

CMat assemble_X(const GroundTruth& gt, const FrameChannels& channels, int antennas) {
  const int I = gt.sequences_per_device;
  CMat X = CMat::Zero(static_cast<Index>(gt.num_devices) * I, static_cast<Index>(gt.num_slabs) * antennas);
  for (int k : gt.active_list) {
    if (channels[k].rows() != gt.num_slabs || channels[k].cols() != antennas)
      throw std::invalid_argument("channel tensor shape mismatch");
    for (int s = 0; s < gt.num_slabs; ++s)
      X.block(static_cast<Index>(k) * I + gt.selection_of(k, s), static_cast<Index>(s) * antennas, 1, antennas) =
          channels[k].row(s);
  }
  return X;
}

double noise_variance(double snr_db, int sequence_length) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0) / sequence_length;
}

ReceivedSignal synthesize_received(const Codebook& cb, const CMat& X, double snr_db, int slab_width, Rng& rng) {
  if (X.rows() != cb.phi.cols()) throw std::invalid_argument("X rows must equal K*I");
  if (slab_width < 1 || X.cols() % slab_width != 0) throw std::invalid_argument("X columns not a multiple of M");
  ReceivedSignal rx;
  rx.noise_var = noise_variance(snr_db, cb.length);
  rx.slab_width = slab_width;
  rx.Y = cb.phi * X;
  if (rx.noise_var > 0) rx.Y += complex_normal_matrix(rx.Y.rows(), rx.Y.cols(), rx.noise_var, rng);
  return rx;
}

CMat to_angular(const CMat& X, int slab_width) {
  if (slab_width < 1 || X.cols() % slab_width != 0) throw std::invalid_argument("column count not a multiple of M");
  const CMat basis = angular_basis(slab_width).conjugate();
  CMat out(X.rows(), X.cols());
  for (Index c = 0; c < X.cols(); c += slab_width) out.middleCols(c, slab_width).noalias() = X.middleCols(c, slab_width) * basis;
  return out;
}

ReceivedSignal to_angular(const ReceivedSignal& rx) {
  if (rx.angular) throw std::invalid_argument("signal already in the angular domain");
  ReceivedSignal out = rx;
  out.Y = to_angular(rx.Y, rx.slab_width);
  out.angular = true;
  return out;
}

std::vector<CVec> tfst_map(const CVec& seq, int segments) {
  if (segments < 1 || seq.size() % segments != 0) throw std::invalid_argument("sequence length not divisible by L_F");
  const Index len = seq.size() / segments;
  std::vector<CVec> out(segments);
  for (int f = 0; f < segments; ++f) out[f] = seq.segment(f * len, len);
  return out;
}

CVec tfst_concat(const std::vector<CVec>& segments) {
  Index total = 0;
  for (const auto& s : segments) total += s.size();
  CVec out(total);
  Index pos = 0;
  for (const auto& s : segments) {
    out.segment(pos, s.size()) = s;
    pos += s.size();
  }
  return out;
}

CMat tfst_reference_X(const GroundTruth& gt, const PathSet& paths, const ChannelParams& params, const TfstLayout& tfst) {
  const int I = gt.sequences_per_device;
  const int M = params.antennas;
  CMat X = CMat::Zero(static_cast<Index>(gt.num_devices) * I, M);
  for (int k : gt.active_list)
    X.row(static_cast<Index>(k) * I + gt.selection_of(k, 0)) =
        doubly_selective_channel(paths[k], 0, 0, params, tfst.first_subcarrier).transpose();
  return X;
}

namespace {

// (1/N) sum_{n<N} exp(j 2 pi x n)
Complex dirichlet(double x, int N) {
  const double s = std::sin(kPi * x);
  if (std::abs(s) < 1e-14) return {1.0, 0.0};
  return std::polar(std::sin(kPi * x * N) / (N * s), kPi * x * (N - 1));
}

}  // namespace

CMat tfst_noiseless(const Codebook& cb, const GroundTruth& gt, const PathSet& paths, const ChannelParams& params,
                    const TfstLayout& tfst, double* beta) {
  const int L = cb.length;
  const int LF = tfst.segments;
  if (LF < 1 || L % LF != 0) throw std::invalid_argument("sequence length not divisible by L_F");
  if (gt.num_slabs != 1) throw std::invalid_argument("TFST frames carry a single slab");
  if (tfst.first_subcarrier < 0 || tfst.first_subcarrier + LF > params.num_subcarriers)
    throw std::invalid_argument("TFST block exceeds N");
  const int LT = L / LF;
  const int M = params.antennas;
  const int N = params.num_subcarriers;
  const double Ts = params.sample_period();

  CMat Y = CMat::Zero(L, M);
  double beta_sum = 0.0;
  std::size_t beta_count = 0;
  std::vector<Complex> delay_phase(LF);
  std::vector<Complex> leak(2 * LF - 1);  // G(nu*Ts + d/N) for d = -(LF-1)..LF-1
  std::vector<Complex> coef(static_cast<std::size_t>(L));

  for (int k : gt.active_list) {
    const CVec s = cb.sequence_of(k, gt.selection_of(k, 0));
    const auto& dev = paths[k];
    if (dev.paths.empty()) continue;
    const double gain_scale = std::sqrt(static_cast<double>(M) / dev.paths.size());
    for (const auto& p : dev.paths) {
      for (int f = 0; f < LF; ++f)
        delay_phase[f] = std::polar(1.0, -2.0 * kPi * p.delay_s * params.subcarrier_frequency(tfst.first_subcarrier + f));
      for (int d = -(LF - 1); d <= LF - 1; ++d)
        leak[d + LF - 1] = dirichlet(p.doppler_hz * Ts + static_cast<double>(d) / N, N);
      beta_sum += std::abs(leak[LF - 1]);
      ++beta_count;

      for (int t = 0; t < LT; ++t) {
        const Complex doppler = std::polar(1.0, 2.0 * kPi * p.doppler_hz * ofdm_sample_time(t, 0, params));
        for (int fo = 0; fo < LF; ++fo) {
          Complex acc(0.0, 0.0);
          for (int fi = 0; fi < LF; ++fi) acc += s(fi * LT + t) * delay_phase[fi] * leak[fi - fo + LF - 1];
          coef[fo * LT + t] = doppler * acc;
        }
      }
      const CVec a = steering_vector(p.aoa_rad, M) * (p.gain * gain_scale);
      for (int row = 0; row < L; ++row) Y.row(row) += coef[row] * a.transpose();
    }
  }
  if (beta) *beta = beta_count ? beta_sum / beta_count : 1.0;
  return Y;
}

ReceivedSignal synthesize_tfst_received(const Codebook& cb, const GroundTruth& gt, const PathSet& paths,
                                        const ChannelParams& params, const TfstLayout& tfst, double snr_db, Rng& rng) {
  ReceivedSignal rx;
  rx.slab_width = params.antennas;
  rx.noise_var = noise_variance(snr_db, cb.length);
  rx.Y = tfst_noiseless(cb, gt, paths, params, tfst, &rx.beta);
  if (rx.noise_var > 0) rx.Y += complex_normal_matrix(rx.Y.rows(), rx.Y.cols(), rx.noise_var, rng);
  return rx;
}

}  // namespace ncim
