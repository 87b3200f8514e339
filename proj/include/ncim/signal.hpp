#pragma once

#include <cstdint>
#include <vector>

#include "ncim/channel.hpp"
#include "ncim/codebook.hpp"

namespace ncim {

/// Frame layout: Ñ contiguous subcarriers times J sub-frames, M antennas each.
/// Slab s = n*J + j occupies columns [s*M, (s+1)*M) of X and Y.
struct FrameLayout {
  int antennas = 2;
  int num_subcarriers_used = 1;  // Ñ
  int num_subframes = 1;         // J
  int first_subcarrier = 0;

  int num_slabs() const { return num_subcarriers_used * num_subframes; }
  int num_columns() const { return num_slabs() * antennas; }
  int slab(int n, int j) const { return n * num_subframes + j; }
};

struct GroundTruth {
  int num_devices = 0;
  int sequences_per_device = 0;
  int num_slabs = 0;
  std::vector<std::uint8_t> active;  // a_k
  std::vector<int> active_list;      // sorted
  std::vector<int> selection;        // [k * num_slabs + s], -1 when inactive
  CMat X;                            // KI x (S*M)

  int selection_of(int device, int slab) const { return selection[static_cast<std::size_t>(device) * num_slabs + slab]; }
  std::vector<std::uint8_t> bits_of(int device, int slab) const;
};

/// Per-device channel rows: channels[k].row(s) is h_k for slab s (length M).
using FrameChannels = std::vector<CMat>;

GroundTruth draw_ground_truth(int num_devices, int num_active, int sequences_per_device, int num_slabs, Rng& rng);

/// Channels of every device on the frame's subcarriers; sub-frame j is frozen at t = j*L*(N+N_cp)*T_s.
FrameChannels frame_channels(const PathSet& paths, const ChannelParams& params, const FrameLayout& layout,
                             int sequence_length);

/// X_{k,n}^j = a_k e_{k,n}^j (h_{k,n}^j)^T stacked into KI x (S*M).
CMat assemble_X(const GroundTruth& gt, const FrameChannels& channels, int antennas);

/// Noise variance giving `snr_db` per device and receive sample when sequence entries have power 1/L and
/// channel entries unit power. +inf gives 0.
double noise_variance(double snr_db, int sequence_length);

struct ReceivedSignal {
  CMat Y;
  double noise_var = 0.0;
  int slab_width = 0;  // M
  bool angular = false;
  double beta = 1.0;   // measured ICI attenuation (TFST only)
};

/// Y = Phi X + N with N i.i.d. CN(0, noise_variance(snr_db, L)).
ReceivedSignal synthesize_received(const Codebook& cb, const CMat& X, double snr_db, int slab_width, Rng& rng);

/// Applies the angular transform to every M-wide slab.
ReceivedSignal to_angular(const ReceivedSignal& rx);
/// Same slab-wise transform applied to an equivalent channel matrix.
CMat to_angular(const CMat& X, int slab_width);

std::vector<CVec> tfst_map(const CVec& seq, int segments);
CVec tfst_concat(const std::vector<CVec>& segments);

struct TfstLayout {
  int segments = 1;  // L_F
  int first_subcarrier = 0;
};

/// Reference equivalent channel for a TFST frame: each active device's row uses the channel of symbol 0 on
/// the first block subcarrier.
CMat tfst_reference_X(const GroundTruth& gt, const PathSet& paths, const ChannelParams& params, const TfstLayout& tfst);

/// Noise-free TFST observation (L x M) including the exact ICI among the L_F occupied subcarriers.
/// Row l_f*L_T + l_t is the FFT output of symbol l_t on block subcarrier l_f. `beta` receives the mean
/// |D_p(0)| over active paths when non-null.
CMat tfst_noiseless(const Codebook& cb, const GroundTruth& gt, const PathSet& paths, const ChannelParams& params,
                    const TfstLayout& tfst, double* beta = nullptr);

ReceivedSignal synthesize_tfst_received(const Codebook& cb, const GroundTruth& gt, const PathSet& paths,
                                        const ChannelParams& params, const TfstLayout& tfst, double snr_db, Rng& rng);

}  // namespace ncim
