#pragma once

#include <vector>

#include "ncim/types.hpp"

namespace ncim {

/// Common output of every detector.
struct Detection {
  CMat estimate;                // KI x (S*M), spatial or angular depending on the detector
  std::vector<int> active;      // sorted device indices
  std::vector<int> selection;   // [k * num_slabs + s]; -1 for devices outside `active`
  int num_slabs = 1;
  int iterations = 0;

  int selection_of(int device, int slab) const { return selection[static_cast<std::size_t>(device) * num_slabs + slab]; }
};

/// Per-slab EID by maximum row power of the estimate over the slab's M columns.
inline void select_by_row_power(Detection& det, int sequences_per_device, int slab_width) {
  const Index K = det.estimate.rows() / sequences_per_device;
  det.selection.assign(static_cast<std::size_t>(K) * det.num_slabs, -1);
  for (int k : det.active) {
    for (int s = 0; s < det.num_slabs; ++s) {
      Index best = 0;
      det.estimate.block(static_cast<Index>(k) * sequences_per_device, static_cast<Index>(s) * slab_width,
                         sequences_per_device, slab_width)
          .rowwise()
          .squaredNorm()
          .maxCoeff(&best);
      det.selection[static_cast<std::size_t>(k) * det.num_slabs + s] = static_cast<int>(best);
    }
  }
}

}  // namespace ncim
