#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncim/types.hpp"

namespace ncim {

/// Non-orthogonal Bernoulli signature codebooks for all devices.
///
/// Column k*I + i of `phi` holds sequence i of device k (both 0-based). Every
/// entry is one of (+-1 +-j)/sqrt(2L), so every column has unit norm.
struct Codebook {
  int num_devices = 0;
  int sequences_per_device = 0;
  int length = 0;
  CMat phi;

  int bits_per_selection() const;
  Index column_of(int device, int selection) const;
  /// Throws std::out_of_range on a bad device or selection index.
  CVec sequence_of(int device, int selection) const;
  /// L x I block of device k.
  auto device_block(int device) const {
    return phi.middleCols(static_cast<Index>(device) * sequences_per_device, sequences_per_device);
  }
};

Codebook generate_codebook(int num_devices, int sequences_per_device, int length, std::uint64_t seed);

bool is_power_of_two(int value);
int log2_exact(int value);

// Big-endian (MSB first) mapping between r-bit payloads and 0-based selection indices.
int bits_to_selection(std::span<const std::uint8_t> bits, int sequences_per_device);
std::vector<std::uint8_t> selection_to_bits(int selection, int sequences_per_device);

}  // namespace ncim
