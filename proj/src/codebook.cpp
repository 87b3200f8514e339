#include "ncim/codebook.hpp"

#include <stdexcept>
#include <string>

namespace ncim {

bool is_power_of_two(int value) { return value > 0 && (value & (value - 1)) == 0; }

int log2_exact(int value) {
  if (!is_power_of_two(value)) throw std::invalid_argument("value is not a power of two: " + std::to_string(value));
  int r = 0;
  while ((1 << r) < value) ++r;
  return r;
}

int Codebook::bits_per_selection() const { return log2_exact(sequences_per_device); }

Index Codebook::column_of(int device, int selection) const {
  if (device < 0 || device >= num_devices) throw std::out_of_range("device index out of range");
  if (selection < 0 || selection >= sequences_per_device) throw std::out_of_range("selection index out of range");
  return static_cast<Index>(device) * sequences_per_device + selection;
}

CVec Codebook::sequence_of(int device, int selection) const { return phi.col(column_of(device, selection)); }

Codebook generate_codebook(int num_devices, int sequences_per_device, int length, std::uint64_t seed) {
  if (num_devices < 1) throw std::invalid_argument("codebook needs at least one device");
  if (length < 1) throw std::invalid_argument("sequence length must be positive");
  // I = 1 carries no bits and is rejected along with non-powers of two.
  if (sequences_per_device < 2 || !is_power_of_two(sequences_per_device))
    throw std::invalid_argument("sequences per device must be a power of two >= 2");

  Codebook cb;
  cb.num_devices = num_devices;
  cb.sequences_per_device = sequences_per_device;
  cb.length = length;
  const Index cols = static_cast<Index>(num_devices) * sequences_per_device;
  cb.phi.resize(length, cols);

  const double scale = 1.0 / std::sqrt(2.0 * length);
  Rng rng(seed);
  std::uint64_t word = 0;
  int bits_left = 0;
  auto next_sign = [&]() {
    if (bits_left == 0) {
      word = rng();
      bits_left = 64;
    }
    const double s = (word & 1ULL) ? 1.0 : -1.0;
    word >>= 1;
    --bits_left;
    return s;
  };
  for (Index c = 0; c < cols; ++c) {
    for (Index l = 0; l < length; ++l) {
      const double re = next_sign();
      const double im = next_sign();
      cb.phi(l, c) = Complex(re * scale, im * scale);
    }
  }
  return cb;
}

int bits_to_selection(std::span<const std::uint8_t> bits, int sequences_per_device) {
  const int r = log2_exact(sequences_per_device);
  if (static_cast<int>(bits.size()) != r)
    throw std::invalid_argument("bit vector length " + std::to_string(bits.size()) + " does not match log2(I) = " +
                                std::to_string(r));
  int sel = 0;
  for (auto b : bits) {
    if (b > 1) throw std::invalid_argument("bits must be 0 or 1");
    sel = (sel << 1) | b;
  }
  return sel;
}

std::vector<std::uint8_t> selection_to_bits(int selection, int sequences_per_device) {
  const int r = log2_exact(sequences_per_device);
  if (selection < 0 || selection >= sequences_per_device) throw std::out_of_range("selection index out of range");
  std::vector<std::uint8_t> bits(r);
  for (int b = 0; b < r; ++b) bits[b] = static_cast<std::uint8_t>((selection >> (r - 1 - b)) & 1);
  return bits;
}

}  // namespace ncim
