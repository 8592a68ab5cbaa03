// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace symneg {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// The key is derived from the master seed alone; the stream id occupies the
/// high 64 bits of the 128-bit counter and the draw position the low 64 bits.
/// Two generators with the same (seed, stream) therefore produce identical
/// output no matter how many other streams ran in between, which is what
/// makes parallel sampling schedule-independent.
class PhiloxRng {
 public:
  PhiloxRng(std::uint64_t master_seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in (0, 1] (never exactly zero; safe under log()).
  double next_unit_open();

  /// Standard normal via Box-Muller; second value of each pair is cached.
  double next_gaussian();

  /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> next_complex_gaussian(double variance);

  /// Uniform in [0, 1).
  double next_unit();

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t position) const;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double gauss_cache_ = 0.0;
  bool has_gauss_cache_ = false;
  std::uint64_t stream_;
};

}  // namespace symneg
