// SPDX-License-Identifier: Apache-2.0
#include "symneg/rng.hpp"

#include <cmath>
#include <numbers>

namespace symneg {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t* lo, std::uint32_t* hi) {
  std::uint64_t p = std::uint64_t(a) * b;
  *lo = std::uint32_t(p);
  *hi = std::uint32_t(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hilo(kPhiloxM4x32A, ctr[0], &lo0, &hi0);
  mul_hilo(kPhiloxM4x32B, ctr[2], &lo1, &hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kPhiloxW32A;
  key[1] += kPhiloxW32B;
}

// splitmix64, used only to whiten the user-facing seed into a key
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97f4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

PhiloxRng::PhiloxRng(std::uint64_t master_seed, std::uint64_t stream) : stream_(stream) {
  std::uint64_t k = mix64(master_seed);
  key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
}

std::array<std::uint32_t, 4> PhiloxRng::block(std::uint64_t position) const {
  std::array<std::uint32_t, 4> ctr = {std::uint32_t(position), std::uint32_t(position >> 32),
                                      std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  std::array<std::uint32_t, 2> key = key_;
  for (int i = 0; i < 10; ++i) philox_round(ctr, key);
  return ctr;
}

std::uint32_t PhiloxRng::next_u32() {
  if (buffered_ == 0) {
    buffer_ = block(position_++);
    buffered_ = 4;
  }
  return buffer_[4 - buffered_--];
}

std::uint64_t PhiloxRng::next_u64() {
  std::uint64_t lo = next_u32();
  std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double PhiloxRng::next_unit() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::next_unit_open() {
  return 1.0 - next_unit();
}

double PhiloxRng::next_gaussian() {
  if (has_gauss_cache_) {
    has_gauss_cache_ = false;
    return gauss_cache_;
  }
  double u1 = next_unit_open();
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  gauss_cache_ = r * std::sin(theta);
  has_gauss_cache_ = true;
  return r * std::cos(theta);
}

std::complex<double> PhiloxRng::next_complex_gaussian(double variance) {
  double s = std::sqrt(variance / 2.0);
  double re = next_gaussian();
  double im = next_gaussian();
  return {s * re, s * im};
}

}  // namespace symneg
