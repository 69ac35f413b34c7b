// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ppml::mpc {

// Elements of Z_{2^64}; unsigned wraparound is the ring arithmetic.
using Ring = std::uint64_t;

inline constexpr int kFixedFracBits = 16;

inline Ring encode_fixed(double v) {
  return static_cast<Ring>(static_cast<std::int64_t>(v * (1 << kFixedFracBits)));
}
inline double decode_fixed(Ring r) {
  return static_cast<double>(static_cast<std::int64_t>(r)) / (1 << kFixedFracBits);
}
inline bool is_negative(Ring r) { return (r >> 63) != 0; }

// Deterministic generator for shares, masks and test inputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ppml::mpc
