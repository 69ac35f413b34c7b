// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>

namespace ppml::mpc {

struct Block {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  Block operator^(const Block& o) const { return {lo ^ o.lo, hi ^ o.hi}; }
  Block& operator^=(const Block& o) { lo ^= o.lo; hi ^= o.hi; return *this; }
  friend bool operator==(const Block&, const Block&) = default;
};

// Fixed-key AES-128 in Matyas-Meyer-Oseas mode:
//   out[i] = AES_K(seed ^ (tweak + i)) ^ (seed ^ (tweak + i)).
// The tweak is added to the low word. Not thread-safe; use one per thread.
class Prg {
 public:
  Prg();
  ~Prg();
  Prg(const Prg&) = delete;
  Prg& operator=(const Prg&) = delete;

  void expand(const Block& seed, std::uint64_t tweak, Block* out, int count);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ppml::mpc
