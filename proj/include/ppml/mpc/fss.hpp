// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// GGM-tree distributed point and comparison functions over Z_{2^64}.
// Key sizes (bytes), with lambda = 128 and k = 64:
//   DPF:  lambda/8 * (n + 1) + k/8
//   DCF:  (n + 1) * (lambda + p*k) / 8   for a p-word payload
// A comparison over a k-bit ring uses n = k - 1, so one 2-word DCF key is
// k * (lambda + 2k) / 8 bytes.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ppml/mpc/prg.hpp"
#include "ppml/mpc/ring.hpp"

namespace ppml::mpc {

inline constexpr int kLambdaBits = 128;
inline constexpr int kMaxDeskDomainBits = 20;
inline constexpr int kMaxPayloadWords = 2;

struct DpfKey {
  int party = 0;
  int domain_bits = 0;
  Block root;
  // Seed correction per level; bit 0 carries the left control-bit
  // correction and bit 1 the right one.
  std::vector<Block> cw;
  Ring final_cw = 0;
};

struct DcfKey {
  int party = 0;
  int domain_bits = 0;
  int payload_words = 1;
  Block root;
  std::vector<Block> cw;          // as in DpfKey
  std::vector<Ring> value_cw;     // domain_bits * payload_words
  std::vector<Ring> final_cw;     // payload_words
};

std::size_t dpf_key_bytes(int domain_bits);
std::size_t dcf_key_bytes(int domain_bits, int payload_words);

// 1 <= n <= 20. Deterministic in `seed`. Throws ConfigError.
std::pair<DpfKey, DpfKey> dpf_keygen(std::uint64_t alpha, Ring beta, int n,
                                     std::uint64_t seed);
Ring dpf_eval(const DpfKey& key, std::uint64_t x, Prg& prg);
Ring dpf_eval(const DpfKey& key, std::uint64_t x);
std::vector<Ring> dpf_eval_all(const DpfKey& key);

// Shares of beta * [x < alpha]; 1 <= n <= 20.
std::pair<DcfKey, DcfKey> dcf_keygen(std::uint64_t alpha, Ring beta, int n,
                                     std::uint64_t seed);
Ring dcf_eval(const DcfKey& key, std::uint64_t x);
std::vector<Ring> dcf_eval_all(const DcfKey& key);

// General form used by the gates: 1 <= n <= 64, payload of 1..2 words,
// caller-supplied root seeds.
std::pair<DcfKey, DcfKey> dcf_keygen_raw(std::uint64_t alpha, std::span<const Ring> beta,
                                         int n, Block root0, Block root1, Prg& prg);
void dcf_eval_raw(const DcfKey& key, std::uint64_t x, Prg& prg, Ring* out);

}  // namespace ppml::mpc
