// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-party semi-honest protocols with a trusted dealer. Every protocol is
// vectorised: one invocation handles n elements in the same number of
// rounds as a single element.
//
// Communication per party per element, k = 64:
//   beaver_mul   1 round,  16 bytes
//   a2b_compare  8 rounds, 48 bytes  (dealer material 80 bytes)
//   fss_relu     1 round,   8 bytes  (key 2048 + 24 bytes)
// Dealer material per party per element: triple 24 bytes, comparison 80.

#pragma once

#include <array>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ppml/mpc/channel.hpp"
#include "ppml/mpc/fss.hpp"
#include "ppml/mpc/ring.hpp"

namespace ppml::mpc {

struct Share {
  Ring value = 0;
  int party = 0;
};

std::pair<Share, Share> share(Ring x, Rng& rng);
Ring reconstruct(const Share& a, const Share& b);

// Element-wise shares held by both parties.
struct SharedVec {
  std::array<std::vector<Ring>, 2> part;
  std::size_t size() const { return part[0].size(); }
};

SharedVec share_vec(const std::vector<Ring>& xs, Rng& rng);
std::vector<Ring> reconstruct(const SharedVec& v);

// Single-use correlated randomness carries an id; a Session refuses to
// consume the same id twice.
struct BeaverTriple {
  std::uint64_t id = 0;
  SharedVec a, b, c;
};

// Per-party material for the comparison ladder, one entry per element.
struct CompareMaterial {
  std::uint64_t id = 0;
  struct Party {
    std::vector<std::uint64_t> and_mask, and_share;  // one-sided AND
    // Bit triples per tree level: [level][element] packed in a word.
    std::array<std::vector<std::uint64_t>, 6> ta, tb, tc;
    std::vector<Ring> mul_mask, mul_share;            // one-sided product
  };
  std::array<Party, 2> party;
  std::size_t size() const { return party[0].and_mask.size(); }
};

struct ReluKey {
  DcfKey dcf;     // 63-bit domain, payload (1 - 2s, r(1 - 2s))
  Ring r = 0;     // share of the input mask
  Ring s = 0;     // share of the mask's top bit
  Ring rs = 0;    // share of r * s
};

struct ReluKeys {
  std::uint64_t id = 0;
  std::array<std::vector<ReluKey>, 2> party;
  std::size_t size() const { return party[0].size(); }
};

// Trusted third party producing correlated randomness from its own seed.
class Dealer {
 public:
  explicit Dealer(std::uint64_t seed) : rng_(seed) {}
  BeaverTriple beaver_triple(std::size_t n);
  CompareMaterial compare_material(std::size_t n);
  ReluKeys relu_keys(std::size_t n);

 private:
  Rng rng_;
  std::uint64_t next_id_ = 1;
};

class Session {
 public:
  Channel& channel() { return channel_; }
  const ChannelStats& stats() const { return channel_.stats(); }
  // Throws MaterialError when `id` was consumed before.
  void consume(std::uint64_t id);

 private:
  Channel channel_;
  std::unordered_set<std::uint64_t> consumed_;
};

// Shares of x * y; one exchange of (x - a, y - b).
SharedVec beaver_mul(Session& s, const SharedVec& x, const SharedVec& y,
                     const BeaverTriple& t);

// Shares of [x < 0] (as 0/1 ring elements): carry-lookahead over the
// binary decomposition of the two arithmetic shares, then a bit-to-ring
// conversion. 8 rounds.
SharedVec a2b_compare(Session& s, const SharedVec& x, const CompareMaterial& m);

// Shares of max(x, 0); one reveal of x + r, then local DCF evaluation.
SharedVec fss_relu(Session& s, const SharedVec& x, const ReluKeys& keys);

}  // namespace ppml::mpc
