// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// In-memory two-party channel with round and byte accounting. A round
// begins with the first send after any receive (or the first send
// overall), so a simultaneous exchange counts once.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace ppml::mpc {

using Bytes = std::vector<std::uint8_t>;

struct ChannelStats {
  std::uint64_t rounds = 0;
  std::array<std::uint64_t, 2> bytes_sent{};
};

struct TranscriptEntry {
  std::uint64_t round = 0;
  int from = 0;
  int to = 1;
  std::uint64_t bytes = 0;
};

class Channel {
 public:
  void send(int from, Bytes msg);
  Bytes recv(int to);

  const ChannelStats& stats() const { return stats_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  // "round,direction,bytes" lines.
  std::string dump_transcript() const;

 private:
  std::array<std::deque<Bytes>, 2> inbox_;
  ChannelStats stats_;
  std::vector<TranscriptEntry> transcript_;
  bool receiving_ = true;
};

// Little-endian packing helpers.
void put_u64(Bytes& out, std::uint64_t v);
std::uint64_t get_u64(const Bytes& in, size_t& pos);
void put_bits(Bytes& out, std::uint64_t v, int bits);  // ceil(bits/8) bytes
std::uint64_t get_bits(const Bytes& in, size_t& pos, int bits);

// Drives two lockstep party state machines for `rounds` exchanges.
template <class Party>
void run_lockstep(Party& p0, Party& p1, Channel& ch, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    ch.send(0, p0.outgoing(r));
    ch.send(1, p1.outgoing(r));
    p0.incoming(r, ch.recv(0));
    p1.incoming(r, ch.recv(1));
  }
}

}  // namespace ppml::mpc
