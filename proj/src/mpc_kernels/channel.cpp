// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/mpc/channel.hpp"

#include <sstream>

#include "ppml/error.hpp"

namespace ppml::mpc {

void Channel::send(int from, Bytes msg) {
  if (from != 0 && from != 1) throw ConfigError("party must be 0 or 1");
  if (receiving_) {
    ++stats_.rounds;
    receiving_ = false;
  }
  stats_.bytes_sent[from] += msg.size();
  transcript_.push_back({stats_.rounds, from, 1 - from, msg.size()});
  inbox_[1 - from].push_back(std::move(msg));
}

Bytes Channel::recv(int to) {
  auto& q = inbox_.at(to);
  if (q.empty()) throw MaterialError("receive on empty channel");
  receiving_ = true;
  Bytes m = std::move(q.front());
  q.pop_front();
  return m;
}

std::string Channel::dump_transcript() const {
  std::ostringstream os;
  os << "round,direction,bytes\n";
  for (const auto& e : transcript_)
    os << e.round << ",P" << e.from << "->P" << e.to << "," << e.bytes << "\n";
  return os.str();
}

void put_u64(Bytes& out, std::uint64_t v) { put_bits(out, v, 64); }

std::uint64_t get_u64(const Bytes& in, size_t& pos) { return get_bits(in, pos, 64); }

void put_bits(Bytes& out, std::uint64_t v, int bits) {
  for (int i = 0; i < (bits + 7) / 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_bits(const Bytes& in, size_t& pos, int bits) {
  const int n = (bits + 7) / 8;
  if (pos + n > in.size()) throw MaterialError("truncated message");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  pos += n;
  return bits == 64 ? v : v & ((std::uint64_t{1} << bits) - 1);
}

}  // namespace ppml::mpc
