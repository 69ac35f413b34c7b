// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/mpc/kernels.hpp"

#include <bit>
#include <string>

#include "ppml/error.hpp"

namespace ppml::mpc {
namespace {

constexpr int kLevels = 6;
constexpr std::uint64_t kLow63 = (std::uint64_t{1} << 63) - 1;

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// Lanes entering tree level `l` and AND gates evaluated there. The last
// level only needs the generate bit.
int lanes_at(int l) { return 64 >> l; }
int ands_at(int l) { return l == kLevels - 1 ? 1 : lanes_at(l); }

// Bits 0, 2, 4, ... (or 1, 3, 5, ...) of the low `lanes` bits, compacted.
std::uint64_t take_lanes(std::uint64_t w, int lanes, int parity) {
  std::uint64_t out = 0;
  for (int j = 0; j < lanes / 2; ++j) out |= ((w >> (2 * j + parity)) & 1) << j;
  return out;
}

void put_masked_pair(Bytes& out, std::uint64_t d, std::uint64_t e, int bits) {
  if (2 * bits <= 64) {
    put_bits(out, d | (e << bits), 2 * bits);
  } else {
    put_bits(out, d, bits);
    put_bits(out, e, bits);
  }
}

std::pair<std::uint64_t, std::uint64_t> get_masked_pair(const Bytes& in, size_t& pos,
                                                        int bits) {
  if (2 * bits <= 64) {
    const std::uint64_t v = get_bits(in, pos, 2 * bits);
    return {v & low_mask(bits), v >> bits};
  }
  const std::uint64_t d = get_bits(in, pos, bits);
  return {d, get_bits(in, pos, bits)};
}

void require_size(std::size_t have, std::size_t need, const char* what) {
  if (have != need)
    throw MaterialError(std::string(what) + " sized for " + std::to_string(have) +
                        " elements, need " + std::to_string(need));
}

// ---------------------------------------------------------------------------

class BeaverParty {
 public:
  BeaverParty(int b, const SharedVec& x, const SharedVec& y, const BeaverTriple& t)
      : b_(b), x_(x.part[b]), y_(y.part[b]), a_(t.a.part[b]), bb_(t.b.part[b]),
        c_(t.c.part[b]) {}

  Bytes outgoing(int) {
    Bytes m;
    m.reserve(16 * x_.size());
    for (size_t i = 0; i < x_.size(); ++i) {
      put_u64(m, x_[i] - a_[i]);
      put_u64(m, y_[i] - bb_[i]);
    }
    return m;
  }

  void incoming(int, const Bytes& m) {
    size_t pos = 0;
    out_.resize(x_.size());
    for (size_t i = 0; i < x_.size(); ++i) {
      const Ring d = x_[i] - a_[i] + get_u64(m, pos);
      const Ring e = y_[i] - bb_[i] + get_u64(m, pos);
      out_[i] = c_[i] + d * bb_[i] + e * a_[i] + (b_ == 0 ? d * e : 0);
    }
  }

  std::vector<Ring> result() { return std::move(out_); }

 private:
  int b_;
  const std::vector<Ring>&x_, &y_, &a_, &bb_, &c_;
  std::vector<Ring> out_;
};

// Round 0: one-sided AND giving XOR shares of g = a & b.
// Rounds 1..6: carry-lookahead tree over 64 lanes (lane 63 is the identity
// g = 0, p = 1), each level one batch of bit-triple ANDs.
// Round 7: one-sided product m0 * m1 turning the XOR-shared sign bit into
// ring shares m0 + m1 - 2 m0 m1.
class CompareParty {
 public:
  CompareParty(int b, const std::vector<Ring>& x, const CompareMaterial::Party& m)
      : b_(b), x_(x), m_(m), g_(x.size()), p_(x.size()), top_(x.size()) {}

  Bytes outgoing(int r) {
    const size_t n = x_.size();
    Bytes out;
    if (r == 0) {
      for (size_t i = 0; i < n; ++i) put_u64(out, x_[i] ^ m_.and_mask[i]);
    } else if (r <= kLevels) {
      const int l = r - 1;
      for (size_t i = 0; i < n; ++i) {
        const auto [xw, yw] = operands(l, i);
        put_masked_pair(out, xw ^ m_.ta[l][i], yw ^ m_.tb[l][i], ands_at(l));
      }
    } else {
      for (size_t i = 0; i < n; ++i) put_u64(out, sign_bit(i) + m_.mul_mask[i]);
    }
    return out;
  }

  void incoming(int r, const Bytes& in) {
    const size_t n = x_.size();
    size_t pos = 0;
    if (r == 0) {
      for (size_t i = 0; i < n; ++i) {
        const std::uint64_t other = get_u64(in, pos);
        const std::uint64_t mine = x_[i] ^ m_.and_mask[i];
        // P0: a~ & b~ ^ r0 & b~ ^ z0;  P1: a~ & r1 ^ z1.
        const std::uint64_t g = b_ == 0 ? (mine & other) ^ (m_.and_mask[i] & other)
                                        : other & m_.and_mask[i];
        g_[i] = (g ^ m_.and_share[i]) & kLow63;
        p_[i] = x_[i] & kLow63;
        if (b_ == 0) p_[i] |= std::uint64_t{1} << 63;
        top_[i] = x_[i] >> 63;
      }
    } else if (r <= kLevels) {
      const int l = r - 1, half = lanes_at(l) / 2, k = ands_at(l);
      for (size_t i = 0; i < n; ++i) {
        const auto [xw, yw] = operands(l, i);
        const std::uint64_t d_own = xw ^ m_.ta[l][i], e_own = yw ^ m_.tb[l][i];
        const auto [d_oth, e_oth] = get_masked_pair(in, pos, k);
        const std::uint64_t d = d_own ^ d_oth, e = e_own ^ e_oth;
        std::uint64_t z = m_.tc[l][i] ^ (d & m_.tb[l][i]) ^ (e & m_.ta[l][i]);
        if (b_ == 0) z ^= d & e;
        z &= low_mask(k);
        const std::uint64_t g_hi = take_lanes(g_[i], lanes_at(l), 1);
        g_[i] = g_hi ^ (z & low_mask(half));
        p_[i] = k == 1 ? 0 : (z >> half) & low_mask(half);
      }
    } else {
      out_.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const Ring other = get_u64(in, pos);
        const Ring mine = sign_bit(i) + m_.mul_mask[i];
        const Ring mu0 = b_ == 0 ? mine : other, mu1 = b_ == 0 ? other : mine;
        // P0: mu0 mu1 - rho0 mu1 + u0;  P1: -mu0 rho1 + u1.
        const Ring prod = b_ == 0 ? mu0 * mu1 - m_.mul_mask[i] * mu1 + m_.mul_share[i]
                                  : m_.mul_share[i] - mu0 * m_.mul_mask[i];
        out_[i] = sign_bit(i) - 2 * prod;
      }
    }
  }

  std::vector<Ring> result() { return std::move(out_); }

 private:
  // AND operands at level l: first half computes p_hi & g_lo, second half
  // p_hi & p_lo.
  std::pair<std::uint64_t, std::uint64_t> operands(int l, size_t i) const {
    const int lanes = lanes_at(l), half = lanes / 2;
    const std::uint64_t p_hi = take_lanes(p_[i], lanes, 1);
    const std::uint64_t g_lo = take_lanes(g_[i], lanes, 0);
    const std::uint64_t p_lo = take_lanes(p_[i], lanes, 0);
    if (ands_at(l) == 1) return {p_hi, g_lo};
    return {p_hi | (p_hi << half), g_lo | (p_lo << half)};
  }

  // XOR share of the sign bit: top input bit ^ carry into bit 63.
  Ring sign_bit(size_t i) const { return (top_[i] ^ g_[i]) & 1; }

  int b_;
  const std::vector<Ring>& x_;
  const CompareMaterial::Party& m_;
  std::vector<std::uint64_t> g_, p_, top_;
  std::vector<Ring> out_;
};

class ReluParty {
 public:
  ReluParty(int b, const std::vector<Ring>& x, const std::vector<ReluKey>& keys)
      : b_(b), x_(x), keys_(keys) {}

  Bytes outgoing(int) {
    Bytes m;
    m.reserve(8 * x_.size());
    for (size_t i = 0; i < x_.size(); ++i) put_u64(m, x_[i] + keys_[i].r);
    return m;
  }

  void incoming(int, const Bytes& in) {
    Prg prg;
    size_t pos = 0;
    out_.resize(x_.size());
    for (size_t i = 0; i < x_.size(); ++i) {
      const ReluKey& k = keys_[i];
      const Ring masked = x_[i] + k.r + get_u64(in, pos);
      const Ring c = masked >> 63;
      std::array<Ring, 2> w{};
      dcf_eval_raw(k.dcf, masked & kLow63, prg, w.data());
      const Ring u = k.s + w[0];        // share of s xor [x' < r']
      const Ring ru = k.rs + w[1];      // share of r * u
      const Ring msb = (b_ == 0 ? c : 0) + (1 - 2 * c) * u;
      const Ring d = (b_ == 0 ? 1 : 0) - msb;
      const Ring rd = (1 - c) * k.r - (1 - 2 * c) * ru;
      out_[i] = masked * d - rd;
    }
  }

  std::vector<Ring> result() { return std::move(out_); }

 private:
  int b_;
  const std::vector<Ring>& x_;
  const std::vector<ReluKey>& keys_;
  std::vector<Ring> out_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::pair<Share, Share> share(Ring x, Rng& rng) {
  const Ring r = rng.next();
  return {Share{r, 0}, Share{x - r, 1}};
}

Ring reconstruct(const Share& a, const Share& b) {
  if (a.party == b.party) throw ConfigError("reconstruct needs one share from each party");
  return a.value + b.value;
}

SharedVec share_vec(const std::vector<Ring>& xs, Rng& rng) {
  SharedVec v;
  for (Ring x : xs) {
    const auto [s0, s1] = share(x, rng);
    v.part[0].push_back(s0.value);
    v.part[1].push_back(s1.value);
  }
  return v;
}

std::vector<Ring> reconstruct(const SharedVec& v) {
  require_size(v.part[1].size(), v.part[0].size(), "share vector");
  std::vector<Ring> out(v.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = v.part[0][i] + v.part[1][i];
  return out;
}

BeaverTriple Dealer::beaver_triple(std::size_t n) {
  BeaverTriple t;
  t.id = next_id_++;
  std::vector<Ring> a(n), b(n), c(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = rng_.next();
    b[i] = rng_.next();
    c[i] = a[i] * b[i];
  }
  t.a = share_vec(a, rng_);
  t.b = share_vec(b, rng_);
  t.c = share_vec(c, rng_);
  return t;
}

CompareMaterial Dealer::compare_material(std::size_t n) {
  CompareMaterial m;
  m.id = next_id_++;
  auto& p0 = m.party[0];
  auto& p1 = m.party[1];
  for (size_t i = 0; i < n; ++i) {
    const std::uint64_t r0 = rng_.next(), r1 = rng_.next(), z0 = rng_.next();
    p0.and_mask.push_back(r0);
    p1.and_mask.push_back(r1);
    p0.and_share.push_back(z0);
    p1.and_share.push_back(z0 ^ (r0 & r1));
    for (int l = 0; l < kLevels; ++l) {
      const std::uint64_t mask = low_mask(ands_at(l));
      const std::uint64_t a = rng_.next() & mask, b = rng_.next() & mask;
      const std::uint64_t a0 = rng_.next() & mask, b0 = rng_.next() & mask,
                          c0 = rng_.next() & mask;
      p0.ta[l].push_back(a0);
      p1.ta[l].push_back(a ^ a0);
      p0.tb[l].push_back(b0);
      p1.tb[l].push_back(b ^ b0);
      p0.tc[l].push_back(c0);
      p1.tc[l].push_back((a & b) ^ c0);
    }
    const Ring rho0 = rng_.next(), rho1 = rng_.next(), u0 = rng_.next();
    p0.mul_mask.push_back(rho0);
    p1.mul_mask.push_back(rho1);
    p0.mul_share.push_back(u0);
    p1.mul_share.push_back(rho0 * rho1 - u0);
  }
  return m;
}

ReluKeys Dealer::relu_keys(std::size_t n) {
  ReluKeys keys;
  keys.id = next_id_++;
  Prg prg;
  for (size_t i = 0; i < n; ++i) {
    const Ring r = rng_.next();
    const Ring s = r >> 63;
    const std::array<Ring, 2> beta{1 - 2 * s, r * (1 - 2 * s)};
    const Block root0{rng_.next(), rng_.next()}, root1{rng_.next(), rng_.next()};
    auto [k0, k1] = dcf_keygen_raw(r & kLow63, beta, 63, root0, root1, prg);
    const Ring r0 = rng_.next(), s0 = rng_.next(), rs0 = rng_.next();
    keys.party[0].push_back({std::move(k0), r0, s0, rs0});
    keys.party[1].push_back({std::move(k1), r - r0, s - s0, r * s - rs0});
  }
  return keys;
}

void Session::consume(std::uint64_t id) {
  if (!consumed_.insert(id).second)
    throw MaterialError("correlated randomness #" + std::to_string(id) + " already used");
}

SharedVec beaver_mul(Session& s, const SharedVec& x, const SharedVec& y,
                     const BeaverTriple& t) {
  require_size(y.size(), x.size(), "rhs");
  require_size(t.a.size(), x.size(), "triple");
  s.consume(t.id);
  BeaverParty p0(0, x, y, t), p1(1, x, y, t);
  run_lockstep(p0, p1, s.channel(), 1);
  SharedVec out;
  out.part = {p0.result(), p1.result()};
  return out;
}

SharedVec a2b_compare(Session& s, const SharedVec& x, const CompareMaterial& m) {
  require_size(m.size(), x.size(), "comparison material");
  s.consume(m.id);
  CompareParty p0(0, x.part[0], m.party[0]), p1(1, x.part[1], m.party[1]);
  run_lockstep(p0, p1, s.channel(), kLevels + 2);
  SharedVec out;
  out.part = {p0.result(), p1.result()};
  return out;
}

SharedVec fss_relu(Session& s, const SharedVec& x, const ReluKeys& keys) {
  require_size(keys.size(), x.size(), "ReLU keys");
  s.consume(keys.id);
  ReluParty p0(0, x.part[0], keys.party[0]), p1(1, x.part[1], keys.party[1]);
  run_lockstep(p0, p1, s.channel(), 1);
  SharedVec out;
  out.part = {p0.result(), p1.result()};
  return out;
}

}  // namespace ppml::mpc
