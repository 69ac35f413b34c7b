// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/mpc/fss.hpp"

#include <array>
#include <string>

#include "ppml/error.hpp"

namespace ppml::mpc {
namespace {

constexpr std::uint64_t kSeedMask = ~std::uint64_t{3};
constexpr std::uint64_t kConvertTweak = 16;

struct Node {
  Block s;
  int t = 0;
};

// Children of a DPF node.
struct DpfExpansion {
  Node left, right;
};

// Children of a DCF node, with the value words hanging off each edge.
struct DcfExpansion {
  Node left, right;
  std::array<Ring, kMaxPayloadWords> v_left{}, v_right{};
};

Node as_node(const Block& b) {
  return {{b.lo & kSeedMask, b.hi}, static_cast<int>(b.lo & 1)};
}

DpfExpansion expand_dpf(Prg& prg, const Block& s) {
  std::array<Block, 2> out;
  prg.expand(s, 0, out.data(), 2);
  return {as_node(out[0]), as_node(out[1])};
}

DcfExpansion expand_dcf(Prg& prg, const Block& s) {
  std::array<Block, 4> out;
  prg.expand(s, 0, out.data(), 4);
  DcfExpansion e{as_node(out[0]), as_node(out[2]), {}, {}};
  e.v_left = {out[1].lo, out[1].hi};
  e.v_right = {out[3].lo, out[3].hi};
  return e;
}

std::array<Ring, kMaxPayloadWords> convert(Prg& prg, const Block& s) {
  Block out;
  prg.expand(s, kConvertTweak, &out, 1);
  return {out.lo, out.hi};
}

int bit_at(std::uint64_t x, int n, int level) {
  return static_cast<int>((x >> (n - 1 - level)) & 1);
}

Ring sign(int party, Ring v) { return party ? Ring{0} - v : v; }

void check_domain(int n, int max_bits) {
  if (n < 1 || n > max_bits)
    throw ConfigError("domain bits " + std::to_string(n) + " outside [1," +
                      std::to_string(max_bits) + "]");
}

void check_alpha(std::uint64_t alpha, int n) {
  if (n < 64 && (alpha >> n) != 0) throw ConfigError("alpha outside the domain");
}

Block random_block(Rng& rng) { return {rng.next() & kSeedMask, rng.next()}; }

}  // namespace

std::size_t dpf_key_bytes(int n) {
  return static_cast<std::size_t>(kLambdaBits / 8) * (n + 1) + 8;
}

std::size_t dcf_key_bytes(int n, int p) {
  return static_cast<std::size_t>(n + 1) * (kLambdaBits / 8 + 8 * p);
}

// ---------------------------------------------------------------------------
// DPF

std::pair<DpfKey, DpfKey> dpf_keygen(std::uint64_t alpha, Ring beta, int n,
                                     std::uint64_t seed) {
  check_domain(n, kMaxDeskDomainBits);
  check_alpha(alpha, n);
  Rng rng(seed);
  Prg prg;
  std::array<DpfKey, 2> k;
  std::array<Node, 2> cur;
  for (int b = 0; b < 2; ++b) {
    k[b].party = b;
    k[b].domain_bits = n;
    k[b].root = random_block(rng);
    cur[b] = {k[b].root, b};
  }
  for (int i = 0; i < n; ++i) {
    const int a = bit_at(alpha, n, i);
    const DpfExpansion e0 = expand_dpf(prg, cur[0].s), e1 = expand_dpf(prg, cur[1].s);
    const Block s_cw = a ? e0.left.s ^ e1.left.s : e0.right.s ^ e1.right.s;
    const int tl_cw = e0.left.t ^ e1.left.t ^ a ^ 1;
    const int tr_cw = e0.right.t ^ e1.right.t ^ a;
    const Block cw{s_cw.lo | static_cast<std::uint64_t>(tl_cw) |
                       (static_cast<std::uint64_t>(tr_cw) << 1),
                   s_cw.hi};
    k[0].cw.push_back(cw);
    k[1].cw.push_back(cw);
    for (int b = 0; b < 2; ++b) {
      const DpfExpansion& e = b ? e1 : e0;
      const Node keep = a ? e.right : e.left;
      const int t_keep_cw = a ? tr_cw : tl_cw;
      Node next = keep;
      if (cur[b].t) {
        next.s ^= s_cw;
        next.t ^= t_keep_cw;
      }
      cur[b] = next;
    }
  }
  const Ring c0 = convert(prg, cur[0].s)[0], c1 = convert(prg, cur[1].s)[0];
  const Ring fin = sign(cur[1].t, beta - c0 + c1);
  k[0].final_cw = k[1].final_cw = fin;
  return {k[0], k[1]};
}

Ring dpf_eval(const DpfKey& key, std::uint64_t x, Prg& prg) {
  Node cur{key.root, key.party};
  for (int i = 0; i < key.domain_bits; ++i) {
    DpfExpansion e = expand_dpf(prg, cur.s);
    const Block& cw = key.cw[i];
    if (cur.t) {
      const Block s_cw{cw.lo & kSeedMask, cw.hi};
      e.left.s ^= s_cw;
      e.right.s ^= s_cw;
      e.left.t ^= static_cast<int>(cw.lo & 1);
      e.right.t ^= static_cast<int>((cw.lo >> 1) & 1);
    }
    cur = bit_at(x, key.domain_bits, i) ? e.right : e.left;
  }
  return sign(key.party, convert(prg, cur.s)[0] + (cur.t ? key.final_cw : 0));
}

Ring dpf_eval(const DpfKey& key, std::uint64_t x) {
  Prg prg;
  return dpf_eval(key, x, prg);
}

std::vector<Ring> dpf_eval_all(const DpfKey& key) {
  Prg prg;
  const int n = key.domain_bits;
  std::vector<Node> level{{key.root, key.party}};
  for (int i = 0; i < n; ++i) {
    std::vector<Node> next;
    next.reserve(level.size() * 2);
    const Block& cw = key.cw[i];
    const Block s_cw{cw.lo & kSeedMask, cw.hi};
    for (const Node& nd : level) {
      DpfExpansion e = expand_dpf(prg, nd.s);
      if (nd.t) {
        e.left.s ^= s_cw;
        e.right.s ^= s_cw;
        e.left.t ^= static_cast<int>(cw.lo & 1);
        e.right.t ^= static_cast<int>((cw.lo >> 1) & 1);
      }
      next.push_back(e.left);
      next.push_back(e.right);
    }
    level = std::move(next);
  }
  std::vector<Ring> out(level.size());
  for (size_t x = 0; x < level.size(); ++x)
    out[x] = sign(key.party, convert(prg, level[x].s)[0] + (level[x].t ? key.final_cw : 0));
  return out;
}

// ---------------------------------------------------------------------------
// DCF

std::pair<DcfKey, DcfKey> dcf_keygen_raw(std::uint64_t alpha, std::span<const Ring> beta,
                                         int n, Block root0, Block root1, Prg& prg) {
  check_domain(n, 64);
  check_alpha(alpha, n);
  const int p = static_cast<int>(beta.size());
  if (p < 1 || p > kMaxPayloadWords) throw ConfigError("DCF payload must be 1 or 2 words");
  std::array<DcfKey, 2> k;
  std::array<Node, 2> cur;
  root0.lo &= kSeedMask;
  root1.lo &= kSeedMask;
  for (int b = 0; b < 2; ++b) {
    k[b].party = b;
    k[b].domain_bits = n;
    k[b].payload_words = p;
    k[b].root = b ? root1 : root0;
    cur[b] = {k[b].root, b};
  }
  std::array<Ring, kMaxPayloadWords> v_alpha{};
  for (int i = 0; i < n; ++i) {
    const int a = bit_at(alpha, n, i);
    const DcfExpansion e0 = expand_dcf(prg, cur[0].s), e1 = expand_dcf(prg, cur[1].s);
    // Leaving along the left edge (a = 1) means every x down the lost
    // subtree is below alpha, so that edge carries beta.
    const Node& l0 = a ? e0.left : e0.right;
    const Node& l1 = a ? e1.left : e1.right;
    const auto& lv0 = a ? e0.v_left : e0.v_right;
    const auto& lv1 = a ? e1.v_left : e1.v_right;
    const auto& kv0 = a ? e0.v_right : e0.v_left;
    const auto& kv1 = a ? e1.v_right : e1.v_left;
    const Block s_cw = l0.s ^ l1.s;
    const int tl_cw = e0.left.t ^ e1.left.t ^ a ^ 1;
    const int tr_cw = e0.right.t ^ e1.right.t ^ a;
    const int t1 = cur[1].t;
    for (int w = 0; w < p; ++w) {
      Ring v_cw = sign(t1, lv1[w] - lv0[w] - v_alpha[w]);
      if (a) v_cw += sign(t1, beta[w]);
      v_alpha[w] = v_alpha[w] - kv1[w] + kv0[w] + sign(t1, v_cw);
      k[0].value_cw.push_back(v_cw);
      k[1].value_cw.push_back(v_cw);
    }
    (void)l1;
    const Block cw{s_cw.lo | static_cast<std::uint64_t>(tl_cw) |
                       (static_cast<std::uint64_t>(tr_cw) << 1),
                   s_cw.hi};
    k[0].cw.push_back(cw);
    k[1].cw.push_back(cw);
    for (int b = 0; b < 2; ++b) {
      const DcfExpansion& e = b ? e1 : e0;
      Node next = a ? e.right : e.left;
      if (cur[b].t) {
        next.s ^= s_cw;
        next.t ^= a ? tr_cw : tl_cw;
      }
      cur[b] = next;
    }
  }
  const auto c0 = convert(prg, cur[0].s), c1 = convert(prg, cur[1].s);
  for (int w = 0; w < p; ++w) {
    const Ring fin = sign(cur[1].t, c1[w] - c0[w] - v_alpha[w]);
    k[0].final_cw.push_back(fin);
    k[1].final_cw.push_back(fin);
  }
  return {k[0], k[1]};
}

void dcf_eval_raw(const DcfKey& key, std::uint64_t x, Prg& prg, Ring* out) {
  const int p = key.payload_words;
  std::array<Ring, kMaxPayloadWords> v{};
  Node cur{key.root, key.party};
  for (int i = 0; i < key.domain_bits; ++i) {
    DcfExpansion e = expand_dcf(prg, cur.s);
    const Block& cw = key.cw[i];
    if (cur.t) {
      const Block s_cw{cw.lo & kSeedMask, cw.hi};
      e.left.s ^= s_cw;
      e.right.s ^= s_cw;
      e.left.t ^= static_cast<int>(cw.lo & 1);
      e.right.t ^= static_cast<int>((cw.lo >> 1) & 1);
    }
    const int xb = bit_at(x, key.domain_bits, i);
    const auto& ev = xb ? e.v_right : e.v_left;
    for (int w = 0; w < p; ++w)
      v[w] += sign(key.party, ev[w] + (cur.t ? key.value_cw[i * p + w] : 0));
    cur = xb ? e.right : e.left;
  }
  const auto c = convert(prg, cur.s);
  for (int w = 0; w < p; ++w)
    out[w] = v[w] + sign(key.party, c[w] + (cur.t ? key.final_cw[w] : 0));
}

std::pair<DcfKey, DcfKey> dcf_keygen(std::uint64_t alpha, Ring beta, int n,
                                     std::uint64_t seed) {
  check_domain(n, kMaxDeskDomainBits);
  Rng rng(seed);
  Prg prg;
  const Block r0 = random_block(rng), r1 = random_block(rng);
  const std::array<Ring, 1> b{beta};
  return dcf_keygen_raw(alpha, b, n, r0, r1, prg);
}

Ring dcf_eval(const DcfKey& key, std::uint64_t x) {
  Prg prg;
  std::array<Ring, kMaxPayloadWords> out{};
  dcf_eval_raw(key, x, prg, out.data());
  return out[0];
}

std::vector<Ring> dcf_eval_all(const DcfKey& key) {
  Prg prg;
  const int n = key.domain_bits;
  struct Item {
    Node node;
    Ring v;
  };
  std::vector<Item> level{{{key.root, key.party}, 0}};
  for (int i = 0; i < n; ++i) {
    std::vector<Item> next;
    next.reserve(level.size() * 2);
    const Block& cw = key.cw[i];
    const Block s_cw{cw.lo & kSeedMask, cw.hi};
    const int p = key.payload_words;
    for (const Item& it : level) {
      DcfExpansion e = expand_dcf(prg, it.node.s);
      if (it.node.t) {
        e.left.s ^= s_cw;
        e.right.s ^= s_cw;
        e.left.t ^= static_cast<int>(cw.lo & 1);
        e.right.t ^= static_cast<int>((cw.lo >> 1) & 1);
      }
      const Ring corr = it.node.t ? key.value_cw[i * p] : 0;
      next.push_back({e.left, it.v + sign(key.party, e.v_left[0] + corr)});
      next.push_back({e.right, it.v + sign(key.party, e.v_right[0] + corr)});
    }
    level = std::move(next);
  }
  std::vector<Ring> out(level.size());
  for (size_t x = 0; x < level.size(); ++x) {
    const Item& it = level[x];
    out[x] = it.v + sign(key.party, convert(prg, it.node.s)[0] +
                                        (it.node.t ? key.final_cw[0] : 0));
  }
  return out;
}

}  // namespace ppml::mpc
