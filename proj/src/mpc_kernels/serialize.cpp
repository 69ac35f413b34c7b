// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/mpc/serialize.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ppml/error.hpp"

namespace ppml::mpc {
namespace {

constexpr std::array<char, 4> kMagic{'P', 'P', 'M', 'F'};
constexpr int kReluDomainBits = 63;

struct Header {
  RecordKind kind = RecordKind::kDpf;
  int domain_bits = 0;
  int payload_words = 0;
  int party = 0;
  std::uint32_t count = 0;
};

void put_block(Bytes& out, const Block& b) {
  put_u64(out, b.lo);
  put_u64(out, b.hi);
}

Block get_block(const Bytes& in, size_t& pos) {
  Block b;
  b.lo = get_u64(in, pos);
  b.hi = get_u64(in, pos);
  return b;
}

void write_header(std::ostream& os, const Header& h) {
  Bytes b(kMagic.begin(), kMagic.end());
  put_bits(b, kFileVersion, 16);
  put_bits(b, static_cast<std::uint16_t>(h.kind), 16);
  put_bits(b, h.domain_bits, 16);
  put_bits(b, h.payload_words, 16);
  put_bits(b, h.party, 8);
  put_bits(b, 0, 24);
  put_bits(b, h.count, 32);
  os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

Bytes read_exact(std::istream& is, std::size_t n) {
  Bytes b(n);
  is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw ConfigError("truncated key file");
  return b;
}

Header read_header(std::istream& is, RecordKind expect) {
  const Bytes b = read_exact(is, kFileHeaderBytes);
  if (!std::equal(kMagic.begin(), kMagic.end(), b.begin())) throw ConfigError("bad key file magic");
  size_t pos = 4;
  if (get_bits(b, pos, 16) != kFileVersion) throw ConfigError("unsupported key file version");
  Header h;
  h.kind = static_cast<RecordKind>(get_bits(b, pos, 16));
  if (h.kind != expect) throw ConfigError("unexpected record kind in key file");
  h.domain_bits = static_cast<int>(get_bits(b, pos, 16));
  h.payload_words = static_cast<int>(get_bits(b, pos, 16));
  h.party = static_cast<int>(get_bits(b, pos, 8));
  get_bits(b, pos, 24);
  h.count = static_cast<std::uint32_t>(get_bits(b, pos, 32));
  if (h.party > 1 || h.domain_bits < 1 || h.domain_bits > 64)
    throw ConfigError("corrupt key file header");
  return h;
}

void write_bytes(std::ostream& os, const Bytes& b) {
  os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

DpfKey decode_dpf(const Bytes& in, int party, int n) {
  size_t pos = 0;
  DpfKey k;
  k.party = party;
  k.domain_bits = n;
  k.root = get_block(in, pos);
  for (int i = 0; i < n; ++i) k.cw.push_back(get_block(in, pos));
  k.final_cw = get_u64(in, pos);
  return k;
}

DcfKey decode_dcf(const Bytes& in, size_t& pos, int party, int n, int p) {
  DcfKey k;
  k.party = party;
  k.domain_bits = n;
  k.payload_words = p;
  k.root = get_block(in, pos);
  for (int i = 0; i < n; ++i) {
    k.cw.push_back(get_block(in, pos));
    for (int w = 0; w < p; ++w) k.value_cw.push_back(get_u64(in, pos));
  }
  for (int w = 0; w < p; ++w) k.final_cw.push_back(get_u64(in, pos));
  return k;
}

int uniform_party(const auto& keys) {
  const int party = keys.empty() ? 0 : keys.front().party;
  for (const auto& k : keys)
    if (k.party != party) throw ConfigError("key file mixes parties");
  return party;
}

}  // namespace

std::size_t relu_key_bytes() { return dcf_key_bytes(kReluDomainBits, 2) + 24; }
std::size_t beaver_record_bytes() { return 24; }
// One-sided AND 16, tree triples 24+12+6+3+2+1, one-sided product 16.
std::size_t compare_record_bytes() { return 80; }

Bytes encode(const DpfKey& k) {
  Bytes out;
  put_block(out, k.root);
  for (const Block& b : k.cw) put_block(out, b);
  put_u64(out, k.final_cw);
  return out;
}

Bytes encode(const DcfKey& k) {
  Bytes out;
  put_block(out, k.root);
  for (int i = 0; i < k.domain_bits; ++i) {
    put_block(out, k.cw[i]);
    for (int w = 0; w < k.payload_words; ++w) put_u64(out, k.value_cw[i * k.payload_words + w]);
  }
  for (Ring v : k.final_cw) put_u64(out, v);
  return out;
}

Bytes encode(const ReluKey& k) {
  Bytes out = encode(k.dcf);
  put_u64(out, k.r);
  put_u64(out, k.s);
  put_u64(out, k.rs);
  return out;
}

void write_dpf_keys(std::ostream& os, const std::vector<DpfKey>& keys) {
  const int n = keys.empty() ? 1 : keys.front().domain_bits;
  write_header(os, {RecordKind::kDpf, n, 1, uniform_party(keys),
                    static_cast<std::uint32_t>(keys.size())});
  for (const auto& k : keys) {
    if (k.domain_bits != n) throw ConfigError("key file mixes domain sizes");
    write_bytes(os, encode(k));
  }
}

std::vector<DpfKey> read_dpf_keys(std::istream& is) {
  const Header h = read_header(is, RecordKind::kDpf);
  std::vector<DpfKey> keys;
  for (std::uint32_t i = 0; i < h.count; ++i)
    keys.push_back(decode_dpf(read_exact(is, dpf_key_bytes(h.domain_bits)), h.party,
                              h.domain_bits));
  return keys;
}

void write_dcf_keys(std::ostream& os, const std::vector<DcfKey>& keys) {
  const int n = keys.empty() ? 1 : keys.front().domain_bits;
  const int p = keys.empty() ? 1 : keys.front().payload_words;
  write_header(os, {RecordKind::kDcf, n, p, uniform_party(keys),
                    static_cast<std::uint32_t>(keys.size())});
  for (const auto& k : keys) {
    if (k.domain_bits != n || k.payload_words != p)
      throw ConfigError("key file mixes key shapes");
    write_bytes(os, encode(k));
  }
}

std::vector<DcfKey> read_dcf_keys(std::istream& is) {
  const Header h = read_header(is, RecordKind::kDcf);
  std::vector<DcfKey> keys;
  for (std::uint32_t i = 0; i < h.count; ++i) {
    const Bytes rec = read_exact(is, dcf_key_bytes(h.domain_bits, h.payload_words));
    size_t pos = 0;
    keys.push_back(decode_dcf(rec, pos, h.party, h.domain_bits, h.payload_words));
  }
  return keys;
}

void write_relu_keys(std::ostream& os, const ReluKeys& keys, int party) {
  write_header(os, {RecordKind::kRelu, kReluDomainBits, 2, party,
                    static_cast<std::uint32_t>(keys.size())});
  for (const auto& k : keys.party.at(party)) write_bytes(os, encode(k));
}

std::vector<ReluKey> read_relu_keys(std::istream& is) {
  const Header h = read_header(is, RecordKind::kRelu);
  std::vector<ReluKey> keys;
  for (std::uint32_t i = 0; i < h.count; ++i) {
    const Bytes rec = read_exact(is, relu_key_bytes());
    size_t pos = 0;
    ReluKey k;
    k.dcf = decode_dcf(rec, pos, h.party, kReluDomainBits, 2);
    k.r = get_u64(rec, pos);
    k.s = get_u64(rec, pos);
    k.rs = get_u64(rec, pos);
    keys.push_back(std::move(k));
  }
  return keys;
}

void write_beaver(std::ostream& os, const BeaverTriple& t, int party) {
  write_header(os, {RecordKind::kBeaver, 64, 3, party, static_cast<std::uint32_t>(t.a.size())});
  Bytes out;
  for (size_t i = 0; i < t.a.size(); ++i) {
    put_u64(out, t.a.part.at(party)[i]);
    put_u64(out, t.b.part[party][i]);
    put_u64(out, t.c.part[party][i]);
  }
  write_bytes(os, out);
}

void write_compare(std::ostream& os, const CompareMaterial& m, int party) {
  write_header(os, {RecordKind::kCompare, 64, 10, party, static_cast<std::uint32_t>(m.size())});
  const auto& p = m.party.at(party);
  Bytes out;
  for (size_t i = 0; i < m.size(); ++i) {
    put_u64(out, p.and_mask[i]);
    put_u64(out, p.and_share[i]);
    for (int l = 0; l < 6; ++l) {
      const int k = l == 5 ? 1 : 64 >> l;
      if (3 * k <= 64) {
        put_bits(out, p.ta[l][i] | (p.tb[l][i] << k) | (p.tc[l][i] << (2 * k)), 3 * k);
      } else {
        put_bits(out, p.ta[l][i], k);
        put_bits(out, p.tb[l][i], k);
        put_bits(out, p.tc[l][i], k);
      }
    }
    put_u64(out, p.mul_mask[i]);
    put_u64(out, p.mul_share[i]);
  }
  write_bytes(os, out);
}

}  // namespace ppml::mpc
