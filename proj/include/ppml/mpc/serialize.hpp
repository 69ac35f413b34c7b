// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Little-endian fixed-width files for keys and dealer material:
//   header (20 bytes): magic "PPMF", u16 version, u16 kind, u16 domain bits,
//                      u16 payload words, u8 party, 3 reserved, u32 count
//   count records of a fixed size determined by the header.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ppml/mpc/fss.hpp"
#include "ppml/mpc/kernels.hpp"

namespace ppml::mpc {

inline constexpr std::uint16_t kFileVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 20;

enum class RecordKind : std::uint16_t {
  kDpf = 1,
  kDcf = 2,
  kRelu = 3,
  kBeaver = 4,
  kCompare = 5,
};

std::size_t relu_key_bytes();
std::size_t beaver_record_bytes();   // per party per element
std::size_t compare_record_bytes();  // per party per element

Bytes encode(const DpfKey& k);
Bytes encode(const DcfKey& k);
Bytes encode(const ReluKey& k);

void write_dpf_keys(std::ostream& os, const std::vector<DpfKey>& keys);
std::vector<DpfKey> read_dpf_keys(std::istream& is);
void write_dcf_keys(std::ostream& os, const std::vector<DcfKey>& keys);
std::vector<DcfKey> read_dcf_keys(std::istream& is);
void write_relu_keys(std::ostream& os, const ReluKeys& keys, int party);
std::vector<ReluKey> read_relu_keys(std::istream& is);
void write_beaver(std::ostream& os, const BeaverTriple& t, int party);
void write_compare(std::ostream& os, const CompareMaterial& m, int party);

}  // namespace ppml::mpc
