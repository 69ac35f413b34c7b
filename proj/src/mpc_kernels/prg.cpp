// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/mpc/prg.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <stdexcept>

namespace ppml::mpc {
namespace {

constexpr std::array<std::uint8_t, 16> kFixedKey = {
    0x3a, 0x71, 0xc4, 0x0e, 0x95, 0x2b, 0xd8, 0x66,
    0x1f, 0xa0, 0x5c, 0xe3, 0x47, 0x8d, 0xb2, 0x19};

constexpr int kMaxBlocks = 8;

}  // namespace

struct Prg::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
};

Prg::Prg() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_CIPHER_CTX_new();
  if (!impl_->ctx ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_aes_128_ecb(), nullptr, kFixedKey.data(), nullptr) != 1)
    throw std::runtime_error("AES initialisation failed");
  EVP_CIPHER_CTX_set_padding(impl_->ctx, 0);
}

Prg::~Prg() { EVP_CIPHER_CTX_free(impl_->ctx); }

void Prg::expand(const Block& seed, std::uint64_t tweak, Block* out, int count) {
  if (count < 1 || count > kMaxBlocks) throw std::invalid_argument("bad PRG block count");
  std::array<Block, kMaxBlocks> in;
  for (int i = 0; i < count; ++i) in[i] = {seed.lo ^ (tweak + i), seed.hi};
  int len = 0;
  static_assert(sizeof(Block) == 16);
  if (EVP_EncryptUpdate(impl_->ctx, reinterpret_cast<unsigned char*>(out), &len,
                        reinterpret_cast<const unsigned char*>(in.data()), 16 * count) != 1 ||
      len != 16 * count)
    throw std::runtime_error("AES encryption failed");
  for (int i = 0; i < count; ++i) out[i] ^= in[i];
}

}  // namespace ppml::mpc
