// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ppml {

// Invalid inputs, malformed files, unknown names.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed request that cannot be satisfied, e.g. a key pool that can
// never hold one job's demand.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-use cryptographic material was consumed twice, or ran out.
class MaterialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppml
