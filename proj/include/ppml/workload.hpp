// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Layer-graph descriptions of inference workloads and the operation counts
// derived from them. Dimensions are per sample; the batch lives on the graph.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ppml {

enum class LayerKind {
  kMatmul,
  kConv2d,
  kRelu,
  kMaxpool,
  kAvgpool,
  kSoftmax,
  kMaxReduce,
  kLayernorm,
  kGelu,
  // Token-embedding lookup. Runs on the client, so it contributes
  // parameters but no protocol work.
  kEmbedding,
};

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);  // throws ConfigError
bool is_linear(LayerKind kind);     // matmul, conv2d
bool is_nonlinear(LayerKind kind);  // relu, maxpool, softmax, max_reduce, layernorm, gelu

// Dimension conventions (per sample):
//   matmul     input [M,K] or [H,M,K]; weight [K,N], or activation rhs
//              [H,K,N] with empty weight; output [H,M,N] / [M,N]
//   conv2d     input [C,H,W]; weight [Cout,Cin,Kh,Kw]; output [Cout,Ho,Wo]
//   max/avgpool input [C,H,W]; output [C,Ho,Wo]; `window` is the side
//   softmax, layernorm  rows along the last input dimension; output = input
//   max_reduce input [...,L]; output [...,1]
//   relu, gelu  output = input
//   embedding  input [M] token ids; weight [V,D]; output [M,D]
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::string name;
  std::vector<std::int64_t> input_dims;
  std::vector<std::int64_t> output_dims;
  std::vector<std::int64_t> weight_dims;
  std::vector<std::int64_t> rhs_dims;  // activation operand of act x act matmul
  std::int64_t stride = 1;
  std::int64_t window = 0;
  // Index of the layer producing the primary input; -1 means the previous
  // layer (or the graph input for the first layer).
  int source = -1;
  int rhs_source = -1;
};

std::int64_t input_elems(const LayerSpec& l);
std::int64_t output_elems(const LayerSpec& l);
std::int64_t weight_elems(const LayerSpec& l);
std::int64_t rhs_elems(const LayerSpec& l);
// Multiply-accumulates per sample (0 for non-linear kinds).
std::int64_t layer_macs(const LayerSpec& l);
// Row count and row length for row-wise kinds (softmax, max_reduce,
// layernorm); {elems, 1} otherwise.
std::int64_t layer_rows(const LayerSpec& l);
std::int64_t layer_row_len(const LayerSpec& l);

enum class ModelFamily { kCnn, kTransformer };
std::string_view to_string(ModelFamily f);

struct ModelGraph {
  std::string name;
  ModelFamily family = ModelFamily::kCnn;
  std::vector<LayerSpec> layers;
  std::int64_t param_count = 0;
  std::int64_t batch = 1;
  std::int64_t seq_len = 1;
};

struct BuiltinOptions {
  // Insert a max_reduce before every softmax (the MPC convention). FHE
  // graphs are built without it.
  bool include_max = true;
};

// name in {bert_tiny, bert_base, resnet20, resnet50}; throws ConfigError.
ModelGraph build_builtin_model(std::string_view name, std::int64_t seq_len,
                               std::int64_t batch, BuiltinOptions opts = {});
std::vector<std::string> builtin_model_names();

// Checks dims, kinds and adjacency; recomputes nothing. Throws ConfigError
// naming the offending layer.
void validate_graph(const ModelGraph& g);
// Sets param_count from the weights and validates.
void finalize_graph(ModelGraph& g);

// Fixed-point convention for activation sizes.
inline constexpr int kRingBits = 64;
inline constexpr int kFracBits = 16;

struct OpCounts {
  std::int64_t macs = 0;
  // Table-style FLOPs: 2 per MAC for matmuls, 1 per MAC for convolutions.
  std::int64_t flops = 0;
  std::map<LayerKind, std::int64_t> nonlinear_elems;
  std::int64_t activation_bytes = 0;

  std::int64_t total_nonlinear() const;
  OpCounts& operator+=(const OpCounts& o);
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

OpCounts layer_op_counts(const LayerSpec& l);  // one sample
OpCounts model_op_counts(const ModelGraph& g);  // whole batch

// Text format, one layer per line:
//   model <name> <cnn|transformer> [seq_len]
//   <kind> in=AxB out=CxD [w=...] [rhs=...] [stride=s] [window=k] [src=i] [rhs_src=j] [name=n]
// '#' starts a comment. Throws ConfigError with "<path>:<line>:" prefixes.
ModelGraph load_model_text(const std::string& text, const std::string& origin,
                           std::int64_t batch);
ModelGraph load_model_file(const std::string& path, std::int64_t batch);

}  // namespace ppml
