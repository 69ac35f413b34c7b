// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/workload.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "ppml/error.hpp"

namespace ppml {
namespace {

constexpr std::array<std::pair<LayerKind, std::string_view>, 10> kKindNames{{
    {LayerKind::kMatmul, "matmul"},
    {LayerKind::kConv2d, "conv2d"},
    {LayerKind::kRelu, "relu"},
    {LayerKind::kMaxpool, "maxpool"},
    {LayerKind::kAvgpool, "avgpool"},
    {LayerKind::kSoftmax, "softmax"},
    {LayerKind::kMaxReduce, "max_reduce"},
    {LayerKind::kLayernorm, "layernorm"},
    {LayerKind::kGelu, "gelu"},
    {LayerKind::kEmbedding, "embedding"},
}};

// Embedding layers read token ids from the graph input.
constexpr int kGraphInput = -2;

std::int64_t product(const std::vector<std::int64_t>& dims) {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::int64_t{1},
                         std::multiplies<>());
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::string dims_str(const std::vector<std::int64_t>& d) {
  std::string s = "[";
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(d[i]);
  }
  return s + "]";
}

[[noreturn]] void fail(size_t index, const LayerSpec& l, const std::string& what) {
  throw ConfigError("layer " + std::to_string(index) + " (" +
                    std::string(to_string(l.kind)) +
                    (l.name.empty() ? "" : " '" + l.name + "'") + "): " + what);
}

void check_shapes(size_t i, const LayerSpec& l) {
  auto all_pos = [](const std::vector<std::int64_t>& d) {
    return std::all_of(d.begin(), d.end(), [](std::int64_t v) { return v >= 1; });
  };
  if (l.input_dims.empty() || l.output_dims.empty())
    fail(i, l, "input and output dims are required");
  if (!all_pos(l.input_dims) || !all_pos(l.output_dims) ||
      !all_pos(l.weight_dims) || !all_pos(l.rhs_dims))
    fail(i, l, "all dims must be >= 1");
  if (l.stride < 1) fail(i, l, "stride must be >= 1");
  const bool has_weights = !l.weight_dims.empty();
  const auto& in = l.input_dims;
  const auto& out = l.output_dims;

  switch (l.kind) {
    case LayerKind::kMatmul: {
      if (has_weights == !l.rhs_dims.empty())
        fail(i, l, "matmul needs exactly one of weight dims or rhs dims");
      const std::int64_t k = in.back();
      if (has_weights) {
        const auto& w = l.weight_dims;
        if (w.size() != 2 || w[0] != k)
          fail(i, l, "weight " + dims_str(w) + " incompatible with input " + dims_str(in));
        auto expect = in;
        expect.back() = w[1];
        if (out != expect) fail(i, l, "output should be " + dims_str(expect));
      } else {
        const auto& r = l.rhs_dims;
        if (r.size() != in.size() || r.size() < 2 || r[r.size() - 2] != k ||
            !std::equal(in.begin(), in.end() - 2, r.begin()))
          fail(i, l, "rhs " + dims_str(r) + " incompatible with input " + dims_str(in));
        auto expect = in;
        expect.back() = r.back();
        if (out != expect) fail(i, l, "output should be " + dims_str(expect));
      }
      return;
    }
    case LayerKind::kConv2d: {
      const auto& w = l.weight_dims;
      if (in.size() != 3 || out.size() != 3 || w.size() != 4)
        fail(i, l, "conv2d expects [C,H,W] input/output and [Cout,Cin,Kh,Kw] weight");
      if (w[1] != in[0]) fail(i, l, "weight Cin does not match input channels");
      if (out[0] != w[0]) fail(i, l, "output channels do not match weight Cout");
      if (out[1] != ceil_div(in[1], l.stride) || out[2] != ceil_div(in[2], l.stride))
        fail(i, l, "output spatial size inconsistent with stride");
      return;
    }
    case LayerKind::kMaxpool:
    case LayerKind::kAvgpool:
      if (has_weights) fail(i, l, "pooling has no weights");
      if (in.size() != 3 || out.size() != 3 || out[0] != in[0])
        fail(i, l, "pooling expects [C,H,W] with matching channels");
      if (l.window < 1) fail(i, l, "pooling window must be >= 1");
      if (out[1] != ceil_div(in[1], l.stride) || out[2] != ceil_div(in[2], l.stride))
        fail(i, l, "output spatial size inconsistent with stride");
      return;
    case LayerKind::kRelu:
    case LayerKind::kGelu:
    case LayerKind::kSoftmax:
    case LayerKind::kLayernorm:
      if (has_weights) fail(i, l, "non-linear layers have no weights");
      if (out != in) fail(i, l, "output must equal input dims");
      return;
    case LayerKind::kMaxReduce: {
      if (has_weights) fail(i, l, "non-linear layers have no weights");
      auto expect = in;
      expect.back() = 1;
      if (out != expect) fail(i, l, "output should be " + dims_str(expect));
      return;
    }
    case LayerKind::kEmbedding: {
      const auto& w = l.weight_dims;
      if (in.size() != 1 || w.size() != 2)
        fail(i, l, "embedding expects [M] input and [V,D] weight");
      if (out != std::vector<std::int64_t>{in[0], w[1]})
        fail(i, l, "output should be [M,D]");
      return;
    }
  }
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw ConfigError("unknown layer kind '" + std::string(name) + "'");
}

bool is_linear(LayerKind k) {
  return k == LayerKind::kMatmul || k == LayerKind::kConv2d;
}

bool is_nonlinear(LayerKind k) {
  switch (k) {
    case LayerKind::kRelu:
    case LayerKind::kMaxpool:
    case LayerKind::kSoftmax:
    case LayerKind::kMaxReduce:
    case LayerKind::kLayernorm:
    case LayerKind::kGelu:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(ModelFamily f) {
  return f == ModelFamily::kCnn ? "cnn" : "transformer";
}

std::int64_t input_elems(const LayerSpec& l) { return product(l.input_dims); }
std::int64_t output_elems(const LayerSpec& l) { return product(l.output_dims); }
std::int64_t weight_elems(const LayerSpec& l) { return product(l.weight_dims); }
std::int64_t rhs_elems(const LayerSpec& l) { return product(l.rhs_dims); }

std::int64_t layer_macs(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::kMatmul: {
      const std::int64_t k = l.input_dims.back();
      return output_elems(l) * k;
    }
    case LayerKind::kConv2d: {
      const auto& w = l.weight_dims;
      return output_elems(l) * w[1] * w[2] * w[3];
    }
    default:
      return 0;
  }
}

std::int64_t layer_row_len(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::kSoftmax:
    case LayerKind::kMaxReduce:
    case LayerKind::kLayernorm:
      return l.input_dims.back();
    default:
      return 1;
  }
}

std::int64_t layer_rows(const LayerSpec& l) {
  return input_elems(l) / layer_row_len(l);
}

std::int64_t OpCounts::total_nonlinear() const {
  std::int64_t s = 0;
  for (const auto& [k, v] : nonlinear_elems) s += v;
  return s;
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  macs += o.macs;
  flops += o.flops;
  activation_bytes += o.activation_bytes;
  for (const auto& [k, v] : o.nonlinear_elems) nonlinear_elems[k] += v;
  return *this;
}

OpCounts layer_op_counts(const LayerSpec& l) {
  OpCounts c;
  c.macs = layer_macs(l);
  c.flops = l.kind == LayerKind::kMatmul ? 2 * c.macs : c.macs;
  if (is_nonlinear(l.kind)) c.nonlinear_elems[l.kind] = input_elems(l);
  if (l.kind != LayerKind::kEmbedding)
    c.activation_bytes = output_elems(l) * (kRingBits / 8);
  return c;
}

OpCounts model_op_counts(const ModelGraph& g) {
  validate_graph(g);
  OpCounts per_sample;
  for (const auto& l : g.layers) per_sample += layer_op_counts(l);
  OpCounts out;
  out.macs = per_sample.macs * g.batch;
  out.flops = per_sample.flops * g.batch;
  out.activation_bytes = per_sample.activation_bytes * g.batch;
  for (const auto& [k, v] : per_sample.nonlinear_elems)
    out.nonlinear_elems[k] = v * g.batch;
  return out;
}

void validate_graph(const ModelGraph& g) {
  if (g.batch < 1) throw ConfigError("batch must be >= 1");
  if (g.seq_len < 1) throw ConfigError("seq_len must be >= 1");
  std::int64_t params = 0;
  for (size_t i = 0; i < g.layers.size(); ++i) {
    const LayerSpec& l = g.layers[i];
    check_shapes(i, l);
    params += weight_elems(l);
    auto check_link = [&](int src, std::int64_t elems, const char* what) {
      if (src == kGraphInput) return;
      const int idx = src == -1 ? static_cast<int>(i) - 1 : src;
      if (idx < 0) return;  // first layer reads the graph input
      if (idx >= static_cast<int>(i))
        fail(i, l, std::string(what) + " source must precede the layer");
      const std::int64_t have = output_elems(g.layers[idx]);
      if (have != elems)
        fail(i, l, std::string(what) + " has " + std::to_string(elems) +
                       " elements but layer " + std::to_string(idx) + " produces " +
                       std::to_string(have));
    };
    if (l.kind != LayerKind::kEmbedding) check_link(l.source, input_elems(l), "input");
    if (!l.rhs_dims.empty()) check_link(l.rhs_source, rhs_elems(l), "rhs");
  }
  if (params != g.param_count)
    throw ConfigError("param_count " + std::to_string(g.param_count) +
                      " differs from summed weights " + std::to_string(params));
}

void finalize_graph(ModelGraph& g) {
  g.param_count = 0;
  for (const auto& l : g.layers) g.param_count += weight_elems(l);
  validate_graph(g);
}

// ---------------------------------------------------------------------------
// Builtin models

namespace {

class Builder {
 public:
  explicit Builder(ModelGraph& g) : g_(g) {}

  int add(LayerSpec l) {
    g_.layers.push_back(std::move(l));
    return static_cast<int>(g_.layers.size()) - 1;
  }
  int last() const { return static_cast<int>(g_.layers.size()) - 1; }

  int conv(std::int64_t cin, std::int64_t cout, std::int64_t k, std::int64_t h,
           std::int64_t stride, int source = -1, std::string name = "conv") {
    LayerSpec l;
    l.kind = LayerKind::kConv2d;
    l.name = std::move(name);
    l.input_dims = {cin, h, h};
    l.output_dims = {cout, ceil_div(h, stride), ceil_div(h, stride)};
    l.weight_dims = {cout, cin, k, k};
    l.stride = stride;
    l.source = source;
    return add(std::move(l));
  }
  int elementwise(LayerKind kind, std::vector<std::int64_t> dims, int source = -1) {
    LayerSpec l;
    l.kind = kind;
    l.name = std::string(to_string(kind));
    l.input_dims = dims;
    l.output_dims = std::move(dims);
    l.source = source;
    return add(std::move(l));
  }
  int pool(LayerKind kind, std::int64_t c, std::int64_t h, std::int64_t window,
           std::int64_t stride) {
    LayerSpec l;
    l.kind = kind;
    l.name = std::string(to_string(kind));
    l.input_dims = {c, h, h};
    l.output_dims = {c, ceil_div(h, stride), ceil_div(h, stride)};
    l.window = window;
    l.stride = stride;
    return add(std::move(l));
  }
  int dense(std::vector<std::int64_t> in, std::int64_t n, int source, std::string name) {
    LayerSpec l;
    l.kind = LayerKind::kMatmul;
    l.name = std::move(name);
    l.weight_dims = {in.back(), n};
    l.output_dims = in;
    l.output_dims.back() = n;
    l.input_dims = std::move(in);
    l.source = source;
    return add(std::move(l));
  }
  int act_matmul(std::vector<std::int64_t> in, std::vector<std::int64_t> rhs,
                 int source, int rhs_source, std::string name) {
    LayerSpec l;
    l.kind = LayerKind::kMatmul;
    l.name = std::move(name);
    l.output_dims = in;
    l.output_dims.back() = rhs.back();
    l.input_dims = std::move(in);
    l.rhs_dims = std::move(rhs);
    l.source = source;
    l.rhs_source = rhs_source;
    return add(std::move(l));
  }

 private:
  ModelGraph& g_;
};

ModelGraph resnet20(BuiltinOptions) {
  ModelGraph g;
  g.name = "resnet20";
  g.family = ModelFamily::kCnn;
  Builder b(g);
  b.conv(3, 16, 3, 32, 1, -1, "stem");
  b.elementwise(LayerKind::kRelu, {16, 32, 32});
  std::int64_t cin = 16, h = 32;
  for (std::int64_t c : {16, 32, 64}) {
    for (int blk = 0; blk < 3; ++blk) {
      const std::int64_t stride = (blk == 0 && c != 16) ? 2 : 1;
      b.conv(cin, c, 3, h, stride);
      h = ceil_div(h, stride);
      b.elementwise(LayerKind::kRelu, {c, h, h});
      b.conv(c, c, 3, h, 1);
      // Identity shortcut (zero-padded when downsampling) adds no layer.
      b.elementwise(LayerKind::kRelu, {c, h, h});
      cin = c;
    }
  }
  b.pool(LayerKind::kAvgpool, 64, 8, 8, 8);
  b.dense({1, 64}, 10, -1, "fc");
  return g;
}

ModelGraph resnet50(BuiltinOptions) {
  ModelGraph g;
  g.name = "resnet50";
  g.family = ModelFamily::kCnn;
  Builder b(g);
  b.conv(3, 64, 7, 224, 2, -1, "stem");
  b.elementwise(LayerKind::kRelu, {64, 112, 112});
  // Stem max pooling is replaced by average pooling.
  b.pool(LayerKind::kAvgpool, 64, 112, 3, 2);
  std::int64_t cin = 64, h = 56;
  const std::array<std::pair<std::int64_t, int>, 4> stages{
      {{64, 3}, {128, 4}, {256, 6}, {512, 3}}};
  for (size_t s = 0; s < stages.size(); ++s) {
    const auto [mid, blocks] = stages[s];
    for (int blk = 0; blk < blocks; ++blk) {
      const std::int64_t stride = (blk == 0 && s > 0) ? 2 : 1;
      const int block_in = b.last();
      const std::int64_t ho = ceil_div(h, stride);
      b.conv(cin, mid, 1, h, 1, block_in);
      b.elementwise(LayerKind::kRelu, {mid, h, h});
      b.conv(mid, mid, 3, h, stride);
      b.elementwise(LayerKind::kRelu, {mid, ho, ho});
      const int main = b.conv(mid, mid * 4, 1, ho, 1);
      if (blk == 0) b.conv(cin, mid * 4, 1, h, stride, block_in, "shortcut");
      b.elementwise(LayerKind::kRelu, {mid * 4, ho, ho}, main);
      cin = mid * 4;
      h = ho;
    }
  }
  b.pool(LayerKind::kAvgpool, 2048, 7, 7, 7);
  b.dense({1, 2048}, 1000, -1, "fc");
  return g;
}

ModelGraph bert(std::string name, int layers, std::int64_t hid, std::int64_t heads,
                std::int64_t ff, std::int64_t s, BuiltinOptions opts) {
  ModelGraph g;
  g.name = std::move(name);
  g.family = ModelFamily::kTransformer;
  g.seq_len = s;
  Builder b(g);
  const std::int64_t dh = hid / heads;
  for (auto [rows, label] : {std::pair<std::int64_t, const char*>{30522, "word_embedding"},
                             {512, "position_embedding"},
                             {2, "type_embedding"}}) {
    LayerSpec l;
    l.kind = LayerKind::kEmbedding;
    l.name = label;
    l.input_dims = {s};
    l.weight_dims = {rows, hid};
    l.output_dims = {s, hid};
    l.source = kGraphInput;
    b.add(std::move(l));
  }
  int x = b.last();
  for (int i = 0; i < layers; ++i) {
    const int q = b.dense({s, hid}, hid, x, "query");
    const int k = b.dense({s, hid}, hid, x, "key");
    const int v = b.dense({s, hid}, hid, x, "value");
    const int sc = b.act_matmul({heads, s, dh}, {heads, dh, s}, q, k, "attn_scores");
    if (opts.include_max) {
      LayerSpec m;
      m.kind = LayerKind::kMaxReduce;
      m.name = "attn_max";
      m.input_dims = {heads, s, s};
      m.output_dims = {heads, s, 1};
      m.source = sc;
      b.add(std::move(m));
    }
    const int sm = b.elementwise(LayerKind::kSoftmax, {heads, s, s}, sc);
    b.act_matmul({heads, s, s}, {heads, s, dh}, sm, v, "attn_apply");
    b.dense({s, hid}, hid, -1, "attn_out");
    b.elementwise(LayerKind::kLayernorm, {s, hid});
    b.dense({s, hid}, ff, -1, "ff_in");
    b.elementwise(LayerKind::kGelu, {s, ff});
    b.dense({s, ff}, hid, -1, "ff_out");
    x = b.elementwise(LayerKind::kLayernorm, {s, hid});
  }
  return g;
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  return {"bert_tiny", "bert_base", "resnet20", "resnet50"};
}

ModelGraph build_builtin_model(std::string_view name, std::int64_t seq_len,
                               std::int64_t batch, BuiltinOptions opts) {
  if (batch < 1) throw ConfigError("batch must be >= 1");
  ModelGraph g;
  if (name == "resnet20") {
    g = resnet20(opts);
  } else if (name == "resnet50") {
    g = resnet50(opts);
  } else if (name == "bert_tiny" || name == "bert_base") {
    if (seq_len < 1) throw ConfigError("seq_len must be >= 1");
    g = name == "bert_tiny" ? bert("bert_tiny", 2, 128, 2, 512, seq_len, opts)
                            : bert("bert_base", 12, 768, 12, 3072, seq_len, opts);
  } else {
    throw ConfigError("unknown model '" + std::string(name) + "'");
  }
  g.batch = batch;
  finalize_graph(g);
  return g;
}

// ---------------------------------------------------------------------------
// Text loader

namespace {

std::vector<std::int64_t> parse_dims(const std::string& v, const std::string& where) {
  std::vector<std::int64_t> dims;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      size_t used = 0;
      const long long d = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      dims.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad dimension list '" + v + "'");
    }
  }
  return dims;
}

int parse_int(const std::string& v, const std::string& where) {
  try {
    size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(where + ": bad integer '" + v + "'");
}

}  // namespace

ModelGraph load_model_text(const std::string& text, const std::string& origin,
                           std::int64_t batch) {
  ModelGraph g;
  g.batch = batch;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<int> layer_lines;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (head == "model") {
      std::string fam;
      if (!(fields >> g.name >> fam))
        throw ConfigError(where + ": expected 'model <name> <cnn|transformer> [seq_len]'");
      if (fam == "cnn") {
        g.family = ModelFamily::kCnn;
      } else if (fam == "transformer") {
        g.family = ModelFamily::kTransformer;
      } else {
        throw ConfigError(where + ": unknown family '" + fam + "'");
      }
      std::string sl;
      if (fields >> sl) g.seq_len = parse_int(sl, where);
      have_header = true;
      continue;
    }
    if (!have_header) throw ConfigError(where + ": 'model' header must come first");
    LayerSpec l;
    try {
      l.kind = parse_layer_kind(head);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    std::string kv;
    while (fields >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "in") {
        l.input_dims = parse_dims(val, where);
      } else if (key == "out") {
        l.output_dims = parse_dims(val, where);
      } else if (key == "w") {
        l.weight_dims = parse_dims(val, where);
      } else if (key == "rhs") {
        l.rhs_dims = parse_dims(val, where);
      } else if (key == "stride") {
        l.stride = parse_int(val, where);
      } else if (key == "window") {
        l.window = parse_int(val, where);
      } else if (key == "src") {
        l.source = parse_int(val, where);
      } else if (key == "rhs_src") {
        l.rhs_source = parse_int(val, where);
      } else if (key == "name") {
        l.name = val;
      } else {
        throw ConfigError(where + ": unknown layer field '" + key + "'");
      }
    }
    if (l.kind == LayerKind::kEmbedding) l.source = kGraphInput;
    g.layers.push_back(std::move(l));
    layer_lines.push_back(lineno);
  }
  if (!have_header) throw ConfigError(origin + ":1: missing 'model' header");
  try {
    finalize_graph(g);
  } catch (const ConfigError& e) {
    // Re-anchor "layer N (...)" diagnostics to the source line.
    std::string msg = e.what();
    if (msg.rfind("layer ", 0) == 0) {
      const size_t idx = std::stoul(msg.substr(6));
      if (idx < layer_lines.size())
        throw ConfigError(origin + ":" + std::to_string(layer_lines[idx]) + ": " + msg);
    }
    throw ConfigError(origin + ": " + msg);
  }
  return g;
}

ModelGraph load_model_file(const std::string& path, std::int64_t batch) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_model_text(ss.str(), path, batch);
}

}  // namespace ppml
