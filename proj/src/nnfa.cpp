// Copyright 2026 The liftsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "liftsim/nnfa.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "liftsim/error.hpp"
#include "liftsim/rng.hpp"

namespace liftsim::nn {

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void validate(const NetworkParams& net) {
  if (net.layers.empty()) throw ConfigError("network has no layers");
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& l = net.layers[k];
    const std::string name = "layer " + std::to_string(k);
    if (l.in < 1 || l.out < 1) throw ConfigError(name + ": dimensions must be >= 1");
    if (l.weights.size() != static_cast<std::size_t>(l.in) * l.out) {
      throw ConfigError(name + ": weight count " + std::to_string(l.weights.size()) +
                        " != in*out " + std::to_string(l.in * l.out));
    }
    if (l.bias.size() != static_cast<std::size_t>(l.out)) {
      throw ConfigError(name + ": bias count != out");
    }
    if (k > 0 && net.layers[k - 1].out != l.in) {
      throw ConfigError("dimension chain broken between layer " +
                        std::to_string(k - 1) + " (out " +
                        std::to_string(net.layers[k - 1].out) + ") and layer " +
                        std::to_string(k) + " (in " + std::to_string(l.in) + ")");
    }
    for (double v : l.weights) {
      if (!std::isfinite(v)) throw ConfigError(name + ": non-finite weight");
    }
    for (double v : l.bias) {
      if (!std::isfinite(v)) throw ConfigError(name + ": non-finite bias");
    }
  }
  if (net.layers.back().activation != Activation::kIdentity) {
    throw ConfigError("final layer must use the identity activation");
  }
}

NetworkParams init_network(std::span<const int> sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw ConfigError("network needs at least two sizes");
  Rng rng(seed);
  NetworkParams net;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    Layer l;
    l.in = sizes[k];
    l.out = sizes[k + 1];
    if (l.in < 1 || l.out < 1) throw ConfigError("layer sizes must be >= 1");
    l.activation = k + 2 == sizes.size() ? Activation::kIdentity : Activation::kRelu;
    const double limit = std::sqrt(6.0 / (l.in + l.out));
    l.weights.resize(static_cast<std::size_t>(l.in) * l.out);
    for (double& w : l.weights) w = (2.0 * rng.uniform01() - 1.0) * limit;
    l.bias.assign(static_cast<std::size_t>(l.out), 0.0);
    net.layers.push_back(std::move(l));
  }
  return net;
}

namespace {

void check_input(const NetworkParams& net, std::size_t n) {
  if (net.layers.empty()) throw InvalidArgument("forward: empty network");
  if (n != static_cast<std::size_t>(net.input_size())) {
    throw InvalidArgument("forward: input has " + std::to_string(n) +
                          " entries, network expects " +
                          std::to_string(net.input_size()));
  }
}

void affine(const Layer& l, std::span<const double> x, std::vector<double>& pre) {
  pre.resize(static_cast<std::size_t>(l.out));
  for (int o = 0; o < l.out; ++o) {
    const double* row = l.weights.data() + static_cast<std::size_t>(o) * l.in;
    double acc = l.bias[o];
    for (int i = 0; i < l.in; ++i) acc += row[i] * x[i];
    pre[o] = acc;
  }
}

void activate(Activation act, std::vector<double>& v) {
  if (act == Activation::kRelu) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
  }
}

}  // namespace

std::vector<double> forward(const NetworkParams& net, std::span<const double> x) {
  check_input(net, x.size());
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (const Layer& l : net.layers) {
    affine(l, current, next);
    activate(l.activation, next);
    current.swap(next);
  }
  return current;
}

void forward_cached(const NetworkParams& net, std::span<const double> x,
                    ForwardCache& cache) {
  check_input(net, x.size());
  const std::size_t n = net.layers.size();
  cache.inputs.resize(n);
  cache.pre.resize(n);
  cache.inputs[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < n; ++k) {
    const Layer& l = net.layers[k];
    affine(l, cache.inputs[k], cache.pre[k]);
    std::vector<double>& out = k + 1 < n ? cache.inputs[k + 1] : cache.output;
    out = cache.pre[k];
    activate(l.activation, out);
  }
}

Gradients Gradients::zeros_like(const NetworkParams& net) {
  Gradients g;
  g.layers.reserve(net.layers.size());
  for (const Layer& l : net.layers) {
    g.layers.push_back({std::vector<double>(l.weights.size(), 0.0),
                        std::vector<double>(l.bias.size(), 0.0)});
  }
  return g;
}

void Gradients::add(const Gradients& other) {
  if (other.layers.size() != layers.size()) {
    throw InvalidArgument("Gradients::add: layer count mismatch");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& w = layers[k].weights;
    auto& b = layers[k].bias;
    const auto& ow = other.layers[k].weights;
    const auto& ob = other.layers[k].bias;
    if (ow.size() != w.size() || ob.size() != b.size()) {
      throw InvalidArgument("Gradients::add: shape mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += ob[i];
  }
}

void Gradients::scale(double factor) {
  for (LayerGrad& l : layers) {
    for (double& v : l.weights) v *= factor;
    for (double& v : l.bias) v *= factor;
  }
}

double Gradients::norm() const {
  double sum = 0.0;
  for (const LayerGrad& l : layers) {
    for (double v : l.weights) sum += v * v;
    for (double v : l.bias) sum += v * v;
  }
  return std::sqrt(sum);
}

Gradients backward(const NetworkParams& net, const ForwardCache& cache,
                   std::span<const double> upstream) {
  if (upstream.size() != static_cast<std::size_t>(net.output_size())) {
    throw InvalidArgument("backward: upstream gradient has " +
                          std::to_string(upstream.size()) + " entries, network has " +
                          std::to_string(net.output_size()) + " outputs");
  }
  if (cache.pre.size() != net.layers.size()) {
    throw InvalidArgument("backward: cache does not match network");
  }
  Gradients grads = Gradients::zeros_like(net);
  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> below;
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const Layer& l = net.layers[k];
    const std::vector<double>& pre = cache.pre[k];
    if (l.activation == Activation::kRelu) {
      for (int o = 0; o < l.out; ++o) {
        if (!(pre[o] > 0.0)) delta[o] = 0.0;
      }
    }
    const std::vector<double>& x = cache.inputs[k];
    LayerGrad& g = grads.layers[k];
    below.assign(static_cast<std::size_t>(l.in), 0.0);
    for (int o = 0; o < l.out; ++o) {
      const double d = delta[o];
      g.bias[o] = d;
      if (d == 0.0) continue;
      const std::size_t row = static_cast<std::size_t>(o) * l.in;
      for (int i = 0; i < l.in; ++i) {
        g.weights[row + i] = d * x[i];
        below[i] += l.weights[row + i] * d;
      }
    }
    delta.swap(below);
  }
  return grads;
}

Gradients backward(const NetworkParams& net, std::span<const double> x,
                   std::span<const double> upstream) {
  ForwardCache cache;
  forward_cached(net, x, cache);
  return backward(net, cache, upstream);
}

namespace {

void check_gradients(const NetworkParams& net, const Gradients& grads) {
  if (grads.layers.size() != net.layers.size()) {
    throw InvalidArgument("gradient layer count does not match network");
  }
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const LayerGrad& g = grads.layers[k];
    if (g.weights.size() != net.layers[k].weights.size() ||
        g.bias.size() != net.layers[k].bias.size()) {
      throw InvalidArgument("gradient shape does not match layer " + std::to_string(k));
    }
    for (std::size_t i = 0; i < g.weights.size(); ++i) {
      if (!std::isfinite(g.weights[i])) {
        throw NumericError("non-finite weight gradient at layer " + std::to_string(k) +
                           " index " + std::to_string(i));
      }
    }
    for (std::size_t i = 0; i < g.bias.size(); ++i) {
      if (!std::isfinite(g.bias[i])) {
        throw NumericError("non-finite bias gradient at layer " + std::to_string(k) +
                           " index " + std::to_string(i));
      }
    }
  }
}

}  // namespace

void sgd_step(NetworkParams& net, const Gradients& grads, double lr) {
  if (!(lr > 0.0)) throw InvalidArgument("sgd_step: learning rate must be > 0");
  check_gradients(net, grads);
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    Layer& l = net.layers[k];
    const LayerGrad& g = grads.layers[k];
    for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights[i] -= lr * g.weights[i];
    for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] -= lr * g.bias[i];
  }
}

void SgdOptimizer::step(NetworkParams& net, const Gradients& grads) {
  if (momentum_ == 0.0) {
    sgd_step(net, grads, lr_);
    return;
  }
  check_gradients(net, grads);
  if (velocity_.layers.empty()) velocity_ = Gradients::zeros_like(net);
  velocity_.scale(momentum_);
  velocity_.add(grads);
  sgd_step(net, velocity_, lr_);
}

// ---------------------------------------------------------------------------
// Checkpoints

using nlohmann::json;

namespace {

json encoder_json(const std::map<std::string, double>& encoder) {
  json out = json::object();
  for (const auto& [key, value] : encoder) {
    if (std::nearbyint(value) == value && std::abs(value) < 9.0e15) {
      out[key] = static_cast<std::int64_t>(value);
    } else {
      out[key] = value;
    }
  }
  return out;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& checkpoint) {
  validate(checkpoint.net);
  json layers = json::array();
  for (const Layer& l : checkpoint.net.layers) {
    layers.push_back({{"in", l.in},
                      {"out", l.out},
                      {"w", l.weights},
                      {"b", l.bias},
                      {"act", l.activation == Activation::kRelu ? "relu" : "id"}});
  }
  json doc;
  doc["layers"] = std::move(layers);
  doc["meta"] = {{"created", checkpoint.created},
                 {"config_hash", checkpoint.config_hash}};
  if (!checkpoint.encoder.empty()) doc["encoder"] = encoder_json(checkpoint.encoder);
  return doc.dump() + "\n";
}

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  out << checkpoint_to_string(checkpoint);
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw ConfigError("checkpoint schema: " + what);
}

}  // namespace

Checkpoint load_checkpoint(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid checkpoint JSON: ") + e.what(), 1, e.byte);
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    schema_error("missing \"layers\" array");
  }
  Checkpoint out;
  const json& layers = doc["layers"];
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const json& jl = layers[k];
    const std::string name = "layer " + std::to_string(k);
    if (!jl.is_object()) schema_error(name + " is not an object");
    for (const char* field : {"in", "out", "w", "b", "act"}) {
      if (!jl.contains(field)) schema_error(name + " lacks \"" + field + "\"");
    }
    if (!jl["in"].is_number_integer() || !jl["out"].is_number_integer()) {
      schema_error(name + ": in/out must be integers");
    }
    if (!jl["w"].is_array() || !jl["b"].is_array()) {
      schema_error(name + ": w/b must be arrays");
    }
    Layer l;
    l.in = jl["in"].get<int>();
    l.out = jl["out"].get<int>();
    for (const json& v : jl["w"]) {
      if (!v.is_number()) schema_error(name + ": non-numeric weight");
      l.weights.push_back(v.get<double>());
    }
    for (const json& v : jl["b"]) {
      if (!v.is_number()) schema_error(name + ": non-numeric bias");
      l.bias.push_back(v.get<double>());
    }
    const std::string act = jl["act"].is_string() ? jl["act"].get<std::string>() : "";
    if (act == "relu") {
      l.activation = Activation::kRelu;
    } else if (act == "id") {
      l.activation = Activation::kIdentity;
    } else {
      schema_error(name + ": act must be \"relu\" or \"id\"");
    }
    out.net.layers.push_back(std::move(l));
  }
  validate(out.net);
  if (doc.contains("meta") && doc["meta"].is_object()) {
    const json& meta = doc["meta"];
    if (meta.contains("created") && meta["created"].is_string()) {
      out.created = meta["created"].get<std::string>();
    }
    if (meta.contains("config_hash") && meta["config_hash"].is_string()) {
      out.config_hash = meta["config_hash"].get<std::string>();
    }
  }
  if (doc.contains("encoder")) {
    if (!doc["encoder"].is_object()) schema_error("\"encoder\" must be an object");
    for (const auto& [key, value] : doc["encoder"].items()) {
      if (!value.is_number()) schema_error("encoder." + key + " must be numeric");
      out.encoder[key] = value.get<double>();
    }
  }
  return out;
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace liftsim::nn
