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

#ifndef LIFTSIM_NNFA_HPP_
#define LIFTSIM_NNFA_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace liftsim::nn {

enum class Activation { kRelu, kIdentity };

// Dense layer y = act(W x + b), W stored row-major as out x in.
struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;

  bool operator==(const Layer&) const = default;
};

struct NetworkParams {
  std::vector<Layer> layers;

  int input_size() const { return layers.empty() ? 0 : layers.front().in; }
  int output_size() const { return layers.empty() ? 0 : layers.back().out; }
  std::size_t parameter_count() const;

  bool operator==(const NetworkParams&) const = default;
};

// Checks shapes, the dimension chain, identity output and finiteness. Throws
// ConfigError naming the offending layer.
void validate(const NetworkParams& net);

// ReLU hidden layers, identity output. Glorot-uniform weights, zero biases.
NetworkParams init_network(std::span<const int> sizes, std::uint64_t seed);

// Per-layer activations recorded by forward_cached for backward.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;  // input to each layer
  std::vector<std::vector<double>> pre;     // W x + b of each layer
  std::vector<double> output;
};

std::vector<double> forward(const NetworkParams& net, std::span<const double> x);
void forward_cached(const NetworkParams& net, std::span<const double> x,
                    ForwardCache& cache);

struct LayerGrad {
  std::vector<double> weights;
  std::vector<double> bias;
};

struct Gradients {
  std::vector<LayerGrad> layers;

  static Gradients zeros_like(const NetworkParams& net);
  void add(const Gradients& other);
  void scale(double factor);
  double norm() const;
};

// Reverse-mode gradient of <upstream, forward(net, x)> w.r.t. all parameters.
Gradients backward(const NetworkParams& net, const ForwardCache& cache,
                   std::span<const double> upstream);
Gradients backward(const NetworkParams& net, std::span<const double> x,
                   std::span<const double> upstream);

// p <- p - lr * g. Rejects non-finite gradients before touching `net`, with
// the layer and flat index of the first bad entry.
void sgd_step(NetworkParams& net, const Gradients& grads, double lr);

// SGD with optional classical momentum; momentum 0 is plain sgd_step.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double momentum = 0.0) : lr_(lr), momentum_(momentum) {}
  void step(NetworkParams& net, const Gradients& grads);
  double learning_rate() const { return lr_; }

 private:
  double lr_;
  double momentum_;
  Gradients velocity_;
};

struct Checkpoint {
  NetworkParams net;
  std::string created = "1970-01-01T00:00:00Z";
  std::string config_hash;
  // Optional numeric stanza written as "encoder" (absent when empty).
  std::map<std::string, double> encoder;
};

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
std::string checkpoint_to_string(const Checkpoint& checkpoint);
// Throws ParseError/ConfigError on malformed input; never returns a partial
// network.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace liftsim::nn

#endif  // LIFTSIM_NNFA_HPP_
