#pragma once

// Shared distributed policy: per-neighbour encoder, attention pooling over
// the neighbourhood, decoder to a bounded 2D control.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swarmcl/autodiff.hpp"
#include "swarmcl/perception.hpp"

namespace swarmcl {

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;

  std::size_t parameter_count() const { return in * out + out; }
  bool operator==(const LayerShape&) const = default;
};

struct PolicyDescriptor {
  std::size_t embed_dim = 16;
  std::vector<LayerShape> encoder{{4, 16}, {16, 16}};
  std::vector<LayerShape> decoder{{16, 16}, {16, 2}};
  // Decoder additionally receives the 4-dim goal-relative entry.
  bool goal_features = false;

  // Default architecture for a given embedding width.
  static PolicyDescriptor standard(std::size_t embed_dim, bool goal_features);

  // Throws std::invalid_argument for zero-sized or non-chaining layers.
  void validate() const;
  std::size_t parameter_count() const;

  bool operator==(const PolicyDescriptor&) const = default;
};

struct PolicyParams {
  PolicyDescriptor descriptor;
  std::vector<double> theta;

  bool operator==(const PolicyParams&) const = default;
};

// Weights (and the attention vector, as an [h x 1] weight) uniform in
// ±sqrt(6 / (fan_in + fan_out)); biases zero.
PolicyParams init_params(const PolicyDescriptor& descriptor, std::uint64_t seed);

PolicyParams zero_params(const PolicyDescriptor& descriptor);

// The parameter vector viewed as layer tensors. Bound to a tape, every
// tensor is a variable and gradients can be gathered back into θ layout.
class PolicyGraph {
 public:
  // Untracked constants (plain evaluation).
  explicit PolicyGraph(const PolicyParams& params);
  // Tape variables.
  PolicyGraph(const PolicyParams& params, ad::Tape& tape);

  const PolicyDescriptor& descriptor() const { return descriptor_; }

  // Controls for every robot, [n x 2].
  ad::Tensor controls(const DenseObservation& obs, double u_max) const;

  // Control for one robot from its own observation.
  std::array<double, 2> control(const LocalObservation& obs, double u_max) const;

  // Gradient in θ layout.
  std::vector<double> gather_gradient(const ad::Gradients& grads) const;

 private:
  struct Layer {
    ad::Tensor weight;  // [in x out]
    ad::Tensor bias;    // [out]
  };

  void bind(const PolicyParams& params, ad::Tape* tape);
  ad::Tensor encode(ad::Tensor x) const;
  ad::Tensor decode(ad::Tensor x, double u_max) const;

  PolicyDescriptor descriptor_;
  std::vector<Layer> encoder_;
  ad::Tensor attention_;  // [h x 1]
  std::vector<Layer> decoder_;
};

// Single-robot evaluation of π_θ(y_i).
std::array<double, 2> policy_forward(const PolicyParams& params, const LocalObservation& obs,
                                     double u_max);

}  // namespace swarmcl
