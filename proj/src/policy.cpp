#include "swarmcl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "swarmcl/rng.hpp"

namespace swarmcl {

PolicyDescriptor PolicyDescriptor::standard(std::size_t embed_dim, bool goal_features) {
  PolicyDescriptor d;
  d.embed_dim = embed_dim;
  d.encoder = {{4, embed_dim}, {embed_dim, embed_dim}};
  d.decoder = {{embed_dim + (goal_features ? 4 : 0), embed_dim}, {embed_dim, 2}};
  d.goal_features = goal_features;
  return d;
}

void PolicyDescriptor::validate() const {
  auto fail = [](const std::string& why) { throw std::invalid_argument("policy descriptor: " + why); };
  if (embed_dim == 0) fail("embedding dimension is zero");
  if (encoder.empty() || decoder.empty()) fail("encoder and decoder need at least one layer");
  for (const auto* layers : {&encoder, &decoder}) {
    for (const LayerShape& l : *layers) {
      if (l.in == 0 || l.out == 0) fail("zero-dimension layer");
    }
    for (std::size_t k = 1; k < layers->size(); ++k) {
      if ((*layers)[k].in != (*layers)[k - 1].out) fail("layer sizes do not chain");
    }
  }
  if (encoder.front().in != 4) fail("encoder input must be the 4-dim relative state");
  if (encoder.back().out != embed_dim) fail("encoder output must equal the embedding dimension");
  if (decoder.front().in != embed_dim + (goal_features ? 4 : 0)) {
    fail("decoder input must be the pooled embedding (plus 4 goal features when enabled)");
  }
  if (decoder.back().out != 2) fail("decoder output must be 2");
}

std::size_t PolicyDescriptor::parameter_count() const {
  auto layers = [](const std::vector<LayerShape>& ls) {
    return std::accumulate(ls.begin(), ls.end(), std::size_t{0},
                           [](std::size_t acc, const LayerShape& l) { return acc + l.parameter_count(); });
  };
  return layers(encoder) + embed_dim + layers(decoder);
}

PolicyParams init_params(const PolicyDescriptor& descriptor, std::uint64_t seed) {
  descriptor.validate();
  PolicyParams params{descriptor, {}};
  params.theta.reserve(descriptor.parameter_count());
  KeyedRng rng(hash_key({seed, 0x706f6c6963790000ULL}));
  auto weights = [&](std::size_t fan_in, std::size_t fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) params.theta.push_back(rng.uniform(-bound, bound));
  };
  auto layer = [&](const LayerShape& l) {
    weights(l.in, l.out);
    params.theta.insert(params.theta.end(), l.out, 0.0);
  };
  for (const LayerShape& l : descriptor.encoder) layer(l);
  weights(descriptor.embed_dim, 1);
  for (const LayerShape& l : descriptor.decoder) layer(l);
  return params;
}

PolicyParams zero_params(const PolicyDescriptor& descriptor) {
  descriptor.validate();
  return {descriptor, std::vector<double>(descriptor.parameter_count(), 0.0)};
}

// ---------------------------------------------------------------------------

PolicyGraph::PolicyGraph(const PolicyParams& params) { bind(params, nullptr); }

PolicyGraph::PolicyGraph(const PolicyParams& params, ad::Tape& tape) { bind(params, &tape); }

void PolicyGraph::bind(const PolicyParams& params, ad::Tape* tape) {
  params.descriptor.validate();
  if (params.theta.size() != params.descriptor.parameter_count()) {
    throw std::invalid_argument("policy: θ has " + std::to_string(params.theta.size()) +
                                " entries, descriptor needs " +
                                std::to_string(params.descriptor.parameter_count()));
  }
  descriptor_ = params.descriptor;
  std::size_t offset = 0;
  auto take = [&](ad::Shape shape) {
    const std::size_t count = ad::element_count(shape);
    ad::Tensor t(std::move(shape), std::vector<double>(params.theta.begin() + offset,
                                                       params.theta.begin() + offset + count));
    offset += count;
    return tape ? tape->variable(t) : t;
  };
  auto layers = [&](const std::vector<LayerShape>& shapes) {
    std::vector<Layer> out;
    for (const LayerShape& l : shapes) {
      ad::Tensor w = take({l.in, l.out});
      ad::Tensor b = take({l.out});
      out.push_back({std::move(w), std::move(b)});
    }
    return out;
  };
  encoder_ = layers(descriptor_.encoder);
  attention_ = take({descriptor_.embed_dim, 1});
  decoder_ = layers(descriptor_.decoder);
}

ad::Tensor PolicyGraph::encode(ad::Tensor x) const {
  for (const Layer& l : encoder_) x = ad::tanh(ad::bias_add(ad::matmul(x, l.weight), l.bias));
  return x;
}

ad::Tensor PolicyGraph::decode(ad::Tensor x, double u_max) const {
  for (std::size_t k = 0; k < decoder_.size(); ++k) {
    x = ad::bias_add(ad::matmul(x, decoder_[k].weight), decoder_[k].bias);
    if (k + 1 < decoder_.size()) x = ad::tanh(x);
  }
  return ad::scale(ad::tanh(x), u_max);
}

ad::Tensor PolicyGraph::controls(const DenseObservation& obs, double u_max) const {
  const std::size_t n = obs.mask.dim(0);
  const std::size_t h = descriptor_.embed_dim;
  if (descriptor_.goal_features != obs.goal_relative.has_value()) {
    throw std::invalid_argument("policy: goal features enabled/disabled mismatch with observation");
  }
  const ad::Tensor embed = encode(obs.relative);
  const ad::Tensor scores =
      ad::add(ad::reshape(ad::matmul(embed, attention_), {n, n}), obs.mask);
  const ad::Tensor weights = ad::softmax(scores);
  ad::Tensor pooled = ad::reshape(
      ad::batched_matmul(ad::reshape(weights, {n, 1, n}), ad::reshape(embed, {n, n, h})), {n, h});
  if (obs.goal_relative) pooled = ad::concat({pooled, *obs.goal_relative}, 1);
  return decode(std::move(pooled), u_max);
}

std::array<double, 2> PolicyGraph::control(const LocalObservation& obs, double u_max) const {
  const std::size_t d = obs.neighbors.size();
  if (d == 0 || obs.relative.size() != d) {
    throw std::invalid_argument("policy: observation must hold at least the self entry");
  }
  if (descriptor_.goal_features && !obs.goal_relative) {
    throw std::invalid_argument("policy: goal features enabled but observation has none");
  }
  // Canonical ascending-id order makes the result independent of entry order.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return obs.neighbors[a] < obs.neighbors[b]; });
  std::vector<double> rel;
  rel.reserve(4 * d);
  for (std::size_t idx : order) rel.insert(rel.end(), obs.relative[idx].begin(), obs.relative[idx].end());

  const ad::Tensor embed = encode(ad::Tensor({d, 4}, std::move(rel)));
  const ad::Tensor weights = ad::softmax(ad::reshape(ad::matmul(embed, attention_), {1, d}));
  ad::Tensor pooled = ad::matmul(weights, embed);
  if (descriptor_.goal_features) {
    const auto& g = *obs.goal_relative;
    pooled = ad::concat({pooled, ad::Tensor({1, 4}, {g[0], g[1], g[2], g[3]})}, 1);
  }
  const ad::Tensor u = decode(std::move(pooled), u_max);
  return {u[0], u[1]};
}

std::vector<double> PolicyGraph::gather_gradient(const ad::Gradients& grads) const {
  std::vector<double> out;
  out.reserve(descriptor_.parameter_count());
  auto append = [&](const ad::Tensor& t) {
    const ad::Tensor g = grads.wrt(t);
    out.insert(out.end(), g.data().begin(), g.data().end());
  };
  for (const Layer& l : encoder_) {
    append(l.weight);
    append(l.bias);
  }
  append(attention_);
  for (const Layer& l : decoder_) {
    append(l.weight);
    append(l.bias);
  }
  return out;
}

std::array<double, 2> policy_forward(const PolicyParams& params, const LocalObservation& obs,
                                     double u_max) {
  return PolicyGraph(params).control(obs, u_max);
}

}  // namespace swarmcl
