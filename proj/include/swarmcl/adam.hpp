#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace swarmcl {

struct AdamHyperParams {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamHyperParams&) const = default;
};

struct AdamState {
  AdamHyperParams hyper;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  static AdamState fresh(std::size_t parameter_count, AdamHyperParams hyper = {});

  bool operator==(const AdamState&) const = default;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(std::size_t index, double value);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// One bias-corrected Adam update, in place. Parameters are left untouched if
// any gradient component is non-finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace swarmcl
