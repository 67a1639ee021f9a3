#include "swarmcl/adam.hpp"

#include <cmath>
#include <string>

namespace swarmcl {

AdamState AdamState::fresh(std::size_t parameter_count, AdamHyperParams hyper) {
  AdamState s;
  s.hyper = hyper;
  s.m.assign(parameter_count, 0.0);
  s.v.assign(parameter_count, 0.0);
  return s;
}

NonFiniteGradient::NonFiniteGradient(std::size_t index, double value)
    : std::runtime_error("adam: non-finite gradient component " + std::to_string(value) +
                         " at index " + std::to_string(index)),
      index_(index) {}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw std::invalid_argument("adam: parameter, gradient and moment lengths differ");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) throw NonFiniteGradient(i, grads[i]);
  }

  const auto& h = state.hyper;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double m_corr = 1.0 - std::pow(h.beta1, t);
  const double v_corr = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
    state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
    const double m_hat = state.m[i] / m_corr;
    const double v_hat = state.v[i] / v_corr;
    params[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
}

}  // namespace swarmcl
