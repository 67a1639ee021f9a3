#include "swarmcl/rollout.hpp"

#include <memory>
#include <stdexcept>

namespace swarmcl {

namespace {

std::span<const Vec2> policy_goals(const PolicyDescriptor& descriptor, const WorldSpec& world) {
  if (!descriptor.goal_features) return {};
  return world.goals;
}

}  // namespace

std::vector<ad::Tensor> rollout_on_tape(const PolicyGraph& graph, const ad::Tensor& x0,
                                        std::size_t horizon, const WorldSpec& world, double sigma,
                                        const NoiseStream& stream, RolloutKey key) {
  if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  std::vector<ad::Tensor> states;
  states.reserve(horizon + 1);
  states.push_back(x0);
  const auto goals = policy_goals(graph.descriptor(), world);
  for (std::size_t k = 0; k < horizon; ++k) {
    try {
      const ad::Tensor& x = states.back();
      const Adjacency adj = compute_adjacency(SwarmState::from_tensor(x), world);
      const DenseObservation obs = estimate_dense_observation(
          x, adj, sigma, stream, NoiseKey{key.epoch, key.trajectory, k}, goals);
      states.push_back(step(x, graph.controls(obs, world.u_max), world.dt));
    } catch (const ad::NonFiniteError& e) {
      throw NonFiniteStateError(k + 1, e.what());
    }
  }
  return states;
}

ControlFn policy_controller(const PolicyParams& params, const WorldSpec& world, double sigma,
                            const NoiseStream& stream, RolloutKey key) {
  auto graph = std::make_shared<const PolicyGraph>(params);
  return [graph, world, sigma, stream, key](const SwarmState& x, std::size_t k) {
    try {
      const Adjacency adj = compute_adjacency(x, world);
      const DenseObservation obs =
          estimate_dense_observation(x.to_tensor(), adj, sigma, stream,
                                     NoiseKey{key.epoch, key.trajectory, k},
                                     policy_goals(graph->descriptor(), world));
      const ad::Tensor u = graph->controls(obs, world.u_max);
      return std::vector<double>(u.data().begin(), u.data().end());
    } catch (const ad::NonFiniteError& e) {
      throw NonFiniteStateError(k, e.what());
    }
  };
}

Trajectory rollout(const PolicyParams& params, const SwarmState& x0, std::size_t horizon,
                   const WorldSpec& world, double sigma, const NoiseStream& stream,
                   RolloutKey key, Boundaries boundaries) {
  if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  return simulate(world, x0, horizon, policy_controller(params, world, sigma, stream, key),
                  boundaries);
}

}  // namespace swarmcl
