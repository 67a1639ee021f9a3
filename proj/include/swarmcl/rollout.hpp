#pragma once

// Closed-loop rollouts of the learned policy: adjacency -> perception ->
// policy -> step, repeated over the horizon.

#include <cstdint>
#include <vector>

#include "swarmcl/perception.hpp"
#include "swarmcl/policy.hpp"
#include "swarmcl/world.hpp"

namespace swarmcl {

// Key prefix for every observation drawn in one rollout.
struct RolloutKey {
  std::uint64_t epoch = 0;
  std::uint64_t trajectory = 0;
};

// Differentiable, boundary-free rollout recorded on the active tape of
// `graph`. Returns horizon + 1 states ([n x 4]); element 0 is x0 itself.
std::vector<ad::Tensor> rollout_on_tape(const PolicyGraph& graph, const ad::Tensor& x0,
                                        std::size_t horizon, const WorldSpec& world, double sigma,
                                        const NoiseStream& stream, RolloutKey key);

// Controller wrapping the policy for numeric simulation.
ControlFn policy_controller(const PolicyParams& params, const WorldSpec& world, double sigma,
                            const NoiseStream& stream, RolloutKey key);

Trajectory rollout(const PolicyParams& params, const SwarmState& x0, std::size_t horizon,
                   const WorldSpec& world, double sigma, const NoiseStream& stream,
                   RolloutKey key, Boundaries boundaries = Boundaries::kResolve);

}  // namespace swarmcl
