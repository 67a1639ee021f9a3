#pragma once

// Trajectory-length curriculum: sub-trajectory sampling as the difficulty
// measure, a baby-step horizon schedule, and the horizon-normalised loss.

#include <cstddef>
#include <span>
#include <vector>

#include "swarmcl/autodiff.hpp"
#include "swarmcl/rng.hpp"
#include "swarmcl/world.hpp"

namespace swarmcl {

struct BabyStepSchedule {
  std::size_t c_K = 1;        // horizon increment per stage
  std::size_t c_N = 150;      // training steps per stage
  std::size_t K_init = 1;
  std::size_t K_max = 200;

  void validate() const;
  // Horizon used at training step e (1-based).
  std::size_t horizon(std::size_t e) const;
};

// K_e = min(K_max, K_init + c_K * floor((e - 1) / c_N)), e >= 1.
std::size_t scheduler_horizon(std::size_t e, std::size_t c_K, std::size_t c_N,
                              std::size_t K_init, std::size_t K_max);

struct SubTrajectory {
  std::size_t source = 0;
  std::size_t start = 0;  // k0
  std::vector<SwarmState> states;  // K_e + 1 samples

  std::size_t horizon() const { return states.size() - 1; }
};

// k0 uniform over {0, ..., K - K_e}.
SubTrajectory sample_subtrajectory(const Trajectory& traj, std::size_t source,
                                   std::size_t horizon, KeyedRng& rng);

// One rollout's share of L_e: (1 / (K_e L_b)) Σ_{k=0}^{K_e} ||x(kT) - x̄(kT)||².
double curriculum_loss_term(std::span<const SwarmState> predicted,
                            std::span<const SwarmState> expert, std::size_t batch_size);

// Batch L_e with L_b = predicted.size().
double curriculum_loss(std::span<const std::vector<SwarmState>> predicted,
                       std::span<const std::vector<SwarmState>> expert);

// Tape version of curriculum_loss_term. `predicted[k]` is [n x 4].
ad::Tensor curriculum_loss_term(std::span<const ad::Tensor> predicted,
                                std::span<const SwarmState> expert, std::size_t batch_size);

}  // namespace swarmcl
