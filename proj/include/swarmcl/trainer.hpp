#pragma once

// Imitation training by backpropagation through closed-loop rollouts, with
// the horizon either scheduled by the curriculum or held fixed.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "swarmcl/adam.hpp"
#include "swarmcl/curriculum.hpp"
#include "swarmcl/experts.hpp"
#include "swarmcl/metrics.hpp"
#include "swarmcl/policy.hpp"

namespace swarmcl {

struct TrainConfig {
  Task task = Task::kNavigation;
  std::size_t steps = 5000;  // E; one optimizer step per sampled batch
  std::size_t batch = 32;    // L_b
  double lr = 0.005;
  double sigma = 0.0;        // perception noise during training
  std::uint64_t seed = 0;
  bool curriculum = true;
  std::size_t c_K = 1;
  std::size_t c_N = 150;
  std::size_t K_init = 1;
  std::size_t baseline_K = 5;
  std::size_t checkpoint_every = 0;  // 0: final checkpoint only
  std::size_t threads = 1;
  bool zero_init = false;
  PolicyDescriptor policy;

  void validate() const;
  // Horizon at step e for a dataset of horizon K.
  std::size_t horizon_at(std::size_t e, std::size_t dataset_K) const;
};

// Stable 32-bit digest of every field that influences training.
std::uint32_t config_hash(const TrainConfig& cfg);

struct CurvePoint {
  std::size_t step = 0;
  std::size_t horizon = 0;
  double loss = 0.0;
};

struct Checkpoint {
  PolicyParams params;
  AdamState adam;
  std::uint64_t step = 0;
  std::uint32_t config_hash = 0;

  bool operator==(const Checkpoint&) const = default;
};

struct BatchResult {
  double loss = 0.0;
  std::vector<double> gradient;
  std::vector<SubTrajectory> batch;
};

// L_e and dL_e/dθ for the batch drawn at training step e with horizon K_e.
// The batch and the perception noise are pure functions of (seed, e).
BatchResult batch_loss_and_gradient(const Dataset& data, const PolicyParams& params,
                                    std::size_t e, std::size_t horizon, const TrainConfig& cfg);

struct TrainResult {
  std::vector<CurvePoint> curve;
  std::vector<Checkpoint> checkpoints;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using StepCallback = std::function<void(const CurvePoint&)>;

TrainResult train(const Dataset& data, const TrainConfig& cfg, const StepCallback& on_step = {});

// Evaluation of a learned policy (never modifies `params`).
MetricsReport evaluate(const PolicyParams& params, const Dataset& testset,
                       const EvalOptions& options);

// The closed-loop prediction that `evaluate` scores for test trajectory
// `index`.
Trajectory evaluation_rollout(const PolicyParams& params, const Trajectory& expert,
                              std::size_t index, const EvalOptions& options);

// Replays the expert controller in closed loop; reproduces the stored
// demonstrations exactly when `cfg` matches the one used to generate them.
ControllerFactory expert_replay_factory(const ExpertConfig& cfg);

}  // namespace swarmcl
