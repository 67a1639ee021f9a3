#pragma once

// Evaluation metrics over predicted vs demonstrated trajectories.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "swarmcl/experts.hpp"
#include "swarmcl/world.hpp"

namespace swarmcl {

// (1 / (K L)) Σ_l Σ_{k=0}^{K} ||x^l(kT) - x̄^l(kT)||² over full stacked states.
double traj_loss(std::span<const Trajectory> predicted, std::span<const Trajectory> expert);
double traj_loss(const Trajectory& predicted, const Trajectory& expert);

// (1 / (K L)) Σ_l Σ_k (1/n) Σ_i ||p_i - p̄_i||.
double mean_position_error(std::span<const Trajectory> predicted,
                           std::span<const Trajectory> expert);
double mean_position_error(const Trajectory& predicted, const Trajectory& expert);

// Discrete Fréchet distance between two sampled paths.
double frechet(std::span<const Vec2> a, std::span<const Vec2> b);

enum class FrechetAggregation { kMean, kMax };

std::vector<Vec2> robot_path(const Trajectory& traj, std::size_t robot);

// Per-robot Fréchet distances aggregated over robots.
double trajectory_frechet(const Trajectory& predicted, const Trajectory& expert,
                          FrechetAggregation aggregation = FrechetAggregation::kMean);

// Robots whose final position lies within `tolerance` of the goal (closed).
std::size_t tasks_completed(const Trajectory& predicted, std::span<const Vec2> goals,
                            double tolerance = kGoalTolerance);

struct TrajectoryMetrics {
  double loss = 0.0;
  double position_error = 0.0;
  double frechet = 0.0;
  double completed = 0.0;  // mean when aggregated
  double overlaps = 0.0;   // overlapping robot pairs summed over samples
};

struct MetricsReport {
  std::vector<TrajectoryMetrics> per_trajectory;
  TrajectoryMetrics mean;
  double sigma = 0.0;
  std::size_t test_size = 0;
  std::size_t robots = 0;
};

TrajectoryMetrics trajectory_metrics(const Trajectory& predicted, const Trajectory& expert,
                                     FrechetAggregation aggregation = FrechetAggregation::kMean);

// Given the index of a test trajectory, returns the controller to run on it.
using ControllerFactory = std::function<ControlFn(std::size_t index, const WorldSpec& world)>;

struct EvalOptions {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  FrechetAggregation aggregation = FrechetAggregation::kMean;
  std::size_t threads = 1;
};

// Closed-loop rollouts from every test x̄(0) over the full horizon.
MetricsReport evaluate_controller(const ControllerFactory& factory, const Dataset& testset,
                                  const EvalOptions& options);

}  // namespace swarmcl
