#pragma once

// Analytical demonstrators. Both tasks use the same potential-field law
// u_i = k_a (target_i - p_i) - k_d v_i + repulsion, clamped to u_max; the
// passage expert switches targets between waypoints around the opening.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swarmcl/world.hpp"

namespace swarmcl {

struct ExpertConfig {
  double k_attract = 1.0;
  double k_repulse = 0.5;
  double k_damp = 1.2;
  double safe_distance = 0.5;
  double waypoint_offset = 0.5;
  double switch_radius = 0.3;

  void validate(const WorldSpec& world) const;
  bool operator==(const ExpertConfig&) const = default;
};

class CoincidentRobotsError : public std::runtime_error {
 public:
  CoincidentRobotsError(std::size_t i, std::size_t j);
};

std::vector<double> navigation_expert(const SwarmState& state, const WorldSpec& world,
                                      const ExpertConfig& cfg);

// Which target the passage expert steers robot `i` toward.
enum class PassageStage { kPreWaypoint, kPostWaypoint, kGoal };

PassageStage passage_stage(Vec2 position, const WorldSpec& world, const ExpertConfig& cfg,
                           Vec2 goal);
Vec2 passage_target(Vec2 position, const WorldSpec& world, const ExpertConfig& cfg, Vec2 goal);

std::vector<double> passage_expert(const SwarmState& state, const WorldSpec& world,
                                   const ExpertConfig& cfg);

std::vector<double> expert_controls(const SwarmState& state, const WorldSpec& world,
                                    const ExpertConfig& cfg);

// Completion predicate: every robot within `tolerance` of its goal.
inline constexpr double kGoalTolerance = 0.25;
bool all_goals_reached(const SwarmState& state, const WorldSpec& world,
                       double tolerance = kGoalTolerance);

struct Dataset {
  // Shared geometry and dynamics; goals live in each trajectory's world.
  WorldSpec world;
  std::vector<Trajectory> trajectories;

  std::size_t robot_count() const {
    return trajectories.empty() ? 0 : trajectories.front().world.robot_count();
  }
  std::size_t horizon() const { return trajectories.empty() ? 0 : trajectories.front().horizon(); }
  std::size_t size() const { return trajectories.size(); }

  void validate() const;
  bool operator==(const Dataset&) const;
};

enum class Split : std::uint8_t { kTrain = 0, kTest = 1 };

struct DatasetSpec {
  Task task = Task::kNavigation;
  std::size_t robots = 6;
  std::size_t trajectories = 10;
  std::size_t horizon = 200;
  std::uint64_t seed = 0;
  Split split = Split::kTrain;
  double dt = 0.05;
  double arena_half_extent = 2.5;
  double comm_radius = 1.5;
  double u_max = 1.0;
  ExpertConfig expert;
  // Worker threads for episode generation; 0 picks the hardware count.
  std::size_t threads = 1;
};

inline constexpr std::size_t kMaxConsecutiveRejections = 100;

class InfeasibleDatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry shared by every episode of (task, seed): the wall opening is
// drawn once per seed so train and test splits see the same passage.
WorldSpec dataset_world(const DatasetSpec& spec);

// Initial state (at rest) and goals for episode attempt (index, attempt).
std::pair<SwarmState, std::vector<Vec2>> sample_episode(const DatasetSpec& spec,
                                                        const WorldSpec& world,
                                                        std::size_t index, std::size_t attempt);

Dataset generate_dataset(const DatasetSpec& spec);

}  // namespace swarmcl
