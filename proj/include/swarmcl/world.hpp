#pragma once

// 2D double-integrator swarm: state layout, task geometry, communication
// graph and stepping.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmcl/autodiff.hpp"

namespace swarmcl {

enum class Task : std::uint8_t { kNavigation = 0, kPassage = 1 };

std::string to_string(Task task);
Task parse_task(const std::string& name);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

// Fixed collision radius of every robot (m). Not persisted with datasets.
inline constexpr double kRobotRadius = 0.1;

// Horizontal wall across the arena with a single opening.
struct Wall {
  double y = 0.0;
  double gap_center = 0.0;
  double gap_half_width = 0.35;
  double thickness = 0.1;

  bool operator==(const Wall&) const = default;
};

struct WorldSpec {
  Task task = Task::kNavigation;
  double arena_half_extent = 2.5;
  std::optional<Wall> wall;
  std::vector<Vec2> goals;
  double comm_radius = 1.5;
  double dt = 0.05;
  double u_max = 1.0;

  std::size_t robot_count() const { return goals.size(); }
  // Throws std::invalid_argument when the geometry is inconsistent.
  void validate() const;

  bool operator==(const WorldSpec&) const = default;
};

// Stacked per-robot [px, py, vx, vy].
class SwarmState {
 public:
  SwarmState() = default;
  explicit SwarmState(std::size_t robots) : values_(4 * robots, 0.0) {}
  explicit SwarmState(std::vector<double> values);

  static SwarmState from_tensor(const ad::Tensor& t);
  // [n x 4], untracked.
  ad::Tensor to_tensor() const;

  std::size_t robot_count() const { return values_.size() / 4; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Vec2 position(std::size_t i) const { return {values_[4 * i], values_[4 * i + 1]}; }
  Vec2 velocity(std::size_t i) const { return {values_[4 * i + 2], values_[4 * i + 3]}; }
  void set_position(std::size_t i, Vec2 p);
  void set_velocity(std::size_t i, Vec2 v);

  bool all_finite() const;

  bool operator==(const SwarmState&) const = default;

 private:
  std::vector<double> values_;
};

class Adjacency {
 public:
  explicit Adjacency(std::size_t robots) : n_(robots), bits_(robots * robots, 0) {}

  std::size_t robot_count() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool linked) { bits_[i * n_ + j] = linked ? 1 : 0; }
  // Ascending ids, self included.
  std::vector<std::size_t> neighbors(std::size_t i) const;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

struct Trajectory {
  WorldSpec world;
  std::vector<SwarmState> samples;
  // Applied controls per step (K entries of 2n values) when recorded.
  std::vector<std::vector<double>> controls;

  std::size_t horizon() const { return samples.empty() ? 0 : samples.size() - 1; }
  void validate() const;
};

class NonFiniteStateError : public std::runtime_error {
 public:
  NonFiniteStateError(std::size_t step, const std::string& what);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Closed-ball disk graph with self-loops.
Adjacency compute_adjacency(const SwarmState& state, const WorldSpec& world);

enum class Boundaries { kIgnore, kResolve };

// Semi-implicit Euler: v' = v + u T, p' = p + v' T. Controls are clamped
// componentwise to [-u_max, u_max]. With kResolve, arena edges and the wall
// stop the robot: position projected to the contact face, normal velocity
// zeroed.
SwarmState step(const SwarmState& state, std::span<const double> controls,
                const WorldSpec& world, Boundaries boundaries = Boundaries::kResolve);

// Differentiable boundary-free step on [n x 4] state and [n x 2] controls.
ad::Tensor step(const ad::Tensor& state, const ad::Tensor& controls, double dt);

// Maps (state, step index) to 2n controls.
using ControlFn = std::function<std::vector<double>(const SwarmState&, std::size_t)>;

// Closed-loop simulation for K steps; the result holds K + 1 samples and the
// applied (clamped) controls.
Trajectory simulate(const WorldSpec& world, const SwarmState& x0, std::size_t horizon,
                    const ControlFn& controller, Boundaries boundaries = Boundaries::kResolve);

// Resolves contact of a robot that moved from `previous` to `next`.
void resolve_boundaries(const WorldSpec& world, Vec2 previous, Vec2& next, Vec2& velocity);

// Unordered robot pairs closer than two robot radii.
std::size_t count_overlaps(const SwarmState& state);

}  // namespace swarmcl
