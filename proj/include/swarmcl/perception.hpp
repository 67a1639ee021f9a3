#pragma once

// Egocentric observation estimated from the global state: neighbours from
// the adjacency row, relative states x_j - x_i, plus i.i.d. Gaussian noise.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swarmcl/autodiff.hpp"
#include "swarmcl/world.hpp"

namespace swarmcl {

struct NoiseKey {
  std::uint64_t epoch = 0;
  std::uint64_t trajectory = 0;
  std::uint64_t step = 0;
};

// Pseudo-neighbour slot holding the goal-relative entry.
inline constexpr std::uint64_t kGoalSlot = ~std::uint64_t{0};

class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

  // Standard normal draw; identical keys give identical values.
  double standard_normal(const NoiseKey& key, std::uint64_t robot, std::uint64_t slot,
                         std::uint64_t component) const;

 private:
  std::uint64_t seed_;
};

using RelativeState = std::array<double, 4>;

struct LocalObservation {
  std::size_t robot = 0;
  std::vector<std::size_t> neighbors;
  std::vector<RelativeState> relative;
  // [g_i - p_i, -v_i] when goal features are enabled.
  std::optional<RelativeState> goal_relative;

  std::size_t dimension() const { return 4 * neighbors.size(); }
};

// `goal` enables the goal-relative entry.
LocalObservation estimate_observation(const SwarmState& state, std::size_t robot,
                                      const Adjacency& adjacency, double sigma,
                                      const NoiseStream& stream, const NoiseKey& key,
                                      std::optional<Vec2> goal = std::nullopt);

// All robots at once, differentiable in `state` ([n x 4]).
struct DenseObservation {
  // [n*n x 4]; row i*n + j holds x_j - x_i (+ noise). Rows of non-neighbours
  // carry no noise and are masked out.
  ad::Tensor relative;
  // [n x n]; 0 for neighbours, kMaskedScore otherwise.
  ad::Tensor mask;
  // [n x 4] when goals were supplied.
  std::optional<ad::Tensor> goal_relative;
};

inline constexpr double kMaskedScore = -1e9;

DenseObservation estimate_dense_observation(const ad::Tensor& state, const Adjacency& adjacency,
                                            double sigma, const NoiseStream& stream,
                                            const NoiseKey& key, std::span<const Vec2> goals);

}  // namespace swarmcl
