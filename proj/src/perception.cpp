#include "swarmcl/perception.hpp"

#include <stdexcept>

#include "swarmcl/rng.hpp"

namespace swarmcl {

double NoiseStream::standard_normal(const NoiseKey& key, std::uint64_t robot, std::uint64_t slot,
                                    std::uint64_t component) const {
  KeyedRng rng(hash_key({seed_, key.epoch, key.trajectory, key.step, robot, slot, component}));
  return rng.normal();
}

LocalObservation estimate_observation(const SwarmState& state, std::size_t robot,
                                      const Adjacency& adjacency, double sigma,
                                      const NoiseStream& stream, const NoiseKey& key,
                                      std::optional<Vec2> goal) {
  if (sigma < 0.0) throw std::invalid_argument("perception: sigma must be >= 0");
  const auto xi = state.values().subspan(4 * robot, 4);
  LocalObservation obs;
  obs.robot = robot;
  obs.neighbors = adjacency.neighbors(robot);
  obs.relative.reserve(obs.neighbors.size());
  for (std::size_t j : obs.neighbors) {
    const auto xj = state.values().subspan(4 * j, 4);
    RelativeState r{};
    for (std::size_t c = 0; c < 4; ++c) {
      r[c] = xj[c] - xi[c];
      if (sigma > 0.0) r[c] += sigma * stream.standard_normal(key, robot, j, c);
    }
    obs.relative.push_back(r);
  }
  if (goal) {
    RelativeState g{goal->x - xi[0], goal->y - xi[1], -xi[2], -xi[3]};
    if (sigma > 0.0) {
      for (std::size_t c = 0; c < 4; ++c) g[c] += sigma * stream.standard_normal(key, robot, kGoalSlot, c);
    }
    obs.goal_relative = g;
  }
  return obs;
}

DenseObservation estimate_dense_observation(const ad::Tensor& state, const Adjacency& adjacency,
                                            double sigma, const NoiseStream& stream,
                                            const NoiseKey& key, std::span<const Vec2> goals) {
  if (sigma < 0.0) throw std::invalid_argument("perception: sigma must be >= 0");
  const std::size_t n = adjacency.robot_count();
  if (state.rank() != 2 || state.dim(0) != n || state.dim(1) != 4) {
    throw ad::ShapeError("perception: state shape " + ad::to_string(state.shape()) +
                         " does not match " + std::to_string(n) + " robots");
  }

  std::vector<double> diff(n * n * n, 0.0);
  std::vector<double> mask(n * n, kMaskedScore);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      if (i != j) {
        diff[row * n + j] = 1.0;
        diff[row * n + i] = -1.0;
      }
      if (adjacency(i, j)) mask[row] = 0.0;
    }
  }

  DenseObservation obs;
  obs.relative = ad::matmul(ad::Tensor({n * n, n}, std::move(diff)), state);
  if (sigma > 0.0) {
    std::vector<double> noise(n * n * 4, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!adjacency(i, j)) continue;
        for (std::size_t c = 0; c < 4; ++c) {
          noise[(i * n + j) * 4 + c] = sigma * stream.standard_normal(key, i, j, c);
        }
      }
    }
    obs.relative = ad::add(obs.relative, ad::Tensor({n * n, 4}, std::move(noise)));
  }
  obs.mask = ad::Tensor({n, n}, std::move(mask));

  if (!goals.empty()) {
    if (goals.size() != n) throw std::invalid_argument("perception: goal count differs from n");
    std::vector<double> g(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      g[2 * i] = goals[i].x;
      g[2 * i + 1] = goals[i].y;
    }
    ad::Tensor rel = ad::concat({ad::sub(ad::Tensor({n, 2}, std::move(g)), ad::slice(state, 1, 0, 2)),
                                 ad::scale(ad::slice(state, 1, 2, 4), -1.0)},
                                1);
    if (sigma > 0.0) {
      std::vector<double> noise(n * 4);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 4; ++c) {
          noise[4 * i + c] = sigma * stream.standard_normal(key, i, kGoalSlot, c);
        }
      }
      rel = ad::add(rel, ad::Tensor({n, 4}, std::move(noise)));
    }
    obs.goal_relative = std::move(rel);
  }
  return obs;
}

}  // namespace swarmcl
