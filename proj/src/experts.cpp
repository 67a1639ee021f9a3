#include "swarmcl/experts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmcl/parallel.hpp"
#include "swarmcl/rng.hpp"

namespace swarmcl {

namespace {

constexpr double kCoincidentDistance = 1e-9;
// Minimum spacing between sampled start positions (and between goals).
constexpr double kPlacementSpacing = 0.4;
constexpr std::size_t kPlacementTries = 10000;

enum : std::uint64_t { kTagEpisode = 0x45504953, kTagGap = 0x47415050 };

void add_repulsion(Vec2& u, Vec2 away, double dist, double gain) {
  const double s = gain / (dist * dist * dist);
  u.x += s * away.x;
  u.y += s * away.y;
}

Vec2 potential_field(const SwarmState& state, std::size_t i, Vec2 target,
                     const ExpertConfig& cfg) {
  const Vec2 p = state.position(i);
  const Vec2 v = state.velocity(i);
  Vec2 u{cfg.k_attract * (target.x - p.x) - cfg.k_damp * v.x,
         cfg.k_attract * (target.y - p.y) - cfg.k_damp * v.y};
  for (std::size_t j = 0; j < state.robot_count(); ++j) {
    if (j == i) continue;
    const Vec2 q = state.position(j);
    const double d = distance(p, q);
    if (d < kCoincidentDistance) throw CoincidentRobotsError(std::min(i, j), std::max(i, j));
    if (d < cfg.safe_distance) add_repulsion(u, {p.x - q.x, p.y - q.y}, d, cfg.k_repulse);
  }
  return u;
}

// Repulsion from the solid parts of the wall: vertical push off the faces
// beside the opening, horizontal push off the opening's sides inside it.
void add_wall_repulsion(Vec2& u, Vec2 p, const Wall& w, const ExpertConfig& cfg) {
  const double half = 0.5 * w.thickness;
  const double dx = p.x - w.gap_center;
  if (std::abs(dx) >= w.gap_half_width) {
    const double gap = std::abs(p.y - w.y) - half;
    if (gap > kCoincidentDistance && gap < cfg.safe_distance) {
      add_repulsion(u, {0.0, p.y > w.y ? gap : -gap}, gap, cfg.k_repulse);
    }
    return;
  }
  if (std::abs(p.y - w.y) >= half + kRobotRadius) return;
  const double left = w.gap_half_width + dx;   // distance to the left side
  const double right = w.gap_half_width - dx;  // distance to the right side
  if (left > kCoincidentDistance && left < cfg.safe_distance) add_repulsion(u, {left, 0.0}, left, cfg.k_repulse);
  if (right > kCoincidentDistance && right < cfg.safe_distance) add_repulsion(u, {-right, 0.0}, right, cfg.k_repulse);
}

void clamp_into(std::vector<double>& out, std::size_t i, Vec2 u, double u_max) {
  out[2 * i] = std::clamp(u.x, -u_max, u_max);
  out[2 * i + 1] = std::clamp(u.y, -u_max, u_max);
}

void require_goals(const SwarmState& state, const WorldSpec& world) {
  if (world.robot_count() != state.robot_count()) {
    throw std::invalid_argument("expert: world has " + std::to_string(world.robot_count()) +
                                " goals for " + std::to_string(state.robot_count()) + " robots");
  }
}

bool well_separated(const std::vector<Vec2>& points, Vec2 candidate) {
  return std::all_of(points.begin(), points.end(),
                     [&](Vec2 q) { return distance(q, candidate) >= kPlacementSpacing; });
}

std::vector<Vec2> place_points(KeyedRng& rng, std::size_t count, double x_lo, double x_hi,
                               double y_lo, double y_hi) {
  std::vector<Vec2> points;
  points.reserve(count);
  for (std::size_t tries = 0; points.size() < count; ++tries) {
    if (tries >= kPlacementTries) {
      throw InfeasibleDatasetError("cannot place " + std::to_string(count) +
                                   " non-overlapping robots in the start region");
    }
    const Vec2 c{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
    if (well_separated(points, c)) points.push_back(c);
  }
  return points;
}

}  // namespace

void ExpertConfig::validate(const WorldSpec& world) const {
  if (!(k_attract > 0.0 && k_repulse > 0.0 && k_damp > 0.0)) {
    throw std::invalid_argument("expert gains must be > 0");
  }
  if (!(safe_distance > 0.0 && safe_distance < world.comm_radius)) {
    throw std::invalid_argument("expert safety radius must be in (0, comm radius)");
  }
  if (!(waypoint_offset > 0.0 && switch_radius > 0.0)) {
    throw std::invalid_argument("waypoint offset and switch radius must be > 0");
  }
}

CoincidentRobotsError::CoincidentRobotsError(std::size_t i, std::size_t j)
    : std::runtime_error("expert: robots " + std::to_string(i) + " and " + std::to_string(j) +
                         " coincide") {}

std::vector<double> navigation_expert(const SwarmState& state, const WorldSpec& world,
                                      const ExpertConfig& cfg) {
  require_goals(state, world);
  std::vector<double> out(2 * state.robot_count());
  for (std::size_t i = 0; i < state.robot_count(); ++i) {
    clamp_into(out, i, potential_field(state, i, world.goals[i], cfg), world.u_max);
  }
  return out;
}

PassageStage passage_stage(Vec2 p, const WorldSpec& world, const ExpertConfig& cfg, Vec2 /*goal*/) {
  if (!world.wall) throw std::invalid_argument("passage expert needs a wall");
  const Wall& w = *world.wall;
  const Vec2 pre{w.gap_center, w.y - cfg.waypoint_offset};
  const Vec2 post{w.gap_center, w.y + cfg.waypoint_offset};
  if (p.y < w.y) {
    // Lined up under the opening (or at the pre-waypoint): go through.
    const bool lined_up = p.y >= pre.y && std::abs(p.x - w.gap_center) <= w.gap_half_width - kRobotRadius;
    if (lined_up || distance(p, pre) <= cfg.switch_radius) return PassageStage::kPostWaypoint;
    return PassageStage::kPreWaypoint;
  }
  if (p.y >= post.y || distance(p, post) <= cfg.switch_radius) return PassageStage::kGoal;
  return PassageStage::kPostWaypoint;
}

Vec2 passage_target(Vec2 p, const WorldSpec& world, const ExpertConfig& cfg, Vec2 goal) {
  const Wall& w = world.wall.value();
  switch (passage_stage(p, world, cfg, goal)) {
    case PassageStage::kPreWaypoint: return {w.gap_center, w.y - cfg.waypoint_offset};
    case PassageStage::kPostWaypoint: return {w.gap_center, w.y + cfg.waypoint_offset};
    case PassageStage::kGoal: return goal;
  }
  return goal;
}

std::vector<double> passage_expert(const SwarmState& state, const WorldSpec& world,
                                   const ExpertConfig& cfg) {
  require_goals(state, world);
  if (!world.wall) throw std::invalid_argument("passage expert needs a wall");
  std::vector<double> out(2 * state.robot_count());
  for (std::size_t i = 0; i < state.robot_count(); ++i) {
    const Vec2 p = state.position(i);
    Vec2 u = potential_field(state, i, passage_target(p, world, cfg, world.goals[i]), cfg);
    add_wall_repulsion(u, p, *world.wall, cfg);
    clamp_into(out, i, u, world.u_max);
  }
  return out;
}

std::vector<double> expert_controls(const SwarmState& state, const WorldSpec& world,
                                    const ExpertConfig& cfg) {
  return world.task == Task::kPassage ? passage_expert(state, world, cfg)
                                      : navigation_expert(state, world, cfg);
}

bool all_goals_reached(const SwarmState& state, const WorldSpec& world, double tolerance) {
  for (std::size_t i = 0; i < state.robot_count(); ++i) {
    if (distance(state.position(i), world.goals.at(i)) > tolerance) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void Dataset::validate() const {
  if (trajectories.empty()) throw std::invalid_argument("dataset is empty");
  const std::size_t n = robot_count();
  const std::size_t K = horizon();
  for (const Trajectory& t : trajectories) {
    t.validate();
    if (t.world.robot_count() != n || t.samples.front().robot_count() != n) {
      throw std::invalid_argument("dataset trajectories disagree on robot count");
    }
    if (t.horizon() != K) throw std::invalid_argument("dataset trajectories disagree on K");
    WorldSpec shared = t.world;
    shared.goals.clear();
    if (shared != world) throw std::invalid_argument("dataset trajectories disagree on geometry");
  }
}

bool Dataset::operator==(const Dataset& other) const {
  if (world != other.world || trajectories.size() != other.trajectories.size()) return false;
  for (std::size_t l = 0; l < trajectories.size(); ++l) {
    if (trajectories[l].world != other.trajectories[l].world ||
        trajectories[l].samples != other.trajectories[l].samples) {
      return false;
    }
  }
  return true;
}

WorldSpec dataset_world(const DatasetSpec& spec) {
  WorldSpec world;
  world.task = spec.task;
  world.arena_half_extent = spec.arena_half_extent;
  world.comm_radius = spec.comm_radius;
  world.dt = spec.dt;
  world.u_max = spec.u_max;
  if (spec.task == Task::kPassage) {
    KeyedRng rng(hash_key({spec.seed, kTagGap}));
    Wall w;
    const double span = std::max(0.0, spec.arena_half_extent - 1.0);
    w.gap_center = rng.uniform(-span, span);
    world.wall = w;
  }
  return world;
}

std::pair<SwarmState, std::vector<Vec2>> sample_episode(const DatasetSpec& spec,
                                                        const WorldSpec& world, std::size_t index,
                                                        std::size_t attempt) {
  KeyedRng rng(hash_key({spec.seed, kTagEpisode, static_cast<std::uint64_t>(spec.split), index, attempt}));
  const double lim = spec.arena_half_extent - 0.3;
  std::vector<Vec2> starts;
  std::vector<Vec2> goals;
  if (spec.task == Task::kNavigation) {
    starts = place_points(rng, spec.robots, -lim, lim, -lim, lim);
    goals = place_points(rng, spec.robots, -lim, lim, -lim, lim);
  } else {
    const Wall& w = world.wall.value();
    const double clearance = 0.5 * w.thickness + 0.3;
    starts = place_points(rng, spec.robots, -lim, lim, -lim, w.y - clearance - 0.4);
    goals = place_points(rng, spec.robots, -lim, lim, w.y + clearance + 0.4, lim);
  }
  SwarmState x0(spec.robots);
  for (std::size_t i = 0; i < spec.robots; ++i) x0.set_position(i, starts[i]);
  return {std::move(x0), std::move(goals)};
}

Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.trajectories < 1) throw std::invalid_argument("dataset needs L >= 1");
  if (spec.horizon < 2) throw std::invalid_argument("dataset needs K >= 2");
  if (spec.robots < 1) throw std::invalid_argument("dataset needs n >= 1");

  Dataset data;
  data.world = dataset_world(spec);
  data.world.validate();
  spec.expert.validate(data.world);
  data.trajectories.resize(spec.trajectories);

  parallel_for(spec.trajectories, spec.threads, [&](std::size_t index) {
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt >= kMaxConsecutiveRejections) {
        throw InfeasibleDatasetError("episode " + std::to_string(index) + ": " +
                                     std::to_string(kMaxConsecutiveRejections) +
                                     " consecutive expert failures; configuration is infeasible");
      }
      auto [x0, goals] = sample_episode(spec, data.world, index, attempt);
      WorldSpec world = data.world;
      world.goals = std::move(goals);
      try {
        Trajectory t = simulate(world, x0, spec.horizon, [&](const SwarmState& x, std::size_t) {
          return expert_controls(x, world, spec.expert);
        });
        if (!all_goals_reached(t.samples.back(), world)) continue;
        t.controls.clear();
        data.trajectories[index] = std::move(t);
        return;
      } catch (const CoincidentRobotsError&) {
        continue;
      }
    }
  });
  return data;
}

}  // namespace swarmcl
