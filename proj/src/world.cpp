#include "swarmcl/world.hpp"

#include <algorithm>
#include <cmath>

namespace swarmcl {

std::string to_string(Task task) {
  return task == Task::kNavigation ? "navigation" : "passage";
}

Task parse_task(const std::string& name) {
  if (name == "navigation") return Task::kNavigation;
  if (name == "passage") return Task::kPassage;
  throw std::invalid_argument("unknown task '" + name + "' (expected navigation or passage)");
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void WorldSpec::validate() const {
  if (!(arena_half_extent > 0.0)) throw std::invalid_argument("arena half extent must be > 0");
  if (!(comm_radius > 0.0)) throw std::invalid_argument("communication radius must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("sampling period must be > 0");
  if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be > 0");
  if (task == Task::kNavigation && wall) {
    throw std::invalid_argument("navigation world must not have a wall");
  }
  if (task == Task::kPassage) {
    if (!wall) throw std::invalid_argument("passage world needs a wall");
    if (!(wall->gap_half_width > kRobotRadius)) {
      throw std::invalid_argument("passage gap half-width must exceed the robot radius");
    }
    for (const Vec2& g : goals) {
      if (!(g.y > wall->y)) throw std::invalid_argument("passage goals must lie above the wall");
    }
  }
}

// ---------------------------------------------------------------------------

SwarmState::SwarmState(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() % 4 != 0) {
    throw std::invalid_argument("swarm state length " + std::to_string(values_.size()) +
                                " is not a multiple of 4");
  }
}

SwarmState SwarmState::from_tensor(const ad::Tensor& t) {
  if (t.rank() != 2 || t.dim(1) != 4) {
    throw ad::ShapeError("swarm state tensor must be [n x 4], got " + ad::to_string(t.shape()));
  }
  return SwarmState(std::vector<double>(t.data().begin(), t.data().end()));
}

ad::Tensor SwarmState::to_tensor() const {
  return ad::Tensor({robot_count(), 4}, values_);
}

void SwarmState::set_position(std::size_t i, Vec2 p) {
  values_[4 * i] = p.x;
  values_[4 * i + 1] = p.y;
}

void SwarmState::set_velocity(std::size_t i, Vec2 v) {
  values_[4 * i + 2] = v.x;
  values_[4 * i + 3] = v.y;
}

bool SwarmState::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<std::size_t> Adjacency::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j) {
    if ((*this)(i, j)) out.push_back(j);
  }
  return out;
}

void Trajectory::validate() const {
  if (samples.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");
  const std::size_t n = samples.front().robot_count();
  for (const auto& s : samples) {
    if (s.robot_count() != n) throw std::invalid_argument("trajectory samples disagree on n");
  }
}

NonFiniteStateError::NonFiniteStateError(std::size_t step, const std::string& what)
    : std::runtime_error("non-finite state at step " + std::to_string(step) + ": " + what),
      step_(step) {}

// ---------------------------------------------------------------------------

Adjacency compute_adjacency(const SwarmState& state, const WorldSpec& world) {
  const std::size_t n = state.robot_count();
  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    adj.set(i, i, true);
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool linked = distance(state.position(i), state.position(j)) <= world.comm_radius;
      adj.set(i, j, linked);
      adj.set(j, i, linked);
    }
  }
  return adj;
}

void resolve_boundaries(const WorldSpec& world, Vec2 previous, Vec2& next, Vec2& velocity) {
  const double limit = world.arena_half_extent - kRobotRadius;
  if (next.x > limit) {
    next.x = limit;
    velocity.x = std::min(velocity.x, 0.0);
  } else if (next.x < -limit) {
    next.x = -limit;
    velocity.x = std::max(velocity.x, 0.0);
  }
  if (next.y > limit) {
    next.y = limit;
    velocity.y = std::min(velocity.y, 0.0);
  } else if (next.y < -limit) {
    next.y = -limit;
    velocity.y = std::max(velocity.y, 0.0);
  }

  if (!world.wall) return;
  const Wall& w = *world.wall;
  // Robot centres are kept out of the wall slab inflated by the robot radius.
  const double lo = w.y - 0.5 * w.thickness - kRobotRadius;
  const double hi = w.y + 0.5 * w.thickness + kRobotRadius;
  const double opening = w.gap_half_width - kRobotRadius;
  auto in_band = [&](Vec2 p) { return p.y > lo && p.y < hi; };
  auto in_opening = [&](double x) { return std::abs(x - w.gap_center) < opening; };

  const bool crossed_up = previous.y <= lo && next.y >= hi;
  const bool crossed_down = previous.y >= hi && next.y <= lo;
  if (crossed_up || crossed_down) {
    const double face = crossed_up ? lo : hi;
    const double s = (face - previous.y) / (next.y - previous.y);
    const double x_at_face = previous.x + s * (next.x - previous.x);
    if (!in_opening(x_at_face)) {
      next.y = face;
      velocity.y = 0.0;
    }
    return;
  }

  if (!in_band(next) || in_opening(next.x)) return;

  if (in_band(previous)) {
    // Already inside the opening: the gap sides stop lateral motion.
    next.x = next.x > w.gap_center ? w.gap_center + opening : w.gap_center - opening;
    velocity.x = 0.0;
  } else if (previous.y <= lo) {
    next.y = lo;
    velocity.y = 0.0;
  } else {
    next.y = hi;
    velocity.y = 0.0;
  }
}

SwarmState step(const SwarmState& state, std::span<const double> controls,
                const WorldSpec& world, Boundaries boundaries) {
  const std::size_t n = state.robot_count();
  if (controls.size() != 2 * n) {
    throw std::invalid_argument("step: expected " + std::to_string(2 * n) + " controls, got " +
                                std::to_string(controls.size()));
  }
  if (!state.all_finite()) throw NonFiniteStateError(0, "input state");
  for (double u : controls) {
    if (!std::isfinite(u)) throw NonFiniteStateError(0, "input controls");
  }

  SwarmState next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = std::clamp(controls[2 * i], -world.u_max, world.u_max);
    const double uy = std::clamp(controls[2 * i + 1], -world.u_max, world.u_max);
    const Vec2 p = state.position(i);
    Vec2 v = state.velocity(i);
    v.x += ux * world.dt;
    v.y += uy * world.dt;
    Vec2 q{p.x + v.x * world.dt, p.y + v.y * world.dt};
    if (boundaries == Boundaries::kResolve) resolve_boundaries(world, p, q, v);
    next.set_position(i, q);
    next.set_velocity(i, v);
  }
  return next;
}

ad::Tensor step(const ad::Tensor& state, const ad::Tensor& controls, double dt) {
  const ad::Tensor p = ad::slice(state, 1, 0, 2);
  const ad::Tensor v = ad::slice(state, 1, 2, 4);
  const ad::Tensor v_next = ad::add(v, ad::scale(controls, dt));
  const ad::Tensor p_next = ad::add(p, ad::scale(v_next, dt));
  return ad::concat({p_next, v_next}, 1);
}

Trajectory simulate(const WorldSpec& world, const SwarmState& x0, std::size_t horizon,
                    const ControlFn& controller, Boundaries boundaries) {
  Trajectory traj;
  traj.world = world;
  traj.samples.reserve(horizon + 1);
  traj.controls.reserve(horizon);
  traj.samples.push_back(x0);
  for (std::size_t k = 0; k < horizon; ++k) {
    const SwarmState& x = traj.samples.back();
    std::vector<double> u = controller(x, k);
    for (double& c : u) {
      if (!std::isfinite(c)) throw NonFiniteStateError(k, "controller output");
      c = std::clamp(c, -world.u_max, world.u_max);
    }
    SwarmState next = step(x, u, world, boundaries);
    if (!next.all_finite()) throw NonFiniteStateError(k + 1, "integrated state");
    traj.controls.push_back(std::move(u));
    traj.samples.push_back(std::move(next));
  }
  return traj;
}

std::size_t count_overlaps(const SwarmState& state) {
  std::size_t count = 0;
  const std::size_t n = state.robot_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(state.position(i), state.position(j)) < 2.0 * kRobotRadius) ++count;
    }
  }
  return count;
}

}  // namespace swarmcl
