#include "swarmcl/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "swarmcl/parallel.hpp"

namespace swarmcl {

namespace {

void check_pair(const Trajectory& a, const Trajectory& b) {
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("metrics: trajectories have " + std::to_string(a.samples.size()) +
                                " and " + std::to_string(b.samples.size()) + " samples");
  }
  if (a.samples.size() < 2) throw std::invalid_argument("metrics: need at least two samples");
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    if (a.samples[k].robot_count() != b.samples[k].robot_count()) {
      throw std::invalid_argument("metrics: robot count mismatch at sample " + std::to_string(k));
    }
  }
}

void check_sets(std::span<const Trajectory> a, std::span<const Trajectory> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("metrics: trajectory sets differ in size or are empty");
  }
  for (std::size_t l = 0; l < a.size(); ++l) check_pair(a[l], b[l]);
}

double squared_error_sum(const Trajectory& a, const Trajectory& b) {
  double total = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const auto p = a.samples[k].values();
    const auto q = b.samples[k].values();
    for (std::size_t c = 0; c < p.size(); ++c) total += (p[c] - q[c]) * (p[c] - q[c]);
  }
  return total;
}

double position_error_sum(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = a.samples.front().robot_count();
  double total = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    double per_sample = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      per_sample += distance(a.samples[k].position(i), b.samples[k].position(i));
    }
    total += per_sample / static_cast<double>(n);
  }
  return total;
}

}  // namespace

double traj_loss(std::span<const Trajectory> predicted, std::span<const Trajectory> expert) {
  check_sets(predicted, expert);
  double total = 0.0;
  for (std::size_t l = 0; l < predicted.size(); ++l) total += squared_error_sum(predicted[l], expert[l]);
  const double K = static_cast<double>(predicted.front().horizon());
  return total / (K * static_cast<double>(predicted.size()));
}

double traj_loss(const Trajectory& predicted, const Trajectory& expert) {
  return traj_loss(std::span(&predicted, 1), std::span(&expert, 1));
}

double mean_position_error(std::span<const Trajectory> predicted,
                           std::span<const Trajectory> expert) {
  check_sets(predicted, expert);
  double total = 0.0;
  for (std::size_t l = 0; l < predicted.size(); ++l) total += position_error_sum(predicted[l], expert[l]);
  const double K = static_cast<double>(predicted.front().horizon());
  return total / (K * static_cast<double>(predicted.size()));
}

double mean_position_error(const Trajectory& predicted, const Trajectory& expert) {
  return mean_position_error(std::span(&predicted, 1), std::span(&expert, 1));
}

double frechet(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("frechet: empty path");
  // Coupling cost table filled row by row; only the previous row is kept.
  std::vector<double> prev(b.size()), row(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = distance(a[i], b[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else if (i == 0) {
        reach = row[j - 1];
      } else if (j == 0) {
        reach = prev[j];
      } else {
        reach = std::min({prev[j], prev[j - 1], row[j - 1]});
      }
      row[j] = std::max(reach, d);
    }
    std::swap(prev, row);
  }
  return prev.back();
}

std::vector<Vec2> robot_path(const Trajectory& traj, std::size_t robot) {
  std::vector<Vec2> path;
  path.reserve(traj.samples.size());
  for (const SwarmState& s : traj.samples) path.push_back(s.position(robot));
  return path;
}

double trajectory_frechet(const Trajectory& predicted, const Trajectory& expert,
                          FrechetAggregation aggregation) {
  check_pair(predicted, expert);
  const std::size_t n = predicted.samples.front().robot_count();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = frechet(robot_path(predicted, i), robot_path(expert, i));
    acc = aggregation == FrechetAggregation::kMax ? std::max(acc, f) : acc + f;
  }
  return aggregation == FrechetAggregation::kMax ? acc : acc / static_cast<double>(n);
}

std::size_t tasks_completed(const Trajectory& predicted, std::span<const Vec2> goals,
                            double tolerance) {
  const SwarmState& last = predicted.samples.back();
  if (goals.size() != last.robot_count()) {
    throw std::invalid_argument("tasks_completed: goal count differs from robot count");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (distance(last.position(i), goals[i]) <= tolerance) ++count;
  }
  return count;
}

TrajectoryMetrics trajectory_metrics(const Trajectory& predicted, const Trajectory& expert,
                                     FrechetAggregation aggregation) {
  TrajectoryMetrics m;
  m.loss = traj_loss(predicted, expert);
  m.position_error = mean_position_error(predicted, expert);
  m.frechet = trajectory_frechet(predicted, expert, aggregation);
  m.completed = static_cast<double>(tasks_completed(predicted, expert.world.goals));
  for (const SwarmState& s : predicted.samples) m.overlaps += static_cast<double>(count_overlaps(s));
  return m;
}

MetricsReport evaluate_controller(const ControllerFactory& factory, const Dataset& testset,
                                  const EvalOptions& options) {
  testset.validate();
  if (options.sigma < 0.0) throw std::invalid_argument("evaluate: sigma must be >= 0");
  MetricsReport report;
  report.sigma = options.sigma;
  report.test_size = testset.size();
  report.robots = testset.robot_count();
  report.per_trajectory.resize(testset.size());

  parallel_for(testset.size(), options.threads, [&](std::size_t l) {
    const Trajectory& expert = testset.trajectories[l];
    const Trajectory predicted = simulate(expert.world, expert.samples.front(), expert.horizon(),
                                          factory(l, expert.world));
    report.per_trajectory[l] = trajectory_metrics(predicted, expert, options.aggregation);
  });

  const double count = static_cast<double>(report.per_trajectory.size());
  for (const TrajectoryMetrics& m : report.per_trajectory) {
    report.mean.loss += m.loss;
    report.mean.position_error += m.position_error;
    report.mean.frechet += m.frechet;
    report.mean.completed += m.completed;
    report.mean.overlaps += m.overlaps;
  }
  report.mean.loss /= count;
  report.mean.position_error /= count;
  report.mean.frechet /= count;
  report.mean.completed /= count;
  report.mean.overlaps /= count;
  return report;
}

}  // namespace swarmcl
