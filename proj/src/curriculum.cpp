#include "swarmcl/curriculum.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace swarmcl {

void BabyStepSchedule::validate() const {
  if (c_K < 1 || c_N < 1) throw std::invalid_argument("schedule: c_K and c_N must be >= 1");
  if (K_init < 1) throw std::invalid_argument("schedule: K_init must be >= 1");
  if (K_max < K_init) throw std::invalid_argument("schedule: K_max must be >= K_init");
}

std::size_t BabyStepSchedule::horizon(std::size_t e) const {
  return scheduler_horizon(e, c_K, c_N, K_init, K_max);
}

std::size_t scheduler_horizon(std::size_t e, std::size_t c_K, std::size_t c_N,
                              std::size_t K_init, std::size_t K_max) {
  if (e < 1 || c_K < 1 || c_N < 1) {
    throw std::invalid_argument("scheduler_horizon: e, c_K and c_N must be >= 1");
  }
  const std::size_t stage = (e - 1) / c_N;
  // Saturate before multiplying so huge e cannot overflow.
  if (K_init >= K_max || stage >= (K_max - K_init) / c_K + 1) return K_max;
  return std::min(K_max, K_init + c_K * stage);
}

SubTrajectory sample_subtrajectory(const Trajectory& traj, std::size_t source,
                                   std::size_t horizon, KeyedRng& rng) {
  const std::size_t K = traj.horizon();
  if (horizon > K) {
    throw std::invalid_argument("sub-trajectory horizon " + std::to_string(horizon) +
                                " exceeds trajectory length " + std::to_string(K));
  }
  SubTrajectory sub;
  sub.source = source;
  sub.start = static_cast<std::size_t>(rng.below(K - horizon + 1));
  sub.states.assign(traj.samples.begin() + static_cast<std::ptrdiff_t>(sub.start),
                    traj.samples.begin() + static_cast<std::ptrdiff_t>(sub.start + horizon + 1));
  return sub;
}

namespace {

void check_aligned(std::size_t pred_len, std::size_t expert_len, std::size_t batch_size) {
  if (pred_len != expert_len) {
    throw std::invalid_argument("curriculum loss: predicted has " + std::to_string(pred_len) +
                                " samples, expert has " + std::to_string(expert_len));
  }
  if (pred_len < 2) throw std::invalid_argument("curriculum loss: horizon must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("curriculum loss: batch size must be >= 1");
}

}  // namespace

double curriculum_loss_term(std::span<const SwarmState> predicted,
                            std::span<const SwarmState> expert, std::size_t batch_size) {
  check_aligned(predicted.size(), expert.size(), batch_size);
  if (predicted.front() != expert.front()) {
    throw std::invalid_argument("curriculum loss: initial states must coincide");
  }
  const std::size_t horizon = predicted.size() - 1;
  double total = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const auto p = predicted[k].values();
    const auto q = expert[k].values();
    if (p.size() != q.size()) throw std::invalid_argument("curriculum loss: robot count mismatch");
    for (std::size_t c = 0; c < p.size(); ++c) total += (p[c] - q[c]) * (p[c] - q[c]);
  }
  return total / static_cast<double>(horizon * batch_size);
}

double curriculum_loss(std::span<const std::vector<SwarmState>> predicted,
                       std::span<const std::vector<SwarmState>> expert) {
  if (predicted.size() != expert.size() || predicted.empty()) {
    throw std::invalid_argument("curriculum loss: batch sizes differ or are empty");
  }
  double total = 0.0;
  for (std::size_t l = 0; l < predicted.size(); ++l) {
    total += curriculum_loss_term(predicted[l], expert[l], predicted.size());
  }
  return total;
}

ad::Tensor curriculum_loss_term(std::span<const ad::Tensor> predicted,
                                std::span<const SwarmState> expert, std::size_t batch_size) {
  check_aligned(predicted.size(), expert.size(), batch_size);
  const std::size_t horizon = predicted.size() - 1;
  ad::Tensor total;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const ad::Tensor err = ad::sum(ad::square(ad::sub(predicted[k], expert[k].to_tensor())));
    total = k == 0 ? err : ad::add(total, err);
  }
  return ad::scale(total, 1.0 / static_cast<double>(horizon * batch_size));
}

}  // namespace swarmcl
