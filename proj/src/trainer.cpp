#include "swarmcl/trainer.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <zlib.h>

#include "swarmcl/parallel.hpp"
#include "swarmcl/rng.hpp"
#include "swarmcl/rollout.hpp"

namespace swarmcl {

namespace {

enum : std::uint64_t { kTagBatch = 0x42415443, kTagTrainNoise = 0x544e4f49, kTagEvalNoise = 0x454e4f49 };

}  // namespace

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("train: E must be >= 1");
  if (batch < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("train: sigma must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
  if (curriculum) {
    BabyStepSchedule{c_K, c_N, K_init, K_init}.validate();
  } else if (baseline_K < 1) {
    throw std::invalid_argument("train: baseline horizon must be >= 1");
  }
  policy.validate();
}

std::size_t TrainConfig::horizon_at(std::size_t e, std::size_t dataset_K) const {
  if (!curriculum) return baseline_K;
  return scheduler_horizon(e, c_K, c_N, std::min(K_init, dataset_K), dataset_K);
}

std::uint32_t config_hash(const TrainConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(cfg.task) << '|' << cfg.steps << '|' << cfg.batch << '|' << cfg.lr << '|'
     << cfg.sigma << '|' << cfg.seed << '|' << cfg.curriculum << '|' << cfg.c_K << '|' << cfg.c_N
     << '|' << cfg.K_init << '|' << cfg.baseline_K << '|' << cfg.zero_init << '|'
     << cfg.policy.embed_dim << '|' << cfg.policy.goal_features;
  for (const auto* layers : {&cfg.policy.encoder, &cfg.policy.decoder}) {
    for (const LayerShape& l : *layers) os << '|' << l.in << 'x' << l.out;
  }
  const std::string s = os.str();
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

BatchResult batch_loss_and_gradient(const Dataset& data, const PolicyParams& params,
                                    std::size_t e, std::size_t horizon, const TrainConfig& cfg) {
  if (horizon > data.horizon()) {
    throw TrainingError("training horizon " + std::to_string(horizon) +
                        " exceeds dataset length K = " + std::to_string(data.horizon()));
  }
  BatchResult result;
  result.batch.reserve(cfg.batch);
  for (std::size_t slot = 0; slot < cfg.batch; ++slot) {
    KeyedRng rng(hash_key({cfg.seed, kTagBatch, e, slot}));
    const std::size_t source = static_cast<std::size_t>(rng.below(data.size()));
    result.batch.push_back(sample_subtrajectory(data.trajectories[source], source, horizon, rng));
  }

  const NoiseStream stream(hash_key({cfg.seed, kTagTrainNoise}));
  std::vector<double> losses(cfg.batch);
  std::vector<std::vector<double>> grads(cfg.batch);
  parallel_for(cfg.batch, cfg.threads, [&](std::size_t slot) {
    const SubTrajectory& sub = result.batch[slot];
    const WorldSpec& world = data.trajectories[sub.source].world;
    ad::Tape tape;
    ad::TapeScope scope(tape);
    const PolicyGraph graph(params, tape);
    // x(0) pinned to the demonstration.
    const ad::Tensor x0 = tape.constant(sub.states.front().to_tensor());
    const auto predicted = rollout_on_tape(graph, x0, horizon, world, cfg.sigma, stream,
                                           RolloutKey{e, slot});
    const ad::Tensor loss = curriculum_loss_term(predicted, sub.states, cfg.batch);
    losses[slot] = loss.item();
    grads[slot] = graph.gather_gradient(ad::backward(tape, loss));
  });

  result.gradient.assign(params.theta.size(), 0.0);
  for (std::size_t slot = 0; slot < cfg.batch; ++slot) {
    result.loss += losses[slot];
    for (std::size_t p = 0; p < result.gradient.size(); ++p) result.gradient[p] += grads[slot][p];
  }
  return result;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  data.validate();
  if (data.world.task != cfg.task) {
    throw TrainingError("dataset task " + to_string(data.world.task) +
                        " does not match configured task " + to_string(cfg.task));
  }
  if (!cfg.curriculum && cfg.baseline_K > data.horizon()) {
    throw TrainingError("baseline horizon " + std::to_string(cfg.baseline_K) +
                        " exceeds dataset length K = " + std::to_string(data.horizon()));
  }

  PolicyParams params = cfg.zero_init ? zero_params(cfg.policy) : init_params(cfg.policy, cfg.seed);
  AdamState adam = AdamState::fresh(params.theta.size(), AdamHyperParams{.lr = cfg.lr});
  const std::uint32_t hash = config_hash(cfg);

  TrainResult result;
  result.curve.reserve(cfg.steps);
  for (std::size_t e = 1; e <= cfg.steps; ++e) {
    const std::size_t horizon = cfg.horizon_at(e, data.horizon());
    BatchResult step;
    try {
      step = batch_loss_and_gradient(data, params, e, horizon, cfg);
    } catch (const NonFiniteStateError& err) {
      throw TrainingError("step " + std::to_string(e) + " (K_e = " + std::to_string(horizon) +
                          "): " + err.what());
    } catch (const ad::NonFiniteError& err) {
      throw TrainingError("non-finite loss at step " + std::to_string(e) + " (K_e = " +
                          std::to_string(horizon) + "): " + err.what());
    }
    if (!std::isfinite(step.loss)) {
      throw TrainingError("non-finite loss at step " + std::to_string(e) +
                          " (K_e = " + std::to_string(horizon) + ")");
    }
    try {
      adam_step(params.theta, step.gradient, adam);
    } catch (const NonFiniteGradient& err) {
      throw TrainingError("step " + std::to_string(e) + " (K_e = " + std::to_string(horizon) +
                          "): " + err.what());
    }
    const CurvePoint point{e, horizon, step.loss};
    result.curve.push_back(point);
    if (on_step) on_step(point);
    const bool cadence = cfg.checkpoint_every != 0 && e % cfg.checkpoint_every == 0;
    if (cadence || e == cfg.steps) result.checkpoints.push_back({params, adam, e, hash});
  }
  return result;
}

MetricsReport evaluate(const PolicyParams& params, const Dataset& testset,
                       const EvalOptions& options) {
  testset.validate();
  const NoiseStream stream(hash_key({options.seed, kTagEvalNoise}));
  const ControllerFactory factory = [&](std::size_t index, const WorldSpec& world) {
    return policy_controller(params, world, options.sigma, stream, RolloutKey{0, index});
  };
  return evaluate_controller(factory, testset, options);
}

Trajectory evaluation_rollout(const PolicyParams& params, const Trajectory& expert,
                              std::size_t index, const EvalOptions& options) {
  const NoiseStream stream(hash_key({options.seed, kTagEvalNoise}));
  return simulate(expert.world, expert.samples.front(), expert.horizon(),
                  policy_controller(params, expert.world, options.sigma, stream, RolloutKey{0, index}));
}

ControllerFactory expert_replay_factory(const ExpertConfig& cfg) {
  return [cfg](std::size_t, const WorldSpec& world) -> ControlFn {
    return [cfg, world](const SwarmState& x, std::size_t) { return expert_controls(x, world, cfg); };
  };
}

}  // namespace swarmcl
