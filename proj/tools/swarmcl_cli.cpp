// swarmcl: generate expert data, train, evaluate, plot and inspect.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmcl/config.hpp"
#include "swarmcl/io.hpp"
#include "swarmcl/plot.hpp"
#include "swarmcl/trainer.hpp"

namespace fs = std::filesystem;
using namespace swarmcl;

namespace {

// Files written by the running command; removed if it fails.
std::vector<fs::path> g_outputs;

void track(const fs::path& path) { g_outputs.push_back(path); }

void remove_outputs() {
  std::error_code ec;
  for (const fs::path& p : g_outputs) fs::remove(p, ec);
  g_outputs.clear();
}

struct GenerateArgs {
  std::string config, out;
  std::optional<std::string> split;
};

struct TrainArgs {
  std::string config, data, out_dir;
  bool quiet = false;
};

struct EvalArgs {
  std::string checkpoint, data, out, config;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  bool oracle = false;
  bool max_frechet = false;
};

struct PlotArgs {
  std::string curve, out, checkpoint, data;
  std::size_t index = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

void run_generate(const GenerateArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (a.split) cfg.split = *a.split == "test" ? Split::kTest : Split::kTrain;
  const Dataset data = generate_dataset(cfg.dataset_spec());
  track(a.out);
  io::write_dataset(data, a.out);
  std::cout << "wrote " << data.size() << " trajectories to " << a.out << "\n";
}

void run_train(const TrainArgs& a) {
  const RunConfig cfg = load_run_config(a.config);
  const Dataset data = io::read_dataset(a.data);
  if (data.robot_count() != cfg.n) {
    throw std::runtime_error("dataset has n = " + std::to_string(data.robot_count()) +
                             " robots, config says n = " + std::to_string(cfg.n));
  }
  const TrainConfig tc = cfg.train_config();
  const fs::path dir(a.out_dir);
  const bool fresh_dir = !fs::exists(dir);
  fs::create_directories(dir);
  if (fresh_dir) track(dir);

  const std::size_t report_every = std::max<std::size_t>(1, tc.steps / 20);
  const TrainResult result = train(data, tc, [&](const CurvePoint& p) {
    if (!a.quiet && (p.step % report_every == 0 || p.step == 1)) {
      std::cerr << "step " << p.step << " K_e " << p.horizon << " loss " << p.loss << "\n";
    }
  });

  for (const Checkpoint& c : result.checkpoints) {
    const fs::path path = dir / ("checkpoint_" + std::to_string(c.step) + ".swck");
    track(path);
    io::write_checkpoint({c, static_cast<std::uint32_t>(cfg.n)}, path);
  }
  const fs::path final_path = dir / "final.swck";
  track(final_path);
  io::write_checkpoint({result.checkpoints.back(), static_cast<std::uint32_t>(cfg.n)}, final_path);
  track(dir / "curve.csv");
  io::write_text_atomic(dir / "curve.csv", io::curve_csv(result.curve));
  std::cout << "final loss " << io::format_double(result.curve.back().loss) << " at step "
            << result.curve.back().step << "\n";
}

void run_eval(const EvalArgs& a) {
  const Dataset data = io::read_dataset(a.data);
  EvalOptions options;
  options.sigma = a.sigma;
  options.seed = a.seed;
  options.aggregation = a.max_frechet ? FrechetAggregation::kMax : FrechetAggregation::kMean;

  MetricsReport report;
  if (a.oracle) {
    ExpertConfig expert;
    if (!a.config.empty()) {
      const RunConfig cfg = load_run_config(a.config);
      expert = cfg.expert;
      options.threads = cfg.threads;
    }
    report = evaluate_controller(expert_replay_factory(expert), data, options);
  } else {
    if (a.checkpoint.empty()) throw std::runtime_error("eval: --checkpoint is required without --oracle");
    const io::StoredCheckpoint ckpt = io::read_checkpoint(a.checkpoint);
    if (ckpt.robots != data.robot_count()) {
      throw std::runtime_error("checkpoint was trained with n = " + std::to_string(ckpt.robots) +
                               " robots but the dataset has n = " + std::to_string(data.robot_count()));
    }
    report = evaluate(ckpt.checkpoint.params, data, options);
  }
  track(a.out);
  io::write_text_atomic(a.out, io::metrics_csv(report));
  std::cout << "mean loss " << io::format_double(report.mean.loss) << " epos "
            << io::format_double(report.mean.position_error) << " frechet "
            << io::format_double(report.mean.frechet) << " ncomp "
            << io::format_double(report.mean.completed) << "\n";
}

void run_plot_curve(const PlotArgs& a) {
  const std::vector<CurvePoint> curve = io::parse_curve_csv(
      [&] {
        const auto bytes = io::read_file(a.curve);
        return std::string(bytes.begin(), bytes.end());
      }());
  track(a.out);
  io::write_text_atomic(a.out, curve_svg(curve));
}

void run_plot_traj(const PlotArgs& a) {
  const Dataset data = io::read_dataset(a.data);
  if (a.index >= data.size()) {
    throw std::runtime_error("trajectory index " + std::to_string(a.index) + " out of range (L = " +
                             std::to_string(data.size()) + ")");
  }
  const io::StoredCheckpoint ckpt = io::read_checkpoint(a.checkpoint);
  if (ckpt.robots != data.robot_count()) {
    throw std::runtime_error("checkpoint robot count does not match the dataset");
  }
  EvalOptions options;
  options.sigma = a.sigma;
  options.seed = a.seed;
  const Trajectory& expert = data.trajectories[a.index];
  const Trajectory predicted = evaluation_rollout(ckpt.checkpoint.params, expert, a.index, options);
  track(a.out);
  io::write_text_atomic(a.out, trajectory_svg(expert, predicted));
}

void run_inspect(const std::string& path) {
  const io::DatasetHeader h = io::read_dataset_header(path);
  std::cout << "version " << h.version << "\n"
            << "task " << to_string(h.task) << "\n"
            << "n " << h.robots << "\n"
            << "L " << h.trajectories << "\n"
            << "K " << h.horizon << "\n"
            << "T " << io::format_double(h.dt) << "\n"
            << "arena_half_extent " << io::format_double(h.world.arena_half_extent) << "\n"
            << "comm_radius " << io::format_double(h.world.comm_radius) << "\n"
            << "u_max " << io::format_double(h.world.u_max) << "\n";
  if (h.world.wall) {
    const Wall& w = *h.world.wall;
    std::cout << "wall y " << io::format_double(w.y) << " gap_center " << io::format_double(w.gap_center)
              << " gap_half_width " << io::format_double(w.gap_half_width) << " thickness "
              << io::format_double(w.thickness) << "\n";
  } else {
    std::cout << "wall none\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum imitation learning for robot swarms"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate an expert dataset");
  generate->add_option("--config", gen.config, "Run configuration")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Dataset file")->required();
  generate->add_option("--split", gen.split, "Override the split")->check(CLI::IsMember({"train", "test"}));

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a policy");
  train_cmd->add_option("--config", tr.config, "Run configuration")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--data", tr.data, "Training dataset")->required();
  train_cmd->add_option("--out-dir", tr.out_dir, "Output directory")->required();
  train_cmd->add_flag("--quiet", tr.quiet, "No progress on stderr");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file");
  eval_cmd->add_option("--data", ev.data, "Test dataset")->required();
  eval_cmd->add_option("--sigma", ev.sigma, "Perception noise std")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--seed", ev.seed, "Noise seed");
  eval_cmd->add_option("--out", ev.out, "metrics.csv path")->required();
  eval_cmd->add_flag("--oracle", ev.oracle, "Replay the expert controller instead of a policy");
  eval_cmd->add_option("--config", ev.config, "Configuration with the expert gains (with --oracle)");
  eval_cmd->add_flag("--max-frechet", ev.max_frechet, "Aggregate Frechet distance by max over robots");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "Emit SVG figures");
  plot->require_subcommand(0, 0);
  auto* curve_opt = plot->add_option("--curve", pl.curve, "curve.csv to plot");
  auto* traj_opt = plot->add_flag("--traj", "Plot predicted vs expert trajectories");
  plot->add_option("--checkpoint", pl.checkpoint, "Checkpoint (with --traj)");
  plot->add_option("--data", pl.data, "Dataset (with --traj)");
  plot->add_option("--index", pl.index, "Trajectory index (with --traj)");
  plot->add_option("--sigma", pl.sigma, "Perception noise std (with --traj)");
  plot->add_option("--seed", pl.seed, "Noise seed (with --traj)");
  plot->add_option("--out", pl.out, "SVG path")->required();
  curve_opt->excludes(traj_opt);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print dataset header fields");
  inspect->add_option("--data", inspect_path, "Dataset file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      run_generate(gen);
    } else if (*train_cmd) {
      run_train(tr);
    } else if (*eval_cmd) {
      run_eval(ev);
    } else if (*plot) {
      if (*traj_opt) {
        if (pl.checkpoint.empty() || pl.data.empty()) {
          throw std::runtime_error("plot --traj needs --checkpoint and --data");
        }
        run_plot_traj(pl);
      } else if (*curve_opt) {
        run_plot_curve(pl);
      } else {
        throw std::runtime_error("plot needs --curve or --traj");
      }
    } else if (*inspect) {
      run_inspect(inspect_path);
    }
  } catch (const std::exception& err) {
    remove_outputs();
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
