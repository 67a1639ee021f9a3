#pragma once

// Flat `key = value` run configuration. `#` starts a comment; unknown keys
// are rejected; missing keys keep the defaults below.

#include <filesystem>
#include <string>
#include <vector>

#include "swarmcl/experts.hpp"
#include "swarmcl/trainer.hpp"

namespace swarmcl {

struct RunConfig {
  Task task = Task::kNavigation;
  std::size_t n = 6;
  std::size_t L = 100;
  std::size_t K = 200;
  double T = 0.05;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  Split split = Split::kTrain;
  bool curriculum = true;
  std::size_t c_K = 1;
  std::size_t c_N = 150;
  std::size_t K_init = 1;
  std::size_t baseline_K = 5;
  double lr = 0.005;
  std::size_t E = 5000;
  std::size_t batch = 32;
  double comm_radius = 1.5;
  double u_max = 1.0;
  double arena_half_extent = 2.5;
  ExpertConfig expert;
  std::size_t checkpoint_every = 0;
  std::size_t threads = 1;
  std::size_t embed_dim = 16;
  bool goal_features = false;

  DatasetSpec dataset_spec() const;
  TrainConfig train_config() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Documented keys, in file order.
std::vector<std::string> run_config_keys();

}  // namespace swarmcl
