#include "swarmcl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace swarmcl {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: cannot parse '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + key + "' expects on|off, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <typename T>
Setter number(T RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

Setter expert_gain(double ExpertConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.expert.*field = parse_number<double>(k, v);
  };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"task", [](RunConfig& c, const std::string&, const std::string& v) {
         try {
           c.task = parse_task(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string("config: ") + e.what());
         }
       }},
      {"n", number(&RunConfig::n)},
      {"L", number(&RunConfig::L)},
      {"K", number(&RunConfig::K)},
      {"T", number(&RunConfig::T)},
      {"sigma", number(&RunConfig::sigma)},
      {"seed", number(&RunConfig::seed)},
      {"split", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "train") {
           c.split = Split::kTrain;
         } else if (v == "test") {
           c.split = Split::kTest;
         } else {
           throw ConfigError("config: key '" + k + "' expects train|test, got '" + v + "'");
         }
       }},
      {"curriculum", [](RunConfig& c, const std::string& k, const std::string& v) { c.curriculum = parse_switch(k, v); }},
      {"c_K", number(&RunConfig::c_K)},
      {"c_N", number(&RunConfig::c_N)},
      {"K_init", number(&RunConfig::K_init)},
      {"baseline_K", number(&RunConfig::baseline_K)},
      {"lr", number(&RunConfig::lr)},
      {"E", number(&RunConfig::E)},
      {"batch", number(&RunConfig::batch)},
      {"comm_radius", number(&RunConfig::comm_radius)},
      {"u_max", number(&RunConfig::u_max)},
      {"arena_half_extent", number(&RunConfig::arena_half_extent)},
      {"k_attract", expert_gain(&ExpertConfig::k_attract)},
      {"k_repulse", expert_gain(&ExpertConfig::k_repulse)},
      {"k_damp", expert_gain(&ExpertConfig::k_damp)},
      {"safe_distance", expert_gain(&ExpertConfig::safe_distance)},
      {"waypoint_offset", expert_gain(&ExpertConfig::waypoint_offset)},
      {"switch_radius", expert_gain(&ExpertConfig::switch_radius)},
      {"checkpoint_every", number(&RunConfig::checkpoint_every)},
      {"threads", number(&RunConfig::threads)},
      {"embed_dim", number(&RunConfig::embed_dim)},
      {"goal_features", [](RunConfig& c, const std::string& k, const std::string& v) { c.goal_features = parse_switch(k, v); }},
  };
  return table;
}

}  // namespace

DatasetSpec RunConfig::dataset_spec() const {
  DatasetSpec s;
  s.task = task;
  s.robots = n;
  s.trajectories = L;
  s.horizon = K;
  s.seed = seed;
  s.split = split;
  s.dt = T;
  s.arena_half_extent = arena_half_extent;
  s.comm_radius = comm_radius;
  s.u_max = u_max;
  s.expert = expert;
  s.threads = threads;
  return s;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.task = task;
  t.steps = E;
  t.batch = batch;
  t.lr = lr;
  t.sigma = sigma;
  t.seed = seed;
  t.curriculum = curriculum;
  t.c_K = c_K;
  t.c_N = c_N;
  t.K_init = K_init;
  t.baseline_K = baseline_K;
  t.checkpoint_every = checkpoint_every;
  t.threads = threads;
  t.policy = PolicyDescriptor::standard(embed_dim, goal_features);
  return t;
}

RunConfig parse_run_config(const std::string& text) {
  std::map<std::string, const Setter*> lookup;
  for (const auto& [key, setter] : setters()) lookup[key] = &setter;

  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw ConfigError("config: unknown key '" + key + "' on line " + std::to_string(line_no));
    (*it->second)(cfg, key, value);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

}  // namespace swarmcl
