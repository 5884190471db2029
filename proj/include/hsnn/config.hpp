#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hsnn/es.hpp"
#include "hsnn/gradient.hpp"
#include "hsnn/network.hpp"
#include "hsnn/surrogate.hpp"

namespace hsnn {

/// Sectioned key=value text ("[section]" headers, '#' comments). Values are
/// pulled with typed getters; anything left unread when finish() runs is an
/// error, so typos cannot silently fall back to defaults.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);

  /// Throws listing every key that was never consumed.
  void finish() const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> value
  std::set<std::string> consumed_;
};

/// Everything a training/analysis run needs, resolved from one config file.
struct ExperimentConfig {
  // run
  std::string task = "memory";        // memory | cartpole | classify | sphere
  std::string optimizer = "es_pgpe";  // es_pgpe | bptt_reinforce | bptt_supervised
  std::uint64_t seed = 1;
  std::string out_dir = "runs/run";
  int threads = 1;
  int repeats = 1;

  // network
  std::vector<int> layers;  // resolved layer sizes (input..output)
  int budget = 0;           // trainable-parameter target used when layers were derived
  bool spiking_readout = false;
  double delta_t = kDefaultDeltaT;
  double tau_m = kDefaultTauM;
  double v_th = kDefaultVth;
  double v_rest = kDefaultVrest;
  double r_mem = kDefaultRmem;
  double current_scale = 2e-8;

  // training target
  TrainableMask mask;
  bool train_weights = false;

  EsConfig es;

  // backprop path
  double lr_bp = 3e-2;
  Surrogate surrogate;
  GradMode grad_mode = GradMode::Full;
  int batch_episodes = 16;

  // environment
  int memory_n = 10;
  int max_steps = 500;
  double input_gain = 1.0;
  int episodes_per_genome = 1;
  int eval_episodes = 16;
  int sphere_dim = 32;
  // classification
  std::string train_images, train_labels, test_images, test_labels;
  int subset = 2000;
  int sim_steps = 4;
  bool cross_entropy = false;

  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  void validate() const;
  NetworkSpec network_spec() const;
  Network make_network() const;  // defaults overridden by the neuron fields
  /// Canonical dump: parsing it again reproduces this config exactly.
  std::string resolved_text() const;
  std::uint64_t config_hash() const;  // FNV-1a of resolved_text
};

/// Hidden width of a {in, h, out} network so the trainable-parameter count
/// best approximates `budget` (never below 1 neuron). Properties count
/// mask.count() per non-input neuron; weights count in*h + h*out.
int solve_hidden_width(int budget, int input_size, int output_size, const TrainableMask& mask,
                       bool train_weights);

std::string mask_to_string(const TrainableMask& mask);
TrainableMask mask_from_string(const std::string& s);

}  // namespace hsnn
