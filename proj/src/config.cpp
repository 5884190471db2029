#include "hsnn/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hsnn/csv.hpp"
#include "hsnn/rng.hpp"

namespace hsnn {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& want) {
  throw std::invalid_argument("config key '" + key + "': '" + value + "' is not " + want);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full))
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" +
                                  full + "'");
    cfg.values_[full] = value;
  }
  return cfg;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    bad_value(key, it->second, "a number");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    long v = std::stol(it->second, &pos, 10);
    if (pos != it->second.size() || v < INT_MIN || v > INT_MAX) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    bad_value(key, it->second, "an integer");
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(it->second, &pos, 10);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    bad_value(key, it->second, "an unsigned integer");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean (true/false)");
}

void KeyValueConfig::finish() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values_)
    if (!consumed_.count(key)) unknown.push_back(key);
  if (unknown.empty()) return;
  std::string msg = "unknown config key(s):";
  for (const auto& k : unknown) msg += " '" + k + "'";
  throw std::invalid_argument(msg);
}

std::string mask_to_string(const TrainableMask& mask) {
  if (mask.count() == 0) return "none";
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(mask.tau_raw, "tau_m");
  add(mask.v_th, "v_th");
  add(mask.v_rest, "v_rest");
  add(mask.r_mem, "r_mem");
  return out;
}

TrainableMask mask_from_string(const std::string& s) {
  std::string t = trim(s);
  if (t == "all") return TrainableMask::all();
  if (t == "none" || t.empty()) return TrainableMask::none();
  TrainableMask mask = TrainableMask::none();
  std::replace(t.begin(), t.end(), '+', ',');  // accept the CSV/run-dir spelling too
  for (const auto& name : split(t, ',')) {
    if (name == "tau_m")
      mask.tau_raw = true;
    else if (name == "v_th")
      mask.v_th = true;
    else if (name == "v_rest")
      mask.v_rest = true;
    else if (name == "r_mem")
      mask.r_mem = true;
    else
      throw std::invalid_argument("unknown trainable property '" + name +
                                  "' (expected tau_m, v_th, v_rest, r_mem)");
  }
  return mask;
}

int solve_hidden_width(int budget, int input_size, int output_size, const TrainableMask& mask,
                       bool train_weights) {
  if (budget < 1) throw std::invalid_argument("trainable budget must be positive");
  double ideal;
  if (train_weights) {
    ideal = double(budget) / (input_size + output_size);
  } else {
    int p = mask.count();
    if (p == 0) throw std::invalid_argument("cannot size a network for an empty trainable mask");
    ideal = double(budget) / p - output_size;
  }
  return std::max(1, static_cast<int>(std::lround(ideal)));
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_text(read_file(path));
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  KeyValueConfig kv = KeyValueConfig::parse(text);
  ExperimentConfig c;

  c.task = kv.get_string("run.task", c.task);
  c.optimizer = kv.get_string("run.optimizer", c.optimizer);
  c.seed = kv.get_u64("run.seed", c.seed);
  c.out_dir = kv.get_string("run.out", c.out_dir);
  c.threads = kv.get_int("run.threads", c.threads);
  c.repeats = kv.get_int("run.repeats", c.repeats);

  c.spiking_readout = kv.get_bool("network.spiking_readout", c.spiking_readout);
  c.delta_t = kv.get_double("network.delta_t", c.delta_t);
  c.tau_m = kv.get_double("network.tau_m", c.tau_m);
  c.v_th = kv.get_double("network.v_th", c.v_th);
  c.v_rest = kv.get_double("network.v_rest", c.v_rest);
  c.r_mem = kv.get_double("network.r_mem", c.r_mem);
  c.current_scale = kv.get_double("network.current_scale", c.current_scale);

  c.train_weights = kv.get_bool("train.train_weights", c.train_weights);
  std::string mask_str = kv.get_string("train.mask", c.train_weights ? "none" : "all");
  c.mask = mask_from_string(mask_str);
  if (c.train_weights && c.mask.count() > 0)
    throw std::invalid_argument(
        "train.mask and train.train_weights are mutually exclusive; the genome holds either "
        "neuron properties or weights");

  c.es.algorithm = c.optimizer == "es_vanilla" ? EsAlgorithm::VanillaEs : EsAlgorithm::Pgpe;
  c.es.population = kv.get_int("es.population", c.es.population);
  c.es.sigma0 = kv.get_double("es.sigma0", c.es.sigma0);
  c.es.lr_center = kv.get_double("es.lr_center", c.es.lr_center);
  c.es.lr_sigma = kv.get_double("es.lr_sigma", c.es.lr_sigma);
  c.es.generations = kv.get_int("es.generations", c.es.generations);
  c.es.rank_shaping = kv.get_bool("es.rank_shaping", c.es.rank_shaping);
  c.es.maximize = c.task != "sphere";

  c.lr_bp = kv.get_double("bptt.lr", c.lr_bp);
  c.surrogate.kind =
      surrogate_kind_from_string(kv.get_string("bptt.surrogate", to_string(c.surrogate.kind)));
  c.surrogate.alpha = kv.get_double("bptt.alpha", c.surrogate.alpha);
  c.grad_mode = grad_mode_from_string(kv.get_string("bptt.grad_mode", to_string(c.grad_mode)));
  c.batch_episodes = kv.get_int("bptt.batch_episodes", c.batch_episodes);

  c.memory_n = kv.get_int("env.memory_n", c.memory_n);
  c.max_steps = kv.get_int("env.max_steps", c.max_steps);
  c.input_gain = kv.get_double("env.input_gain", c.input_gain);
  c.episodes_per_genome = kv.get_int("env.episodes_per_genome", c.episodes_per_genome);
  c.eval_episodes = kv.get_int("env.eval_episodes", c.eval_episodes);
  c.sphere_dim = kv.get_int("env.sphere_dim", c.sphere_dim);
  c.train_images = kv.get_string("env.train_images", c.train_images);
  c.train_labels = kv.get_string("env.train_labels", c.train_labels);
  c.test_images = kv.get_string("env.test_images", c.test_images);
  c.test_labels = kv.get_string("env.test_labels", c.test_labels);
  c.subset = kv.get_int("env.subset", c.subset);
  c.sim_steps = kv.get_int("env.sim_steps", c.sim_steps);
  std::string fitness = kv.get_string("env.fitness", c.cross_entropy ? "xent" : "accuracy");
  if (fitness == "xent")
    c.cross_entropy = true;
  else if (fitness == "accuracy")
    c.cross_entropy = false;
  else
    bad_value("env.fitness", fitness, "one of accuracy, xent");

  // I/O sizes come from the task; hidden width from (in precedence order)
  // explicit layer sizes, an explicit width, or the trainable budget.
  int input_size = 0, output_size = 0;
  if (c.task == "memory") {
    input_size = 2;
    output_size = 2;
  } else if (c.task == "cartpole") {
    input_size = 4;
    output_size = 2;
  } else if (c.task == "classify") {
    input_size = 28 * 28;
    output_size = 10;
  }
  input_size = kv.get_int("network.input", input_size);
  output_size = kv.get_int("network.output", output_size);

  std::string layers_str = kv.get_string("network.layers", "");
  int hidden = kv.get_int("network.hidden", 0);
  c.budget = kv.get_int("network.budget", 0);
  int given = int(!layers_str.empty()) + int(hidden > 0) + int(c.budget > 0);
  if (given > 1)
    throw std::invalid_argument(
        "give at most one of network.layers, network.hidden, network.budget");
  if (!layers_str.empty()) {
    for (const auto& item : split(layers_str, ',')) {
      try {
        std::size_t pos = 0;
        int v = std::stoi(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("");
        c.layers.push_back(v);
      } catch (const std::exception&) {
        bad_value("network.layers", layers_str, "a comma-separated list of integers");
      }
    }
  } else if (c.task != "sphere") {
    if (c.budget > 0)
      hidden = solve_hidden_width(c.budget, input_size, output_size, c.mask, c.train_weights);
    else if (hidden == 0)
      hidden = 64;
    c.layers = {input_size, hidden, output_size};
  }

  kv.finish();
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("config: " + msg);
  };
  require(task == "memory" || task == "cartpole" || task == "classify" || task == "sphere",
          "unknown task '" + task + "'");
  require(optimizer == "es_pgpe" || optimizer == "es_vanilla" ||
              optimizer == "bptt_reinforce" || optimizer == "bptt_supervised",
          "unknown optimizer '" + optimizer + "'");
  require(threads >= 1, "threads must be >= 1");
  require(repeats >= 1, "repeats must be >= 1");
  require(!out_dir.empty(), "output directory must not be empty");
  if (task != "sphere") {
    require(layers.size() >= 2, "need at least input and output layer sizes");
    for (int n : layers) require(n >= 1, "layer sizes must be positive");
  } else {
    require(sphere_dim >= 1, "sphere_dim must be >= 1");
    require(optimizer == "es_pgpe" || optimizer == "es_vanilla",
            "the sphere task has no trajectory to backpropagate through");
  }
  require(delta_t > 0.0, "delta_t must be positive");
  require(tau_m > delta_t, "tau_m must exceed delta_t");
  require(v_th > 0.0, "v_th must be positive");
  require(r_mem > 0.0, "r_mem must be positive");
  require(current_scale > 0.0, "current_scale must be positive");
  require(mask.count() > 0 || train_weights || task == "sphere",
          "nothing to train: empty mask and train_weights = false");
  if (optimizer == "bptt_supervised")
    require(task == "classify", "bptt_supervised only applies to the classify task");
  if (task == "classify")
    require(!train_images.empty() && !train_labels.empty(),
            "classify needs env.train_images and env.train_labels");
  es.validate();
  require(lr_bp > 0.0, "bptt.lr must be positive");
  require(batch_episodes >= 1, "bptt.batch_episodes must be >= 1");
  require(memory_n >= 1, "env.memory_n must be >= 1");
  require(max_steps >= 1, "env.max_steps must be >= 1");
  require(episodes_per_genome >= 1, "env.episodes_per_genome must be >= 1");
  require(eval_episodes >= 1, "env.eval_episodes must be >= 1");
  require(subset >= 0, "env.subset must be >= 0");
  require(sim_steps >= 1, "env.sim_steps must be >= 1");
}

NetworkSpec ExperimentConfig::network_spec() const {
  NetworkSpec spec;
  spec.layer_sizes = layers;
  spec.delta_t = delta_t;
  spec.current_scale = current_scale;
  spec.spiking_readout = spiking_readout;
  return spec;
}

Network ExperimentConfig::make_network() const {
  Network net = Network::make(network_spec(), derive_key({seed, 0x4E4554}));
  for (auto& p : net.params) {
    int n = p.size();
    p.tau_raw = Array::Constant(n, tau_raw_for(tau_m, delta_t));
    p.v_th = Array::Constant(n, v_th);
    p.v_rest = Array::Constant(n, v_rest);
    p.r_mem = Array::Constant(n, r_mem);
  }
  return net;
}

std::string ExperimentConfig::resolved_text() const {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto kd = [&](const std::string& k, double v) { kv(k, g17(v)); };
  auto ki = [&](const std::string& k, long long v) { kv(k, std::to_string(v)); };
  auto kb = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };

  out += "[run]\n";
  kv("task", task);
  kv("optimizer", optimizer);
  ki("seed", static_cast<long long>(seed));
  kv("out", out_dir);
  ki("threads", threads);
  ki("repeats", repeats);

  out += "\n[network]\n";
  if (!layers.empty()) {
    std::string ls;
    for (std::size_t i = 0; i < layers.size(); ++i)
      ls += (i ? "," : "") + std::to_string(layers[i]);
    kv("layers", ls);
  }
  kb("spiking_readout", spiking_readout);
  kd("delta_t", delta_t);
  kd("tau_m", tau_m);
  kd("v_th", v_th);
  kd("v_rest", v_rest);
  kd("r_mem", r_mem);
  kd("current_scale", current_scale);

  out += "\n[train]\n";
  kv("mask", mask_to_string(mask));
  kb("train_weights", train_weights);

  out += "\n[es]\n";
  ki("population", es.population);
  kd("sigma0", es.sigma0);
  kd("lr_center", es.lr_center);
  kd("lr_sigma", es.lr_sigma);
  ki("generations", es.generations);
  kb("rank_shaping", es.rank_shaping);

  out += "\n[bptt]\n";
  kd("lr", lr_bp);
  kv("surrogate", to_string(surrogate.kind));
  kd("alpha", surrogate.alpha);
  kv("grad_mode", to_string(grad_mode));
  ki("batch_episodes", batch_episodes);

  out += "\n[env]\n";
  ki("memory_n", memory_n);
  ki("max_steps", max_steps);
  kd("input_gain", input_gain);
  ki("episodes_per_genome", episodes_per_genome);
  ki("eval_episodes", eval_episodes);
  ki("sphere_dim", sphere_dim);
  if (!train_images.empty()) kv("train_images", train_images);
  if (!train_labels.empty()) kv("train_labels", train_labels);
  if (!test_images.empty()) kv("test_images", test_images);
  if (!test_labels.empty()) kv("test_labels", test_labels);
  ki("subset", subset);
  ki("sim_steps", sim_steps);
  kv("fitness", cross_entropy ? "xent" : "accuracy");
  return out;
}

std::uint64_t ExperimentConfig::config_hash() const {
  std::string text = resolved_text();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace hsnn
