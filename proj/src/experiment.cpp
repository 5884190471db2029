#include "hsnn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hsnn/checkpoint.hpp"
#include "hsnn/classify.hpp"
#include "hsnn/csv.hpp"
#include "hsnn/evaluate.hpp"
#include "hsnn/reinforce.hpp"
#include "hsnn/rng.hpp"

namespace hsnn {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Key tags keeping the seed streams disjoint: ES training episodes use
// (seed, generation, member, episode) with member < population, so the eval
// stream parks itself on an impossible member value.
constexpr std::uint64_t kEvalStream = ~0ull;
constexpr std::uint64_t kTrainEnvTag = 0x656E76;   // "env"
constexpr std::uint64_t kTrainPolicyTag = 0x706F6C;  // "pol"
constexpr std::uint64_t kStatsTag = 0x53544154;    // "STAT"

double elapsed_s(Clock::time_point from) {
  return std::chrono::duration<double>(Clock::now() - from).count();
}

struct Summary {
  double mean = 0.0, max = 0.0, min = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  s.max = *std::max_element(xs.begin(), xs.end());
  s.min = *std::min_element(xs.begin(), xs.end());
  return s;
}

EnvFactory task_env_factory(const ExperimentConfig& cfg) {
  if (cfg.task == "memory") {
    int n = cfg.memory_n;
    return [n] { return std::make_unique<MemoryLengthEnv>(n); };
  }
  if (cfg.task == "cartpole") {
    CartPoleConfig cc;
    cc.max_steps = cfg.max_steps;
    return [cc] { return std::make_unique<CartPoleEnv>(cc); };
  }
  throw std::invalid_argument("task '" + cfg.task + "' has no environment");
}

// ---- run-directory files ----------------------------------------------------

std::string curve_header() {
  return "generation,fitness_mean,fitness_max,fitness_min,sigma_mean,eval\n";
}

std::string curve_line(const CurveRow& r) {
  return std::to_string(r.generation) + "," + g17(r.fitness_mean) + "," + g17(r.fitness_max) +
         "," + g17(r.fitness_min) + "," + g17(r.sigma_mean) + "," + g17(r.eval) + "\n";
}

void write_curves(const std::string& dir, const std::vector<CurveRow>& rows) {
  std::string out = curve_header();
  for (const auto& r : rows) out += curve_line(r);
  atomic_write(dir + "/curves.csv", out);
}

void write_gen_stats(const std::string& dir, const std::vector<CurveRow>& rows,
                     const std::vector<double>& elapsed) {
  std::string out = "generation,fitness_mean,fitness_max,fitness_min,sigma_mean,elapsed_s\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(r.generation) + "," + g17(r.fitness_mean) + "," + g17(r.fitness_max) +
           "," + g17(r.fitness_min) + "," + g17(r.sigma_mean) + "," + g17(elapsed[i]) + "\n";
  }
  atomic_write(dir + "/gen_stats.csv", out);
}

void write_genome_csv(const std::string& dir, const Network& net) {
  std::string out = "layer,neuron,tau_m_ms,v_th,v_rest,r_mem\n";
  for (int l = 0; l < net.num_layers(); ++l) {
    const NeuronParams& p = net.params[l];
    Array tau_ms = p.tau_m() * 1000.0;
    for (int i = 0; i < p.size(); ++i) {
      out += std::to_string(l + 1) + "," + std::to_string(i) + "," + g17(tau_ms[i]) + "," +
             g17(p.v_th[i]) + "," + g17(p.v_rest[i]) + "," + g17(p.r_mem[i]) + "\n";
    }
  }
  atomic_write(dir + "/genome.csv", out);
}

void write_metadata(const std::string& dir, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cfg.config_hash()));
  std::string out;
  out += "task = " + cfg.task + "\n";
  out += "optimizer = " + cfg.optimizer + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "config_hash = " + std::string(hash) + "\n";
  if (cfg.budget > 0) out += "budget = " + std::to_string(cfg.budget) + "\n";
  for (const auto& [k, v] : extra) out += k + " = " + v + "\n";
  atomic_write(dir + "/metadata.txt", out);
}

// Gradient-run checkpoints reuse the ES container: center carries the
// parameter vector, sigma is a placeholder of ones.
void save_param_checkpoint(const std::string& path, const Genome& params, int update,
                           std::uint64_t seed) {
  EsState st;
  st.center = params;
  st.sigma = Array::Ones(params.size());
  st.generation = update;
  st.seed = seed;
  save_checkpoint(path, st);
}

void log_row(std::ostream* log, const std::string& what, const CurveRow& r, int total) {
  if (!log) return;
  int period = std::max(1, total / 10);
  if (r.generation % period != 0 && r.generation != total - 1) return;
  (*log) << what << " " << r.generation + 1 << "/" << total << "  fitness mean " << r.fitness_mean
         << " max " << r.fitness_max << "  eval " << r.eval << "\n";
}

// ---- task runtimes ----------------------------------------------------------

struct EsRuntime {
  FitnessFn fitness;
  std::function<double(const Genome&, int)> eval;  // (center, generation) -> score
  Genome genome0;
};

EsRuntime sphere_runtime(const ExperimentConfig& cfg) {
  EsRuntime rt;
  rt.fitness = [](const Genome& g, int, int) { return g.squaredNorm(); };
  rt.eval = [](const Genome& g, int) { return g.squaredNorm(); };
  rt.genome0 = Vector::Ones(cfg.sphere_dim);
  return rt;
}

EsRuntime env_runtime(const ExperimentConfig& cfg, const Network& base) {
  auto spec = std::make_shared<EvalSpec>();
  spec->base = base;
  spec->mask = cfg.mask;
  spec->train_weights = cfg.train_weights;
  spec->env_factory = task_env_factory(cfg);
  spec->episodes = cfg.episodes_per_genome;
  spec->base_seed = cfg.seed;
  spec->input_gain = cfg.input_gain;
  spec->validate();

  EsRuntime rt;
  rt.fitness = env_fitness(spec);
  rt.eval = [spec, episodes = cfg.eval_episodes](const Genome& g, int gen) {
    Network net = spec->base;
    unpack_genome(net, g, spec->mask, spec->train_weights);
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
      auto env = spec->env_factory();
      sum += rollout(net, *env,
                     derive_key({spec->base_seed, static_cast<std::uint64_t>(gen), kEvalStream,
                                 static_cast<std::uint64_t>(e)}),
                     spec->input_gain)
                 .total_reward;
    }
    return sum / episodes;
  };
  rt.genome0 = pack_genome(base, cfg.mask, cfg.train_weights);
  return rt;
}

EsRuntime classify_runtime(const ExperimentConfig& cfg, const Network& base,
                           std::shared_ptr<const ImageDataset> data,
                           std::shared_ptr<const std::vector<int>> indices) {
  ClassifyConfig cc{cfg.sim_steps, cfg.input_gain, cfg.cross_entropy};
  EsRuntime rt;
  rt.fitness = [base, data, indices, cc, mask = cfg.mask, tw = cfg.train_weights](
                   const Genome& g, int, int) {
    Network net = base;
    unpack_genome(net, g, mask, tw);
    return batch_fitness(net, *data, *indices, cc, 1);
  };
  rt.eval = [base, data, indices, cc, mask = cfg.mask, tw = cfg.train_weights,
             threads = cfg.threads](const Genome& g, int) {
    Network net = base;
    unpack_genome(net, g, mask, tw);
    return batch_accuracy(net, *data, *indices, cc, threads);
  };
  rt.genome0 = pack_genome(base, cfg.mask, cfg.train_weights);
  return rt;
}

TrainResult train_es(const ExperimentConfig& cfg, const EsRuntime& rt, const std::string& dir,
                     std::ostream* log) {
  auto t0 = Clock::now();
  EsConfig es = cfg.es;
  es.seed = cfg.seed;
  EsState st = EsState::init(rt.genome0, es);

  TrainResult res;
  res.run_dir = dir;
  std::vector<double> elapsed;
  for (int g = 0; g < es.generations; ++g) {
    auto tg = Clock::now();
    GenStats stats;
    st = es_step(st, rt.fitness, es, &stats, cfg.threads);
    CurveRow row{g,          stats.fitness_mean, stats.fitness_max,
                 stats.fitness_min, stats.sigma_mean,   rt.eval(st.center, g)};
    res.curves.push_back(row);
    elapsed.push_back(elapsed_s(tg));
    save_checkpoint(dir + "/checkpoint.bin", st);
    write_curves(dir, res.curves);
    write_gen_stats(dir, res.curves, elapsed);
    log_row(log, "generation", row, es.generations);
  }
  res.genome = st.center;
  res.final_eval = res.curves.empty() ? 0.0 : res.curves.back().eval;
  res.wall_time_s = elapsed_s(t0);
  return res;
}

TrainResult train_reinforce(const ExperimentConfig& cfg, const Network& base,
                            const std::string& dir, std::ostream* log) {
  auto t0 = Clock::now();
  auto factory = task_env_factory(cfg);
  Genome params = pack_genome(base, cfg.mask, cfg.train_weights);
  Adam adam(static_cast<int>(params.size()), cfg.lr_bp);
  ReinforceConfig rc{cfg.surrogate, cfg.grad_mode, cfg.mask, cfg.train_weights};
  EsRuntime evaler = env_runtime(cfg, base);  // reuse the deterministic eval

  TrainResult res;
  res.run_dir = dir;
  std::vector<double> elapsed;
  const int updates = cfg.es.generations;
  for (int u = 0; u < updates; ++u) {
    auto tu = Clock::now();
    Network net = base;
    unpack_genome(net, params, cfg.mask, cfg.train_weights);

    std::vector<Episode> episodes;
    std::vector<double> returns;
    episodes.reserve(cfg.batch_episodes);
    for (int e = 0; e < cfg.batch_episodes; ++e) {
      auto env = factory();
      const std::uint64_t uu = u, ee = e;
      episodes.push_back(sample_rollout(net, *env, derive_key({cfg.seed, uu, ee, kTrainEnvTag}),
                                        derive_key({cfg.seed, uu, ee, kTrainPolicyTag}),
                                        cfg.input_gain));
      returns.push_back(episodes.back().total_reward);
    }
    // The batch-mean baseline zeroes a one-episode batch; fall back to 0.
    Genome grad = episodes.size() == 1
                      ? reinforce_gradient(net, episodes, rc, 0.0)
                      : reinforce_gradient(net, episodes, rc);
    params = adam.step(params, grad);

    Summary s = summarize(returns);
    CurveRow row{u, s.mean, s.max, s.min, 0.0, evaler.eval(params, u)};
    res.curves.push_back(row);
    elapsed.push_back(elapsed_s(tu));
    save_param_checkpoint(dir + "/checkpoint.bin", params, u + 1, cfg.seed);
    write_curves(dir, res.curves);
    write_gen_stats(dir, res.curves, elapsed);
    log_row(log, "update", row, updates);
  }
  res.genome = params;
  res.final_eval = res.curves.empty() ? 0.0 : res.curves.back().eval;
  res.wall_time_s = elapsed_s(t0);
  return res;
}

TrainResult train_supervised(const ExperimentConfig& cfg, const Network& base,
                             const ImageDataset& data, const std::vector<int>& indices,
                             const std::string& dir, std::ostream* log) {
  auto t0 = Clock::now();
  Genome params = pack_genome(base, cfg.mask, cfg.train_weights);
  Adam adam(static_cast<int>(params.size()), cfg.lr_bp);
  ClassifyConfig cc{cfg.sim_steps, cfg.input_gain, cfg.cross_entropy};

  TrainResult res;
  res.run_dir = dir;
  std::vector<double> elapsed;
  const int updates = cfg.es.generations;
  const int batch = static_cast<int>(indices.size());
  for (int u = 0; u < updates; ++u) {
    auto tu = Clock::now();
    Network net = base;
    unpack_genome(net, params, cfg.mask, cfg.train_weights);

    Genome grad = Genome::Zero(params.size());
    std::vector<double> loglik(batch);
    for (int b = 0; b < batch; ++b) {
      const int idx = indices[b];
      std::vector<Array> inputs(cfg.sim_steps, data.image_current(idx, cfg.input_gain).array());
      Trajectory traj = forward(net, inputs);
      Vector logits = traj.steps.back().v.back().matrix();
      Vector p = softmax(logits);
      const int label = data.labels[idx];
      loglik[b] = std::log(std::max(p[label], 1e-300));
      LossGrads lg(cfg.sim_steps, Array(0));
      Vector dv = p;
      dv[label] -= 1.0;  // d(-log p_label)/d logits
      lg[cfg.sim_steps - 1] = dv.array();
      grad += pack_gradients(backward(net, traj, lg, cfg.surrogate, cfg.grad_mode), net, cfg.mask,
                             cfg.train_weights);
    }
    grad /= double(batch);
    params = adam.step(params, grad);

    Network trained = base;
    unpack_genome(trained, params, cfg.mask, cfg.train_weights);
    Summary s = summarize(loglik);
    CurveRow row{u, s.mean, s.max, s.min, 0.0,
                 batch_accuracy(trained, data, indices, cc, cfg.threads)};
    res.curves.push_back(row);
    elapsed.push_back(elapsed_s(tu));
    save_param_checkpoint(dir + "/checkpoint.bin", params, u + 1, cfg.seed);
    write_curves(dir, res.curves);
    write_gen_stats(dir, res.curves, elapsed);
    log_row(log, "update", row, updates);
  }
  res.genome = params;
  res.final_eval = res.curves.empty() ? 0.0 : res.curves.back().eval;
  res.wall_time_s = elapsed_s(t0);
  return res;
}

int coalition_bits(const TrainableMask& m) {
  return int(m.tau_raw) | int(m.v_th) << 1 | int(m.v_rest) << 2 | int(m.r_mem) << 3;
}

TrainableMask mask_from_bits(int bits) {
  TrainableMask m = TrainableMask::none();
  m.tau_raw = bits & 1;
  m.v_th = bits & 2;
  m.v_rest = bits & 4;
  m.r_mem = bits & 8;
  return m;
}

}  // namespace

TrainResult run_train(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const std::string dir = cfg.out_dir;
  fs::create_directories(dir);
  atomic_write(dir + "/config.resolved", cfg.resolved_text());
  write_metadata(dir, cfg, {{"finished", "false"}});
  if (log) (*log) << "run " << cfg.task << "/" << cfg.optimizer << " -> " << dir << "\n";

  TrainResult res;
  std::vector<std::pair<std::string, std::string>> extra;
  if (cfg.task == "sphere") {
    res = train_es(cfg, sphere_runtime(cfg), dir, log);
  } else if (cfg.task == "classify") {
    auto data = std::make_shared<ImageDataset>(load_dataset(cfg.train_images, cfg.train_labels));
    auto indices = std::make_shared<std::vector<int>>(subset_indices(*data, cfg.subset));
    Network base = cfg.make_network();
    if (base.spec.input_size() != data->rows * data->cols)
      throw std::invalid_argument("network input size " +
                                  std::to_string(base.spec.input_size()) +
                                  " does not match image size " +
                                  std::to_string(data->rows * data->cols));
    if (cfg.optimizer == "bptt_supervised")
      res = train_supervised(cfg, base, *data, *indices, dir, log);
    else
      res = train_es(cfg, classify_runtime(cfg, base, data, indices), dir, log);

    Network trained = base;
    unpack_genome(trained, res.genome, cfg.mask, cfg.train_weights);
    write_genome_csv(dir, trained);
    extra.emplace_back("train_accuracy", g17(res.final_eval));
    if (!cfg.test_images.empty() && !cfg.test_labels.empty()) {
      ImageDataset test = load_dataset(cfg.test_images, cfg.test_labels);
      std::vector<int> all(test.count());
      std::iota(all.begin(), all.end(), 0);
      ClassifyConfig cc{cfg.sim_steps, cfg.input_gain, cfg.cross_entropy};
      extra.emplace_back("test_accuracy", g17(batch_accuracy(trained, test, all, cc, cfg.threads)));
    }
  } else {
    Network base = cfg.make_network();
    if (cfg.optimizer == "bptt_reinforce")
      res = train_reinforce(cfg, base, dir, log);
    else
      res = train_es(cfg, env_runtime(cfg, base), dir, log);
    Network trained = base;
    unpack_genome(trained, res.genome, cfg.mask, cfg.train_weights);
    write_genome_csv(dir, trained);
    if (cfg.task == "memory")
      extra.emplace_back("final_success_rate", g17((res.final_eval + 1.0) / 2.0));
  }

  extra.emplace_back("genome_dim", std::to_string(res.genome.size()));
  extra.emplace_back("iterations", std::to_string(res.curves.size()));
  extra.emplace_back("final_eval", g17(res.final_eval));
  extra.emplace_back("wall_time_s", g17(res.wall_time_s));
  extra.emplace_back("finished", "true");
  write_metadata(dir, cfg, extra);
  if (log) (*log) << "done: final eval " << res.final_eval << " in " << res.wall_time_s << "s\n";
  return res;
}

std::vector<TrainableMask> all_property_masks() {
  std::vector<TrainableMask> masks;
  for (int bits = 1; bits < 16; ++bits) masks.push_back(mask_from_bits(bits));
  return masks;
}

std::vector<AblateRow> run_ablate(const ExperimentConfig& cfg,
                                  const std::vector<TrainableMask>& masks, std::ostream* log) {
  cfg.validate();
  if (cfg.task == "sphere") throw std::invalid_argument("ablate: sphere has no property masks");
  if (masks.empty()) throw std::invalid_argument("ablate: empty mask list");
  std::vector<int> seen;
  for (const auto& m : masks) {
    if (m.count() == 0) throw std::invalid_argument("ablate: all-false mask has an empty genome");
    int bits = coalition_bits(m);
    if (std::count(seen.begin(), seen.end(), bits))
      throw std::invalid_argument("ablate: duplicate mask " + mask_to_string(m));
    seen.push_back(bits);
  }

  const int in = cfg.layers.front(), out = cfg.layers.back();
  std::vector<AblateRow> rows;
  for (const auto& m : masks) {
    ExperimentConfig c = cfg;
    c.mask = m;
    c.train_weights = false;
    if (cfg.budget > 0)
      c.layers = {in, solve_hidden_width(cfg.budget, in, out, m, false), out};
    std::string name = mask_to_string(m);
    std::string dir_name = name;
    std::replace(dir_name.begin(), dir_name.end(), ',', '+');

    std::vector<double> finals;
    for (int r = 0; r < cfg.repeats; ++r) {
      c.seed = cfg.seed + r;
      c.out_dir = cfg.out_dir + "/ablate/" + dir_name + "/seed" + std::to_string(c.seed);
      finals.push_back(run_train(c, log).final_eval);
    }
    double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / finals.size();
    double sq = 0.0;
    for (double f : finals) sq += (f - mean) * (f - mean);
    double sd = finals.size() > 1 ? std::sqrt(sq / (finals.size() - 1)) : 0.0;
    rows.push_back({coalition_bits(m), dir_name, mean, sd, cfg.repeats});
    if (log) (*log) << "mask " << dir_name << ": reward " << mean << " +- " << sd << "\n";
  }

  std::string csv = "mask_bits,mask,reward_mean,reward_std,repeats\n";
  for (const auto& r : rows)
    csv += std::to_string(r.mask_bits) + "," + r.mask + "," + g17(r.reward_mean) + "," +
           g17(r.reward_std) + "," + std::to_string(r.repeats) + "\n";
  fs::create_directories(cfg.out_dir);
  atomic_write(cfg.out_dir + "/ablation.csv", csv);
  return rows;
}

std::vector<CompareSeries> run_compare(const ExperimentConfig& cfg, int population,
                                       int iterations, std::ostream* log) {
  cfg.validate();
  if (cfg.task != "cartpole")
    throw std::invalid_argument("compare: the BP-vs-ES grid is a cart-pole protocol");
  if (population < 2 || population % 2 || iterations < 1)
    throw std::invalid_argument("compare: need an even population >= 2 and iterations >= 1");

  const int horizons[] = {100, 200, 500, 1000};
  const char* methods[] = {"es_neuron", "es_weight", "bp_neuron", "bp_weight"};

  std::vector<CompareSeries> series;
  std::string csv = "horizon,method,generation,fitness_mean,fitness_max,fitness_min,sigma_mean,eval\n";
  for (int h : horizons) {
    for (const char* method : methods) {
      ExperimentConfig c = cfg;
      c.max_steps = h;
      c.es.population = population;
      c.es.generations = iterations;
      c.episodes_per_genome = 1;
      c.batch_episodes = population;
      const bool weight_space = std::string(method).find("weight") != std::string::npos;
      c.mask = weight_space ? TrainableMask::none() : TrainableMask::all();
      c.train_weights = weight_space;
      if (std::string(method).rfind("es", 0) == 0) {
        c.optimizer = "es_pgpe";
      } else {
        c.optimizer = "bptt_reinforce";
        c.lr_bp = weight_space ? kCompareBpWeightLr : cfg.lr_bp;
      }
      c.out_dir = cfg.out_dir + "/compare/h" + std::to_string(h) + "_" + method;
      if (log) (*log) << "compare cell: horizon " << h << ", " << method << "\n";
      TrainResult res = run_train(c, log);
      for (const auto& r : res.curves)
        csv += std::to_string(h) + "," + method + "," + curve_line(r);
      series.push_back({h, method, res.curves, res.final_eval});
    }
  }
  fs::create_directories(cfg.out_dir);
  atomic_write(cfg.out_dir + "/compare.csv", csv);
  return series;
}

std::string FitdistReport::to_csv() const {
  auto row = [&](const FitResult& f) {
    return fit_family_to_string(f.family) + "," + g17(f.shape) + "," + g17(f.scale) + "," +
           g17(f.log_likelihood) + "," + std::to_string(f.n) + "," +
           (f.converged ? "true" : "false") + "," + (f.degenerate ? "true" : "false") + "," +
           g17(skewness) + "\n";
  };
  return "family,shape,scale,log_likelihood,n,converged,degenerate,skewness\n" + row(gamma) +
         row(lognormal);
}

FitdistReport run_fitdist(const std::string& samples_csv, const std::string& out_csv) {
  auto rows = parse_csv(read_file(samples_csv));
  if (rows.empty()) throw std::invalid_argument("fitdist: '" + samples_csv + "' is empty");

  int col = 0, first_data_row = 0;
  bool header = false;
  try {
    (void)std::stod(rows[0][0]);
  } catch (const std::exception&) {
    header = true;
    first_data_row = 1;
    auto it = std::find(rows[0].begin(), rows[0].end(), "tau_m_ms");
    if (it != rows[0].end())
      col = static_cast<int>(it - rows[0].begin());
    else if (rows[0].size() != 1)
      throw std::invalid_argument(
          "fitdist: multi-column input needs a tau_m_ms column (got a header without one)");
  }
  (void)header;

  std::vector<double> samples;
  for (std::size_t i = first_data_row; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) <= col)
      throw std::invalid_argument("fitdist: line " + std::to_string(i + 1) + ": missing column");
    samples.push_back(parse_double(rows[i][col], static_cast<int>(i + 1)));
  }

  FitdistReport rep;
  rep.gamma = fit_gamma(samples);
  rep.lognormal = fit_lognormal(samples);
  rep.skewness = sample_skewness(samples);
  rep.n = static_cast<int>(samples.size());
  atomic_write(out_csv, rep.to_csv());
  return rep;
}

ShapleyReport run_shapley(const std::string& ablation_csv, double v_empty,
                          const std::string& out_csv) {
  auto rows = parse_csv(read_file(ablation_csv));
  if (rows.size() < 2)
    throw std::invalid_argument("shapley: '" + ablation_csv + "' has no data rows");
  const auto& head = rows[0];
  auto col_of = [&](const std::string& name) {
    auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end())
      throw std::invalid_argument("shapley: input is missing a '" + name + "' column");
    return static_cast<int>(it - head.begin());
  };
  const int bits_col = col_of("mask_bits"), reward_col = col_of("reward_mean");

  std::map<int, double> values;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    int line = static_cast<int>(i + 1);
    int bits = static_cast<int>(parse_double(rows[i][bits_col], line));
    if (values.count(bits))
      throw std::invalid_argument("shapley: line " + std::to_string(line) +
                                  ": duplicate coalition " + coalition_name(bits));
    values[bits] = parse_double(rows[i][reward_col], line);
  }
  if (!values.count(0)) values[0] = v_empty;

  ShapleyReport rep = shapley_exact(values);
  atomic_write(out_csv, rep.to_csv());
  return rep;
}

FiringStats run_stats(const std::string& run_dir, int neuron_sample) {
  ExperimentConfig cfg = ExperimentConfig::from_text(read_file(run_dir + "/config.resolved"));
  if (cfg.task != "classify")
    throw std::invalid_argument("stats: firing-rate analysis needs a classify run, got task '" +
                                cfg.task + "'");
  ImageDataset data = load_dataset(cfg.train_images, cfg.train_labels);
  std::vector<int> indices = subset_indices(data, cfg.subset);

  Network net = cfg.make_network();
  EsState st = load_checkpoint(run_dir + "/checkpoint.bin");
  unpack_genome(net, st.center, cfg.mask, cfg.train_weights);

  std::vector<Trajectory> trajs;
  std::vector<int> labels;
  trajs.reserve(indices.size());
  for (int idx : indices) {
    std::vector<Array> inputs(cfg.sim_steps, data.image_current(idx, cfg.input_gain).array());
    trajs.push_back(forward(net, inputs));
    labels.push_back(data.labels[idx]);
  }

  const int total = total_neurons(trajs.front());
  std::vector<int> ids(total);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_key({cfg.seed, kStatsTag}));
  for (int i = 0; i < std::min(neuron_sample, total); ++i) {
    int j = i + rng.uniform_int(total - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(std::min(neuron_sample, total));
  std::sort(ids.begin(), ids.end());

  FiringStats stats = firing_stats(trajs, labels, 10, ids);
  atomic_write(run_dir + "/firing.csv", stats.to_csv());
  return stats;
}

namespace {

Network gradcheck_net(Rng& rng, int max_total = 8) {
  const int depth = 1 + rng.uniform_int(3);
  NetworkSpec spec;
  spec.layer_sizes.push_back(1 + rng.uniform_int(3));
  int budget = max_total;
  for (int l = 0; l < depth; ++l) {
    int remaining = depth - l;
    int cap = std::max(1, budget - (remaining - 1));
    int n = 1 + rng.uniform_int(std::min(4, cap));
    spec.layer_sizes.push_back(n);
    budget -= n;
  }
  Network net = Network::make(spec, rng.next_u64());
  for (auto& w : net.weights) w *= rng.uniform(2.0, 8.0);
  for (auto& p : net.params) {
    for (int i = 0; i < p.size(); ++i) {
      p.tau_raw[i] = rng.uniform(-2.5, 1.5);
      p.v_th[i] = rng.uniform(0.2, 0.8);
      p.v_rest[i] = rng.uniform(-0.2, 0.2);
      p.r_mem[i] = rng.uniform(2e7, 8e7);
    }
  }
  return net;
}

double grad_rel_gap(const ParamGradients& a, const ParamGradients& b) {
  double worst = 0.0;
  auto upd = [&](double x, double y) {
    double denom = std::max({std::abs(x), std::abs(y), 1e-12});
    worst = std::max(worst, std::abs(x - y) / denom);
  };
  for (std::size_t l = 0; l < a.tau_raw.size(); ++l) {
    for (int i = 0; i < a.tau_raw[l].size(); ++i) {
      upd(a.tau_raw[l][i], b.tau_raw[l][i]);
      upd(a.v_th[l][i], b.v_th[l][i]);
      upd(a.v_rest[l][i], b.v_rest[l][i]);
      upd(a.r_mem[l][i], b.r_mem[l][i]);
    }
    for (int i = 0; i < a.weights[l].size(); ++i)
      upd(a.weights[l].data()[i], b.weights[l].data()[i]);
  }
  return worst;
}

}  // namespace

GradcheckReport run_gradcheck(int cases, std::uint64_t seed, std::ostream* log) {
  const SurrogateKind kinds[] = {SurrogateKind::Rectangular, SurrogateKind::Arctan,
                                 SurrogateKind::LogNonzeroSign};
  GradcheckReport rep;
  rep.cases = cases;
  for (int c = 0; c < cases; ++c) {
    Rng rng(derive_key({seed, static_cast<std::uint64_t>(c)}));
    Network net = gradcheck_net(rng);
    const int T = 1 + rng.uniform_int(20);
    std::vector<Array> inputs(T);
    for (auto& x : inputs) {
      x = Array(net.spec.input_size());
      for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(-0.5, 2.0);
    }
    LossGrads lg(T);
    for (int t = 0; t < T; ++t) {
      if (t == T - 1 || rng.uniform() < 0.3) {
        lg[t] = Array(net.spec.output_size());
        for (int i = 0; i < lg[t].size(); ++i) lg[t][i] = rng.uniform(-1.0, 1.0);
      } else {
        lg[t] = Array(0);
      }
    }
    Surrogate sg{kinds[(c / 2) % 3], 2.0};
    GradMode mode = c % 2 ? GradMode::Detached : GradMode::Full;

    Trajectory traj = forward(net, inputs);
    ParamGradients fast = backward(net, traj, lg, sg, mode);
    ParamGradients slow = eq5_oracle(net, traj, lg, sg, mode);
    rep.max_rel_err = std::max(rep.max_rel_err, grad_rel_gap(fast, slow));

    // Contraction bound of the reset-detached temporal Jacobian.
    for (int t = 0; t < T; ++t) {
      for (int l = 0; l < net.num_layers(); ++l) {
        Array jac = step_jacobian(traj.steps[t].u[l], traj.steps[t].s[l], net.params[l], sg,
                                  GradMode::Detached);
        Array bound = 1.0 - net.params[l].decay();
        rep.max_detached_jacobian = std::max(rep.max_detached_jacobian, jac.abs().maxCoeff());
        rep.contraction_violations += static_cast<int>((jac.abs() > bound).count());
      }
    }
  }
  rep.pass = rep.max_rel_err <= 1e-8 && rep.contraction_violations == 0;
  if (log)
    (*log) << "gradcheck: " << cases << " cases, max relative error " << rep.max_rel_err
           << ", contraction violations " << rep.contraction_violations << " -> "
           << (rep.pass ? "pass" : "FAIL") << "\n";
  return rep;
}

}  // namespace hsnn
