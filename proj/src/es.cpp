#include "hsnn/es.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hsnn/parallel.hpp"
#include "hsnn/rng.hpp"

namespace hsnn {

EsAlgorithm es_algorithm_from_string(const std::string& name) {
  if (name == "vanilla_es") return EsAlgorithm::VanillaEs;
  if (name == "pgpe") return EsAlgorithm::Pgpe;
  throw std::invalid_argument("unknown ES algorithm '" + name +
                              "' (expected vanilla_es or pgpe)");
}

std::string to_string(EsAlgorithm a) {
  return a == EsAlgorithm::VanillaEs ? "vanilla_es" : "pgpe";
}

void EsConfig::validate() const {
  require(population > 0, "EsConfig: population must be positive");
  require(algorithm != EsAlgorithm::Pgpe || population % 2 == 0,
          "EsConfig: symmetric sampling needs an even population");
  require(sigma0 > 0.0 && lr_center > 0.0 && lr_sigma > 0.0,
          "EsConfig: sigma0 and learning rates must be positive");
  require(generations > 0, "EsConfig: generations must be positive");
}

EsState EsState::init(const Vector& center0, const EsConfig& cfg) {
  cfg.validate();
  require(center0.size() > 0, "EsState: empty center");
  EsState st;
  st.center = center0;
  st.sigma = Array::Constant(center0.size(), cfg.sigma0);
  st.generation = 0;
  st.seed = cfg.seed;
  return st;
}

void EsState::validate() const {
  require(center.allFinite(), "EsState: non-finite center");
  require((sigma > 0.0).all(), "EsState: sigma must stay positive");
}

Vector es_gradient(const Vector& center, double sigma, const std::vector<Vector>& eps,
                   const std::vector<double>& fitness) {
  require(!eps.empty() && eps.size() == fitness.size(),
          "es_gradient: need matching, nonempty perturbation and fitness lists");
  require(sigma > 0.0, "es_gradient: sigma must be positive");
  const double baseline =
      std::accumulate(fitness.begin(), fitness.end(), 0.0) / fitness.size();
  Vector g = Vector::Zero(center.size());
  for (std::size_t j = 0; j < eps.size(); ++j) {
    require(eps[j].size() == center.size(), "es_gradient: perturbation dimension mismatch");
    g += eps[j] * (fitness[j] - baseline);
  }
  return g / (sigma * static_cast<double>(eps.size()));
}

EsState es_update(const EsState& state, const Vector& gradient, double lr, bool maximize) {
  require(gradient.size() == state.center.size(), "es_update: gradient dimension mismatch");
  EsState next = state;
  next.center += (maximize ? lr : -lr) * gradient;
  next.generation = state.generation + 1;
  return next;
}

std::vector<double> centered_ranks(const std::vector<double>& fitness) {
  std::vector<int> order;
  for (std::size_t i = 0; i < fitness.size(); ++i)
    if (std::isfinite(fitness[i])) order.push_back(static_cast<int>(i));
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[a] < fitness[b]; });
  // excluded (non-finite) members keep rank 0; they never enter the update
  std::vector<double> shaped(fitness.size(), 0.0);
  const int n = static_cast<int>(order.size());
  for (int r = 0; r < n; ++r)
    shaped[order[r]] = n == 1 ? 0.0 : static_cast<double>(r) / (n - 1) - 0.5;
  return shaped;
}

namespace {

Array draw_eps(Rng& rng, int dim) {
  Array e(dim);
  for (int i = 0; i < dim; ++i) e[i] = rng.normal();
  return e;
}

GenStats collect_stats(int generation, const std::vector<double>& fitness,
                       const std::vector<bool>& ok, const Array& sigma) {
  GenStats st;
  st.generation = generation;
  st.fitness_max = -std::numeric_limits<double>::infinity();
  st.fitness_min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (!ok[i]) {
      ++st.excluded;
      continue;
    }
    sum += fitness[i];
    st.fitness_max = std::max(st.fitness_max, fitness[i]);
    st.fitness_min = std::min(st.fitness_min, fitness[i]);
    ++n;
  }
  require(n > 0, "es: every member of the generation produced non-finite fitness");
  st.fitness_mean = sum / n;
  st.sigma_mean = sigma.mean();
  return st;
}

}  // namespace

EsState pgpe_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                  GenStats* stats, int threads) {
  cfg.validate();
  state.validate();
  require(cfg.algorithm == EsAlgorithm::Pgpe, "pgpe_step: config selects a different algorithm");
  const int dim = static_cast<int>(state.center.size());
  const int pairs = cfg.population / 2;

  std::vector<Array> eps(pairs);
  for (int j = 0; j < pairs; ++j) {
    Rng rng(derive_key({state.seed, static_cast<std::uint64_t>(state.generation),
                        static_cast<std::uint64_t>(j), 0x455053ull /* "EPS" */}));
    eps[j] = draw_eps(rng, dim);
  }

  std::vector<double> fit(cfg.population);
  parallel_for(cfg.population, threads, [&](int m) {
    const int j = m / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    Genome g = state.center + (sign * state.sigma * eps[j]).matrix();
    fit[m] = fitness(g, state.generation, m);
  });

  std::vector<bool> ok(cfg.population);
  for (int m = 0; m < cfg.population; ++m) ok[m] = std::isfinite(fit[m]);
  GenStats st = collect_stats(state.generation, fit, ok, state.sigma);

  std::vector<double> shaped = cfg.rank_shaping ? centered_ranks(fit) : fit;

  // pair-mean baseline over usable pairs
  double baseline = 0.0;
  int used = 0;
  for (int j = 0; j < pairs; ++j) {
    if (!ok[2 * j] || !ok[2 * j + 1]) continue;
    baseline += 0.5 * (shaped[2 * j] + shaped[2 * j + 1]);
    ++used;
  }
  require(used > 0, "pgpe_step: no usable symmetric pair in this generation");
  baseline /= used;

  Array g_center = Array::Zero(dim);
  Array g_sigma = Array::Zero(dim);
  for (int j = 0; j < pairs; ++j) {
    if (!ok[2 * j] || !ok[2 * j + 1]) continue;
    const double dr = 0.5 * (shaped[2 * j] - shaped[2 * j + 1]);
    const double mr = 0.5 * (shaped[2 * j] + shaped[2 * j + 1]);
    g_center += dr * eps[j] / state.sigma;
    g_sigma += (mr - baseline) * (eps[j].square() - 1.0) * state.sigma;
  }
  g_center /= used;
  g_sigma /= used;

  EsState next = state;
  const double dir = cfg.maximize ? 1.0 : -1.0;
  next.center += dir * cfg.lr_center * g_center.matrix();
  next.sigma = (state.sigma + dir * cfg.lr_sigma * g_sigma).max(kSigmaMin).min(kSigmaMax);
  next.generation = state.generation + 1;
  st.sigma_mean = next.sigma.mean();
  if (stats) *stats = st;
  return next;
}

EsState vanilla_es_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                        GenStats* stats, int threads) {
  cfg.validate();
  state.validate();
  const int dim = static_cast<int>(state.center.size());
  const int M = cfg.population;

  std::vector<Array> eps(M);
  for (int j = 0; j < M; ++j) {
    Rng rng(derive_key({state.seed, static_cast<std::uint64_t>(state.generation),
                        static_cast<std::uint64_t>(j), 0x455053ull}));
    eps[j] = draw_eps(rng, dim);
  }

  std::vector<double> fit(M);
  parallel_for(M, threads, [&](int m) {
    Genome g = state.center + (state.sigma * eps[m]).matrix();
    fit[m] = fitness(g, state.generation, m);
  });

  std::vector<bool> ok(M);
  for (int m = 0; m < M; ++m) ok[m] = std::isfinite(fit[m]);
  GenStats st = collect_stats(state.generation, fit, ok, state.sigma);

  std::vector<double> shaped = cfg.rank_shaping ? centered_ranks(fit) : fit;
  double baseline = 0.0;
  int used = 0;
  for (int m = 0; m < M; ++m) {
    if (!ok[m]) continue;
    baseline += shaped[m];
    ++used;
  }
  baseline /= used;

  Array g_center = Array::Zero(dim);
  for (int m = 0; m < M; ++m) {
    if (!ok[m]) continue;
    g_center += (shaped[m] - baseline) * eps[m] / state.sigma;
  }
  g_center /= used;

  EsState next = state;
  next.center += (cfg.maximize ? 1.0 : -1.0) * cfg.lr_center * g_center.matrix();
  next.generation = state.generation + 1;
  if (stats) *stats = st;
  return next;
}

EsState es_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                GenStats* stats, int threads) {
  return cfg.algorithm == EsAlgorithm::Pgpe ? pgpe_step(state, fitness, cfg, stats, threads)
                                            : vanilla_es_step(state, fitness, cfg, stats, threads);
}

}  // namespace hsnn
