#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hsnn/types.hpp"

namespace hsnn {

enum class EsAlgorithm { VanillaEs, Pgpe };

EsAlgorithm es_algorithm_from_string(const std::string& name);
std::string to_string(EsAlgorithm a);

struct EsConfig {
  int population = 256;
  double sigma0 = 0.1;
  double lr_center = 0.15;
  double lr_sigma = 0.1;
  int generations = 1000;
  std::uint64_t seed = 0;
  EsAlgorithm algorithm = EsAlgorithm::Pgpe;
  bool maximize = true;       ///< ascent on reward; false = descent on loss
  bool rank_shaping = false;  ///< centered-rank fitness shaping (off: raw fitness)

  void validate() const;
};

struct EsState {
  Vector center;
  Array sigma;  ///< per-dimension exploration noise, clamped to [1e-4, 1.0]
  int generation = 0;
  std::uint64_t seed = 0;

  static EsState init(const Vector& center0, const EsConfig& cfg);
  void validate() const;
};

inline constexpr double kSigmaMin = 1e-4;
inline constexpr double kSigmaMax = 1.0;

/// Pure fitness of one population member; must derive any episode randomness
/// from (generation, member) so evaluation order and thread count never matter.
using FitnessFn = std::function<double(const Genome&, int generation, int member)>;

struct GenStats {
  int generation = 0;
  double fitness_mean = 0.0;
  double fitness_max = 0.0;
  double fitness_min = 0.0;
  double sigma_mean = 0.0;
  int excluded = 0;  ///< members dropped for non-finite fitness
};

/// Score-function gradient estimate from isotropic perturbations:
/// (1/M) sum_j (eps_j / sigma) (L_j - mean L). Mean-baselined, so any constant
/// shift of L cancels exactly.
Vector es_gradient(const Vector& center, double sigma, const std::vector<Vector>& eps,
                   const std::vector<double>& fitness);

/// One plain gradient step on the center: ascent when maximize, else descent.
EsState es_update(const EsState& state, const Vector& gradient, double lr, bool maximize);

/// One generation of PGPE: M/2 symmetric pairs theta +- sigma*eps, rank-1
/// center estimate from (r+ - r-)/2 scaled by eps/sigma, per-dimension sigma
/// adapted from ((r+ + r-)/2 - baseline)(eps^2 - 1)*sigma, then clamped.
/// Non-finite fitness drops the whole pair (warning counted in stats); a
/// generation where every pair is dropped throws.
EsState pgpe_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                  GenStats* stats = nullptr, int threads = 1);

/// One generation of the plain estimator: M independent perturbations,
/// es_gradient, fixed sigma.
EsState vanilla_es_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                        GenStats* stats = nullptr, int threads = 1);

/// Dispatch on cfg.algorithm.
EsState es_step(const EsState& state, const FitnessFn& fitness, const EsConfig& cfg,
                GenStats* stats = nullptr, int threads = 1);

/// Centered ranks in [-0.5, 0.5], ties broken by index; used when
/// cfg.rank_shaping is set.
std::vector<double> centered_ranks(const std::vector<double>& fitness);

}  // namespace hsnn
