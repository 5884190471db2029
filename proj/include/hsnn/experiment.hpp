#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hsnn/config.hpp"
#include "hsnn/firing.hpp"
#include "hsnn/fit.hpp"
#include "hsnn/shapley.hpp"

namespace hsnn {

// A run directory is self-describing: config.resolved reproduces the run,
// curves.csv holds the deterministic learning curve (byte-identical for a
// given config+seed regardless of thread count), gen_stats.csv adds wall
// times, genome.csv dumps the final per-neuron properties, checkpoint.bin the
// final optimizer state (refreshed every iteration so crashes keep the last
// one), and metadata.txt the summary facts.

struct CurveRow {
  int generation = 0;  ///< ES generation or gradient-update index
  double fitness_mean = 0.0;
  double fitness_max = 0.0;
  double fitness_min = 0.0;
  double sigma_mean = 0.0;  ///< 0 for gradient runs
  double eval = 0.0;        ///< deterministic-policy score of the current center
};

struct TrainResult {
  std::string run_dir;
  std::vector<CurveRow> curves;
  Genome genome;      ///< final center / parameter vector
  double final_eval = 0.0;
  double wall_time_s = 0.0;
};

TrainResult run_train(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// All 15 non-empty property subsets, in coalition-bitmask order.
std::vector<TrainableMask> all_property_masks();

struct AblateRow {
  int mask_bits = 0;  ///< coalition bitmask (bit i = kPropertyNames[i])
  std::string mask;
  double reward_mean = 0.0;
  double reward_std = 0.0;  ///< sample std over repeats (0 for a single repeat)
  int repeats = 0;
};

/// One training run per mask per repeat, hidden width re-solved per mask when
/// the config carries a budget so the trainable count stays comparable.
/// Writes <out>/ablation.csv and the individual run directories beneath <out>.
std::vector<AblateRow> run_ablate(const ExperimentConfig& cfg,
                                  const std::vector<TrainableMask>& masks,
                                  std::ostream* log = nullptr);

struct CompareSeries {
  int horizon = 0;
  std::string method;  ///< es_neuron | es_weight | bp_neuron | bp_weight
  std::vector<CurveRow> curves;
  double final_eval = 0.0;
};

/// Cart-pole ES-vs-BPTT grid: horizons {100, 200, 500, 1000} x four methods,
/// every cell on the same episode budget: population x iterations x 1 episode
/// for ES, iterations updates of population episodes for BPTT (the default
/// protocol spends exactly 3840 episodes per cell). Writes <out>/compare.csv
/// plus one run directory per cell.
std::vector<CompareSeries> run_compare(const ExperimentConfig& cfg, int population = 128,
                                       int iterations = 30, std::ostream* log = nullptr);

inline constexpr double kCompareBpWeightLr = 0.1;  ///< grid-search winner for the weight space

struct FitdistReport {
  FitResult gamma;
  FitResult lognormal;
  double skewness = 0.0;
  int n = 0;

  std::string to_csv() const;
};

/// Fit both families to a sample column: either a one-column CSV (optional
/// header) or a genome.csv, whose tau_m_ms column is used.
FitdistReport run_fitdist(const std::string& samples_csv, const std::string& out_csv);

/// Shapley attribution from an ablation.csv (mask_bits + reward_mean columns;
/// the empty coalition's value is a modeling choice passed in, default 0).
ShapleyReport run_shapley(const std::string& ablation_csv, double v_empty,
                          const std::string& out_csv);

/// Firing-rate matrix of a finished classify run: rebuilds the network from
/// the run directory, replays the training subset, samples `neuron_sample`
/// neurons, writes firing.csv into the run directory.
FiringStats run_stats(const std::string& run_dir, int neuron_sample = 32);

struct GradcheckReport {
  int cases = 0;
  double max_rel_err = 0.0;           ///< backward vs. unrolled-chain-rule oracle
  int contraction_violations = 0;     ///< detached-mode |jacobian| > 1 - dt/tau_m
  double max_detached_jacobian = 0.0;
  bool pass = false;
};

/// Property suite over random small nets: the O(T) adjoint sweep must match
/// the O(T^2) literal chain rule, and detached-mode per-step Jacobians must
/// respect the contraction bound.
GradcheckReport run_gradcheck(int cases = 200, std::uint64_t seed = 1,
                              std::ostream* log = nullptr);

}  // namespace hsnn
