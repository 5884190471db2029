#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hsnn/env.hpp"
#include "hsnn/es.hpp"
#include "hsnn/network.hpp"

namespace hsnn {

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// One recorded episode: enough to replay the run for gradient estimation.
struct Episode {
  std::vector<Vector> inputs;  // injected currents, one per step (gain applied)
  std::vector<int> actions;
  double total_reward = 0.0;
  int steps() const { return static_cast<int>(actions.size()); }
};

/// Deterministic greedy policy: feed gain-scaled observations as input
/// current, act on the argmax readout potential (ties break to the lowest
/// index). The network must have input_size == observation_dim and
/// output_size == num_actions.
Episode rollout(const Network& net, Environment& env, std::uint64_t episode_seed,
                double input_gain = 1.0, bool record = false);

int argmax_action(const Vector& readout);

/// How a genome is materialized and scored on an environment.
struct EvalSpec {
  Network base;             // fixed architecture + untouched parameter fields
  TrainableMask mask;       // which neuron properties the genome carries
  bool train_weights = false;
  EnvFactory env_factory;
  int episodes = 1;
  std::uint64_t base_seed = 0;
  double input_gain = 1.0;

  void validate() const;
};

/// Fitness bridge for the ES loop: mean total reward over `episodes`
/// rollouts whose seeds derive from (base_seed, generation, member, episode).
FitnessFn env_fitness(std::shared_ptr<const EvalSpec> spec);

/// Batch evaluation with the same seeding contract; results do not depend on
/// thread count. Environment errors are rethrown tagged with the member index.
Vector evaluate_population(const std::vector<Genome>& genomes, const EvalSpec& spec,
                           int generation, int threads = 1);

}  // namespace hsnn
