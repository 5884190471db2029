#include "hsnn/evaluate.hpp"

#include <stdexcept>
#include <string>

#include "hsnn/parallel.hpp"
#include "hsnn/rng.hpp"

namespace hsnn {

int argmax_action(const Vector& readout) {
  require(readout.size() > 0, "argmax_action: empty readout");
  int best = 0;
  for (int i = 1; i < readout.size(); ++i)
    if (readout[i] > readout[best]) best = i;
  return best;
}

Episode rollout(const Network& net, Environment& env, std::uint64_t episode_seed,
                double input_gain, bool record) {
  require(net.spec.input_size() == env.observation_dim(),
          "rollout: network input size does not match the observation");
  require(net.spec.output_size() == env.num_actions(),
          "rollout: readout size does not match the action count");

  Episode ep;
  Simulation sim(net);
  Vector obs = env.reset(episode_seed);
  for (int t = 0; t < env.max_steps(); ++t) {
    Vector current = input_gain * obs;
    Vector readout = sim.step(current);
    int action = argmax_action(readout);
    if (record) ep.inputs.push_back(current);
    ep.actions.push_back(action);
    StepResult r = env.step(action);
    ep.total_reward += r.reward;
    if (r.done) break;
    obs = r.observation;
  }
  return ep;
}

void EvalSpec::validate() const {
  base.validate();
  require(static_cast<bool>(env_factory), "EvalSpec: missing environment factory");
  require(episodes >= 1, "EvalSpec: need at least one episode per evaluation");
  require(train_weights || mask.count() > 0, "EvalSpec: nothing is trainable");
}

namespace {

double score_genome(const EvalSpec& spec, const Genome& genome, int generation, int member) {
  Network net = spec.base;
  unpack_genome(net, genome, spec.mask, spec.train_weights);
  auto env = spec.env_factory();
  double sum = 0.0;
  for (int e = 0; e < spec.episodes; ++e) {
    std::uint64_t seed =
        derive_key({spec.base_seed, static_cast<std::uint64_t>(generation),
                    static_cast<std::uint64_t>(member), static_cast<std::uint64_t>(e)});
    sum += rollout(net, *env, seed, spec.input_gain).total_reward;
  }
  return sum / spec.episodes;
}

}  // namespace

FitnessFn env_fitness(std::shared_ptr<const EvalSpec> spec) {
  require(spec != nullptr, "env_fitness: null spec");
  spec->validate();
  return [spec](const Genome& genome, int generation, int member) {
    return score_genome(*spec, genome, generation, member);
  };
}

Vector evaluate_population(const std::vector<Genome>& genomes, const EvalSpec& spec,
                           int generation, int threads) {
  spec.validate();
  Vector fitness(genomes.size());
  parallel_for(static_cast<int>(genomes.size()), threads, [&](int m) {
    try {
      fitness[m] = score_genome(spec, genomes[m], generation, m);
    } catch (const std::exception& e) {
      throw std::runtime_error("member " + std::to_string(m) + ": " + e.what());
    }
  });
  return fitness;
}

}  // namespace hsnn
