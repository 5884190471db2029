#include "hsnn/reinforce.hpp"

#include <cmath>

#include "hsnn/rng.hpp"

namespace hsnn {

Vector softmax(const Vector& logits) {
  require(logits.size() > 0, "softmax: empty logits");
  Vector shifted = logits.array() - logits.maxCoeff();
  Vector p = shifted.array().exp();
  return p / p.sum();
}

namespace {

int sample_categorical(const Vector& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;  // guard against rounding at u ~ 1
}

}  // namespace

Episode sample_rollout(const Network& net, Environment& env, std::uint64_t env_seed,
                       std::uint64_t policy_seed, double input_gain) {
  require(net.spec.input_size() == env.observation_dim(),
          "sample_rollout: network input size does not match the observation");
  require(net.spec.output_size() == env.num_actions(),
          "sample_rollout: readout size does not match the action count");

  Episode ep;
  Simulation sim(net);
  Rng rng(policy_seed);
  Vector obs = env.reset(env_seed);
  for (int t = 0; t < env.max_steps(); ++t) {
    Vector current = input_gain * obs;
    Vector readout = sim.step(current);
    int action = sample_categorical(softmax(readout), rng);
    ep.inputs.push_back(current);
    ep.actions.push_back(action);
    StepResult r = env.step(action);
    ep.total_reward += r.reward;
    if (r.done) break;
    obs = r.observation;
  }
  return ep;
}

Genome reinforce_gradient(const Network& net, const std::vector<Episode>& episodes,
                          const ReinforceConfig& cfg, std::optional<double> baseline) {
  require(!episodes.empty(), "reinforce_gradient: empty episode batch");
  double b = 0.0;
  if (baseline) {
    b = *baseline;
  } else {
    for (const Episode& ep : episodes) b += ep.total_reward;
    b /= episodes.size();
  }

  ParamGradients acc = ParamGradients::zeros(net);
  const double inv_e = 1.0 / episodes.size();
  for (const Episode& ep : episodes) {
    const double coeff = (ep.total_reward - b) * inv_e;
    if (coeff == 0.0 || ep.steps() == 0) continue;
    require(ep.inputs.size() == ep.actions.size(),
            "reinforce_gradient: episode must record inputs and actions");

    std::vector<Array> xs(ep.inputs.begin(), ep.inputs.end());
    Trajectory traj = forward(net, xs);
    LossGrads lg(traj.num_steps());
    for (int t = 0; t < traj.num_steps(); ++t) {
      Vector vout = traj.steps[t].v.back();
      Vector p = softmax(vout);
      Vector onehot = Vector::Zero(p.size());
      require(ep.actions[t] >= 0 && ep.actions[t] < p.size(),
              "reinforce_gradient: recorded action out of range");
      onehot[ep.actions[t]] = 1.0;
      // d/dv of -(R - b) log pi(a | v)
      lg[t] = (-coeff) * Array(onehot - p);
    }
    acc += backward(net, traj, lg, cfg.surrogate, cfg.mode);
  }
  return pack_gradients(acc, net, cfg.mask, cfg.train_weights);
}

}  // namespace hsnn
