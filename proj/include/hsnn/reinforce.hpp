#pragma once

#include <optional>
#include <vector>

#include "hsnn/evaluate.hpp"
#include "hsnn/gradient.hpp"
#include "hsnn/surrogate.hpp"

namespace hsnn {

/// Numerically stable softmax.
Vector softmax(const Vector& logits);

/// Stochastic-policy rollout: actions are sampled from the softmax over the
/// readout potentials (the exploration REINFORCE needs); the episode records
/// inputs and actions so the gradient pass can replay it.
Episode sample_rollout(const Network& net, Environment& env, std::uint64_t env_seed,
                       std::uint64_t policy_seed, double input_gain = 1.0);

struct ReinforceConfig {
  Surrogate surrogate;
  GradMode mode = GradMode::Full;
  TrainableMask mask;
  bool train_weights = false;
};

/// Gradient of the policy-gradient surrogate loss
///   L = -(1/E) sum_e (R_e - baseline) * sum_t log pi(a_t | v_t),
/// backpropagated through the network, packed in the genome layout (masked
/// properties are absent). Descend it to increase expected return. The
/// baseline defaults to the batch mean return.
Genome reinforce_gradient(const Network& net, const std::vector<Episode>& episodes,
                          const ReinforceConfig& cfg,
                          std::optional<double> baseline = std::nullopt);

/// Plain Adam (descent); state carries the moment estimates.
struct Adam {
  double lr;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Vector m, v;
  long t = 0;

  Adam(int dim, double lr_) : lr(lr_), m(Vector::Zero(dim)), v(Vector::Zero(dim)) {}

  Vector step(const Vector& params, const Vector& grad) {
    require(params.size() == m.size() && grad.size() == m.size(),
            "Adam: dimension mismatch");
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    Vector mhat = m / c1;
    Vector denom = (v / c2).cwiseSqrt() + Vector::Constant(params.size(), eps);
    return params - lr * mhat.cwiseQuotient(denom);
  }
};

}  // namespace hsnn
