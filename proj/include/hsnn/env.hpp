#pragma once

#include <cstdint>
#include <memory>

#include "hsnn/types.hpp"

namespace hsnn {

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool done = false;
};

/// Episodic task with a discrete action set. reset() must make the episode a
/// pure function of the seed; step() after the episode ended is rejected.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual Vector reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
  virtual int observation_dim() const = 0;
  virtual int num_actions() const = 0;
  virtual int max_steps() const = 0;
};

/// T-maze style memory probe: a +/-1 context is shown only at t = 0, the
/// observation is (c_t, t/N) with c_t = 0 for t >= 1, and the only nonzero
/// reward comes at step N-1: +1 if the final action reproduces the context,
/// -1 otherwise. Action index 0 means -1, index 1 means +1.
class MemoryLengthEnv final : public Environment {
 public:
  explicit MemoryLengthEnv(int n);

  Vector reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  int observation_dim() const override { return 2; }
  int num_actions() const override { return 2; }
  int max_steps() const override { return n_; }

  double context() const { return c0_; }  // test hook

 private:
  int n_;
  int t_ = 0;
  double c0_ = 0.0;
  bool done_ = true;
};

struct CartPoleConfig {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double tau = 0.02;  // integrator step [s]
  int max_steps = 500;
};

/// Standard cart-pole balancing task: semi-implicit-free Euler integration of
/// the classic dynamics, +1 reward per step, termination at |theta| > 12 deg,
/// |x| > 2.4 m, or the step cap. Action 0 pushes left, 1 pushes right.
class CartPoleEnv final : public Environment {
 public:
  explicit CartPoleEnv(CartPoleConfig cfg = {});

  Vector reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  int observation_dim() const override { return 4; }
  int num_actions() const override { return 2; }
  int max_steps() const override { return cfg_.max_steps; }

  /// Test hook: place the cart/pole in a known state and restart the episode.
  void set_state(double x, double x_dot, double theta, double theta_dot);
  Vector state() const;

 private:
  CartPoleConfig cfg_;
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  int t_ = 0;
  bool done_ = true;
};

/// Factory used by experiment profiles; names: "memory:<N>", "cartpole".
std::unique_ptr<Environment> make_env(const std::string& name);

}  // namespace hsnn
