#include "hsnn/env.hpp"

#include <cmath>
#include <string>

#include "hsnn/rng.hpp"

namespace hsnn {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kThetaLimit = 12.0 * kPi / 180.0;
constexpr double kXLimit = 2.4;
}  // namespace

MemoryLengthEnv::MemoryLengthEnv(int n) : n_(n) {
  require(n >= 1, "MemoryLengthEnv: episode length must be at least 1");
}

Vector MemoryLengthEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  c0_ = rng.uniform_int(2) == 0 ? -1.0 : 1.0;
  t_ = 0;
  done_ = false;
  Vector obs(2);
  obs << c0_, 0.0;
  return obs;
}

StepResult MemoryLengthEnv::step(int action) {
  require(!done_, "MemoryLengthEnv: episode is over; call reset");
  require(action == 0 || action == 1,
          "MemoryLengthEnv: action must be 0 (meaning -1) or 1 (meaning +1)");
  const double a = action == 1 ? 1.0 : -1.0;
  StepResult r;
  r.reward = (t_ == n_ - 1) ? (a == c0_ ? 1.0 : -1.0) : 0.0;
  ++t_;
  done_ = t_ == n_;
  r.done = done_;
  r.observation = Vector(2);
  r.observation << 0.0, static_cast<double>(t_) / n_;
  return r;
}

CartPoleEnv::CartPoleEnv(CartPoleConfig cfg) : cfg_(cfg) {
  require(cfg_.cart_mass > 0.0 && cfg_.pole_mass > 0.0 && cfg_.half_length > 0.0 &&
              cfg_.tau > 0.0 && cfg_.max_steps > 0,
          "CartPoleEnv: masses, length, step size, and step cap must be positive");
}

Vector CartPoleEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  x_ = rng.uniform(-0.05, 0.05);
  x_dot_ = rng.uniform(-0.05, 0.05);
  theta_ = rng.uniform(-0.05, 0.05);
  theta_dot_ = rng.uniform(-0.05, 0.05);
  t_ = 0;
  done_ = false;
  return state();
}

void CartPoleEnv::set_state(double x, double x_dot, double theta, double theta_dot) {
  x_ = x;
  x_dot_ = x_dot;
  theta_ = theta;
  theta_dot_ = theta_dot;
  t_ = 0;
  done_ = false;
}

Vector CartPoleEnv::state() const {
  Vector s(4);
  s << x_, x_dot_, theta_, theta_dot_;
  return s;
}

StepResult CartPoleEnv::step(int action) {
  require(!done_, "CartPoleEnv: episode is over; call reset");
  require(action == 0 || action == 1, "CartPoleEnv: action must be 0 (left) or 1 (right)");

  const double total_mass = cfg_.cart_mass + cfg_.pole_mass;
  const double polemass_length = cfg_.pole_mass * cfg_.half_length;
  const double force = action == 1 ? cfg_.force_mag : -cfg_.force_mag;
  const double cos_t = std::cos(theta_), sin_t = std::sin(theta_);

  const double temp = (force + polemass_length * theta_dot_ * theta_dot_ * sin_t) / total_mass;
  const double theta_acc = (cfg_.gravity * sin_t - cos_t * temp) /
                           (cfg_.half_length * (4.0 / 3.0 - cfg_.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

  // plain Euler: positions advance with the pre-step velocities
  x_ += cfg_.tau * x_dot_;
  x_dot_ += cfg_.tau * x_acc;
  theta_ += cfg_.tau * theta_dot_;
  theta_dot_ += cfg_.tau * theta_acc;
  ++t_;

  done_ = std::abs(x_) > kXLimit || std::abs(theta_) > kThetaLimit || t_ >= cfg_.max_steps;
  StepResult r;
  r.observation = state();
  r.reward = 1.0;
  r.done = done_;
  return r;
}

std::unique_ptr<Environment> make_env(const std::string& name) {
  if (name.rfind("memory:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(7));
    } catch (const std::exception&) {
      throw std::invalid_argument("make_env: bad memory length in '" + name + "'");
    }
    return std::make_unique<MemoryLengthEnv>(n);
  }
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  throw std::invalid_argument("make_env: unknown environment '" + name +
                              "' (expected memory:<N> or cartpole)");
}

}  // namespace hsnn
