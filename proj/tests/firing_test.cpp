#include "hsnn/firing.hpp"

#include "doctest.h"

using namespace hsnn;

namespace {

// Build a synthetic single-layer trajectory with prescribed spike trains.
Trajectory spikes_only(const std::vector<std::vector<double>>& trains) {
  Trajectory traj;
  const int n = static_cast<int>(trains.size());
  const int steps = static_cast<int>(trains.front().size());
  traj.v0 = {Array::Zero(n)};
  traj.inputs.assign(steps, Array::Zero(1));
  traj.steps.resize(steps);
  for (int t = 0; t < steps; ++t) {
    StepRecord& rec = traj.steps[t];
    rec.current = {Array::Zero(n)};
    rec.u = {Array::Zero(n)};
    rec.v = {Array::Zero(n)};
    Array s(n);
    for (int i = 0; i < n; ++i) s[i] = trains[i][t];
    rec.s = {s};
  }
  return traj;
}

}  // namespace

TEST_CASE("hand fixture: per-class means match hand counts") {
  std::vector<Trajectory> trajs = {
      spikes_only({{1, 1, 0, 0}, {0, 0, 0, 0}}),  // class 0: n0 2/4, n1 0/4
      spikes_only({{1, 1, 1, 1}, {1, 0, 0, 0}}),  // class 0: n0 4/4, n1 1/4
      spikes_only({{0, 1, 0, 0}, {1, 1, 1, 0}}),  // class 1: n0 1/4, n1 3/4
  };
  FiringStats fs = firing_stats(trajs, {0, 0, 1}, 2, {0, 1});
  CHECK(fs.freq(0, 0) == doctest::Approx(0.75));
  CHECK(fs.freq(1, 0) == doctest::Approx(0.125));
  CHECK(fs.freq(0, 1) == doctest::Approx(0.25));
  CHECK(fs.freq(1, 1) == doctest::Approx(0.75));

  std::string csv = fs.to_csv();
  CHECK(csv.find("neuron,class_0,class_1\n") == 0);
  CHECK(csv.find("0,0.75,0.25\n") != std::string::npos);
}

TEST_CASE("silent and saturated extremes") {
  std::vector<Trajectory> silent = {spikes_only({{0, 0, 0}}), spikes_only({{0, 0, 0}})};
  FiringStats fs = firing_stats(silent, {0, 1}, 2, {0});
  CHECK(fs.freq.cwiseAbs().maxCoeff() == 0.0);

  std::vector<Trajectory> busy = {spikes_only({{1, 1, 1}})};
  CHECK(firing_stats(busy, {0}, 1, {0}).freq(0, 0) == 1.0);
}

TEST_CASE("a live network run lands in [0, 1] and keeps the readout silent") {
  NetworkSpec ns;
  ns.layer_sizes = {2, 5, 3};
  Network net = Network::make(ns, 2);
  for (auto& w : net.weights) w *= 30.0;  // provoke spiking
  std::vector<Array> inputs(6, Array::Ones(2));
  Trajectory traj = forward(net, inputs);
  CHECK(total_neurons(traj) == 8);
  std::vector<int> all_ids;
  for (int i = 0; i < 8; ++i) all_ids.push_back(i);  // hidden + readout
  FiringStats fs = firing_stats({traj}, {0}, 1, all_ids);
  CHECK(fs.freq.minCoeff() >= 0.0);
  CHECK(fs.freq.maxCoeff() <= 1.0);
  CHECK(fs.freq.col(0).tail(3).cwiseAbs().maxCoeff() == 0.0);  // non-spiking readout
  CHECK(fs.freq.col(0).head(5).maxCoeff() > 0.0);
}

TEST_CASE("input validation names the problem") {
  std::vector<Trajectory> trajs = {spikes_only({{1, 0}})};
  CHECK_THROWS_AS(firing_stats({}, {}, 1, {0}), std::invalid_argument);
  CHECK_THROWS_AS(firing_stats(trajs, {0, 1}, 2, {0}), std::invalid_argument);
  CHECK_THROWS_AS(firing_stats(trajs, {2}, 2, {0}), std::invalid_argument);   // bad label
  CHECK_THROWS_AS(firing_stats(trajs, {0}, 2, {0}), std::invalid_argument);   // class 1 empty
  CHECK_THROWS_AS(firing_stats(trajs, {0}, 1, {5}), std::invalid_argument);   // bad neuron id
  CHECK_THROWS_AS(firing_stats(trajs, {0}, 1, {}), std::invalid_argument);
}
