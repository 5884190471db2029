#include "hsnn/network.hpp"

#include <cmath>

#include "doctest.h"
#include "hsnn/rng.hpp"

using namespace hsnn;

namespace {
Network small_net(std::uint64_t seed = 1) {
  NetworkSpec spec;
  spec.layer_sizes = {3, 5, 4, 2};
  return Network::make(spec, seed);
}

std::vector<Array> random_inputs(int T, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Array> xs(T);
  for (auto& x : xs) {
    x = Array(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(0.0, 3.0);
  }
  return xs;
}
}  // namespace

TEST_CASE("lecun init: zero mean, variance 1/fan_in, deterministic in seed") {
  NetworkSpec spec;
  spec.layer_sizes = {100, 10000};
  Network net = Network::make(spec, 7);
  const Matrix& w = net.weights[0];
  const double n = static_cast<double>(w.size());
  double mean = w.sum() / n;
  double var = (w.array() - mean).square().sum() / n;
  CHECK(std::abs(mean) < 0.001);
  CHECK(var == doctest::Approx(0.01).epsilon(0.05));

  Network again = Network::make(spec, 7);
  CHECK((again.weights[0] - w).cwiseAbs().maxCoeff() == 0.0);
  Network other = Network::make(spec, 8);
  CHECK((other.weights[0] - w).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero weights keep the readout at v_rest") {
  NetworkSpec spec;
  spec.layer_sizes = {2, 3};
  Network net = Network::make(spec, 1);
  net.weights[0].setZero();
  net.params[0].v_rest = Array::Constant(3, 0.3);
  Trajectory traj = forward(net, random_inputs(5, 2, 99));
  for (const auto& step : traj.steps)
    for (int i = 0; i < 3; ++i) CHECK(step.v[0][i] == doctest::Approx(0.3));
}

TEST_CASE("2-2-1 forward matches hand-unrolled steps") {
  NetworkSpec spec;
  spec.layer_sizes = {2, 2, 1};
  Network net = Network::make(spec, 1);
  net.weights[0] = Matrix::Identity(2, 2);
  net.weights[1] = (Matrix(1, 2) << 0.8, 0.8).finished();

  Array x(2);
  x << 1.0, 2.4;
  Trajectory traj = forward(net, {x, x, x});

  // t = 0: hidden u = 0.25*(1, 2.4) = (0.25, 0.6) -> s = (0, 1)
  CHECK(traj.steps[0].u[0][0] == doctest::Approx(0.25));
  CHECK(traj.steps[0].u[0][1] == doctest::Approx(0.6));
  CHECK(traj.steps[0].s[0][0] == 0.0);
  CHECK(traj.steps[0].s[0][1] == 1.0);
  CHECK(traj.steps[0].v[0][1] == 0.0);
  // readout sees 0.8 within the same step
  CHECK(traj.steps[0].v[1][0] == doctest::Approx(0.2));
  // t = 1: hidden (0.4375, 0.6), readout 0.2 + 0.25*(0.8 - 0.2)
  CHECK(traj.steps[1].u[0][0] == doctest::Approx(0.4375));
  CHECK(traj.steps[1].s[0][1] == 1.0);
  CHECK(traj.steps[1].v[1][0] == doctest::Approx(0.35));
  // t = 2: both hidden spike, readout 0.35 + 0.25*(1.6 - 0.35)
  CHECK(traj.steps[2].u[0][0] == doctest::Approx(0.578125));
  CHECK(traj.steps[2].s[0][0] == 1.0);
  CHECK(traj.steps[2].s[0][1] == 1.0);
  CHECK(traj.steps[2].v[1][0] == doctest::Approx(0.6625));

  // readout integrates without firing even above threshold
  CHECK(traj.steps[2].v[1][0] > net.params[1].v_th[0]);
  CHECK(traj.steps[2].s[1][0] == 0.0);
}

TEST_CASE("forward is deterministic and accepts T = 0") {
  Network net = small_net();
  auto xs = random_inputs(7, 3, 5);
  Trajectory a = forward(net, xs);
  Trajectory b = forward(net, xs);
  REQUIRE(a.num_steps() == 7);
  for (int t = 0; t < 7; ++t)
    for (int l = 0; l < net.num_layers(); ++l) {
      CHECK((a.steps[t].v[l] == b.steps[t].v[l]).all());
      CHECK((a.steps[t].s[l] == b.steps[t].s[l]).all());
    }
  CHECK(forward(net, {}).num_steps() == 0);
}

TEST_CASE("spike-reset coupling holds on a random run") {
  Network net = small_net(3);
  for (auto& w : net.weights) w *= 40.0;  // ensure plenty of spikes
  Trajectory traj = forward(net, random_inputs(20, 3, 17));
  int spikes = 0;
  for (int t = 0; t < traj.num_steps(); ++t)
    for (int l = 0; l < net.num_layers(); ++l) {
      const bool spiking_layer = net.layer_spikes(l);
      for (int i = 0; i < traj.steps[t].u[l].size(); ++i) {
        double u = traj.steps[t].u[l][i];
        double s = traj.steps[t].s[l][i];
        double v = traj.steps[t].v[l][i];
        if (spiking_layer) {
          CHECK(s == (u >= net.params[l].v_th[i] ? 1.0 : 0.0));
          if (s == 1.0) {
            CHECK(v == net.params[l].v_rest[i]);
            ++spikes;
          }
        } else {
          CHECK(s == 0.0);
          CHECK(v == u);
        }
      }
    }
  CHECK(spikes > 10);
}

TEST_CASE("simulation stepper reproduces forward") {
  Network net = small_net(11);
  auto xs = random_inputs(9, 3, 23);
  Trajectory traj = forward(net, xs);
  Simulation sim(net);
  for (int t = 0; t < 9; ++t) {
    const Array& out = sim.step(xs[t]);
    CHECK((out == traj.steps[t].v.back()).all());
    for (int l = 0; l < net.num_layers(); ++l)
      CHECK((sim.states()[l].v == traj.steps[t].v[l]).all());
  }
  sim.reset();
  CHECK((sim.step(xs[0]) == traj.steps[0].v.back()).all());
}

TEST_CASE("genome length: 4n per layer all-props, n for tau only") {
  Network net = small_net();
  CHECK(genome_size(net, TrainableMask::all(), false) == 4 * (5 + 4 + 2));
  TrainableMask tau_only = TrainableMask::none();
  tau_only.tau_raw = true;
  CHECK(genome_size(net, tau_only, false) == 5 + 4 + 2);
  CHECK(genome_size(net, TrainableMask::none(), true) == 3 * 5 + 5 * 4 + 4 * 2);
}

TEST_CASE("genome round-trips exactly and leaves fixed fields untouched") {
  Network net = small_net(2);
  TrainableMask mask;
  mask.r_mem = false;
  Genome g = pack_genome(net, mask, false);
  Rng rng(31);
  for (int i = 0; i < g.size(); ++i) g[i] += rng.uniform(-0.2, 0.2);
  Array r_before = net.params[1].r_mem;
  unpack_genome(net, g, mask, false);
  CHECK((pack_genome(net, mask, false) - g).cwiseAbs().maxCoeff() == 0.0);
  CHECK((net.params[1].r_mem == r_before).all());

  Genome gw = pack_genome(net, TrainableMask::none(), true);
  gw[3] += 0.5;
  unpack_genome(net, gw, TrainableMask::none(), true);
  CHECK((pack_genome(net, TrainableMask::none(), true) - gw).cwiseAbs().maxCoeff() == 0.0);

  // resistance rides in 2^26-ohm genome units; power-of-two scaling is exact
  Genome full = pack_genome(net, TrainableMask::all(), false);
  CHECK(full[full.size() - 1] == net.params.back().r_mem[net.params.back().size() - 1] /
                                     kRmemGenomeScale);
  for (int i = 0; i < full.size(); ++i) full[i] += rng.uniform(-0.2, 0.2);
  unpack_genome(net, full, TrainableMask::all(), false);
  CHECK((pack_genome(net, TrainableMask::all(), false) - full).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("genome misuse is rejected") {
  Network net = small_net();
  CHECK_THROWS_AS(genome_size(net, TrainableMask::all(), true), std::invalid_argument);
  CHECK_THROWS_AS(genome_size(net, TrainableMask::none(), false), std::invalid_argument);
  Genome g = pack_genome(net, TrainableMask::all(), false);
  Genome shorter = g.head(g.size() - 1);
  CHECK_THROWS_AS(unpack_genome(net, shorter, TrainableMask::all(), false), std::invalid_argument);
}

TEST_CASE("network validation catches shape and finiteness problems") {
  Network net = small_net();
  net.weights[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  net = small_net();
  net.weights[0].resize(2, 2);
  CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  NetworkSpec bad;
  bad.layer_sizes = {4};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
