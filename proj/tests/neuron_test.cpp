#include "hsnn/neuron.hpp"

#include <cmath>

#include "doctest.h"

using namespace hsnn;

namespace {
// Current that makes R*I equal `volts` at the default membrane resistance.
Array current_for_volts(double volts, int n = 1) {
  return Array::Constant(n, volts / kDefaultRmem);
}
}  // namespace

TEST_CASE("defaults encode tau_m = 20 ms as decay 0.25") {
  NeuronParams p = NeuronParams::defaults(3);
  CHECK(p.delta_t == doctest::Approx(0.005));
  CHECK(p.tau_raw[0] == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(p.decay()[0] == doctest::Approx(0.25));
  CHECK(p.tau_m()[1] == doctest::Approx(0.020));
  CHECK(p.v_th[2] == doctest::Approx(0.5));
  CHECK(p.v_rest[0] == doctest::Approx(0.0));
  CHECK(p.r_mem[0] == doctest::Approx(5e7));
}

TEST_CASE("rest with zero input is a fixed point") {
  NeuronParams p = NeuronParams::defaults(2);
  LayerState st = LayerState::resting(p);
  auto r = lif_step(st, Array::Zero(2), p);
  CHECK(r.u[0] == 0.0);
  CHECK(r.state.s[0] == 0.0);
  CHECK(r.state.v[1] == 0.0);
}

TEST_CASE("subthreshold step: one volt of drive charges to 0.25 V") {
  NeuronParams p = NeuronParams::defaults(1);
  LayerState st = LayerState::resting(p);
  auto r = lif_step(st, current_for_volts(1.0), p);
  CHECK(r.u[0] == doctest::Approx(0.25));
  CHECK(r.state.s[0] == 0.0);
  CHECK(r.state.v[0] == doctest::Approx(0.25));
}

TEST_CASE("threshold crossing spikes and resets to v_rest") {
  NeuronParams p = NeuronParams::defaults(1);
  LayerState st{Array::Constant(1, 0.4), Array::Zero(1)};
  auto r = lif_step(st, current_for_volts(1.0), p);
  CHECK(r.u[0] == doctest::Approx(0.55));
  CHECK(r.state.s[0] == 1.0);
  CHECK(r.state.v[0] == doctest::Approx(0.0));
}

TEST_CASE("spike is emitted exactly at threshold (u >= v_th)") {
  NeuronParams p = NeuronParams::defaults(1);
  LayerState st{Array::Constant(1, 0.5), Array::Zero(1)};
  auto r = lif_step(st, Array::Zero(1), p);
  // u = 0.5 + 0.25*(0 - 0.5 + 0) = 0.375 < 0.5: no spike
  CHECK(r.state.s[0] == 0.0);
  // exactly representable: u = 0.75 * 0.5 = 0.375 == v_th
  p.v_th[0] = 0.375;
  r = lif_step(st, Array::Zero(1), p);
  CHECK(r.u[0] == 0.375);
  CHECK(r.state.s[0] == 1.0);
  CHECK(r.state.v[0] == 0.0);
}

TEST_CASE("non-spiking layers integrate without reset") {
  NeuronParams p = NeuronParams::defaults(1);
  LayerState st = LayerState::resting(p);
  auto r = lif_step(st, current_for_volts(4.0), p, /*spiking=*/false);
  CHECK(r.u[0] == doctest::Approx(1.0));
  CHECK(r.state.s[0] == 0.0);
  CHECK(r.state.v[0] == doctest::Approx(1.0));
}

TEST_CASE("leak contracts toward v_rest by (1-k) per step without input") {
  NeuronParams p = NeuronParams::defaults(1);
  p.v_rest[0] = 0.1;
  LayerState st{Array::Constant(1, 0.45), Array::Zero(1)};
  double gap = 0.35;
  for (int t = 0; t < 10; ++t) {
    auto r = lif_step(st, Array::Zero(1), p);
    CHECK(r.state.s[0] == 0.0);
    double new_gap = std::abs(r.state.v[0] - p.v_rest[0]);
    CHECK(new_gap == doctest::Approx(0.75 * gap));
    CHECK(new_gap < gap);
    gap = new_gap;
    st = r.state;
  }
}

TEST_CASE("decay factor stays in (0,1) for extreme tau_raw") {
  NeuronParams p = NeuronParams::defaults(4);
  p.tau_raw << -60.0, -1e3, 60.0, 1e3;
  Array k = p.decay();
  for (int i = 0; i < 4; ++i) {
    CHECK(k[i] > 0.0);
    CHECK(k[i] < 1.0);
  }
  CHECK(p.tau_m()[0] > p.delta_t);
}

TEST_CASE("non-finite input names the neuron index") {
  NeuronParams p = NeuronParams::defaults(3);
  LayerState st = LayerState::resting(p);
  Array bad = Array::Zero(3);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(lif_step(st, bad, p),
                       doctest::Contains("neuron 1"), std::invalid_argument);
}

TEST_CASE("non-finite parameter is rejected with the index") {
  NeuronParams p = NeuronParams::defaults(2);
  p.v_th[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("v_th[1]"), std::invalid_argument);
}

TEST_CASE("size mismatch is rejected") {
  NeuronParams p = NeuronParams::defaults(2);
  LayerState st = LayerState::resting(p);
  CHECK_THROWS_AS(lif_step(st, Array::Zero(3), p), std::invalid_argument);
}
