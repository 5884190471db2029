#include "hsnn/shapley.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "hsnn/rng.hpp"

using namespace hsnn;

namespace {

int popcount4(int mask) {
  return ((mask >> 0) & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1) + ((mask >> 3) & 1);
}

std::map<int, double> random_cf(Rng& rng) {
  std::map<int, double> v;
  for (int mask = 0; mask < 16; ++mask) v[mask] = rng.uniform(-10.0, 10.0);
  return v;
}

}  // namespace

TEST_CASE("additive game: everyone gets their own contribution") {
  std::map<int, double> v;
  for (int mask = 0; mask < 16; ++mask) v[mask] = popcount4(mask);
  ShapleyReport rep = shapley_exact(v);
  for (double val : rep.values) CHECK(val == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rep.efficiency_residual) < 1e-12);
}

TEST_CASE("flat game: the first mover earns everything, split symmetrically") {
  const double c = 2.5;
  std::map<int, double> v;
  for (int mask = 0; mask < 16; ++mask) v[mask] = mask == 0 ? 0.0 : c;
  ShapleyReport rep = shapley_exact(v);
  for (double val : rep.values) CHECK(val == doctest::Approx(c / 4.0).epsilon(1e-12));
}

TEST_CASE("locomotion ablation fixture: tau_m carries the largest attribution") {
  // Mean episode rewards measured with each subset of the four neuron
  // properties trainable (bit order tau_m, v_th, v_rest, r_mem).
  std::map<int, double> v;
  v[0b0000] = 0.0;
  v[0b0001] = 3967.0;  // tau_m
  v[0b0010] = 101.0;   // v_th
  v[0b0100] = 3544.0;  // v_rest
  v[0b1000] = 3264.0;  // r_mem
  v[0b0011] = 3110.0;  // tau_m + v_th
  v[0b0101] = 3887.0;  // tau_m + v_rest
  v[0b1001] = 3460.0;  // tau_m + r_mem
  v[0b0110] = 3335.0;  // v_th + v_rest
  v[0b1010] = 2679.0;  // v_th + r_mem
  v[0b1100] = 3587.0;  // v_rest + r_mem
  v[0b0111] = 3924.0;  // tau_m + v_th + v_rest
  v[0b1011] = 3724.0;  // tau_m + v_th + r_mem
  v[0b1101] = 3982.0;  // tau_m + v_rest + r_mem
  v[0b1110] = 3214.0;  // v_th + v_rest + r_mem
  v[0b1111] = 4221.0;
  ShapleyReport rep = shapley_exact(v);
  for (int p = 1; p < kNumProperties; ++p) CHECK(rep.values[0] > rep.values[p]);
  double sum = 0.0;
  for (double val : rep.values) sum += val;
  CHECK(sum == doctest::Approx(4221.0).epsilon(1e-12));
  CHECK(std::abs(rep.efficiency_residual) < 1e-9);
}

TEST_CASE("axioms hold over 1000 random characteristic functions") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    // efficiency
    std::map<int, double> v = random_cf(rng);
    ShapleyReport rep = shapley_exact(v);
    double sum = 0.0;
    for (double val : rep.values) sum += val;
    CHECK(std::abs(sum - (v[15] - v[0])) < 1e-9);

    // additivity
    std::map<int, double> w = random_cf(rng), vw;
    for (int mask = 0; mask < 16; ++mask) vw[mask] = v[mask] + w[mask];
    ShapleyReport rw = shapley_exact(w), rvw = shapley_exact(vw);
    for (int p = 0; p < kNumProperties; ++p)
      CHECK(std::abs(rvw.values[p] - (rep.values[p] + rw.values[p])) < 1e-9);

    // symmetry: make players 1 and 2 interchangeable
    std::map<int, double> s;
    for (int mask = 0; mask < 16; ++mask) {
      const int key = (mask & 0b1001) * 16 + ((mask >> 1) & 1) + ((mask >> 2) & 1);
      s[mask] = 100.0 * key + v[(mask & 0b1001)];  // depends only on (others, count of {1,2})
    }
    ShapleyReport rs = shapley_exact(s);
    CHECK(std::abs(rs.values[1] - rs.values[2]) < 1e-9);

    // dummy: player 3 never changes the value
    std::map<int, double> d;
    for (int mask = 0; mask < 16; ++mask) d[mask] = v[mask & 0b0111];
    ShapleyReport rd = shapley_exact(d);
    CHECK(std::abs(rd.values[3]) < 1e-9);
  }
}

TEST_CASE("missing coalitions are named") {
  std::map<int, double> v;
  for (int mask = 0; mask < 16; ++mask)
    if (mask != 0b0101) v[mask] = 1.0;
  try {
    shapley_exact(v);
    FAIL("expected a missing-coalition error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("{tau_m,v_rest}") != std::string::npos);
  }
}

TEST_CASE("coalition names and csv layout") {
  CHECK(coalition_name(0) == "{}");
  CHECK(coalition_name(0b1111) == "{tau_m,v_th,v_rest,r_mem}");
  CHECK(coalition_name(0b1000) == "{r_mem}");

  std::map<int, double> v;
  for (int mask = 0; mask < 16; ++mask) v[mask] = popcount4(mask);
  std::string csv = shapley_exact(v).to_csv();
  CHECK(csv.find("property,value\n") == 0);
  CHECK(csv.find("tau_m,1\n") != std::string::npos);
  CHECK(csv.find("r_mem,1\n") != std::string::npos);
}
