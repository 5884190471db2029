#include "hsnn/surrogate.hpp"

#include <cmath>

#include "doctest.h"

using namespace hsnn;

TEST_CASE("rectangular shape: peak 1/v_th at 0, zero outside [-v_th, v_th]") {
  Surrogate sg{SurrogateKind::Rectangular, 2.0};
  const double v_th = 0.5;
  CHECK(surrogate_grad(sg, 0.0, v_th) == doctest::Approx(2.0));  // v_th/v_th^2
  CHECK(surrogate_grad(sg, -0.25, v_th) == doctest::Approx(1.0));
  CHECK(surrogate_grad(sg, 0.25, v_th) == doctest::Approx(1.0));
  CHECK(surrogate_grad(sg, 0.5, v_th) == 0.0);
  CHECK(surrogate_grad(sg, -0.9, v_th) == 0.0);
}

TEST_CASE("rectangular width follows the neuron's own threshold") {
  Surrogate sg{SurrogateKind::Rectangular, 2.0};
  CHECK(surrogate_grad(sg, 0.6, 0.5) == 0.0);
  CHECK(surrogate_grad(sg, 0.6, 1.0) == doctest::Approx(0.4));
}

TEST_CASE("arctan value and slope") {
  Surrogate sg{SurrogateKind::Arctan, 2.0};
  CHECK(surrogate_value(sg, 0.0, 0.5) == doctest::Approx(0.5));
  CHECK(surrogate_grad(sg, 0.0, 0.5) == doctest::Approx(1.0));  // alpha/2
  CHECK(surrogate_value(sg, 1e9, 0.5) == doctest::Approx(1.0));
  CHECK(surrogate_value(sg, -1e9, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("log shape is odd with nonzero_sign(0) = +1") {
  Surrogate sg{SurrogateKind::LogNonzeroSign, 2.0};
  CHECK(surrogate_value(sg, 0.0, 0.5) == 0.0);
  CHECK(surrogate_value(sg, 0.5, 0.5) == doctest::Approx(std::log(2.0)));
  CHECK(surrogate_value(sg, -0.5, 0.5) == doctest::Approx(-std::log(2.0)));
  CHECK(surrogate_grad(sg, 0.0, 0.5) == doctest::Approx(2.0));  // alpha at x = 0
  CHECK(surrogate_grad(sg, 0.5, 0.5) == doctest::Approx(1.0));
  CHECK(surrogate_grad(sg, -0.5, 0.5) == surrogate_grad(sg, 0.5, 0.5));
}

TEST_CASE("grad matches finite differences of value away from kinks") {
  const double h = 1e-6;
  const double v_th = 0.5;
  for (SurrogateKind kind :
       {SurrogateKind::Rectangular, SurrogateKind::Arctan, SurrogateKind::LogNonzeroSign}) {
    Surrogate sg{kind, 2.0};
    for (double x : {-0.4, -0.15, 0.07, 0.2, 0.45, 0.8, -0.9}) {
      // keep clear of the rectangular kinks at 0 and +-v_th
      double fd = (surrogate_value(sg, x + h, v_th) - surrogate_value(sg, x - h, v_th)) / (2 * h);
      CHECK(surrogate_grad(sg, x, v_th) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("all shapes are nonnegative and peak at the threshold") {
  for (SurrogateKind kind :
       {SurrogateKind::Rectangular, SurrogateKind::Arctan, SurrogateKind::LogNonzeroSign}) {
    Surrogate sg{kind, 2.0};
    double peak = surrogate_grad(sg, 0.0, 0.5);
    for (double x = -2.0; x <= 2.0; x += 0.01) {
      double g = surrogate_grad(sg, x, 0.5);
      CHECK(g >= 0.0);
      CHECK(g <= peak + 1e-12);
    }
  }
}

TEST_CASE("vector overload applies per-neuron thresholds") {
  Surrogate sg{SurrogateKind::Rectangular, 2.0};
  Array x(2), v_th(2);
  x << 0.6, 0.6;
  v_th << 0.5, 1.0;
  Array g = surrogate_grad(sg, x, v_th);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.4));
}

TEST_CASE("names round-trip") {
  for (SurrogateKind kind :
       {SurrogateKind::Rectangular, SurrogateKind::Arctan, SurrogateKind::LogNonzeroSign})
    CHECK(surrogate_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(surrogate_kind_from_string("boxcar"), std::invalid_argument);
}
