#include "hsnn/classify.hpp"

#include <cmath>

#include "doctest.h"
#include "hsnn/rng.hpp"

using namespace hsnn;

namespace {

// 4-pixel images, 3 classes; image i has its brightest pixel at position i.
ImageDataset toy_dataset() {
  ImageDataset d;
  d.rows = 2;
  d.cols = 2;
  d.pixels = {250, 10, 0, 20,   // brightest: pixel 0
              5, 240, 30, 0,    // pixel 1
              0, 25, 255, 40};  // pixel 2
  d.labels = {0, 1, 2};
  return d;
}

Network pixel_detector_net() {
  NetworkSpec ns;
  ns.layer_sizes = {4, 3};
  Network net = Network::make(ns, 1);
  net.weights[0].setZero();
  for (int c = 0; c < 3; ++c) net.weights[0](c, c) = 1.0;  // logit c reads pixel c
  return net;
}

}  // namespace

TEST_CASE("a pixel detector classifies the toy set perfectly") {
  ImageDataset d = toy_dataset();
  Network net = pixel_detector_net();
  ClassifyConfig cfg;
  CHECK(classify_image(net, d.image_current(0, 1.0), cfg.sim_steps) == 0);
  CHECK(classify_image(net, d.image_current(1, 1.0), cfg.sim_steps) == 1);
  CHECK(classify_image(net, d.image_current(2, 1.0), cfg.sim_steps) == 2);
  CHECK(batch_accuracy(net, d, {0, 1, 2}, cfg) == 1.0);

  d.labels = {0, 2, 2};  // one wrong label
  CHECK(batch_accuracy(net, d, {0, 1, 2}, cfg) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("constant injection accumulates over the simulation steps") {
  // Non-spiking readout with constant current I: v(T) = (1 - (1-k)^T) R I.
  ImageDataset d = toy_dataset();
  Network net = pixel_detector_net();
  Vector x = d.image_current(0, 1.0);
  Vector v1 = classify_logits(net, x, 1);
  Vector v4 = classify_logits(net, x, 4);
  const double k = 0.25;
  const double f1 = 1.0 - std::pow(1.0 - k, 1), f4 = 1.0 - std::pow(1.0 - k, 4);
  CHECK(v4[0] == doctest::Approx(v1[0] * f4 / f1).epsilon(1e-12));
  CHECK(v4[0] > v1[0]);
}

TEST_CASE("zero image gives deterministic rest logits and lowest-index ties") {
  NetworkSpec ns;
  ns.layer_sizes = {4, 6, 3};
  Network net = Network::make(ns, 9);
  Vector zero = Vector::Zero(4);
  Vector logits = classify_logits(net, zero, 4);
  CHECK(logits.cwiseAbs().maxCoeff() == 0.0);  // v_rest = 0 everywhere
  CHECK(classify_image(net, zero, 4) == 0);
}

TEST_CASE("shape and batch validation") {
  Network net = pixel_detector_net();
  ImageDataset d = toy_dataset();
  CHECK_THROWS_AS(classify_logits(net, Vector::Zero(5), 4), std::invalid_argument);
  CHECK_THROWS_AS(classify_logits(net, Vector::Zero(4), 0), std::invalid_argument);
  CHECK_THROWS_AS(batch_accuracy(net, d, {}, ClassifyConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(batch_accuracy(net, d, {3}, ClassifyConfig{}), std::invalid_argument);
}

TEST_CASE("random network scores chance on label-free images") {
  const int n = 500;
  ImageDataset d;
  d.rows = 4;
  d.cols = 4;
  Rng rng(12);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < 16; ++p)
      d.pixels.push_back(static_cast<std::uint8_t>(rng.uniform_int(256)));
    d.labels.push_back(static_cast<std::uint8_t>(rng.uniform_int(10)));
  }
  NetworkSpec ns;
  ns.layer_sizes = {16, 32, 10};
  Network net = Network::make(ns, 77);
  ClassifyConfig cfg;
  cfg.input_gain = 4.0;  // wake the hidden layer up
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  const double acc = batch_accuracy(net, d, idx, cfg, 4);
  CHECK(std::abs(acc - 0.1) < 3.0 * std::sqrt(0.1 * 0.9 / n));
  // thread count cannot change the answer
  CHECK(batch_accuracy(net, d, idx, cfg, 1) == acc);
}

TEST_CASE("cross-entropy fitness rewards confident correct answers") {
  ImageDataset d = toy_dataset();
  Network net = pixel_detector_net();
  ClassifyConfig cfg;
  cfg.cross_entropy = true;
  const double good = batch_fitness(net, d, {0, 1, 2}, cfg);
  CHECK(good < 0.0);  // log-likelihoods
  d.labels = {1, 2, 0};  // everything wrong
  const double bad = batch_fitness(net, d, {0, 1, 2}, cfg);
  CHECK(good > bad);
  cfg.cross_entropy = false;
  CHECK(batch_fitness(net, d, {0, 1, 2}, cfg) == 0.0);  // accuracy path
}

TEST_CASE("subset selection: head and class-balanced") {
  ImageDataset d;
  d.rows = 1;
  d.cols = 1;
  d.pixels = {0, 0, 0, 0, 0, 0};
  d.labels = {3, 3, 1, 1, 3, 1};
  CHECK(subset_indices(d, 4) == std::vector<int>{0, 1, 2, 3});
  CHECK(subset_indices(d, 100) == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(subset_indices(d, 0, 1) == std::vector<int>{0, 2});
  CHECK(subset_indices(d, 0, 2) == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(subset_indices(d, 0, 0), std::invalid_argument);
}
