#pragma once

#include <vector>

#include "hsnn/idx.hpp"
#include "hsnn/network.hpp"

namespace hsnn {

/// Supervised harness: inject the normalized image as a constant current for
/// a few steps; the logits are the readout potentials at the last step.
struct ClassifyConfig {
  int sim_steps = 4;
  double input_gain = 1.0;   ///< applied on top of the 1/255 normalization
  bool cross_entropy = false;  ///< fitness: accuracy (default) or mean log-likelihood
};

Vector classify_logits(const Network& net, const Vector& image_current, int sim_steps);

/// Predicted class: argmax of the logits, ties to the lowest index.
int classify_image(const Network& net, const Vector& image_current, int sim_steps);

/// Fraction of correctly classified images among `indices`.
double batch_accuracy(const Network& net, const ImageDataset& data,
                      const std::vector<int>& indices, const ClassifyConfig& cfg,
                      int threads = 1);

/// ES fitness over a batch: accuracy, or mean softmax log-likelihood of the
/// true labels when cfg.cross_entropy is set.
double batch_fitness(const Network& net, const ImageDataset& data,
                     const std::vector<int>& indices, const ClassifyConfig& cfg,
                     int threads = 1);

/// First `limit` indices of each split, or a class-balanced subset when
/// `per_class` > 0 (takes the first per_class examples of every label).
std::vector<int> subset_indices(const ImageDataset& data, int limit, int per_class = 0);

}  // namespace hsnn
