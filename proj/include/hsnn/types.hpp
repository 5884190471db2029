#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace hsnn {

using Array = Eigen::ArrayXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Flattened trainable parameter vector (neuron properties or weights).
using Genome = Eigen::VectorXd;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace hsnn
