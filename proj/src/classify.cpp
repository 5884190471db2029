#include "hsnn/classify.hpp"

#include <cmath>

#include "hsnn/evaluate.hpp"
#include "hsnn/parallel.hpp"
#include "hsnn/reinforce.hpp"

namespace hsnn {

Vector classify_logits(const Network& net, const Vector& image_current, int sim_steps) {
  require(sim_steps >= 1, "classify_logits: need at least one step");
  require(image_current.size() == net.spec.input_size(),
          "classify_logits: image size does not match the network input");
  Simulation sim(net);
  Array out;
  for (int t = 0; t < sim_steps; ++t) out = sim.step(image_current);
  return out;
}

int classify_image(const Network& net, const Vector& image_current, int sim_steps) {
  return argmax_action(classify_logits(net, image_current, sim_steps));
}

namespace {

void check_indices(const ImageDataset& data, const std::vector<int>& indices) {
  require(!indices.empty(), "classify: empty evaluation batch");
  for (int i : indices)
    require(i >= 0 && i < data.count(),
            "classify: image index " + std::to_string(i) + " out of range");
}

}  // namespace

double batch_accuracy(const Network& net, const ImageDataset& data,
                      const std::vector<int>& indices, const ClassifyConfig& cfg, int threads) {
  check_indices(data, indices);
  std::vector<double> correct(indices.size());
  parallel_for(static_cast<int>(indices.size()), threads, [&](int j) {
    const int i = indices[j];
    const int pred = classify_image(net, data.image_current(i, cfg.input_gain), cfg.sim_steps);
    correct[j] = pred == data.labels[i] ? 1.0 : 0.0;
  });
  double sum = 0.0;
  for (double c : correct) sum += c;
  return sum / indices.size();
}

double batch_fitness(const Network& net, const ImageDataset& data,
                     const std::vector<int>& indices, const ClassifyConfig& cfg, int threads) {
  if (!cfg.cross_entropy) return batch_accuracy(net, data, indices, cfg, threads);
  check_indices(data, indices);
  std::vector<double> ll(indices.size());
  parallel_for(static_cast<int>(indices.size()), threads, [&](int j) {
    const int i = indices[j];
    Vector logits = classify_logits(net, data.image_current(i, cfg.input_gain), cfg.sim_steps);
    Vector p = softmax(logits);
    ll[j] = std::log(std::max(p[data.labels[i]], 1e-300));
  });
  double sum = 0.0;
  for (double x : ll) sum += x;
  return sum / indices.size();
}

std::vector<int> subset_indices(const ImageDataset& data, int limit, int per_class) {
  require(limit > 0 || per_class > 0, "subset_indices: empty selection");
  std::vector<int> out;
  if (per_class > 0) {
    std::vector<int> taken(10, 0);
    for (int i = 0; i < data.count(); ++i) {
      if (taken[data.labels[i]] >= per_class) continue;
      ++taken[data.labels[i]];
      out.push_back(i);
    }
  } else {
    for (int i = 0; i < std::min(limit, data.count()); ++i) out.push_back(i);
  }
  return out;
}

}  // namespace hsnn
