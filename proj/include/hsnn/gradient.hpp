#pragma once

#include <string>
#include <vector>

#include "hsnn/network.hpp"
#include "hsnn/surrogate.hpp"
#include "hsnn/types.hpp"

namespace hsnn {

/// How the spike-reset term enters the temporal Jacobian. Full keeps the
/// surrogate-smoothed reset path; Detached drops every gradient through the
/// reset (spikes still reach downstream layers through the surrogate), which
/// bounds each per-step factor by (1 - dt/tau_m) < 1.
enum class GradMode { Full, Detached };

GradMode grad_mode_from_string(const std::string& name);
std::string to_string(GradMode mode);

/// Single-neuron temporal Jacobian d v(t) / d v(t-dt):
///   full:     [1 - s + (v_rest - u) g'(u - v_th)] (1 - k)
///   detached: (1 - s) (1 - k)
double step_jacobian(double u, double s, const NeuronParams& params, int i,
                     const Surrogate& sg, GradMode mode);
Array step_jacobian(const Array& u, const Array& s, const NeuronParams& params,
                    const Surrogate& sg, GradMode mode);

/// Loss gradients w.r.t. the readout membrane potential, one entry per step.
/// A zero-length entry means "no loss at this step".
using LossGrads = std::vector<Array>;

/// Gradients w.r.t. every per-neuron property and every weight matrix.
struct ParamGradients {
  std::vector<Array> tau_raw;
  std::vector<Array> v_th;
  std::vector<Array> v_rest;
  std::vector<Array> r_mem;
  std::vector<Matrix> weights;

  static ParamGradients zeros(const Network& net);
  ParamGradients& operator+=(const ParamGradients& o);
  ParamGradients& operator*=(double c);
};

/// Flatten gradients in the genome layout of pack_genome.
Genome pack_gradients(const ParamGradients& g, const Network& net, const TrainableMask& mask,
                      bool train_weights);

/// Reverse-mode sweep through the recorded trajectory. One O(T) pass,
/// tau gradients taken through the sigmoid reparameterization so they live in
/// the same space the optimizer searches.
ParamGradients backward(const Network& net, const Trajectory& traj, const LossGrads& loss_grads,
                        const Surrogate& sg, GradMode mode);

/// Literal evaluation of the unrolled chain rule: for every loss step n and
/// every earlier step k, multiply the explicit per-step state Jacobians
/// J(n)...J(k+1) into the local parameter partials of step k and sum. O(T^2),
/// small instances only; the reference the backward sweep is tested against.
ParamGradients eq5_oracle(const Network& net, const Trajectory& traj, const LossGrads& loss_grads,
                          const Surrogate& sg, GradMode mode);

// ---- Stability diagnostics --------------------------------------------------

struct StabilityRow {
  int step;
  int neuron;  ///< global index across non-input layers
  double jacobian;
  double running_product;
  double u;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double max_abs_running_product = 0.0;
  int flagged = 0;  ///< rows where |jacobian| > 1
  Array hist_edges;  ///< u-histogram bin edges (size bins+1)
  Array hist_counts;

  std::string to_csv() const;  ///< columns: step,neuron,jacobian,running_product,u
};

/// Per-neuron temporal Jacobian magnitudes and their running products along
/// the trajectory, plus a histogram of pre-reset potentials.
StabilityReport stability_report(const Network& net, const Trajectory& traj, const Surrogate& sg,
                                 GradMode mode, int hist_bins = 40);

}  // namespace hsnn
