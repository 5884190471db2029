#include "hsnn/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hsnn {

GradMode grad_mode_from_string(const std::string& name) {
  if (name == "full") return GradMode::Full;
  if (name == "detached") return GradMode::Detached;
  throw std::invalid_argument("unknown grad mode '" + name + "' (expected full or detached)");
}

std::string to_string(GradMode mode) { return mode == GradMode::Full ? "full" : "detached"; }

double step_jacobian(double u, double s, const NeuronParams& params, int i, const Surrogate& sg,
                     GradMode mode) {
  const double retain = 1.0 - decay_of(params.tau_raw[i]);
  if (mode == GradMode::Detached) return (1.0 - s) * retain;
  const double gp = surrogate_grad(sg, u - params.v_th[i], params.v_th[i]);
  return (1.0 - s + (params.v_rest[i] - u) * gp) * retain;
}

Array step_jacobian(const Array& u, const Array& s, const NeuronParams& params,
                    const Surrogate& sg, GradMode mode) {
  Array out(u.size());
  for (int i = 0; i < u.size(); ++i) out[i] = step_jacobian(u[i], s[i], params, i, sg, mode);
  return out;
}

ParamGradients ParamGradients::zeros(const Network& net) {
  ParamGradients g;
  const int L = net.num_layers();
  for (int l = 0; l < L; ++l) {
    const int n = net.params[l].size();
    g.tau_raw.push_back(Array::Zero(n));
    g.v_th.push_back(Array::Zero(n));
    g.v_rest.push_back(Array::Zero(n));
    g.r_mem.push_back(Array::Zero(n));
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
  }
  return g;
}

ParamGradients& ParamGradients::operator+=(const ParamGradients& o) {
  for (std::size_t l = 0; l < tau_raw.size(); ++l) {
    tau_raw[l] += o.tau_raw[l];
    v_th[l] += o.v_th[l];
    v_rest[l] += o.v_rest[l];
    r_mem[l] += o.r_mem[l];
    weights[l] += o.weights[l];
  }
  return *this;
}

ParamGradients& ParamGradients::operator*=(double c) {
  for (std::size_t l = 0; l < tau_raw.size(); ++l) {
    tau_raw[l] *= c;
    v_th[l] *= c;
    v_rest[l] *= c;
    r_mem[l] *= c;
    weights[l] *= c;
  }
  return *this;
}

Genome pack_gradients(const ParamGradients& g, const Network& net, const TrainableMask& mask,
                      bool train_weights) {
  Genome out(genome_size(net, mask, train_weights));
  int at = 0;
  auto put = [&](const Array& a) {
    out.segment(at, a.size()) = a.matrix();
    at += static_cast<int>(a.size());
  };
  for (int l = 0; l < net.num_layers(); ++l) {
    if (mask.tau_raw) put(g.tau_raw[l]);
    if (mask.v_th) put(g.v_th[l]);
    if (mask.v_rest) put(g.v_rest[l]);
    // chain through the genome's resistance scaling: d/d(r/c) = c * d/dr
    if (mask.r_mem) put(g.r_mem[l] * kRmemGenomeScale);
  }
  if (train_weights)
    for (int l = 0; l < net.num_layers(); ++l) {
      out.segment(at, g.weights[l].size()) =
          Eigen::Map<const Vector>(g.weights[l].data(), g.weights[l].size());
      at += static_cast<int>(g.weights[l].size());
    }
  return out;
}

namespace {

void check_traj(const Network& net, const Trajectory& traj, const LossGrads& loss_grads) {
  const int L = net.num_layers();
  const int T = traj.num_steps();
  require(static_cast<int>(traj.v0.size()) == L &&
              static_cast<int>(traj.inputs.size()) == T,
          "gradient: trajectory/network mismatch");
  require(static_cast<int>(loss_grads.size()) == T,
          "gradient: loss_grads length must equal trajectory steps");
  for (int t = 0; t < T; ++t) {
    require(static_cast<int>(traj.steps[t].u.size()) == L,
            "gradient: trajectory/network mismatch");
    require(loss_grads[t].size() == 0 || loss_grads[t].size() == net.spec.output_size(),
            "gradient: loss gradient size must match the readout layer");
  }
}

}  // namespace

ParamGradients backward(const Network& net, const Trajectory& traj, const LossGrads& loss_grads,
                        const Surrogate& sg, GradMode mode) {
  check_traj(net, traj, loss_grads);
  const int L = net.num_layers();
  const int T = traj.num_steps();
  const bool full = mode == GradMode::Full;
  const double c = net.spec.current_scale;

  ParamGradients g = ParamGradients::zeros(net);
  std::vector<Array> k(L);
  for (int l = 0; l < L; ++l) k[l] = net.params[l].decay();

  // dL/dv(t, l) carried backward in time
  std::vector<Array> lam_v(L);
  for (int l = 0; l < L; ++l) lam_v[l] = Array::Zero(net.params[l].size());

  for (int t = T - 1; t >= 0; --t) {
    const StepRecord& rec = traj.steps[t];
    // dL/ds(t, l) from same-step consumption by the layer above
    std::vector<Array> lam_s(L);
    for (int l = 0; l < L; ++l) lam_s[l] = Array::Zero(net.params[l].size());

    for (int l = L - 1; l >= 0; --l) {
      const NeuronParams& p = net.params[l];
      Array lv = lam_v[l];
      if (l == L - 1 && loss_grads[t].size() > 0) lv += loss_grads[t];

      const Array& u = rec.u[l];
      const Array& s = rec.s[l];
      const Array& I = rec.current[l];
      const Array& v_prev = traj.v_prev(t, l);

      Array mu;  // dL/du(t, l)
      if (net.layer_spikes(l)) {
        const Array gp = surrogate_grad(sg, u - p.v_th, p.v_th);
        Array chi = lam_s[l];  // dL/ds(t, l)
        if (full) chi += lv * (p.v_rest - u);
        mu = lv * (1.0 - s) + chi * gp;
        g.v_th[l] -= chi * gp;
        if (full) g.v_rest[l] += lv * s;
      } else {
        mu = lv;  // readout: v = u
      }

      g.tau_raw[l] += mu * (p.r_mem * I - v_prev + p.v_rest) * k[l] * (1.0 - k[l]);
      g.r_mem[l] += mu * k[l] * I;
      g.v_rest[l] += mu * k[l];
      const Vector j = (mu * k[l] * p.r_mem * c).matrix();
      g.weights[l] += j * traj.source(t, l).matrix().transpose();
      if (l > 0) lam_s[l - 1] += (net.weights[l].transpose() * j).array();
      lam_v[l] = mu * (1.0 - k[l]);
    }
  }
  // the run starts at rest, so the initial state is itself v_rest
  for (int l = 0; l < L; ++l) g.v_rest[l] += lam_v[l];
  return g;
}

// ---- Literal unrolled-product oracle ----------------------------------------

namespace {

struct OracleScratch {
  int L = 0;
  int ntot = 0;
  std::vector<int> offset;  // block offset of each layer in the stacked state
  std::vector<Array> k, gp, dvdu;
  std::vector<Matrix> B;  // d u(t,l) / d s(t,l-1)
};

// Per-step quantities shared by the state Jacobian and the parameter partials.
OracleScratch scratch_for(const Network& net, const Trajectory& traj, int t, const Surrogate& sg,
                          GradMode mode) {
  OracleScratch sc;
  sc.L = net.num_layers();
  sc.offset.resize(sc.L);
  for (int l = 0; l < sc.L; ++l) {
    sc.offset[l] = sc.ntot;
    sc.ntot += net.params[l].size();
  }
  const bool full = mode == GradMode::Full;
  const StepRecord& rec = traj.steps[t];
  for (int l = 0; l < sc.L; ++l) {
    const NeuronParams& p = net.params[l];
    const int n = p.size();
    sc.k.push_back(p.decay());
    if (net.layer_spikes(l)) {
      sc.gp.push_back(surrogate_grad(sg, rec.u[l] - p.v_th, p.v_th));
      sc.dvdu.push_back(full
                            ? Array(1.0 - rec.s[l] + (p.v_rest - rec.u[l]) * sc.gp[l])
                            : Array(1.0 - rec.s[l]));
    } else {
      sc.gp.push_back(Array::Zero(n));
      sc.dvdu.push_back(Array::Ones(n));
    }
    sc.B.push_back((net.spec.current_scale * sc.k[l] * p.r_mem).matrix().asDiagonal() *
                   net.weights[l]);
  }
  return sc;
}

// Full state Jacobian d v_all(t) / d v_all(t-1).
Matrix state_jacobian(const OracleScratch& sc) {
  Matrix J = Matrix::Zero(sc.ntot, sc.ntot);
  Matrix G;  // d u(t,l) / d v_all(t-1), built layer by layer up the cascade
  for (int l = 0; l < sc.L; ++l) {
    const int n = static_cast<int>(sc.k[l].size());
    Matrix Gl = Matrix::Zero(n, sc.ntot);
    Gl.block(0, sc.offset[l], n, n) = (1.0 - sc.k[l]).matrix().asDiagonal();
    if (l > 0) Gl += sc.B[l] * sc.gp[l - 1].matrix().asDiagonal() * G;
    J.block(sc.offset[l], 0, n, sc.ntot) = sc.dvdu[l].matrix().asDiagonal() * Gl;
    G = std::move(Gl);
  }
  return J;
}

}  // namespace

ParamGradients eq5_oracle(const Network& net, const Trajectory& traj, const LossGrads& loss_grads,
                          const Surrogate& sg, GradMode mode) {
  check_traj(net, traj, loss_grads);
  const int L = net.num_layers();
  const int T = traj.num_steps();
  int ntot = 0;
  for (int l = 0; l < L; ++l) ntot += net.params[l].size();
  require(ntot <= 32 && T <= 64, "eq5_oracle: instance too large (max 32 neurons, 64 steps)");

  const bool full = mode == GradMode::Full;
  ParamGradients g = ParamGradients::zeros(net);

  for (int n = 0; n < T; ++n) {
    if (loss_grads[n].size() == 0) continue;
    OracleScratch sc = scratch_for(net, traj, n, sg, mode);
    Vector a = Vector::Zero(ntot);  // d l_n / d v_all(t), pulled back step by step
    a.segment(sc.offset[L - 1], net.spec.output_size()) = loss_grads[n].matrix();

    for (int t = n; t >= 0; --t) {
      if (t < n) sc = scratch_for(net, traj, t, sg, mode);
      const StepRecord& rec = traj.steps[t];

      // adjoint of u(t,l): layer l's own rows plus the within-step cascade
      // up through spikes of every layer above
      std::vector<Vector> eu(L);
      for (int l = 0; l < L; ++l) {
        const int nl = net.params[l].size();
        Matrix M = Matrix::Identity(nl, nl);  // d u(t,j) / d u(t,l)
        Vector acc = Vector::Zero(nl);
        for (int j = l; j < L; ++j) {
          if (j > l) M = (sc.B[j] * sc.gp[j - 1].matrix().asDiagonal() * M).eval();
          acc += M.transpose() *
                 (sc.dvdu[j] * a.segment(sc.offset[j], net.params[j].size()).array()).matrix();
        }
        eu[l] = acc;
      }

      for (int l = 0; l < L; ++l) {
        const NeuronParams& p = net.params[l];
        const Array e = eu[l].array();
        const Array& I = rec.current[l];
        const Array& v_prev = traj.v_prev(t, l);
        g.tau_raw[l] += e * (p.r_mem * I - v_prev + p.v_rest) * sc.k[l] * (1.0 - sc.k[l]);
        g.r_mem[l] += e * sc.k[l] * I;
        g.v_rest[l] += e * sc.k[l];
        g.weights[l] += (e * sc.k[l] * p.r_mem * net.spec.current_scale).matrix() *
                        traj.source(t, l).matrix().transpose();

        if (net.layer_spikes(l)) {
          // adjoint of s(t,l): reset rows (full mode) plus upward consumption
          const int nl = p.size();
          Vector es = Vector::Zero(nl);
          if (full)
            es = ((p.v_rest - rec.u[l]) *
                  a.segment(sc.offset[l], nl).array())
                     .matrix();
          if (l + 1 < L) {
            Matrix M = sc.B[l + 1];  // d u(t,j) / d s(t,l)
            for (int j = l + 1; j < L; ++j) {
              if (j > l + 1) M = (sc.B[j] * sc.gp[j - 1].matrix().asDiagonal() * M).eval();
              es += M.transpose() *
                    (sc.dvdu[j] * a.segment(sc.offset[j], net.params[j].size()).array()).matrix();
            }
          }
          g.v_th[l] -= es.array() * sc.gp[l];
          if (full) g.v_rest[l] += a.segment(sc.offset[l], nl).array() * rec.s[l];
        }
      }

      a = state_jacobian(sc).transpose() * a;
    }
    // the initial state is the resting potential
    for (int l = 0; l < L; ++l)
      g.v_rest[l] += a.segment(sc.offset[l], net.params[l].size()).array();
  }
  return g;
}

// ---- Stability diagnostics ---------------------------------------------------

StabilityReport stability_report(const Network& net, const Trajectory& traj, const Surrogate& sg,
                                 GradMode mode, int hist_bins) {
  require(traj.num_steps() > 0, "stability_report: empty trajectory");
  require(hist_bins > 0, "stability_report: need at least one histogram bin");
  const int L = net.num_layers();
  const int T = traj.num_steps();

  StabilityReport rep;
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  std::vector<double> running;
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < net.params[l].size(); ++i) running.push_back(1.0);

  for (int t = 0; t < T; ++t) {
    int neuron = 0;
    for (int l = 0; l < L; ++l) {
      // a non-spiking readout has no reset: its temporal factor is the leak
      const Array jac = net.layer_spikes(l)
                            ? step_jacobian(traj.steps[t].u[l], traj.steps[t].s[l],
                                            net.params[l], sg, mode)
                            : Array(1.0 - net.params[l].decay());
      for (int i = 0; i < jac.size(); ++i, ++neuron) {
        const double u = traj.steps[t].u[l][i];
        running[neuron] *= jac[i];
        rep.rows.push_back({t, neuron, jac[i], running[neuron], u});
        if (std::abs(jac[i]) > 1.0) ++rep.flagged;
        rep.max_abs_running_product =
            std::max(rep.max_abs_running_product, std::abs(running[neuron]));
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
      }
    }
  }

  if (u_min == u_max) {
    u_min -= 0.5;
    u_max += 0.5;
  }
  rep.hist_edges = Array::LinSpaced(hist_bins + 1, u_min, u_max);
  rep.hist_counts = Array::Zero(hist_bins);
  const double width = (u_max - u_min) / hist_bins;
  for (const auto& row : rep.rows) {
    int b = std::min(hist_bins - 1, static_cast<int>((row.u - u_min) / width));
    rep.hist_counts[std::max(0, b)] += 1.0;
  }
  return rep;
}

std::string StabilityReport::to_csv() const {
  std::string out = "step,neuron,jacobian,running_product,u\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", r.step, r.neuron, r.jacobian,
                  r.running_product, r.u);
    out += buf;
  }
  return out;
}

}  // namespace hsnn
