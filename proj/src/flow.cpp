#include "interdict/flow.hpp"

#include <cmath>
#include <limits>

namespace interdict {

WeightSystem WeightSystem::build(const ValidatedInstance& g, const Vec& x) {
  const auto& inst = g.inst;
  const int n = g.num_nodes();
  WeightSystem w;
  w.node_utility.resize(n);
  for (int s = 0; s < n; ++s) w.node_utility[s] = inst.node_utility(s, x);
  w.arc_w.resize(inst.arcs.size());
  for (size_t a = 0; a < inst.arcs.size(); ++a) {
    const auto& [u, v] = inst.arcs[a];
    w.arc_w[a] = std::exp((w.node_utility[u] + g.potential[v] - g.potential[u]) / inst.mu);
  }
  w.log_scale = g.potential[g.origin()] / inst.mu;
  return w;
}

FlowEvaluation evaluate(const ValidatedInstance& g, const Vec& x) {
  return evaluate_with(g, x, WeightSystem::build(g, x));
}

FlowEvaluation evaluate_with(const ValidatedInstance& g, const Vec& x, const WeightSystem& w) {
  const auto& inst = g.inst;
  if (!g.feasible(x)) fail(Errc::InfeasibleStrategy, "x violates box or budget constraints");

  const int n = g.num_nodes();
  FlowEvaluation ev;
  ev.weights = w;
  ev.log_scale = ev.weights.log_scale;
  const auto& aw = ev.weights.arc_w;

  // Suffix partition values, reverse topological sweep. Z_{s_d} = 1.
  ev.z_hat.assign(n, 0.0);
  ev.z_hat[g.destination()] = 1.0;
  for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
    NodeId s = *it;
    if (s == g.destination()) continue;
    double acc = 0.0;
    for (size_t i = 0; i < g.succ[s].size(); ++i)
      acc += aw[g.succ_arcs[s][i]] * ev.z_hat[g.succ[s][i]];
    ev.z_hat[s] = acc;
  }
  const double zo = ev.z_hat[g.origin()];
  if (!(zo > 0.0) || !std::isfinite(zo))
    fail(Errc::NumericalUnderflow, "all path masses below representable range");

  // Prefix values, forward sweep; a prefix excludes the landing node's utility.
  ev.a_hat.assign(n, 0.0);
  ev.a_hat[g.origin()] = 1.0;
  for (NodeId s : g.topo) {
    if (s == g.origin()) continue;
    double acc = 0.0;
    for (size_t i = 0; i < g.pred[s].size(); ++i)
      acc += aw[g.pred_arcs[s][i]] * ev.a_hat[g.pred[s][i]];
    ev.a_hat[s] = acc;
  }

  // Absolute logs: potentials shift per node, uniformly per full path. Any
  // extra common factor in the weights enters at the origin, so the A side
  // and Z at the origin correct through log_scale rather than the potential.
  ev.log_z.resize(n);
  ev.log_a.resize(n);
  for (int s = 0; s < n; ++s) {
    ev.log_z[s] = std::log(ev.z_hat[s]) + g.potential[s] / inst.mu;
    ev.log_a[s] = std::log(ev.a_hat[s]) + ev.log_scale - g.potential[s] / inst.mu;
  }
  ev.log_z[g.origin()] = std::log(zo) + ev.log_scale;
  ev.log_partition_over_mu = ev.log_z[g.origin()];
  ev.log_partition = inst.mu * ev.log_partition_over_mu;

  // Crossing probabilities P^f_s = Y^s_{s_o} Z_s / Z_{s_o} and F^l.
  ev.crossing.assign(n, 0.0);
  ev.defender_value = 0.0;
  for (NodeId s : g.critical_nodes) {
    double pf = ev.a_hat[s] * ev.z_hat[s] / zo;
    ev.crossing[s] = pf;
    VarId j = *inst.nodes[s].var;
    ev.defender_value += inst.reward(j, x[j]) * pf;
  }

  // Moment-augmented sweep: E_s = exp(v/mu) sum_{s'} (v(s) Z_{s'} + E_{s'}).
  Vec e_hat(n, 0.0);
  for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
    NodeId s = *it;
    if (s == g.destination()) continue;
    const double v = ev.weights.node_utility[s];
    double acc = 0.0;
    for (size_t i = 0; i < g.succ[s].size(); ++i) {
      NodeId t = g.succ[s][i];
      acc += aw[g.succ_arcs[s][i]] * (v * ev.z_hat[t] + e_hat[t]);
    }
    e_hat[s] = acc;
  }
  ev.adversary_value = e_hat[g.origin()] / zo;

  return ev;
}

Vec FlowEvaluation::policy(const ValidatedInstance& g, NodeId s) const {
  // pi(s'|s) proportional to Z_{s'}; stabilized through the absolute logs.
  const auto& nbrs = g.succ[s];
  Vec w(nbrs.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nbrs.size(); ++i) {
    w[i] = log_z[nbrs[i]];
    mx = std::max(mx, w[i]);
  }
  double tot = 0.0;
  for (double& v : w) {
    v = std::exp(v - mx);
    tot += v;
  }
  for (double& v : w) v /= tot;
  return w;
}

namespace {

GradientBundle g_adjoint(const ValidatedInstance& g, const FlowEvaluation& ev, double delta) {
  const auto& inst = g.inst;
  const int n = g.num_nodes();
  const auto& aw = ev.weights.arc_w;

  // Reward at each critical node; the coverage value is recovered from the
  // node utility so callers may pass evaluations without keeping x around.
  Vec node_reward(n, 0.0);
  for (NodeId s : g.critical_nodes) {
    VarId j = *inst.nodes[s].var;
    double xj = (ev.weights.node_utility[s] - inst.nodes[s].t_f) / inst.vars[j].w_f;
    node_reward[s] = inst.reward(j, xj);
  }

  GradientBundle out;
  out.log_scale = ev.log_scale;
  out.value = -delta * ev.z_hat[g.origin()];
  for (NodeId s : g.critical_nodes) out.value += node_reward[s] * ev.a_hat[s] * ev.z_hat[s];

  // Adjoint of Z, forward topological order:
  //   zdot_s = [s critical] r_s A_s + [s = origin] (-delta) + sum_pred zdot_p w_{ps}.
  Vec zdot(n, 0.0);
  for (NodeId s : g.topo) {
    double acc = 0.0;
    if (inst.nodes[s].critical()) acc += node_reward[s] * ev.a_hat[s];
    if (s == g.origin()) acc -= delta;
    for (size_t i = 0; i < g.pred[s].size(); ++i)
      acc += zdot[g.pred[s][i]] * aw[g.pred_arcs[s][i]];
    zdot[s] = acc;
  }

  // Adjoint of A, reverse topological order:
  //   adot_s = [s critical] r_s Z_s + sum_succ adot_t w_{st}.
  Vec adot(n, 0.0);
  for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
    NodeId s = *it;
    double acc = 0.0;
    if (inst.nodes[s].critical()) acc += node_reward[s] * ev.z_hat[s];
    for (size_t i = 0; i < g.succ[s].size(); ++i)
      acc += adot[g.succ[s][i]] * aw[g.succ_arcs[s][i]];
    adot[s] = acc;
  }

  // x_j scales every outgoing arc weight of each copy of j plus the reward term.
  out.grad.assign(inst.num_vars(), 0.0);
  for (NodeId s : g.critical_nodes) {
    VarId j = *inst.nodes[s].var;
    const CoverageVar& cv = inst.vars[j];
    double az = ev.a_hat[s] * ev.z_hat[s];
    out.grad[j] += cv.w_l * az + (cv.w_f / inst.mu) * (zdot[s] * ev.z_hat[s] +
                                                       ev.a_hat[s] * adot[s] - node_reward[s] * az);
  }
  return out;
}

}  // namespace

GradientBundle g_value_and_gradient(const ValidatedInstance& g, const FlowEvaluation& ev,
                                    double delta) {
  return g_adjoint(g, ev, delta);
}

GradientBundle g_value_and_gradient(const ValidatedInstance& g, const Vec& x, double delta) {
  return g_adjoint(g, evaluate(g, x), delta);
}

GradientBundle gamma_and_gradient(const ValidatedInstance& g, const Vec& x) {
  FlowEvaluation ev = evaluate(g, x);
  GradientBundle out;
  out.value = ev.log_partition;
  out.log_scale = 0.0;
  out.grad.assign(g.num_vars(), 0.0);
  for (NodeId s : g.critical_nodes) {
    VarId j = *g.inst.nodes[s].var;
    out.grad[j] += g.inst.vars[j].w_f * ev.crossing[s];
  }
  return out;
}

}  // namespace interdict
