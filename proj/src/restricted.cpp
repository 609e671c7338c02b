#include "interdict/restricted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace interdict {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}
}  // namespace

RestrictedContext::RestrictedContext(const ValidatedInstance& g) : g_(&g), layered_(build_layered(g, 0.0)) {
  const auto& inst = g.inst;
  log_h_.assign(inst.num_vars(), kNegInf);
  for (NodeId s : g.critical_nodes) {
    VarId j = *inst.nodes[s].var;
    ValidatedInstance sub;
    try {
      sub = build_subgraph_retaining(g, s);
    } catch (const Error& e) {
      if (e.code() == Errc::EmptySubgraph) continue;  // Delta(s) empty
      throw;
    }
    // Neutralize s (drop its variable, zero its intercept): the DP then sums
    // exp(V^s(tau)/mu) over paths through s, which is H(s).
    int s_sub = -1;
    for (int u = 0; u < sub.num_nodes(); ++u)
      if (sub.orig_ids[u] == s) s_sub = u;
    if (s_sub < 0) continue;  // s itself pruned: no path of G(s) crosses s
    InterdictionInstance neut = sub.inst;
    neut.nodes[s_sub].var.reset();
    neut.nodes[s_sub].t_f = 0.0;
    ValidatedInstance nv = validate(neut);
    int s_nv = -1;
    for (int u = 0; u < nv.num_nodes(); ++u)
      if (sub.orig_ids[nv.orig_ids[u]] == s) s_nv = u;
    FlowEvaluation ev = interdict::evaluate(nv, Vec(nv.num_vars(), nv.inst.lx));
    if (s_nv >= 0 && ev.a_hat[s_nv] > 0.0 && ev.z_hat[s_nv] > 0.0) {
      log_h_[j] = ev.log_a[s_nv] + ev.log_z[s_nv];
      any_delta_ = true;
    }
  }

  // Common x-independent scale for g~ values: terms are largest at x = lx
  // since w_f < 0.
  common_log_scale_ = kNegInf;
  for (NodeId s : g.critical_nodes) {
    VarId j = *inst.nodes[s].var;
    if (log_h_[j] == kNegInf) continue;
    double v_hi = inst.nodes[s].t_f + inst.vars[j].w_f * inst.lx;
    common_log_scale_ = std::max(common_log_scale_, log_h_[j] + v_hi / inst.mu);
  }
}

RestrictedEvaluation RestrictedContext::evaluate(const Vec& x) const {
  const auto& inst = g_->inst;
  if (!g_->feasible(x)) fail(Errc::InfeasibleStrategy, "x violates box or budget constraints");

  RestrictedEvaluation out;
  const int nv = inst.num_vars();
  out.log_mass_delta.assign(nv, kNegInf);

  double log_sum = kNegInf;
  for (NodeId s : g_->critical_nodes) {
    VarId j = *inst.nodes[s].var;
    if (log_h_[j] == kNegInf) continue;
    double lm = log_h_[j] + inst.node_utility(s, x) / inst.mu;
    out.log_mass_delta[j] = lm;
    log_sum = log_add(log_sum, lm);
  }
  out.restricted_defined = log_sum != kNegInf;

  if (out.restricted_defined) {
    double num = 0.0;
    for (NodeId s : g_->critical_nodes) {
      VarId j = *inst.nodes[s].var;
      if (out.log_mass_delta[j] == kNegInf) continue;
      num += inst.reward(j, x[j]) * std::exp(out.log_mass_delta[j] - log_sum);
    }
    out.restricted_value = num;
  } else {
    out.restricted_value = std::numeric_limits<double>::quiet_NaN();
  }

  // Delta+ side from the zero-penalty layered instance (exact relabeling).
  LayeredMasses lm = layered_masses(layered_c0(), x);
  out.log_mass_delta_plus = lm.log_delta_plus;
  out.log_through = lm.log_through;
  out.log_union_delta = lm.log_by_class[1];
  out.log_union_delta_plus = lm.log_by_class[2];
  return out;
}

double RestrictedContext::restricted_value(const Vec& x) const {
  const auto& inst = g_->inst;
  double log_sum = kNegInf;
  Vec lms(inst.num_vars(), kNegInf);
  for (NodeId s : g_->critical_nodes) {
    VarId j = *inst.nodes[s].var;
    if (log_h_[j] == kNegInf) continue;
    lms[j] = log_h_[j] + inst.node_utility(s, x) / inst.mu;
    log_sum = log_add(log_sum, lms[j]);
  }
  if (log_sum == kNegInf) fail(Errc::RestrictedUndefined, "every path crosses 0 or >= 2 critical nodes");
  double num = 0.0;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (lms[j] == kNegInf) continue;
    num += inst.reward(j, x[j]) * std::exp(lms[j] - log_sum);
  }
  return num;
}

GradientBundle RestrictedContext::g_restricted(const Vec& x, double delta) const {
  const auto& inst = g_->inst;
  if (!any_delta_) fail(Errc::RestrictedUndefined, "every path crosses 0 or >= 2 critical nodes");
  if (!g_->feasible(x)) fail(Errc::InfeasibleStrategy, "x violates box or budget constraints");

  GradientBundle out;
  out.log_scale = common_log_scale_;
  out.grad.assign(inst.num_vars(), 0.0);
  out.value = 0.0;
  bool any_mass = false;
  for (NodeId s : g_->critical_nodes) {
    VarId j = *inst.nodes[s].var;
    if (log_h_[j] == kNegInf) continue;
    double m = std::exp(log_h_[j] + inst.node_utility(s, x) / inst.mu - common_log_scale_);
    if (m > 0.0) any_mass = true;
    double r = inst.reward(j, x[j]);
    const CoverageVar& cv = inst.vars[j];
    out.value += (r - delta) * m;
    // Only x_j appears in G(j): every Delta(j) path crosses j exactly once.
    out.grad[j] += m * (cv.w_l + (cv.w_f / inst.mu) * (r - delta));
  }
  if (!any_mass) fail(Errc::NumericalUnderflow, "restricted masses below representable range");
  return out;
}

RestrictedEvaluation evaluate_restricted(const ValidatedInstance& g, const Vec& x) {
  RestrictedEvaluation out = RestrictedContext(g).evaluate(x);
  if (!out.restricted_defined)
    fail(Errc::RestrictedUndefined, "every path crosses 0 or >= 2 critical nodes");
  return out;
}

GradientBundle g_restricted_value_and_gradient(const ValidatedInstance& g, const Vec& x,
                                               double delta) {
  return RestrictedContext(g).g_restricted(x, delta);
}

}  // namespace interdict
