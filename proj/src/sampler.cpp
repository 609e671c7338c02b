#include "interdict/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interdict/solve.hpp"

namespace interdict {

PolicyTable PolicyTable::build(const ValidatedInstance& g, const FlowEvaluation& ev) {
  PolicyTable t;
  t.cum.resize(g.num_nodes());
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (g.succ[u].empty()) continue;
    Vec p = ev.policy(g, u);
    double acc = 0.0;
    for (double& v : p) {
      acc += v;
      v = acc;
    }
    p.back() = 1.0;
    t.cum[u] = std::move(p);
  }
  return t;
}

std::vector<NodeId> sample_path(const ValidatedInstance& g, const PolicyTable& pol, Rng& rng) {
  std::vector<NodeId> path{g.origin()};
  NodeId u = g.origin();
  while (u != g.destination()) {
    const auto& nbrs = g.succ[u];
    if (nbrs.empty()) fail(Errc::DeadEnd, "node without successors on a validated instance");
    const Vec& cum = pol.cum[u];
    double r = rng.next_double();
    size_t i = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    if (i >= nbrs.size()) i = nbrs.size() - 1;
    u = nbrs[i];
    path.push_back(u);
  }
  return path;
}

SampleBatch sample_batch(const ValidatedInstance& g, const FlowEvaluation& ev, const Vec& x, int n,
                         Rng& rng) {
  PolicyTable pol = PolicyTable::build(g, ev);
  SampleBatch b;
  b.paths.reserve(n);
  b.log_weight.reserve(n);
  for (int i = 0; i < n; ++i) {
    b.paths.push_back(sample_path(g, pol, rng));
    double u = 0.0;
    for (NodeId s : b.paths.back())
      if (s != g.destination()) u += g.inst.node_utility(s, x);
    b.log_weight.push_back(u / g.inst.mu);
  }
  return b;
}

double saa_value_and_gradient(const ValidatedInstance& g, const SampleBatch& batch, const Vec& x,
                              Vec* grad) {
  const auto& inst = g.inst;
  const size_t n = batch.paths.size();
  const int nv = inst.num_vars();

  // Per-path utility and reward sum at this x; weights stabilized in-sample.
  Vec lu(n), rew(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    double u = 0.0, r = 0.0;
    for (NodeId s : batch.paths[i]) {
      if (s != g.destination()) u += inst.node_utility(s, x);
      if (inst.nodes[s].critical()) {
        VarId j = *inst.nodes[s].var;
        r += inst.reward(j, x[j]);
      }
    }
    lu[i] = u / inst.mu;
    rew[i] = r;
    mx = std::max(mx, lu[i]);
  }

  double num = 0.0, den = 0.0;
  Vec dnum(nv, 0.0), dden(nv, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double w = std::exp(lu[i] - mx);
    num += rew[i] * w;
    den += w;
    for (NodeId s : batch.paths[i]) {
      if (!inst.nodes[s].critical()) continue;
      VarId j = *inst.nodes[s].var;
      const CoverageVar& cv = inst.vars[j];
      dnum[j] += w * (cv.w_l + rew[i] * cv.w_f / inst.mu);
      dden[j] += w * cv.w_f / inst.mu;
    }
  }
  double val = num / den;
  if (grad) {
    grad->assign(nv, 0.0);
    for (int j = 0; j < nv; ++j) (*grad)[j] = (dnum[j] - val * dden[j]) / den;
  }
  return val;
}

SolveReport baseline_solve(const ValidatedInstance& g, const SolveOptions& opts) {
  SolveReport rep;
  rep.method = Method::BASELINE;
  double best_exact = -std::numeric_limits<double>::infinity();

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = Rng::stream(opts.seed, 1000 + r);
    Vec x = random_feasible(g, opts.seed, 2000 + r);
    for (int it = 0; it < opts.baseline_iters; ++it) {
      FlowEvaluation ev = evaluate(g, x);
      SampleBatch batch = sample_batch(g, ev, x, opts.baseline_samples, rng);
      Vec grad;
      double f0 = saa_value_and_gradient(g, batch, x, &grad);
      // One backtracking projected-gradient step on the fixed batch.
      double step = opts.step_initial;
      while (step > 1e-18) {
        Vec cand(x.size());
        for (size_t j = 0; j < x.size(); ++j) cand[j] = x[j] + step * grad[j];
        cand = project_feasible(g, cand);
        double lin = 0.0;
        for (size_t j = 0; j < x.size(); ++j) lin += grad[j] * (cand[j] - x[j]);
        if (lin == 0.0) break;
        if (saa_value_and_gradient(g, batch, cand, nullptr) >=
            f0 + opts.sufficient_increase * lin) {
          x = std::move(cand);
          break;
        }
        step *= opts.step_shrink;
      }
      rep.inner_iterations++;
    }
    double exact = evaluate(g, x).defender_value;
    if (exact > best_exact) {
      best_exact = exact;
      rep.x = x;
    }
    rep.outer_iterations++;
  }
  rep.notes = "per-iteration resampling; best restart by exact objective";
  return rep;
}

}  // namespace interdict
