#pragma once

#include <cmath>
#include <vector>

#include "interdict/instance.hpp"
#include "interdict/oracle.hpp"
#include "interdict/rng.hpp"

namespace testsupport {

using namespace interdict;

inline InterdictionInstance diamond_raw() {
  // 0 -> {1,2} -> 3, critical {1,2}, mu = 1, v(s;x) = -x_s, r(s,x) = x_s.
  InterdictionInstance inst;
  inst.nodes.resize(4);
  inst.arcs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  inst.origin = 0;
  inst.destination = 3;
  inst.kinds = {{1.0}};
  inst.lx = 0.0;
  inst.ux = 1.0;
  inst.mu = 1.0;
  for (NodeId s : {1, 2}) {
    CoverageVar v;
    v.node = s;
    v.kind = 0;
    v.w_f = -1.0;
    v.w_l = 1.0;
    v.t_l = 0.0;
    inst.nodes[s].var = static_cast<VarId>(inst.vars.size());
    inst.vars.push_back(v);
  }
  return inst;
}

inline ValidatedInstance diamond() { return validate(diamond_raw()); }

inline ValidatedInstance chain(int n, std::vector<NodeId> critical, double budget = 1.0) {
  InterdictionInstance inst;
  inst.nodes.resize(n);
  for (int i = 0; i + 1 < n; ++i) inst.arcs.emplace_back(i, i + 1);
  inst.origin = 0;
  inst.destination = n - 1;
  inst.kinds = {{budget}};
  inst.lx = 0.0;
  inst.ux = 1.0;
  inst.mu = 1.0;
  for (NodeId s : critical) {
    CoverageVar v;
    v.node = s;
    v.kind = 0;
    v.w_f = -1.0;
    v.w_l = 1.0;
    v.t_l = 0.0;
    inst.nodes[s].var = static_cast<VarId>(inst.vars.size());
    inst.vars.push_back(v);
  }
  return validate(inst);
}

inline ValidatedInstance chain3() { return chain(3, {1}); }
inline ValidatedInstance chain4() { return chain(4, {1, 2}); }

/// Complete DAG on n nodes (all forward arcs), no critical nodes unless given.
inline ValidatedInstance complete_dag(int n, std::vector<NodeId> critical = {}) {
  InterdictionInstance inst;
  inst.nodes.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) inst.arcs.emplace_back(i, j);
  inst.origin = 0;
  inst.destination = n - 1;
  inst.kinds = {{1.0}};
  inst.lx = 0.0;
  inst.ux = 1.0;
  inst.mu = 1.0;
  for (NodeId s : critical) {
    CoverageVar v;
    v.node = s;
    v.kind = 0;
    v.w_f = -1.0;
    v.w_l = 1.0;
    v.t_l = 0.0;
    inst.nodes[s].var = static_cast<VarId>(inst.vars.size());
    inst.vars.push_back(v);
  }
  return validate(inst);
}

/// Deterministic list of oracle-enumerable random instances: seeds are probed
/// in order and instances kept when the path count stays under the cap and
/// the extra filter (if any) accepts. critical_frac cycles around frac_mid.
template <typename Filter>
inline std::vector<ValidatedInstance> filtered_instances(int count, int min_nodes, int max_nodes,
                                                         std::size_t max_paths, double mu,
                                                         std::uint64_t seed0, double frac_mid,
                                                         Filter&& keep) {
  std::vector<ValidatedInstance> out;
  std::uint64_t seed = seed0;
  const std::uint64_t seed_limit = seed0 + 20000;
  while (static_cast<int>(out.size()) < count && seed < seed_limit) {
    int n = min_nodes + static_cast<int>(seed % (max_nodes - min_nodes + 1));
    double p = 0.3 + 0.05 * static_cast<double>(seed % 11);
    double frac = frac_mid - 0.15 + 0.05 * static_cast<double>(seed % 8);
    GeneratorOptions opts;
    opts.mu = mu;
    ValidatedInstance g = generate_random(n, p, frac, seed, opts);
    ++seed;
    if (g.num_vars() == 0) continue;
    try {
      oracle::enumerate_paths(g, max_paths);
    } catch (const Error&) {
      continue;
    }
    if (!keep(g)) continue;
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<ValidatedInstance> enumerable_instances(int count, int min_nodes, int max_nodes,
                                                           std::size_t max_paths, double mu = 1.0,
                                                           std::uint64_t seed0 = 1) {
  return filtered_instances(count, min_nodes, max_nodes, max_paths, mu, seed0, 0.4,
                            [](const ValidatedInstance&) { return true; });
}

/// Random point with margin from the box faces and every budget face, so
/// single-coordinate finite-difference probes with h << margin stay feasible.
inline Vec interior_point(const ValidatedInstance& g, Rng& rng, double margin = 1e-3) {
  const auto& inst = g.inst;
  Vec x(inst.num_vars());
  for (double& v : x) v = rng.uniform(inst.lx + margin, inst.ux - margin);
  for (size_t k = 0; k < inst.kinds.size(); ++k) {
    double cnt = 0, sum = 0;
    for (int j = 0; j < inst.num_vars(); ++j) {
      if (inst.vars[j].kind == static_cast<KindId>(k)) {
        ++cnt;
        sum += x[j];
      }
    }
    if (cnt == 0) continue;
    double lo_sum = cnt * inst.lx;
    double cap = inst.kinds[k].budget - 2 * margin * cnt;
    if (sum > cap && sum > lo_sum && cap > lo_sum) {
      double ratio = (cap - lo_sum) / (sum - lo_sum);
      for (int j = 0; j < inst.num_vars(); ++j) {
        if (inst.vars[j].kind != static_cast<KindId>(k)) continue;
        x[j] = inst.lx + (x[j] - inst.lx) * ratio;
        x[j] = std::max(x[j], inst.lx + margin);
      }
    }
  }
  return x;
}

/// True when no origin->destination path avoids the critical set (the
/// implicit precondition of the restricted-problem sandwich inequalities).
inline bool every_path_crosses_critical(const ValidatedInstance& g) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeId> stack{g.origin()};
  seen[g.origin()] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    if (u == g.destination()) return false;
    for (NodeId v : g.succ[u]) {
      if (!seen[v] && !g.inst.nodes[v].critical()) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return true;
}

inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)});
}

/// |a-b| within relative 1e-9 of the larger magnitude (log-domain helper for
/// masses: compares exp(la), exp(lb) in relative terms without overflow).
inline bool log_close(double la, double lb, double rel = 1e-9) {
  if (std::isinf(la) && std::isinf(lb) && la < 0 && lb < 0) return true;
  if (std::isinf(la) || std::isinf(lb)) return false;
  return std::fabs(la - lb) <= rel;  // |log a - log b| <= rel  =>  |a/b - 1| ~ rel
}

}  // namespace testsupport
