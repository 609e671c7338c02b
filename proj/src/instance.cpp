#include "interdict/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "interdict/rng.hpp"

namespace interdict {

Vec ValidatedInstance::kind_sums(const Vec& x) const {
  Vec sums(inst.kinds.size(), 0.0);
  for (int j = 0; j < num_vars(); ++j) sums[inst.vars[j].kind] += x[j];
  return sums;
}

bool ValidatedInstance::feasible(const Vec& x, double tol) const {
  if (static_cast<int>(x.size()) != num_vars()) return false;
  for (double v : x) {
    if (!std::isfinite(v) || v < inst.lx - tol || v > inst.ux + tol) return false;
  }
  Vec sums = kind_sums(x);
  for (size_t k = 0; k < sums.size(); ++k) {
    if (sums[k] > inst.kinds[k].budget + tol) return false;
  }
  return true;
}

namespace {

std::vector<std::vector<NodeId>> successor_lists(const InterdictionInstance& inst) {
  std::vector<std::vector<NodeId>> succ(inst.nodes.size());
  for (const auto& [u, v] : inst.arcs) succ[u].push_back(v);
  return succ;
}

// Kahn's algorithm; throws on a cycle among the given nodes.
std::vector<NodeId> topo_sort(int n, const std::vector<std::vector<NodeId>>& succ) {
  std::vector<int> indeg(n, 0);
  for (int u = 0; u < n; ++u)
    for (NodeId v : succ[u]) indeg[v]++;
  // Min-heap keeps the order deterministic and stable across runs.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int u = 0; u < n; ++u)
    if (indeg[u] == 0) ready.push(u);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId v : succ[u])
      if (--indeg[v] == 0) ready.push(v);
  }
  if (static_cast<int>(order.size()) != n) fail(Errc::CycleDetected, "arc relation contains a cycle");
  return order;
}

std::vector<char> reachable_from(int n, NodeId src, const std::vector<std::vector<NodeId>>& adj) {
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{src};
  seen[src] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  return seen;
}

}  // namespace

ValidatedInstance validate(const InterdictionInstance& raw) {
  const int n = raw.num_nodes();
  if (n < 2) fail(Errc::BadBounds, "instance needs at least origin and destination");
  if (raw.origin < 0 || raw.origin >= n || raw.destination < 0 || raw.destination >= n ||
      raw.origin == raw.destination)
    fail(Errc::BadBounds, "origin/destination out of range");
  if (!(raw.mu > 0)) fail(Errc::BadBounds, "mu must be strictly positive");
  if (!(raw.lx <= raw.ux) || raw.lx < 0) fail(Errc::BadBounds, "coverage bounds require 0 <= lx <= ux");
  for (const auto& k : raw.kinds)
    if (!(k.budget >= 0)) fail(Errc::BadBounds, "budgets must be nonnegative");
  for (const auto& v : raw.vars) {
    if (!(v.w_f < 0)) fail(Errc::BadBounds, "adversary slope w_f must be strictly negative");
    if (!(v.w_l > 0)) fail(Errc::BadBounds, "defender slope w_l must be strictly positive");
    if (v.kind < 0 || v.kind >= static_cast<int>(raw.kinds.size()))
      fail(Errc::BadBounds, "variable references unknown kind");
  }
  for (const auto& nd : raw.nodes) {
    if (nd.var && (*nd.var < 0 || *nd.var >= raw.num_vars()))
      fail(Errc::BadBounds, "node references unknown coverage variable");
  }
  if (raw.nodes[raw.origin].critical() || raw.nodes[raw.destination].critical())
    fail(Errc::CriticalEndpoint, "origin and destination must not be critical");
  for (const auto& [u, v] : raw.arcs) {
    if (u < 0 || u >= n || v < 0 || v >= n) fail(Errc::BadBounds, "arc endpoint out of range");
    if (u == v) fail(Errc::CycleDetected, "self-loop");
  }

  auto succ_raw = successor_lists(raw);
  topo_sort(n, succ_raw);  // cycle check on the unpruned graph

  std::vector<std::vector<NodeId>> pred_raw(n);
  for (const auto& [u, v] : raw.arcs) pred_raw[v].push_back(u);

  auto fwd = reachable_from(n, raw.origin, succ_raw);
  auto bwd = reachable_from(n, raw.destination, pred_raw);
  if (!fwd[raw.destination]) fail(Errc::DestinationUnreachable, "no origin->destination path");

  ValidatedInstance out;
  std::vector<int> remap(n, -1);
  for (int u = 0; u < n; ++u) {
    if (fwd[u] && bwd[u]) {
      remap[u] = static_cast<int>(out.orig_ids.size());
      out.orig_ids.push_back(u);
    } else {
      out.log.push_back("pruned node " + std::to_string(u) + " (not on any origin->destination path)");
    }
  }

  InterdictionInstance& inst = out.inst;
  inst.kinds = raw.kinds;
  inst.lx = raw.lx;
  inst.ux = raw.ux;
  inst.mu = raw.mu;
  inst.origin = remap[raw.origin];
  inst.destination = remap[raw.destination];
  inst.nodes.reserve(out.orig_ids.size());
  for (NodeId old : out.orig_ids) inst.nodes.push_back(raw.nodes[old]);
  for (const auto& [u, v] : raw.arcs) {
    if (remap[u] >= 0 && remap[v] >= 0) inst.arcs.emplace_back(remap[u], remap[v]);
  }
  std::sort(inst.arcs.begin(), inst.arcs.end());
  auto dup = std::unique(inst.arcs.begin(), inst.arcs.end());
  if (dup != inst.arcs.end()) {
    out.log.push_back("collapsed duplicate arcs");
    inst.arcs.erase(dup, inst.arcs.end());
  }

  // Drop variables no surviving node references; keep var order stable.
  std::vector<char> var_used(raw.num_vars(), 0);
  for (const auto& nd : inst.nodes)
    if (nd.var) var_used[*nd.var] = 1;
  std::vector<int> var_remap(raw.num_vars(), -1);
  for (int j = 0; j < raw.num_vars(); ++j) {
    if (var_used[j]) {
      var_remap[j] = static_cast<int>(inst.vars.size());
      inst.vars.push_back(raw.vars[j]);
    }
  }
  for (auto& nd : inst.nodes)
    if (nd.var) nd.var = var_remap[*nd.var];

  if (inst.nodes[inst.destination].t_f != 0.0) {
    out.log.push_back("destination base utility normalized to 0");
    inst.nodes[inst.destination].t_f = 0.0;
  }

  const int m = inst.num_nodes();
  out.succ.assign(m, {});
  out.pred.assign(m, {});
  out.succ_arcs.assign(m, {});
  out.pred_arcs.assign(m, {});
  for (size_t a = 0; a < inst.arcs.size(); ++a) {
    const auto& [u, v] = inst.arcs[a];
    out.succ[u].push_back(v);
    out.pred[v].push_back(u);
    out.succ_arcs[u].push_back(static_cast<int>(a));
    out.pred_arcs[v].push_back(static_cast<int>(a));
  }
  out.topo = topo_sort(m, out.succ);
  out.topo_pos.assign(m, 0);
  for (int i = 0; i < m; ++i) out.topo_pos[out.topo[i]] = i;
  for (int u = 0; u < m; ++u)
    if (inst.nodes[u].critical()) out.critical_nodes.push_back(u);

  // Max-plus suffix potentials at x = lx*e (per-node maximum of v since w_f < 0).
  out.potential.assign(m, 0.0);
  for (auto it = out.topo.rbegin(); it != out.topo.rend(); ++it) {
    NodeId s = *it;
    if (s == inst.destination) {
      out.potential[s] = 0.0;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (NodeId t : out.succ[s]) best = std::max(best, out.potential[t]);
    out.potential[s] = inst.node_utility(s, Vec(inst.num_vars(), inst.lx)) + best;
  }
  return out;
}

ValidatedInstance with_mu(const ValidatedInstance& g, double mu) {
  if (!(mu > 0)) fail(Errc::BadBounds, "mu must be strictly positive");
  ValidatedInstance out = g;
  out.inst.mu = mu;
  return out;
}

ValidatedInstance generate_random(int n, double p, double critical_frac, std::uint64_t seed,
                                  const GeneratorOptions& opts) {
  if (n < 3 || !(p > 0) || p > 1 || critical_frac < 0 || critical_frac > 1)
    fail(Errc::InvalidParams, "need n >= 3, 0 < p <= 1, 0 <= critical_frac <= 1");
  if (!(opts.mu > 0) || !(opts.lx <= opts.ux) || opts.lx < 0)
    fail(Errc::InvalidParams, "bad mu or coverage bounds");

  Rng rng(seed);
  InterdictionInstance inst;
  inst.nodes.resize(n);
  inst.origin = 0;
  inst.destination = n - 1;
  inst.lx = opts.lx;
  inst.ux = opts.ux;
  inst.mu = opts.mu;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < p) inst.arcs.emplace_back(i, j);

  // Connectivity repair: add the ascending chain when n-1 is unreachable from 0.
  {
    std::vector<std::vector<NodeId>> succ(n);
    for (const auto& [u, v] : inst.arcs) succ[u].push_back(v);
    auto seen = reachable_from(n, 0, succ);
    if (!seen[n - 1]) {
      for (int i = 0; i + 1 < n; ++i) inst.arcs.emplace_back(i, i + 1);
      std::sort(inst.arcs.begin(), inst.arcs.end());
      inst.arcs.erase(std::unique(inst.arcs.begin(), inst.arcs.end()), inst.arcs.end());
    }
  }

  // Adversary weights (w_f, t_f) for every node; destination stays 0 by
  // convention and w_f is used only where the node ends up critical.
  std::vector<double> node_wf(n);
  for (int i = 0; i < n; ++i) {
    double wf = rng.uniform(opts.ranges.adv_lo, opts.ranges.adv_hi);
    // w_f must be strictly negative; nudge the (measure-zero) boundary draw.
    node_wf[i] = wf < 0 ? wf : -1e-9;
    inst.nodes[i].t_f = rng.uniform(opts.ranges.adv_lo, opts.ranges.adv_hi);
  }
  inst.nodes[n - 1].t_f = 0.0;

  // Critical set: floor(critical_frac*n) nodes from {1..n-2}, partial Fisher-Yates.
  int want = static_cast<int>(std::floor(critical_frac * n));
  want = std::min(want, n - 2);
  std::vector<int> pool(n - 2);
  for (int i = 0; i < n - 2; ++i) pool[i] = i + 1;
  for (int i = 0; i < want; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 2 - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> chosen(pool.begin(), pool.begin() + want);
  std::sort(chosen.begin(), chosen.end());

  inst.kinds.push_back({opts.budget >= 0 ? opts.budget : want / 4.0});
  for (int s : chosen) {
    CoverageVar v;
    v.node = s;
    v.kind = 0;
    v.w_f = node_wf[s];
    v.w_l = rng.uniform(opts.ranges.def_lo, opts.ranges.def_hi);
    v.t_l = rng.uniform(opts.ranges.def_lo, opts.ranges.def_hi);
    inst.nodes[s].var = static_cast<VarId>(inst.vars.size());
    inst.vars.push_back(v);
  }

  return validate(inst);
}

}  // namespace interdict
