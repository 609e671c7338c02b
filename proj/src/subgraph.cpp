#include "interdict/subgraph.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace interdict {

ValidatedInstance build_subgraph_retaining(const ValidatedInstance& g, NodeId s) {
  const auto& inst = g.inst;
  if (s < 0 || s >= g.num_nodes() || !inst.nodes[s].critical())
    fail(Errc::InvalidParams, "retained node must be critical");

  InterdictionInstance sub;
  std::vector<int> remap(g.num_nodes(), -1);
  std::vector<NodeId> kept;
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (!inst.nodes[u].critical() || u == s) {
      remap[u] = static_cast<int>(kept.size());
      kept.push_back(u);
    }
  }
  sub.nodes.reserve(kept.size());
  for (NodeId u : kept) sub.nodes.push_back(inst.nodes[u]);
  for (const auto& [u, v] : inst.arcs)
    if (remap[u] >= 0 && remap[v] >= 0) sub.arcs.emplace_back(remap[u], remap[v]);
  sub.origin = remap[g.origin()];
  sub.destination = remap[g.destination()];
  sub.kinds = inst.kinds;
  sub.vars = inst.vars;
  sub.lx = inst.lx;
  sub.ux = inst.ux;
  sub.mu = inst.mu;

  ValidatedInstance out;
  try {
    out = validate(sub);
  } catch (const Error& e) {
    if (e.code() == Errc::DestinationUnreachable)
      fail(Errc::EmptySubgraph, "no origin->destination path survives removal");
    throw;
  }
  // Compose back-mappings so orig_ids refer to nodes of g.
  for (NodeId& id : out.orig_ids) id = kept[id];
  return out;
}

LayeredInstance build_layered(const ValidatedInstance& g, double penalty_c) {
  if (!(penalty_c >= 0)) fail(Errc::InvalidParams, "penalty must be nonnegative");
  const auto& inst = g.inst;

  LayeredInstance L;
  L.penalty = penalty_c;
  L.copies.assign(g.num_nodes(), {-1, -1, -1});

  InterdictionInstance lay;
  lay.kinds = inst.kinds;
  lay.vars = inst.vars;
  lay.lx = inst.lx;
  lay.ux = inst.ux;
  lay.mu = inst.mu;

  auto add_state = [&](NodeId u, int layer) {
    NodeId id = static_cast<NodeId>(lay.nodes.size());
    NodeRecord rec = inst.nodes[u];
    if (rec.critical() && layer == 2) rec.t_f -= penalty_c;
    lay.nodes.push_back(rec);
    L.back.emplace_back(u, layer);
    L.copies[u][layer] = id;
    return id;
  };

  // Origin is never critical, so the walk starts in layer 0. Iterating the
  // parent in topological order guarantees predecessors exist before use.
  add_state(g.origin(), 0);
  for (NodeId u : g.topo) {
    for (int layer = 0; layer < 3; ++layer) {
      NodeId from = L.copies[u][layer];
      if (from < 0) continue;
      for (NodeId v : g.succ[u]) {
        int nl = inst.nodes[v].critical() ? std::min(2, layer + 1) : layer;
        NodeId to = L.copies[v][nl];
        if (to < 0) to = add_state(v, nl);
        lay.arcs.emplace_back(from, to);
      }
    }
  }

  // Super-sink with zero utility keeps a single destination while the layer
  // reached at the parent destination still classifies the path.
  NodeId sink = static_cast<NodeId>(lay.nodes.size());
  lay.nodes.push_back(NodeRecord{0.0, std::nullopt});
  L.back.emplace_back(-1, -1);
  for (int layer = 0; layer < 3; ++layer) {
    NodeId d = L.copies[g.destination()][layer];
    if (d >= 0) lay.arcs.emplace_back(d, sink);
  }
  lay.origin = L.copies[g.origin()][0];
  lay.destination = sink;

  L.graph = validate(lay);
  // Recompute the mappings against the validated (possibly pruned) graph.
  std::vector<std::pair<NodeId, int>> back(L.graph.num_nodes());
  for (auto& c : L.copies) c = {-1, -1, -1};
  for (int id = 0; id < L.graph.num_nodes(); ++id) {
    auto bk = L.back[L.graph.orig_ids[id]];
    back[id] = bk;
    if (bk.first >= 0) L.copies[bk.first][bk.second] = id;
  }
  L.back = std::move(back);
  L.sink = L.graph.destination();
  return L;
}

LayeredMasses layered_masses(const LayeredInstance& L, const Vec& x) {
  const ValidatedInstance& g = L.graph;
  const auto& inst = g.inst;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  FlowEvaluation ev = evaluate(g, x);
  const auto& aw = ev.weights.arc_w;

  // One class-restricted suffix sweep per terminal layer: only the matching
  // destination copy's arc into the sink carries mass.
  std::array<Vec, 3> zc;
  for (int cls = 0; cls < 3; ++cls) {
    Vec z(g.num_nodes(), 0.0);
    z[g.destination()] = 0.0;
    for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
      NodeId s = *it;
      if (s == g.destination()) continue;
      double acc = 0.0;
      for (size_t i = 0; i < g.succ[s].size(); ++i) {
        NodeId t = g.succ[s][i];
        double w = aw[g.succ_arcs[s][i]];
        if (t == g.destination())
          acc += (L.back[s].second == cls) ? w : 0.0;
        else
          acc += w * z[t];
      }
      z[s] = acc;
    }
    zc[cls] = std::move(z);
  }

  const double phi_o = ev.log_scale;

  LayeredMasses out;
  out.log_total = ev.log_partition_over_mu;
  for (int cls = 0; cls < 3; ++cls) {
    double v = zc[cls][g.origin()];
    out.log_by_class[cls] = v > 0.0 ? std::log(v) + phi_o : neg_inf;
  }

  const int nv = inst.num_vars();
  out.log_through.assign(nv, neg_inf);
  out.log_delta.assign(nv, neg_inf);
  out.log_delta_plus.assign(nv, neg_inf);

  auto log_add = [&](double& acc, double term) {
    if (term == neg_inf) return;
    if (acc == neg_inf) {
      acc = term;
      return;
    }
    double hi = std::max(acc, term), lo = std::min(acc, term);
    acc = hi + std::log1p(std::exp(lo - hi));
  };

  for (int id = 0; id < g.num_nodes(); ++id) {
    auto [parent, layer] = L.back[id];
    if (parent < 0 || !inst.nodes[id].critical()) continue;
    VarId j = *inst.nodes[id].var;
    // Potentials cancel in a_hat * (suffix); both factors share the scaled
    // frame, so log(a_hat) + log(zc or z_hat) + phi_o/mu is the absolute log.
    double la = ev.a_hat[id] > 0.0 ? std::log(ev.a_hat[id]) : neg_inf;
    auto scaled_suffix_log = [&](double zval) {
      return zval > 0.0 ? std::log(zval) : neg_inf;
    };
    if (la == neg_inf) continue;
    double lz_all = scaled_suffix_log(ev.z_hat[id]);
    if (lz_all != neg_inf) log_add(out.log_through[j], la + lz_all + phi_o);
    if (layer == 1) {
      double lz1 = scaled_suffix_log(zc[1][id]);
      double lz2 = scaled_suffix_log(zc[2][id]);
      if (lz1 != neg_inf) log_add(out.log_delta[j], la + lz1 + phi_o);
      if (lz2 != neg_inf) log_add(out.log_delta_plus[j], la + lz2 + phi_o);
    } else {  // layer == 2: a second-or-later critical visit is always Delta+
      if (lz_all != neg_inf) log_add(out.log_delta_plus[j], la + lz_all + phi_o);
    }
  }
  return out;
}

}  // namespace interdict
