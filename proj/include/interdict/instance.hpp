#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "interdict/errors.hpp"

namespace interdict {

using NodeId = int;
using VarId = int;
using KindId = int;
using Vec = std::vector<double>;

/// One defender coverage variable. Canonical instances have exactly one per
/// critical node; derived graphs (layered expansions) may share a variable
/// across several node copies.
struct CoverageVar {
  NodeId node = -1;   // critical node this variable covers (original ids)
  KindId kind = 0;
  double w_f = -1.0;  // adversary utility slope, strictly negative
  double w_l = 1.0;   // defender reward slope, strictly positive
  double t_l = 0.0;   // defender reward intercept
};

struct NodeRecord {
  double t_f = 0.0;            // adversary utility intercept
  std::optional<VarId> var;    // set iff the node is critical
  bool critical() const { return var.has_value(); }
};

struct KindRecord {
  double budget = 0.0;
};

struct InterdictionInstance {
  std::vector<NodeRecord> nodes;
  std::vector<std::pair<NodeId, NodeId>> arcs;
  NodeId origin = 0;
  NodeId destination = 0;
  std::vector<KindRecord> kinds;
  std::vector<CoverageVar> vars;
  double lx = 0.0;
  double ux = 1.0;
  double mu = 1.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_vars() const { return static_cast<int>(vars.size()); }

  /// Adversary utility v(s; x) of crossing node s.
  double node_utility(NodeId s, const Vec& x) const {
    const NodeRecord& n = nodes[s];
    if (!n.var) return n.t_f;
    return n.t_f + vars[*n.var].w_f * x[*n.var];
  }

  /// Defender reward r^l for variable j at coverage level x_j.
  double reward(VarId j, double xj) const { return vars[j].w_l * xj + vars[j].t_l; }
};

/// Validated immutable game instance: pruned to the origin->destination core,
/// topologically ordered, with adjacency in both directions and the max-plus
/// suffix potentials used for overflow-safe scaling.
struct ValidatedInstance {
  InterdictionInstance inst;
  std::vector<NodeId> topo;                 // topological order, origin-side first
  std::vector<int> topo_pos;                // node -> position in topo
  std::vector<std::vector<NodeId>> succ;    // N(s)
  std::vector<std::vector<NodeId>> pred;
  std::vector<std::vector<int>> succ_arcs;  // arc index of (s, succ[s][i])
  std::vector<std::vector<int>> pred_arcs;  // arc index of (pred[s][i], s)
  std::vector<NodeId> critical_nodes;       // node ids, ascending
  std::vector<NodeId> orig_ids;             // node -> id in the raw input instance
  std::vector<double> potential;            // phi_s: max-plus suffix bound at x = lx*e
  std::vector<std::string> log;             // validation notes (pruned nodes, fixes)

  int num_nodes() const { return inst.num_nodes(); }
  int num_vars() const { return inst.num_vars(); }
  NodeId origin() const { return inst.origin; }
  NodeId destination() const { return inst.destination; }

  /// Budget/box feasibility check with absolute tolerance.
  bool feasible(const Vec& x, double tol = 1e-7) const;

  /// Vector of per-kind coverage sums.
  Vec kind_sums(const Vec& x) const;
};

/// Checks invariants, prunes nodes off every origin->destination path,
/// reindexes densely and computes topological order and potentials.
/// Errors: CycleDetected, DestinationUnreachable, CriticalEndpoint, BadBounds.
ValidatedInstance validate(const InterdictionInstance& raw);

struct WeightRanges {
  // Defender (w_l, t_l) and adversary (w_f, t_f) are drawn uniformly from
  // these intervals; adversary draws are for the slope/intercept magnitudes
  // before sign conventions are applied.
  double def_lo = 0.0, def_hi = 1.0;
  double adv_lo = -1.0, adv_hi = 0.0;
};

struct GeneratorOptions {
  double mu = 2.0;
  double lx = 0.0;
  double ux = 1.0;
  // Budget for the single resource kind; <0 means the default |L|/4.
  double budget = -1.0;
  WeightRanges ranges;
};

/// Random cycle-free instance: arc i->j (i<j) with probability p, origin 0,
/// destination n-1, chain arcs added if the destination is unreachable,
/// floor(critical_frac*n) critical nodes among {1..n-2}, single resource kind.
/// Identical seeds give identical instances.
ValidatedInstance generate_random(int n, double p, double critical_frac, std::uint64_t seed,
                                  const GeneratorOptions& opts = {});

/// Copy with a different rationality parameter. The topological order and the
/// potentials are utility-domain quantities and carry over unchanged.
ValidatedInstance with_mu(const ValidatedInstance& g, double mu);

}  // namespace interdict
