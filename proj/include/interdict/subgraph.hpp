#pragma once

#include <array>

#include "interdict/flow.hpp"
#include "interdict/instance.hpp"

namespace interdict {

/// G(s): all critical nodes except s removed (with incident arcs), then pruned
/// to the origin->destination core. Paths of G(s) through s are exactly
/// Delta(s). Throws EmptySubgraph when no origin->destination path survives.
/// orig_ids of the result refer to node ids of `g`.
ValidatedInstance build_subgraph_retaining(const ValidatedInstance& g, NodeId s);

/// Product of the graph with a saturating counter of critical nodes visited so
/// far. Copies of a critical node share its coverage variable; second-and-later
/// critical visits (layer-2 copies) carry penalty c on the adversary intercept.
/// A zero-utility super-sink collects the per-layer destination copies.
struct LayeredInstance {
  ValidatedInstance graph;
  std::vector<std::pair<NodeId, int>> back;     // layered node -> (parent node, layer)
  std::vector<std::array<NodeId, 3>> copies;    // parent node -> layered id per layer, -1 absent
  NodeId sink = -1;                             // layered super-sink (= graph destination)
  double penalty = 0.0;
};

LayeredInstance build_layered(const ValidatedInstance& g, double penalty_c);

/// Path-family masses classified by the layer reached at the destination,
/// all as absolute natural logs (-inf for empty families).
struct LayeredMasses {
  double log_total;                    // all paths
  std::array<double, 3> log_by_class;  // 0 / exactly 1 / >= 2 critical nodes
  // Per parent critical node (indexed by coverage variable of the parent):
  Vec log_through;     // paths through s
  Vec log_delta;       // Delta(s): through s and no other critical node
  Vec log_delta_plus;  // Delta+(s): through s and at least one more
};

/// One layered DP per terminal class; exact at the given x.
LayeredMasses layered_masses(const LayeredInstance& L, const Vec& x);

}  // namespace interdict
