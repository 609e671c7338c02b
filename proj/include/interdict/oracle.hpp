#pragma once

#include <functional>

#include "interdict/flow.hpp"
#include "interdict/instance.hpp"

namespace interdict {
namespace oracle {

/// All simple origin->destination paths, DFS in topological successor order.
struct PathSet {
  std::vector<std::vector<NodeId>> paths;

  /// U(tau; x) = sum of node utilities along the path.
  static double path_utility(const InterdictionInstance& inst, const std::vector<NodeId>& tau,
                             const Vec& x);
};

PathSet enumerate_paths(const ValidatedInstance& g, std::size_t cap = 100000);

/// Ground truth by direct summation over an explicit path list.
struct OracleEvaluation {
  Vec path_utility;       // U(tau; x) per path
  Vec path_prob;          // P(tau), sums to 1 exactly
  Vec crossing;           // P^f per node
  double defender_value;  // F^l
  double adversary_value; // E^f
  double log_partition;   // Gamma
  double best_utility;    // T(x) = max U
  double gap_alpha;       // best minus second-best distinct utility; +inf if no second class
  int best_count;         // C(x) = |Omega*|
  double max_abs_utility; // L*(x) = max |U|
  double restricted_value;      // F~(x); NaN when undefined
  bool restricted_defined;
  Vec log_mass_delta;           // per coverage variable
  Vec log_mass_delta_plus;
  Vec log_through;
  double log_union_delta;
  double log_union_delta_plus;
  double log_total;
  double beta1;  // max_s Delta+/Delta mass ratio at this x (0/0 -> 0, pos/0 -> +inf)
  double beta2;  // union ratio
  std::vector<std::vector<int>> delta_paths;       // per variable, path indices
  std::vector<std::vector<int>> delta_plus_paths;
};

OracleEvaluation brute_evaluate(const ValidatedInstance& g, const Vec& x, const PathSet& ps);

/// Explicit path-sum value and gradient of g(x, delta) (unscaled true units,
/// stabilized by a common shift); the independent route for the adjoint check.
GradientBundle brute_g_gradient(const ValidatedInstance& g, const Vec& x, double delta,
                                const PathSet& ps);

/// Literal dense-matrix route: solve (I - M) H = B, differentiate through the
/// Jacobians J^{M,j} and assemble the gradient from the matrix identity.
GradientBundle matrix_g_gradient(const ValidatedInstance& g, const Vec& x, double delta);

/// Central finite differences, falling back to one-sided at the box boundary.
/// Errors: StepTooLarge when a coordinate cannot move by h either way.
Vec finite_diff_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                         double lo, double hi);

struct GridResult {
  Vec x;
  double value;
};

/// Exhaustive grid over [lx,ux]^d intersected with the budget constraints.
/// maximize=false searches for the minimum. Errors: TooManyCriticalNodes.
GridResult grid_search(const ValidatedInstance& g, int resolution,
                       const std::function<double(const Vec&)>& objective, bool maximize);

/// Same but with two zoom-in refinement rounds around the incumbent.
GridResult grid_search_refined(const ValidatedInstance& g, int resolution,
                               const std::function<double(const Vec&)>& objective, bool maximize,
                               int rounds = 2);

}  // namespace oracle
}  // namespace interdict
