#pragma once

#include <memory>

#include "interdict/subgraph.hpp"

namespace interdict {

/// Restricted-problem quantities at a fixed x. Masses are absolute natural
/// logs (-inf for empty path families).
struct RestrictedEvaluation {
  Vec log_mass_delta;       // per coverage variable, Delta(s) mass
  Vec log_mass_delta_plus;  // Delta+(s) mass
  Vec log_through;          // all paths through s
  double log_union_delta;       // paths crossing exactly one critical node
  double log_union_delta_plus;  // paths crossing two or more
  double restricted_value;      // F~(x)
  bool restricted_defined;      // sum_s Delta(s) mass > 0
};

/// Precomputed per-instance restricted machinery. Delta(s) decomposes per
/// sub-graph G(s) as H(s) * exp(v(s,x_s)/mu) where H(s) sums exp(V^s(tau)/mu)
/// over Delta(s) and is x-independent, so one DP per critical node up front
/// makes every later evaluation O(|L|).
class RestrictedContext {
 public:
  explicit RestrictedContext(const ValidatedInstance& g);

  const ValidatedInstance& graph() const { return *g_; }
  const LayeredInstance& layered_c0() const { return layered_; }

  /// log H(s) per coverage variable (-inf when Delta(s) is empty).
  const Vec& log_h() const { return log_h_; }

  /// True if some Delta(s) is nonempty.
  bool restricted_possible() const { return any_delta_; }

  /// Delta masses, F~ and the Delta+ side (one layered DP for the + side).
  RestrictedEvaluation evaluate(const Vec& x) const;

  /// g~(x, delta) = sum_s (r^l(s, x_s) - delta) * Delta(s) mass, in common
  /// scaled units (log_scale attached), with the per-sub-graph gradient.
  GradientBundle g_restricted(const Vec& x, double delta) const;

  /// F~(x) alone (no layered sweep).
  double restricted_value(const Vec& x) const;

 private:
  const ValidatedInstance* g_;
  LayeredInstance layered_;
  Vec log_h_;
  double common_log_scale_;  // max_s (log H(s) + max_x v(s,x_s)/mu)
  bool any_delta_ = false;
};

/// One-shot convenience wrappers matching the per-operation contracts.
RestrictedEvaluation evaluate_restricted(const ValidatedInstance& g, const Vec& x);
GradientBundle g_restricted_value_and_gradient(const ValidatedInstance& g, const Vec& x,
                                               double delta);

}  // namespace interdict
