#pragma once

#include <vector>

#include "interdict/instance.hpp"

namespace interdict {

/// Per-evaluation arc weights exp((v(u;x) + phi_v - phi_u)/mu), indexed like
/// the instance arc list. The potentials telescope along arcs, so every full
/// origin->destination path mass carries one common factor exp(-phi_{s_o}/mu);
/// log_scale records it and all scaled weights stay <= 1.
struct WeightSystem {
  std::vector<double> node_utility;  // v(s; x), true units
  std::vector<double> arc_w;         // scaled, one per arc
  double log_scale = 0.0;            // phi_{s_o}/mu

  static WeightSystem build(const ValidatedInstance& g, const Vec& x);
};

/// Every DP-derived quantity at a fixed coverage x. Masses are kept both in
/// the common scaled linear units (hat values) and as absolute natural logs.
struct FlowEvaluation {
  WeightSystem weights;
  Vec z_hat;           // scaled suffix partition values
  Vec a_hat;           // scaled prefix values Y^s_{s_o} (exclude own v)
  Vec log_z;           // log Z_s, absolute
  Vec log_a;           // log Y^s_{s_o}, absolute
  Vec crossing;        // P^f per node (0 for non-critical)
  double defender_value = 0.0;         // F^l(x)
  double adversary_value = 0.0;        // E^f(x)
  double log_partition = 0.0;          // Gamma(x) = mu * log Z_{s_o}
  double log_partition_over_mu = 0.0;  // log Z_{s_o}
  double log_scale = 0.0;

  /// Successor-choice probabilities at node s (the adversary policy).
  Vec policy(const ValidatedInstance& g, NodeId s) const;
};

/// Full DP evaluation: Z by reverse sweep, prefix values by forward sweep,
/// crossing probabilities, F^l, E^f (moment-augmented sweep) and Gamma.
/// Errors: InfeasibleStrategy, NumericalUnderflow.
FlowEvaluation evaluate(const ValidatedInstance& g, const Vec& x);

/// Same sweeps over caller-supplied weights. A caller may rescale every full
/// path mass by one common factor (multiply the origin's outgoing arc weights,
/// bump log_scale to match); scale-corrected outputs are unaffected.
FlowEvaluation evaluate_with(const ValidatedInstance& g, const Vec& x, const WeightSystem& w);

struct GradientBundle {
  double value = 0.0;      // scaled units unless noted
  Vec grad;                // d/dx_j, same units, indexed by coverage variable
  double log_scale = 0.0;  // value * exp(log_scale) is the unscaled quantity
};

/// Dinkelbach objective g(x, delta) = sum_s r^l Y^s_{s_o} Z_s - delta Z_{s_o}
/// and its gradient by adjoint sweeps over the same DAG recursions.
GradientBundle g_value_and_gradient(const ValidatedInstance& g, const Vec& x, double delta);

/// Same, reusing an existing evaluation at x.
GradientBundle g_value_and_gradient(const ValidatedInstance& g, const FlowEvaluation& ev,
                                    double delta);

/// Gamma(x) = mu log sum_tau exp(U/mu) (true units) with dGamma/dx_s = w^f_s P^f_s.
GradientBundle gamma_and_gradient(const ValidatedInstance& g, const Vec& x);

}  // namespace interdict
