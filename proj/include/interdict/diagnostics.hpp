#pragma once

#include <optional>
#include <string>

#include "interdict/oracle.hpp"
#include "interdict/restricted.hpp"
#include "interdict/solve.hpp"

namespace interdict {
namespace diagnostics {

/// kappa = sum_s max_{x_s in [lx,ux]} |r^l(s, x_s)|, exact for linear rewards.
double kappa(const ValidatedInstance& g);

/// Deterministic strategy sample: corners lx*e / ux*e plus a low-discrepancy
/// (Kronecker) sequence in the box, all projected to the budget.
std::vector<Vec> strategy_samples(const ValidatedInstance& g, int count, std::uint64_t seed = 0);

struct BetaEstimate {
  double beta1 = 0.0;
  double beta2 = 0.0;
  int samples = 0;
  bool exact_grid = false;  // |L| <= 3 dense grid included
  bool infinite = false;    // some Delta(s) empty while Delta+(s) is not
};

/// Sampled (plus exact-grid when |L| <= 3) maxima of the per-x ratios.
BetaEstimate estimate_beta(const ValidatedInstance& g, int samples = 64, std::uint64_t seed = 0);

struct EpsPrime {
  double eps1 = 0.0;  // max over x, s of penalized Delta+(s) / original through-s mass
  double eps2 = 0.0;  // max over x of penalized union Delta+ / original all-paths mass
};

/// Measured left-hand sides of the modification conditions at sampled x:
/// numerators on the modified (penalized) network, denominators on the
/// original one, so raising the penalty drives both ratios to zero.
EpsPrime measure_eps_prime(const ValidatedInstance& g, const LayeredInstance& layered,
                           const std::vector<Vec>& x_samples);

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool applicable = true;
  std::string note;
};

struct DiagnosticsReport {
  double kappa = 0.0;
  BetaEstimate beta;
  std::optional<EpsPrime> eps_prime;
  double penalty_c = 0.0;
  std::vector<BoundCheck> checks;
  std::string reference;  // provenance of the max_x F^l stand-in

  bool all_hold() const {
    for (const auto& c : checks)
      if (c.applicable && !c.holds) return false;
    return true;
  }
};

/// Lower-bound certificates for a restricted-problem solution (exact-
/// optimum, multiplicative-error and additive-error forms).
/// max_x F^l comes from the grid oracle when |L| <= 3, otherwise from the
/// best known solver value (flagged "heuristic reference"). eps_additive is
/// the solver's additive error allowance on F~.
DiagnosticsReport certify_restricted_solution(const ValidatedInstance& g, const Vec& x_star,
                                              double eps_additive, std::uint64_t seed = 0);

/// Certificates for the penalized-network route: the restricted-objective
/// gap bound and the overall bound, with constants measured literally from
/// their definitions via oracle enumeration (oracle-scale instances).
DiagnosticsReport certify_modified_solution(const ValidatedInstance& g,
                                            const LayeredInstance& layered, const Vec& x_bar,
                                            double delta_bar, std::uint64_t seed = 0);

struct ZeroSumRow {
  double mu;
  double gamma_star;     // min_x Gamma
  double t_star;         // min_x max_tau U (grid oracle)
  double e_star;         // min_x E^f (grid oracle)
  double kappa1;
  double kappa2;
  bool holds_k1;         // |Gamma* - T*| <= kappa1
  bool holds_k2;         // |Gamma* - E*| <= kappa2
};

/// Zero-sum certification per mu (soft-max versus min-max interdiction
/// values); requires |L| <= 3 and an enumerable instance.
std::vector<ZeroSumRow> certify_zero_sum(const ValidatedInstance& g, const Vec& mu_list,
                                         const SolveOptions& opts = {});

/// Temperature-gap constants kappa1(mu), kappa2(mu) maxed over a sample
/// augmented with the given extra strategies.
double kappa1_of_mu(const ValidatedInstance& g, const oracle::PathSet& ps, double mu,
                    const std::vector<Vec>& xs);
double kappa2_of_mu(const ValidatedInstance& g, const oracle::PathSet& ps, double mu,
                    const std::vector<Vec>& xs);

}  // namespace diagnostics
}  // namespace interdict
