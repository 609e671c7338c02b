#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "interdict/restricted.hpp"

namespace interdict {

/// Euclidean projection onto {lx <= x <= ux, sum_{s in L_k} x_s <= M_k per kind},
/// solved per kind by bisection on the budget multiplier with box clipping.
/// Errors: InfeasibleConstraints when |L_k| * lx > M_k.
Vec project_feasible(const ValidatedInstance& g, const Vec& x_raw);

struct SolveOptions {
  double bisection_tol = 1e-6;
  int inner_max_iters = 500;
  double inner_grad_tol = 1e-8;
  double step_initial = 1.0;
  double step_shrink = 0.5;
  double sufficient_increase = 1e-4;
  int restarts = 10;
  std::uint64_t seed = 0;
  double penalty_c = -1.0;  // MODIFIED penalty; < 0 selects the auto rule
  std::optional<std::pair<double, double>> delta_bounds_override;
  bool record_trace = true;
  // Baseline controls.
  int baseline_samples = 1000;
  int baseline_iters = 100;
};

/// A maximized objective family member: value and gradient share one scale.
struct InnerObjective {
  std::function<double(const Vec&, Vec*)> eval;
  double log_scale = 0.0;
};

struct InnerResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  Vec trace;  // accepted objective values, monotone non-decreasing
};

/// Projected gradient ascent with backtracking (Armijo on the projection arc).
InnerResult maximize_inner(const ValidatedInstance& g, const InnerObjective& obj, const Vec& x0,
                           const SolveOptions& opts);

enum class Method { GRAD, RESTRICTED, MODIFIED, ZEROSUM, BASELINE };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct BisectionStep {
  double delta;
  double inner_value;  // scaled max_x g(x, delta)
  int inner_iterations;
  bool feasible;
};

struct SolveReport {
  Method method = Method::GRAD;
  SolveOptions options;      // configuration echo for reproducibility
  Vec x;                     // final coverage, by variable
  double delta_bar = 0.0;    // terminal Dinkelbach parameter (= objective at x)
  double objective = 0.0;    // F^l(x) on the original instance
  double gamma = 0.0;        // Gamma(x) on the original instance
  double adversary_value = 0.0;  // E^f(x) on the original instance
  double restricted_objective = 0.0;  // F~(x) when defined, else NaN
  int outer_iterations = 0;
  int inner_iterations = 0;
  double wall_seconds = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;  // final bisection bracket
  double penalty_c = 0.0;                     // MODIFIED only
  std::vector<BisectionStep> trace;
  std::uint64_t seed = 0;
  std::string notes;
};

/// Dinkelbach bisection over delta for the objective family delta -> g(., delta).
/// Errors: BracketFailure when even the widened lower bracket is infeasible.
SolveReport dinkelbach_solve(const ValidatedInstance& g,
                             const std::function<InnerObjective(double)>& family,
                             const Vec& x0, const SolveOptions& opts);

/// Method pipelines. Every report re-evaluates the final x on `g` itself.
SolveReport solve(Method method, const ValidatedInstance& g, const SolveOptions& opts = {});

/// Objective families over a validated instance. value_scale divides the
/// reported value and gradient; a positive constant normalizer keeps the
/// ascent and the bisection sign test unchanged while making the gradient
/// tolerance meaningful across instance scales.
InnerObjective g_family(const ValidatedInstance& g, double delta, double value_scale = 1.0);
InnerObjective g_restricted_family(const RestrictedContext& ctx, double delta);
InnerObjective neg_gamma_family(const ValidatedInstance& g);

/// Scaled partition value at the default start, the g-family normalizer.
double g_family_normalizer(const ValidatedInstance& g);

/// Default Dinkelbach bracket from the reward ranges.
std::pair<double, double> default_delta_bracket(const ValidatedInstance& g);

/// Deterministic feasible starting points.
Vec default_start(const ValidatedInstance& g);
Vec random_feasible(const ValidatedInstance& g, std::uint64_t seed, std::uint64_t stream);

}  // namespace interdict
