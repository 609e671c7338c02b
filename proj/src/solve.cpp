#include "interdict/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "interdict/flow.hpp"
#include "interdict/rng.hpp"
#include "interdict/sampler.hpp"

namespace interdict {

namespace {
double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }
}  // namespace

Vec project_feasible(const ValidatedInstance& g, const Vec& x_raw) {
  const auto& inst = g.inst;
  if (static_cast<int>(x_raw.size()) != inst.num_vars())
    fail(Errc::InvalidParams, "coverage vector has wrong dimension");
  const double lo = inst.lx, hi = inst.ux;

  Vec x(x_raw.size());
  for (size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x_raw[j], lo, hi);

  for (size_t k = 0; k < inst.kinds.size(); ++k) {
    std::vector<int> members;
    for (int j = 0; j < inst.num_vars(); ++j)
      if (inst.vars[j].kind == static_cast<KindId>(k)) members.push_back(j);
    if (members.empty()) continue;
    const double budget = inst.kinds[k].budget;
    if (members.size() * lo > budget + 1e-12)
      fail(Errc::InfeasibleConstraints, "kind budget below the box lower bounds");
    double sum = 0.0;
    for (int j : members) sum += x[j];
    if (sum <= budget) continue;

    // Bisection on the KKT multiplier of the active budget constraint.
    double lam_lo = 0.0, lam_hi = 0.0;
    for (int j : members) lam_hi = std::max(lam_hi, x_raw[j] - lo);
    auto clipped_sum = [&](double lam) {
      double s = 0.0;
      for (int j : members) s += std::clamp(x_raw[j] - lam, lo, hi);
      return s;
    };
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lam_lo + lam_hi);
      if (clipped_sum(mid) > budget)
        lam_lo = mid;
      else
        lam_hi = mid;
      if (lam_hi - lam_lo < 1e-15 * (1.0 + lam_hi)) break;
    }
    for (int j : members) x[j] = std::clamp(x_raw[j] - lam_hi, lo, hi);
  }
  return x;
}

namespace {
void check_options(const SolveOptions& opts) {
  if (!(opts.bisection_tol > 0) || !(opts.inner_grad_tol > 0) || !(opts.step_initial > 0) ||
      !(opts.step_shrink > 0) || opts.step_shrink >= 1 || !(opts.sufficient_increase > 0))
    fail(Errc::InvalidParams, "solver tolerances and steps must be positive");
}
}  // namespace

InnerResult maximize_inner(const ValidatedInstance& g, const InnerObjective& obj, const Vec& x0,
                           const SolveOptions& opts) {
  check_options(opts);
  InnerResult res;
  res.x = project_feasible(g, x0);
  Vec grad(res.x.size());
  res.value = obj.eval(res.x, &grad);
  if (opts.record_trace) res.trace.push_back(res.value);

  for (int it = 0; it < opts.inner_max_iters; ++it) {
    // Projected-gradient stationarity measure.
    Vec probe(res.x.size());
    for (size_t j = 0; j < res.x.size(); ++j) probe[j] = res.x[j] + grad[j];
    probe = project_feasible(g, probe);
    Vec pg(res.x.size());
    for (size_t j = 0; j < res.x.size(); ++j) pg[j] = probe[j] - res.x[j];
    if (norm2(pg) <= opts.inner_grad_tol) break;

    double step = opts.step_initial;
    bool accepted = false;
    while (step > 1e-18) {
      Vec cand(res.x.size());
      for (size_t j = 0; j < res.x.size(); ++j) cand[j] = res.x[j] + step * grad[j];
      cand = project_feasible(g, cand);
      Vec d(res.x.size());
      for (size_t j = 0; j < res.x.size(); ++j) d[j] = cand[j] - res.x[j];
      double dn = norm2(d);
      if (dn == 0.0) break;  // projection pinned us; smaller steps change nothing more
      Vec cg(res.x.size());
      double cv = obj.eval(cand, &cg);
      if (cv >= res.value + opts.sufficient_increase * dot(grad, d)) {
        res.x = std::move(cand);
        res.value = cv;
        grad = std::move(cg);
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
    }
    res.iterations = it + 1;
    if (!accepted) break;
    if (opts.record_trace) res.trace.push_back(res.value);
  }
  return res;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::GRAD: return "grad";
    case Method::RESTRICTED: return "restricted";
    case Method::MODIFIED: return "modified";
    case Method::ZEROSUM: return "zerosum";
    case Method::BASELINE: return "baseline";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::GRAD, Method::RESTRICTED, Method::MODIFIED, Method::ZEROSUM,
                   Method::BASELINE})
    if (name == method_name(m)) return m;
  fail(Errc::InvalidParams, "unknown method '" + name + "'");
}

double g_family_normalizer(const ValidatedInstance& g) {
  return evaluate(g, default_start(g)).z_hat[g.origin()];
}

InnerObjective g_family(const ValidatedInstance& g, double delta, double value_scale) {
  InnerObjective obj;
  obj.log_scale = g.potential[g.origin()] / g.inst.mu + std::log(value_scale);
  obj.eval = [&g, delta, value_scale](const Vec& x, Vec* grad) {
    GradientBundle b = g_value_and_gradient(g, x, delta);
    if (grad) {
      grad->resize(b.grad.size());
      for (size_t j = 0; j < b.grad.size(); ++j) (*grad)[j] = b.grad[j] / value_scale;
    }
    return b.value / value_scale;
  };
  return obj;
}

InnerObjective g_restricted_family(const RestrictedContext& ctx, double delta) {
  InnerObjective obj;
  obj.eval = [&ctx, delta](const Vec& x, Vec* grad) {
    GradientBundle b = ctx.g_restricted(x, delta);
    if (grad) *grad = b.grad;
    return b.value;
  };
  return obj;
}

InnerObjective neg_gamma_family(const ValidatedInstance& g) {
  InnerObjective obj;
  obj.eval = [&g](const Vec& x, Vec* grad) {
    GradientBundle b = gamma_and_gradient(g, x);
    if (grad) {
      grad->resize(b.grad.size());
      for (size_t j = 0; j < b.grad.size(); ++j) (*grad)[j] = -b.grad[j];
    }
    return -b.value;
  };
  return obj;
}

std::pair<double, double> default_delta_bracket(const ValidatedInstance& g) {
  const auto& inst = g.inst;
  double lo = 0.0, hi = 0.0;
  for (const auto& v : inst.vars) {
    double a = v.w_l * inst.lx + v.t_l;
    double b = v.w_l * inst.ux + v.t_l;
    lo += std::min(0.0, std::min(a, b));
    hi += std::max(0.0, std::max(a, b));
  }
  return {lo, hi};
}

Vec default_start(const ValidatedInstance& g) {
  // Uniform fill of each kind's budget, clipped to the box.
  const auto& inst = g.inst;
  Vec x(inst.num_vars(), inst.lx);
  for (size_t k = 0; k < inst.kinds.size(); ++k) {
    int cnt = 0;
    for (const auto& v : inst.vars) cnt += v.kind == static_cast<KindId>(k);
    if (cnt == 0) continue;
    double fill = std::clamp(inst.kinds[k].budget / cnt, inst.lx, inst.ux);
    for (int j = 0; j < inst.num_vars(); ++j)
      if (inst.vars[j].kind == static_cast<KindId>(k)) x[j] = fill;
  }
  return project_feasible(g, x);
}

Vec random_feasible(const ValidatedInstance& g, std::uint64_t seed, std::uint64_t stream) {
  Rng rng = Rng::stream(seed, stream);
  Vec x(g.num_vars());
  for (double& v : x) v = rng.uniform(g.inst.lx, g.inst.ux);
  return project_feasible(g, x);
}

SolveReport dinkelbach_solve(const ValidatedInstance& g,
                             const std::function<InnerObjective(double)>& family,
                             const Vec& x0, const SolveOptions& opts) {
  SolveReport rep;
  rep.seed = opts.seed;
  auto [lo, hi] = opts.delta_bounds_override ? *opts.delta_bounds_override
                                             : default_delta_bracket(g);

  Vec x = project_feasible(g, x0);
  Vec x_best = x;

  auto probe = [&](double delta, const Vec& warm) {
    InnerResult r = maximize_inner(g, family(delta), warm, opts);
    rep.inner_iterations += r.iterations;
    return r;
  };

  // The lower bracket end must be feasible (max_x g >= 0); widen once if not.
  InnerResult r0 = probe(lo, x);
  if (opts.record_trace) rep.trace.push_back({lo, r0.value, r0.iterations, r0.value >= 0});
  if (r0.value < 0) {
    double wid = lo - (hi - lo) - 1.0;
    InnerResult r1 = probe(wid, r0.x);
    if (opts.record_trace) rep.trace.push_back({wid, r1.value, r1.iterations, r1.value >= 0});
    if (r1.value < 0) fail(Errc::BracketFailure, "lower bracket infeasible after widening");
    lo = wid;
    r0 = std::move(r1);
  }
  x = r0.x;
  x_best = r0.x;

  const int max_outer = 200;
  while (hi - lo > opts.bisection_tol && rep.outer_iterations < max_outer) {
    rep.outer_iterations++;
    double mid = 0.5 * (lo + hi);
    InnerResult r = probe(mid, x);
    bool feas = r.value >= 0.0;
    if (opts.record_trace) rep.trace.push_back({mid, r.value, r.iterations, feas});
    x = r.x;
    if (feas) {
      x_best = r.x;
      lo = mid;
    } else {
      hi = mid;
    }
  }

  rep.bracket_lo = lo;
  rep.bracket_hi = hi;
  rep.x = x_best;
  return rep;
}

namespace {

/// Two passes of ascent on g with delta frozen to the current objective value.
/// Ascent from x (where g = 0) keeps g >= 0, so F^l never decreases.
Vec improvement_step(const ValidatedInstance& g, const Vec& x_in, const SolveOptions& opts,
                     int* inner_iters) {
  Vec x = project_feasible(g, x_in);
  const double vnorm = g_family_normalizer(g);
  for (int pass = 0; pass < 2; ++pass) {
    double delta = evaluate(g, x).defender_value;
    InnerResult r = maximize_inner(g, g_family(g, delta, vnorm), x, opts);
    if (inner_iters) *inner_iters += r.iterations;
    x = r.x;
  }
  return x;
}

double auto_penalty(const ValidatedInstance& g) {
  // Suppress each Delta+ path by at least exp(-c/mu) relative to the total
  // mass bound at x = lx*e, targeting eps' ~ 1e-6. Measured eps' is reported
  // by diagnostics, never assumed.
  FlowEvaluation ev = evaluate(g, Vec(g.num_vars(), g.inst.lx));
  double log_mass_bound = std::max(0.0, ev.log_partition_over_mu);
  return g.inst.mu * (log_mass_bound + std::log(1e6));
}

void finalize_report(const ValidatedInstance& g, SolveReport& rep) {
  FlowEvaluation ev = evaluate(g, rep.x);
  rep.objective = ev.defender_value;
  rep.gamma = ev.log_partition;
  rep.adversary_value = ev.adversary_value;
  // Terminal Dinkelbach parameter: g(x, F^l(x)) = 0 exactly.
  rep.delta_bar = ev.defender_value;
  try {
    RestrictedContext ctx(g);
    rep.restricted_objective = ctx.restricted_value(rep.x);
  } catch (const Error&) {
    rep.restricted_objective = std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SolveReport solve(Method method, const ValidatedInstance& g, const SolveOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;

  switch (method) {
    case Method::GRAD: {
      const double vnorm = g_family_normalizer(g);
      rep = dinkelbach_solve(g, [&](double d) { return g_family(g, d, vnorm); }, default_start(g),
                             opts);
      break;
    }
    case Method::RESTRICTED: {
      RestrictedContext ctx(g);
      if (!ctx.restricted_possible())
        fail(Errc::RestrictedUndefined, "every path crosses 0 or >= 2 critical nodes");
      rep = dinkelbach_solve(g, [&](double d) { return g_restricted_family(ctx, d); },
                             default_start(g), opts);
      rep.x = improvement_step(g, rep.x, opts, &rep.inner_iterations);
      break;
    }
    case Method::MODIFIED: {
      double c = opts.penalty_c >= 0 ? opts.penalty_c : auto_penalty(g);
      LayeredInstance lay = build_layered(g, c);
      const double vnorm = g_family_normalizer(lay.graph);
      rep = dinkelbach_solve(lay.graph, [&](double d) { return g_family(lay.graph, d, vnorm); },
                             default_start(lay.graph), opts);
      rep.penalty_c = c;
      rep.x = improvement_step(g, rep.x, opts, &rep.inner_iterations);
      break;
    }
    case Method::ZEROSUM: {
      InnerResult r = maximize_inner(g, neg_gamma_family(g), default_start(g), opts);
      rep.inner_iterations = r.iterations;
      rep.x = r.x;
      break;
    }
    case Method::BASELINE: {
      rep = baseline_solve(g, opts);
      break;
    }
  }

  rep.method = method;
  rep.seed = opts.seed;
  rep.options = opts;
  finalize_report(g, rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace interdict
