#include "interdict/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace interdict {
namespace oracle {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const Vec& logs) {
  double mx = kNegInf;
  for (double v : logs) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - mx);
  return mx + std::log(acc);
}
}  // namespace

double PathSet::path_utility(const InterdictionInstance& inst, const std::vector<NodeId>& tau,
                             const Vec& x) {
  double u = 0.0;
  for (NodeId s : tau)
    if (s != inst.destination) u += inst.node_utility(s, x);
  return u;
}

PathSet enumerate_paths(const ValidatedInstance& g, std::size_t cap) {
  PathSet ps;
  std::vector<NodeId> cur{g.origin()};
  // Iterative DFS with an explicit branch cursor per depth.
  std::vector<size_t> cursor{0};
  while (!cur.empty()) {
    NodeId u = cur.back();
    if (u == g.destination()) {
      if (ps.paths.size() >= cap) fail(Errc::PathExplosion, "path count exceeds cap");
      ps.paths.push_back(cur);
      cur.pop_back();
      cursor.pop_back();
      continue;
    }
    size_t& i = cursor.back();
    if (i < g.succ[u].size()) {
      NodeId v = g.succ[u][i++];
      cur.push_back(v);
      cursor.push_back(0);
    } else {
      cur.pop_back();
      cursor.pop_back();
    }
  }
  return ps;
}

OracleEvaluation brute_evaluate(const ValidatedInstance& g, const Vec& x, const PathSet& ps) {
  const auto& inst = g.inst;
  const int n = g.num_nodes();
  const int nv = inst.num_vars();
  const size_t np = ps.paths.size();

  OracleEvaluation out;
  out.path_utility.resize(np);
  for (size_t i = 0; i < np; ++i) out.path_utility[i] = PathSet::path_utility(inst, ps.paths[i], x);

  double mx = kNegInf;
  for (double u : out.path_utility) mx = std::max(mx, u);

  // Explicitly normalized path probabilities.
  Vec w(np);
  double tot = 0.0;
  for (size_t i = 0; i < np; ++i) {
    w[i] = std::exp((out.path_utility[i] - mx) / inst.mu);
    tot += w[i];
  }
  out.path_prob.resize(np);
  for (size_t i = 0; i < np; ++i) out.path_prob[i] = w[i] / tot;

  out.log_total = mx / inst.mu + std::log(tot);
  out.log_partition = inst.mu * out.log_total;

  out.crossing.assign(n, 0.0);
  out.defender_value = 0.0;
  out.adversary_value = 0.0;
  for (size_t i = 0; i < np; ++i) {
    out.adversary_value += out.path_prob[i] * out.path_utility[i];
    for (NodeId s : ps.paths[i])
      if (inst.nodes[s].critical()) out.crossing[s] += out.path_prob[i];
  }
  for (NodeId s : g.critical_nodes) {
    VarId j = *inst.nodes[s].var;
    out.defender_value += inst.reward(j, x[j]) * out.crossing[s];
  }

  // Best-path statistics with an exact-tie tolerance.
  out.best_utility = mx;
  double tie_tol = 1e-12 * (1.0 + std::fabs(mx));
  out.best_count = 0;
  double second = kNegInf;
  out.max_abs_utility = 0.0;
  for (double u : out.path_utility) {
    out.max_abs_utility = std::max(out.max_abs_utility, std::fabs(u));
    if (u >= mx - tie_tol)
      out.best_count++;
    else
      second = std::max(second, u);
  }
  out.gap_alpha = second == kNegInf ? kInf : mx - second;

  // Path families per critical node.
  out.delta_paths.assign(nv, {});
  out.delta_plus_paths.assign(nv, {});
  Vec lu(np);
  for (size_t i = 0; i < np; ++i) lu[i] = out.path_utility[i] / inst.mu;

  Vec ld(nv, kNegInf), ldp(nv, kNegInf), lth(nv, kNegInf);
  std::vector<Vec> dlogs(nv), dplogs(nv), thlogs(nv);
  Vec union_d_logs, union_dp_logs;
  for (size_t i = 0; i < np; ++i) {
    std::vector<VarId> crossed;
    for (NodeId s : ps.paths[i])
      if (inst.nodes[s].critical()) crossed.push_back(*inst.nodes[s].var);
    if (crossed.size() == 1) union_d_logs.push_back(lu[i]);
    if (crossed.size() >= 2) union_dp_logs.push_back(lu[i]);
    for (VarId j : crossed) {
      thlogs[j].push_back(lu[i]);
      if (crossed.size() == 1) {
        out.delta_paths[j].push_back(static_cast<int>(i));
        dlogs[j].push_back(lu[i]);
      } else {
        out.delta_plus_paths[j].push_back(static_cast<int>(i));
        dplogs[j].push_back(lu[i]);
      }
    }
  }
  for (int j = 0; j < nv; ++j) {
    ld[j] = log_sum_exp(dlogs[j]);
    ldp[j] = log_sum_exp(dplogs[j]);
    lth[j] = log_sum_exp(thlogs[j]);
  }
  out.log_mass_delta = ld;
  out.log_mass_delta_plus = ldp;
  out.log_through = lth;
  out.log_union_delta = log_sum_exp(union_d_logs);
  out.log_union_delta_plus = log_sum_exp(union_dp_logs);

  // F~ over the single-crossing family.
  out.restricted_defined = out.log_union_delta != kNegInf;
  if (out.restricted_defined) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < nv; ++j) {
      if (ld[j] == kNegInf) continue;
      double m = std::exp(ld[j] - out.log_union_delta);
      num += inst.reward(j, x[j]) * m;
      den += m;
    }
    out.restricted_value = num / den;
  } else {
    out.restricted_value = std::numeric_limits<double>::quiet_NaN();
  }

  // beta ratios with the 0/0 -> 0 and positive/0 -> +inf conventions.
  out.beta1 = 0.0;
  for (int j = 0; j < nv; ++j) {
    double r;
    if (ldp[j] == kNegInf)
      r = 0.0;
    else if (ld[j] == kNegInf)
      r = kInf;
    else
      r = std::exp(ldp[j] - ld[j]);
    out.beta1 = std::max(out.beta1, r);
  }
  if (out.log_union_delta_plus == kNegInf)
    out.beta2 = 0.0;
  else if (out.log_union_delta == kNegInf)
    out.beta2 = kInf;
  else
    out.beta2 = std::exp(out.log_union_delta_plus - out.log_union_delta);

  return out;
}

GradientBundle brute_g_gradient(const ValidatedInstance& g, const Vec& x, double delta,
                                const PathSet& ps) {
  const auto& inst = g.inst;
  const size_t np = ps.paths.size();
  // Shift by the instance potential so the value is directly comparable with
  // the DP route's scaled output.
  const double shift = g.potential[g.origin()] / inst.mu;

  GradientBundle out;
  out.log_scale = shift;
  out.grad.assign(inst.num_vars(), 0.0);
  out.value = 0.0;
  for (size_t i = 0; i < np; ++i) {
    double u = PathSet::path_utility(inst, ps.paths[i], x);
    double m = std::exp(u / inst.mu - shift);
    double reward_sum = 0.0;
    for (NodeId s : ps.paths[i])
      if (inst.nodes[s].critical()) {
        VarId j = *inst.nodes[s].var;
        reward_sum += inst.reward(j, x[j]);
      }
    out.value += (reward_sum - delta) * m;
    for (NodeId s : ps.paths[i]) {
      if (!inst.nodes[s].critical()) continue;
      VarId j = *inst.nodes[s].var;
      const CoverageVar& cv = inst.vars[j];
      out.grad[j] += m * (cv.w_l + (cv.w_f / inst.mu) * (reward_sum - delta));
    }
  }
  return out;
}

GradientBundle matrix_g_gradient(const ValidatedInstance& g, const Vec& x, double delta) {
  const auto& inst = g.inst;
  const int n = g.num_nodes();
  const int nl = static_cast<int>(g.critical_nodes.size());
  using Mat = std::vector<Vec>;

  Mat M(n, Vec(n, 0.0));
  for (const auto& [u, v] : inst.arcs) M[u][v] = std::exp(inst.node_utility(u, x) / inst.mu);

  // Solve (I - M) H = B column by column in topological order. (I - M) is
  // triangular under the topological permutation, so back-substitution along
  // reverse topo order is exact.
  auto solve_col = [&](const Vec& b) {
    Vec h(n, 0.0);
    for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
      NodeId s = *it;
      double acc = b[s];
      for (size_t i = 0; i < g.succ[s].size(); ++i) acc += M[s][g.succ[s][i]] * h[g.succ[s][i]];
      h[s] = acc;
    }
    return h;
  };

  // Columns: Y^s for each critical s, then Z.
  Mat H;
  for (NodeId s : g.critical_nodes) {
    Vec b(n, 0.0);
    b[s] = 1.0;
    H.push_back(solve_col(b));
  }
  Vec bz(n, 0.0);
  bz[g.destination()] = 1.0;
  H.push_back(solve_col(bz));
  const Vec& Z = H.back();

  GradientBundle out;
  out.log_scale = 0.0;
  out.grad.assign(inst.num_vars(), 0.0);
  out.value = -delta * Z[g.origin()];
  for (int c = 0; c < nl; ++c) {
    NodeId s = g.critical_nodes[c];
    VarId j = *inst.nodes[s].var;
    out.value += inst.reward(j, x[j]) * H[c][g.origin()] * Z[s];
  }

  for (int jj = 0; jj < inst.num_vars(); ++jj) {
    // J^{M,j}: only rows of copies of variable jj are nonzero.
    Mat JM(n, Vec(n, 0.0));
    for (NodeId u : g.critical_nodes) {
      if (*inst.nodes[u].var != jj) continue;
      for (NodeId v : g.succ[u]) JM[u][v] = (inst.vars[jj].w_f / inst.mu) * M[u][v];
    }
    // J^{H,j} = (I - M)^{-1} J^{M,j} H, column by column.
    Mat JH(H.size());
    for (size_t c = 0; c < H.size(); ++c) {
      Vec rhs(n, 0.0);
      for (int u = 0; u < n; ++u) {
        double acc = 0.0;
        for (NodeId v : g.succ[u]) acc += JM[u][v] * H[c][v];
        rhs[u] = acc;
      }
      JH[c] = solve_col(rhs);
    }
    const Vec& JZ = JH.back();

    double acc = -delta * JZ[g.origin()];
    for (int c = 0; c < nl; ++c) {
      NodeId s = g.critical_nodes[c];
      VarId j = *inst.nodes[s].var;
      double r = inst.reward(j, x[j]);
      double jr = (j == jj) ? inst.vars[j].w_l : 0.0;
      acc += (r * JH[c][g.origin()] + jr * H[c][g.origin()]) * Z[s] + r * H[c][g.origin()] * JZ[s];
    }
    out.grad[jj] = acc;
  }
  return out;
}

Vec finite_diff_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h,
                         double lo, double hi) {
  Vec grad(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    Vec xp = x, xm = x;
    bool up = x[j] + h <= hi, down = x[j] - h >= lo;
    if (up && down) {
      xp[j] += h;
      xm[j] -= h;
      grad[j] = (f(xp) - f(xm)) / (2 * h);
    } else if (up) {
      xp[j] += h;
      grad[j] = (f(xp) - f(x)) / h;
    } else if (down) {
      xm[j] -= h;
      grad[j] = (f(x) - f(xm)) / h;
    } else {
      fail(Errc::StepTooLarge, "coordinate cannot move by h within the box");
    }
  }
  return grad;
}

GridResult grid_search(const ValidatedInstance& g, int resolution,
                       const std::function<double(const Vec&)>& objective, bool maximize) {
  const int d = g.num_vars();
  if (d > 3) fail(Errc::TooManyCriticalNodes, "grid search supports |L| <= 3");
  if (resolution < 2) fail(Errc::InvalidParams, "resolution must be >= 2");
  const double lo = g.inst.lx, hi = g.inst.ux;

  GridResult best;
  best.value = maximize ? kNegInf : kInf;
  Vec x(d, lo);
  std::vector<int> idx(d, 0);
  const double step = (hi - lo) / (resolution - 1);
  while (true) {
    for (int j = 0; j < d; ++j) x[j] = lo + step * idx[j];
    if (g.feasible(x, 1e-12)) {
      double v = objective(x);
      if (maximize ? v > best.value : v < best.value) best = {x, v};
    }
    int j = 0;
    while (j < d && ++idx[j] == resolution) idx[j++] = 0;
    if (j == d) break;
  }
  if (best.x.empty() && d > 0) fail(Errc::InfeasibleConstraints, "no feasible grid point");
  return best;
}

GridResult grid_search_refined(const ValidatedInstance& g, int resolution,
                               const std::function<double(const Vec&)>& objective, bool maximize,
                               int rounds) {
  GridResult best = grid_search(g, resolution, objective, maximize);
  const int d = g.num_vars();
  if (d == 0) return best;
  double span = (g.inst.ux - g.inst.lx) / (resolution - 1);
  for (int r = 0; r < rounds; ++r) {
    // Local grid around the incumbent, clipped to the box.
    GridResult local = best;
    Vec x(d);
    std::vector<int> idx(d, 0);
    const int res = 11;
    const double step = 2 * span / (res - 1);
    while (true) {
      for (int j = 0; j < d; ++j)
        x[j] = std::clamp(best.x[j] - span + step * idx[j], g.inst.lx, g.inst.ux);
      if (g.feasible(x, 1e-12)) {
        double v = objective(x);
        if (maximize ? v > local.value : v < local.value) local = {x, v};
      }
      int j = 0;
      while (j < d && ++idx[j] == res) idx[j++] = 0;
      if (j == d) break;
    }
    best = local;
    span = step;
  }
  return best;
}

}  // namespace oracle
}  // namespace interdict
