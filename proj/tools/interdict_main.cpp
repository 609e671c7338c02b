#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "interdict/diagnostics.hpp"
#include "interdict/io.hpp"
#include "interdict/oracle.hpp"
#include "interdict/solve.hpp"

using namespace interdict;
using nlohmann::json;

namespace {

// Exit-code contract: 0 success, 1 I/O, 2 invalid input, 3 solver failure,
// 4 certification failure.
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCertify = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::IoError:
      return kExitIo;
    case Errc::InvalidParams:
    case Errc::CycleDetected:
    case Errc::DestinationUnreachable:
    case Errc::CriticalEndpoint:
    case Errc::BadBounds:
      return kExitInvalid;
    default:
      return kExitSolver;
  }
}

int default_threads() {
  if (const char* env = std::getenv("INTERDICT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) fail(Errc::InvalidParams, "empty list '" + text + "'");
  return out;
}

constexpr std::size_t kCertifyPathCap = 20000;

json oracle_equivalence_checks(const ValidatedInstance& g, const Vec& x) {
  oracle::PathSet ps = oracle::enumerate_paths(g, kCertifyPathCap);
  oracle::OracleEvaluation ov = oracle::brute_evaluate(g, x, ps);
  FlowEvaluation ev = evaluate(g, x);

  auto rel = [](double a, double b) {
    return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)});
  };
  double worst = rel(ev.defender_value, ov.defender_value);
  worst = std::max(worst, rel(ev.adversary_value, ov.adversary_value));
  worst = std::max(worst, std::fabs(ev.log_partition_over_mu - ov.log_total));
  for (NodeId s : g.critical_nodes) worst = std::max(worst, rel(ev.crossing[s], ov.crossing[s]));

  double prob_total = 0.0;
  for (double p : ov.path_prob) prob_total += p;

  json out;
  out["paths"] = ps.paths.size();
  out["max_relative_error"] = worst;
  out["probability_sum_error"] = std::fabs(prob_total - 1.0);
  out["pass"] = worst <= 1e-9 && std::fabs(prob_total - 1.0) <= 1e-10;
  return out;
}

int cmd_generate(int n, double p, double frac, std::uint64_t seed, const GeneratorOptions& opts,
                 const std::string& out_path) {
  ValidatedInstance g = generate_random(n, p, frac, seed, opts);
  io::save_instance(g.inst, out_path);
  std::cout << "wrote " << out_path << " (" << g.num_nodes() << " nodes, " << g.inst.arcs.size()
            << " arcs, " << g.num_vars() << " critical)\n";
  return 0;
}

int cmd_check(const std::string& path, bool certify) {
  ValidatedInstance g = validate(io::load_instance(path));
  std::cout << "valid: " << g.num_nodes() << " nodes, " << g.inst.arcs.size() << " arcs, "
            << g.num_vars() << " critical, mu=" << g.inst.mu << "\n";
  for (const auto& line : g.log) std::cout << "note: " << line << "\n";
  bool enumerable = true;
  try {
    std::size_t paths = oracle::enumerate_paths(g, kCertifyPathCap).paths.size();
    std::cout << "paths: " << paths << "\n";
  } catch (const Error&) {
    enumerable = false;
    std::cout << "paths: > " << kCertifyPathCap << " (not enumerable)\n";
  }
  if (certify) {
    if (!enumerable) {
      std::cout << "certify: skipped (instance not enumerable under the path cap)\n";
      return 0;
    }
    json eq = oracle_equivalence_checks(g, default_start(g));
    std::cout << "certify: max relative error " << eq["max_relative_error"].get<double>()
              << ", probability sum error " << eq["probability_sum_error"].get<double>() << "\n";
    if (!eq["pass"].get<bool>()) {
      std::cout << "certify: FAIL\n";
      return kExitCertify;
    }
    std::cout << "certify: pass\n";
  }
  return 0;
}

int cmd_solve(const std::string& inst_path, const std::string& method, const SolveOptions& opts,
              bool certify, const std::string& out_path) {
  ValidatedInstance g = validate(io::load_instance(inst_path));
  Method m = method_from_name(method);
  SolveReport rep = solve(m, g, opts);

  json doc = json::parse(io::report_to_json(rep, g));
  bool cert_fail = false;
  if (certify) {
    json cert;
    bool enumerable = true;
    try {
      oracle::enumerate_paths(g, kCertifyPathCap);
    } catch (const Error&) {
      enumerable = false;
    }
    cert["enumerable"] = enumerable;
    if (enumerable) {
      cert["oracle_equivalence"] = oracle_equivalence_checks(g, rep.x);
      cert_fail |= !cert["oracle_equivalence"]["pass"].get<bool>();
    }
    if (m == Method::GRAD || m == Method::RESTRICTED || m == Method::MODIFIED) {
      diagnostics::DiagnosticsReport diag;
      if (m == Method::MODIFIED) {
        LayeredInstance lay = build_layered(g, rep.penalty_c);
        diag = diagnostics::certify_modified_solution(g, lay, rep.x, rep.delta_bar, opts.seed);
      } else {
        diag = diagnostics::certify_restricted_solution(g, rep.x, 10 * opts.bisection_tol,
                                                        opts.seed);
      }
      cert["diagnostics"] = json::parse(io::diagnostics_to_json(diag));
      cert_fail |= !diag.all_hold();
    }
    if (m == Method::ZEROSUM && g.num_vars() <= 3 && enumerable) {
      auto rows = diagnostics::certify_zero_sum(g, {g.inst.mu}, opts);
      json zs = json::array();
      for (const auto& r : rows) {
        zs.push_back({{"mu", r.mu},
                      {"gamma_star", r.gamma_star},
                      {"t_star", r.t_star},
                      {"e_star", r.e_star},
                      {"kappa1", r.kappa1},
                      {"kappa2", r.kappa2},
                      {"holds_k1", r.holds_k1},
                      {"holds_k2", r.holds_k2}});
        cert_fail |= !(r.holds_k1 && r.holds_k2);
      }
      cert["zero_sum"] = zs;
    }
    cert["pass"] = !cert_fail;
    doc["certification"] = cert;
  }
  io::write_text(out_path, doc.dump(2) + "\n");
  std::cout << method << ": objective " << rep.objective << " (delta " << rep.delta_bar << ", "
            << rep.wall_seconds << "s) -> " << out_path << "\n";
  return cert_fail ? kExitCertify : 0;
}

struct BenchCell {
  int size = 0;
  std::uint64_t seed = 0;
  std::string method;
  bool ok = false;
  double objective = 0.0;
  int outer = 0, inner = 0;
  double wall = 0.0;
  std::string error;
};

int cmd_benchmark(const std::vector<double>& sizes, int seeds, double p, double mu, double frac,
                  const std::vector<std::string>& methods, const SolveOptions& base_opts,
                  int threads, const std::string& out_path) {
  struct Task {
    int size;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double sz : sizes)
    for (int s = 0; s < seeds; ++s)
      tasks.push_back({static_cast<int>(sz), static_cast<std::uint64_t>(s + 1)});

  std::vector<std::vector<BenchCell>> results(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      GeneratorOptions gopts;
      gopts.mu = mu;
      std::vector<BenchCell> cells;
      try {
        ValidatedInstance g = generate_random(t.size, p, frac, t.seed, gopts);
        for (const std::string& m : methods) {
          BenchCell cell;
            cell.size = t.size;
            cell.seed = t.seed;
            cell.method = m;
          try {
            SolveOptions opts = base_opts;
            opts.seed = t.seed;
            opts.record_trace = false;
            SolveReport rep = solve(method_from_name(m), g, opts);
            cell.ok = true;
            cell.objective = rep.objective;
            cell.outer = rep.outer_iterations;
            cell.inner = rep.inner_iterations;
            cell.wall = rep.wall_seconds;
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
          cells.push_back(std::move(cell));
        }
      } catch (const std::exception& e) {
        for (const std::string& m : methods) {
          BenchCell cell;
            cell.size = t.size;
            cell.seed = t.seed;
            cell.method = m;
          cell.error = e.what();
          cells.push_back(std::move(cell));
        }
      }
      results[i] = std::move(cells);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < std::max(1, threads); ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv.precision(10);
  csv << "size,seed,method,objective,percent_of_restricted,outer_iterations,inner_iterations,"
         "wall_seconds,status\n";

  std::map<std::pair<int, std::uint64_t>, double> restricted_obj;
  for (const auto& cells : results)
    for (const auto& c : cells)
      if (c.method == "restricted" && c.ok) restricted_obj[{c.size, c.seed}] = c.objective;

  std::map<std::pair<int, std::string>, std::vector<double>> pct_by_group;
  for (const auto& cells : results) {
    for (const auto& c : cells) {
      std::ostringstream pct;
      auto it = restricted_obj.find({c.size, c.seed});
      if (c.ok && it != restricted_obj.end() && it->second != 0.0) {
        double v = 100.0 * c.objective / it->second;
        pct.precision(10);
        pct << v;
        pct_by_group[{c.size, c.method}].push_back(v);
      }
      csv << c.size << "," << c.seed << "," << c.method << ",";
      if (c.ok) csv << c.objective;
      csv << "," << pct.str() << "," << c.outer << "," << c.inner << "," << c.wall << ","
          << (c.ok ? "ok" : "error:" + c.error) << "\n";
    }
  }
  csv << "# summary: size,method,mean_percent_of_restricted,std_percent,cells\n";
  for (const auto& [key, vals] : pct_by_group) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    double sd = vals.size() > 1 ? std::sqrt(var / (static_cast<double>(vals.size()) - 1)) : 0.0;
    csv << "summary," << key.first << "," << key.second << "," << mean << "," << sd << ","
        << vals.size() << "\n";
  }
  io::write_text(out_path, csv.str());
  std::cout << "wrote " << out_path << " (" << tasks.size() << " cells x " << methods.size()
            << " methods)\n";
  return 0;
}

int cmd_sweep_mu(const std::string& inst_path, const std::vector<double>& mus,
                 const SolveOptions& opts, const std::string& out_path) {
  ValidatedInstance g = validate(io::load_instance(inst_path));
  bool oracle_cols = g.num_vars() <= 3;
  std::vector<diagnostics::ZeroSumRow> rows;
  if (oracle_cols) {
    try {
      rows = diagnostics::certify_zero_sum(g, Vec(mus.begin(), mus.end()), opts);
    } catch (const Error&) {
      oracle_cols = false;
    }
  }
  std::ostringstream csv;
  csv.precision(12);
  csv << "mu,gamma_star,adversary_value,t_star,kappa1\n";
  for (size_t i = 0; i < mus.size(); ++i) {
    ValidatedInstance gm = with_mu(g, mus[i]);
    SolveOptions o = opts;
    o.record_trace = false;
    SolveReport rep = solve(Method::ZEROSUM, gm, o);
    csv << mus[i] << "," << rep.gamma << "," << rep.adversary_value << ",";
    if (oracle_cols)
      csv << rows[i].t_star << "," << rows[i].kappa1;
    else
      csv << ",";
    csv << "\n";
  }
  io::write_text(out_path, csv.str());
  std::cout << "wrote " << out_path << " (" << mus.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg network interdiction solver for recursive-logit adversaries"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "generate a random cycle-free instance");
  int gen_nodes = 20;
  double gen_p = 0.8, gen_frac = 0.8;
  std::uint64_t gen_seed = 1;
  GeneratorOptions gen_opts;
  std::string gen_out = "instance.json";
  gen->add_option("--nodes", gen_nodes, "node count (>= 3)");
  gen->add_option("--edge-prob", gen_p, "forward-arc probability");
  gen->add_option("--critical-frac", gen_frac, "fraction of critical nodes");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--mu", gen_opts.mu, "rationality parameter");
  gen->add_option("--budget", gen_opts.budget, "resource budget (default |L|/4)");
  gen->add_option("--lx", gen_opts.lx, "coverage lower bound");
  gen->add_option("--ux", gen_opts.ux, "coverage upper bound");
  gen->add_option("-o,--output", gen_out, "output instance file");

  auto* sol = app.add_subcommand("solve", "solve an instance");
  std::string sol_method = "grad", sol_inst, sol_out = "report.json";
  SolveOptions sol_opts;
  bool sol_certify = false;
  sol->add_option("--method", sol_method, "grad|restricted|modified|zerosum|baseline");
  sol->add_option("--tol", sol_opts.bisection_tol, "bisection tolerance");
  sol->add_option("--seed", sol_opts.seed, "seed for stochastic parts");
  sol->add_option("--penalty-c", sol_opts.penalty_c, "modified-network penalty (default auto)");
  sol->add_option("--inner-iters", sol_opts.inner_max_iters, "inner iteration cap");
  sol->add_option("--restarts", sol_opts.restarts, "multi-start count (baseline)");
  sol->add_option("--samples", sol_opts.baseline_samples, "baseline paths per iteration");
  sol->add_option("--iters", sol_opts.baseline_iters, "baseline iterations");
  sol->add_flag("--certify", sol_certify, "run oracle certification when enumerable");
  sol->add_option("instance", sol_inst, "instance file")->required();
  sol->add_option("-o,--output", sol_out, "output report file");

  auto* chk = app.add_subcommand("check", "validate an instance file");
  std::string chk_inst;
  bool chk_certify = false;
  chk->add_option("instance", chk_inst, "instance file")->required();
  chk->add_flag("--certify", chk_certify, "run oracle equivalence checks");

  auto* ben = app.add_subcommand("benchmark", "generate-and-solve grid, CSV output");
  std::string ben_sizes = "20,40,60,80,100", ben_methods = "baseline,grad,restricted";
  int ben_seeds = 20;
  double ben_p = 0.8, ben_mu = 2.0, ben_frac = 0.8;
  int ben_threads = default_threads();
  SolveOptions ben_opts;
  std::string ben_out = "benchmark.csv";
  ben->add_option("--sizes", ben_sizes, "comma-separated node counts");
  ben->add_option("--seeds", ben_seeds, "seeds per size");
  ben->add_option("--p", ben_p, "edge probability");
  ben->add_option("--mu", ben_mu, "rationality parameter");
  ben->add_option("--critical-frac", ben_frac, "fraction of critical nodes");
  ben->add_option("--methods", ben_methods, "comma-separated method list");
  ben->add_option("--tol", ben_opts.bisection_tol, "bisection tolerance");
  ben->add_option("--threads", ben_threads, "worker threads (env INTERDICT_THREADS)");
  ben->add_option("-o,--output", ben_out, "output CSV");

  auto* swp = app.add_subcommand("sweep-mu", "zero-sum solve across a mu list, CSV output");
  std::string swp_inst, swp_out = "sweep.csv", swp_mus = "0.02,0.1,0.5,1,2";
  SolveOptions swp_opts;
  swp->add_option("--mu-list", swp_mus, "comma-separated mu values");
  swp->add_option("instance", swp_inst, "instance file")->required();
  swp->add_option("-o,--output", swp_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_nodes, gen_p, gen_frac, gen_seed, gen_opts, gen_out);
    if (sol->parsed()) return cmd_solve(sol_inst, sol_method, sol_opts, sol_certify, sol_out);
    if (chk->parsed()) return cmd_check(chk_inst, chk_certify);
    if (ben->parsed()) {
      std::vector<std::string> methods;
      std::stringstream ss(ben_methods);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) methods.push_back(item);
      return cmd_benchmark(parse_list(ben_sizes), ben_seeds, ben_p, ben_mu, ben_frac, methods,
                           ben_opts, ben_threads, ben_out);
    }
    if (swp->parsed()) return cmd_sweep_mu(swp_inst, parse_list(swp_mus), swp_opts, swp_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
