#include "interdict/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace interdict {
namespace io {

using nlohmann::json;

std::string to_json(const InterdictionInstance& inst) {
  json doc;
  doc["schema"] = 1;
  doc["mu"] = inst.mu;
  doc["origin"] = inst.origin;
  doc["destination"] = inst.destination;
  doc["bounds"] = {{"lx", inst.lx}, {"ux", inst.ux}};
  json kinds = json::array();
  for (const auto& k : inst.kinds) kinds.push_back({{"budget", k.budget}});
  doc["kinds"] = kinds;
  json nodes = json::array();
  for (int i = 0; i < inst.num_nodes(); ++i) {
    const auto& nd = inst.nodes[i];
    json n;
    n["id"] = i;
    n["t_f"] = nd.t_f;
    if (nd.var) {
      const CoverageVar& v = inst.vars[*nd.var];
      n["critical"] = true;
      n["kind"] = v.kind;
      n["w_f"] = v.w_f;
      n["w_l"] = v.w_l;
      n["t_l"] = v.t_l;
    }
    nodes.push_back(n);
  }
  doc["nodes"] = nodes;
  json arcs = json::array();
  for (const auto& [u, v] : inst.arcs) arcs.push_back({u, v});
  doc["arcs"] = arcs;
  return doc.dump(2) + "\n";
}

InterdictionInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::IoError, std::string("malformed instance document: ") + e.what());
  }
  try {
    if (doc.at("schema").get<int>() != 1) fail(Errc::IoError, "unsupported schema version");
    InterdictionInstance inst;
    inst.mu = doc.at("mu").get<double>();
    inst.origin = doc.at("origin").get<int>();
    inst.destination = doc.at("destination").get<int>();
    inst.lx = doc.at("bounds").at("lx").get<double>();
    inst.ux = doc.at("bounds").at("ux").get<double>();
    for (const auto& k : doc.at("kinds")) inst.kinds.push_back({k.at("budget").get<double>()});
    inst.nodes.resize(doc.at("nodes").size());
    for (const auto& n : doc.at("nodes")) {
      int id = n.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(inst.nodes.size()))
        fail(Errc::IoError, "node ids must be dense 0..n-1");
      NodeRecord& rec = inst.nodes[id];
      rec.t_f = n.at("t_f").get<double>();
      if (n.value("critical", false)) {
        CoverageVar v;
        v.node = id;
        v.kind = n.at("kind").get<int>();
        v.w_f = n.at("w_f").get<double>();
        v.w_l = n.at("w_l").get<double>();
        v.t_l = n.at("t_l").get<double>();
        rec.var = static_cast<VarId>(inst.vars.size());
        inst.vars.push_back(v);
      }
    }
    for (const auto& a : doc.at("arcs")) inst.arcs.emplace_back(a.at(0).get<int>(), a.at(1).get<int>());
    return inst;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::IoError, std::string("instance document missing fields: ") + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(Errc::IoError, "short write to '" + path + "'");
}

InterdictionInstance load_instance(const std::string& path) {
  return instance_from_json(read_text(path));
}

void save_instance(const InterdictionInstance& inst, const std::string& path) {
  write_text(path, to_json(inst));
}

std::string report_to_json(const SolveReport& rep, const ValidatedInstance& g) {
  json doc;
  doc["schema"] = 1;
  doc["artifact_version"] = "1.0";
  doc["method"] = method_name(rep.method);
  doc["config"] = {{"bisection_tol", rep.options.bisection_tol},
                   {"inner_max_iters", rep.options.inner_max_iters},
                   {"inner_grad_tol", rep.options.inner_grad_tol},
                   {"restarts", rep.options.restarts},
                   {"baseline_samples", rep.options.baseline_samples},
                   {"baseline_iters", rep.options.baseline_iters},
                   {"penalty_c", rep.options.penalty_c}};
  doc["delta_bar"] = rep.delta_bar;
  doc["objective"] = rep.objective;
  doc["gamma"] = rep.gamma;
  doc["adversary_value"] = rep.adversary_value;
  if (!std::isnan(rep.restricted_objective)) doc["restricted_objective"] = rep.restricted_objective;
  doc["outer_iterations"] = rep.outer_iterations;
  doc["inner_iterations"] = rep.inner_iterations;
  doc["wall_seconds"] = rep.wall_seconds;
  doc["seed"] = rep.seed;
  doc["bracket"] = {rep.bracket_lo, rep.bracket_hi};
  if (rep.method == Method::MODIFIED) doc["penalty_c"] = rep.penalty_c;
  if (!rep.notes.empty()) doc["notes"] = rep.notes;
  json x = json::object();
  for (int j = 0; j < g.num_vars(); ++j) {
    // Keyed by the node id in the loaded document.
    NodeId node = -1;
    for (NodeId s : g.critical_nodes)
      if (*g.inst.nodes[s].var == j) node = g.orig_ids[s];
    x[std::to_string(node)] = rep.x[j];
  }
  doc["x"] = x;
  if (!rep.trace.empty()) {
    json tr = json::array();
    for (const auto& st : rep.trace)
      tr.push_back({{"delta", st.delta},
                    {"feasible", st.feasible},
                    {"inner_iterations", st.inner_iterations},
                    {"inner_value", st.inner_value}});
    doc["trace"] = tr;
  }
  return doc.dump(2) + "\n";
}

std::string diagnostics_to_json(const diagnostics::DiagnosticsReport& rep) {
  json doc;
  doc["schema"] = 1;
  doc["kappa"] = rep.kappa;
  doc["beta1_est"] = rep.beta.infinite && std::isinf(rep.beta.beta1) ? json("inf") : json(rep.beta.beta1);
  doc["beta2_est"] = rep.beta.infinite && std::isinf(rep.beta.beta2) ? json("inf") : json(rep.beta.beta2);
  doc["beta_samples"] = rep.beta.samples;
  doc["beta_exact_grid"] = rep.beta.exact_grid;
  doc["beta_infinite"] = rep.beta.infinite;
  if (rep.eps_prime) {
    doc["eps1_est"] = rep.eps_prime->eps1;
    doc["eps2_est"] = rep.eps_prime->eps2;
    doc["penalty_c"] = rep.penalty_c;
  }
  if (!rep.reference.empty()) doc["reference"] = rep.reference;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json jc;
    jc["name"] = c.name;
    jc["lhs"] = c.lhs;
    jc["rhs"] = std::isinf(c.rhs) ? json(c.rhs > 0 ? "inf" : "-inf") : json(c.rhs);
    jc["holds"] = c.holds;
    jc["applicable"] = c.applicable;
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(jc);
  }
  doc["checks"] = checks;
  return doc.dump(2) + "\n";
}

}  // namespace io
}  // namespace interdict
