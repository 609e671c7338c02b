#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "interdict/io.hpp"
#include "interdict/solve.hpp"
#include "interdict/subgraph.hpp"
#include "support.hpp"

using namespace interdict;
using namespace testsupport;

TEST_CASE("validate accepts the diamond and orders it topologically") {
  ValidatedInstance g = diamond();
  CHECK(g.num_nodes() == 4);
  CHECK(g.topo.front() == 0);
  CHECK(g.topo.back() == 3);
  for (const auto& [u, v] : g.inst.arcs) CHECK(g.topo_pos[u] < g.topo_pos[v]);
}

TEST_CASE("validate rejects cycles") {
  InterdictionInstance inst;
  inst.nodes.resize(2);
  inst.arcs = {{0, 1}, {1, 0}};
  inst.origin = 0;
  inst.destination = 1;
  CHECK_THROWS_WITH_AS(validate(inst), doctest::Contains("CycleDetected"), Error);
}

TEST_CASE("validate prunes isolated nodes and reports them") {
  InterdictionInstance inst = diamond_raw();
  inst.nodes.resize(6);  // nodes 4, 5 disconnected
  ValidatedInstance g = validate(inst);
  CHECK(g.num_nodes() == 4);
  CHECK(g.log.size() == 2);
  CHECK(g.orig_ids == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("validate error taxonomy") {
  InterdictionInstance inst = diamond_raw();
  SUBCASE("unreachable destination") {
    inst.arcs = {{0, 1}, {0, 2}};
    CHECK_THROWS_WITH_AS(validate(inst), doctest::Contains("DestinationUnreachable"), Error);
  }
  SUBCASE("critical endpoint") {
    inst.nodes[0].var = 0;
    CHECK_THROWS_WITH_AS(validate(inst), doctest::Contains("CriticalEndpoint"), Error);
  }
  SUBCASE("bad mu") {
    inst.mu = 0.0;
    CHECK_THROWS_WITH_AS(validate(inst), doctest::Contains("BadBounds"), Error);
  }
  SUBCASE("inverted box") {
    inst.lx = 0.7;
    inst.ux = 0.3;
    CHECK_THROWS_WITH_AS(validate(inst), doctest::Contains("BadBounds"), Error);
  }
  SUBCASE("wrong slope signs") {
    inst.vars[0].w_f = 0.5;
    CHECK_THROWS_AS(validate(inst), Error);
    inst.vars[0].w_f = -1.0;
    inst.vars[1].w_l = -0.5;
    CHECK_THROWS_AS(validate(inst), Error);
  }
}

TEST_CASE("validate is idempotent") {
  for (const auto& g : enumerable_instances(5, 6, 12, 4000)) {
    ValidatedInstance g2 = validate(g.inst);
    CHECK(g2.inst.arcs == g.inst.arcs);
    CHECK(g2.topo == g.topo);
    CHECK(g2.num_vars() == g.num_vars());
    for (int j = 0; j < g.num_vars(); ++j) {
      CHECK(g2.inst.vars[j].w_f == g.inst.vars[j].w_f);
      CHECK(g2.inst.vars[j].kind == g.inst.vars[j].kind);
    }
  }
}

TEST_CASE("subgraph retaining a critical node") {
  ValidatedInstance g = diamond();
  SUBCASE("diamond keeps one route per retained node") {
    for (NodeId s : {1, 2}) {
      ValidatedInstance sub = build_subgraph_retaining(g, s);
      CHECK(sub.num_nodes() == 3);
      oracle::PathSet ps = oracle::enumerate_paths(sub);
      REQUIRE(ps.paths.size() == 1);
      CHECK(ps.paths[0].size() == 3);
    }
  }
  SUBCASE("chain4 disconnects") {
    ValidatedInstance c4 = chain4();
    CHECK_THROWS_WITH_AS(build_subgraph_retaining(c4, 1), doctest::Contains("EmptySubgraph"),
                         Error);
  }
}

TEST_CASE("subgraph paths through s equal oracle Delta(s)") {
  for (const auto& g : enumerable_instances(6, 6, 12, 3000)) {
    oracle::PathSet all = oracle::enumerate_paths(g);
    Vec x(g.num_vars(), g.inst.lx);
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, x, all);
    for (NodeId s : g.critical_nodes) {
      VarId j = *g.inst.nodes[s].var;
      std::multiset<std::vector<NodeId>> expect;
      for (int pi : ev.delta_paths[j]) expect.insert(all.paths[pi]);
      std::multiset<std::vector<NodeId>> got;
      try {
        ValidatedInstance sub = build_subgraph_retaining(g, s);
        for (const auto& tau : oracle::enumerate_paths(sub).paths) {
          bool through = false;
          std::vector<NodeId> orig;
          for (NodeId u : tau) {
            orig.push_back(sub.orig_ids[u]);
            through |= sub.orig_ids[u] == s;
          }
          if (through) got.insert(orig);
        }
      } catch (const Error& e) {
        REQUIRE(e.code() == Errc::EmptySubgraph);
      }
      CHECK(got == expect);
    }
  }
}

TEST_CASE("layered expansion is a path bijection") {
  for (const auto& g : enumerable_instances(6, 6, 12, 3000)) {
    LayeredInstance lay = build_layered(g, 0.0);
    std::multiset<std::vector<NodeId>> orig;
    for (const auto& tau : oracle::enumerate_paths(g).paths) orig.insert(tau);
    std::multiset<std::vector<NodeId>> projected;
    for (const auto& tau : oracle::enumerate_paths(lay.graph).paths) {
      std::vector<NodeId> proj;
      for (NodeId u : tau)
        if (lay.back[u].first >= 0) proj.push_back(lay.back[u].first);
      projected.insert(proj);
    }
    CHECK(projected == orig);
  }
}

TEST_CASE("layered class structure on fixtures") {
  SUBCASE("diamond has no layer-0 or layer-2 mass for any penalty") {
    for (double c : {0.0, 1.0, 10.0}) {
      LayeredInstance lay = build_layered(diamond(), c);
      LayeredMasses lm = layered_masses(lay, {0.3, 0.6});
      CHECK(lm.log_by_class[2] == -std::numeric_limits<double>::infinity());
      CHECK(lm.log_by_class[0] == -std::numeric_limits<double>::infinity());
    }
  }
  SUBCASE("chain4 penalty suppresses the unique path by exp(-c)") {
    ValidatedInstance c4 = chain4();
    Vec x = {0.2, 0.5};
    LayeredMasses base = layered_masses(build_layered(c4, 0.0), x);
    LayeredMasses pen = layered_masses(build_layered(c4, 10.0), x);
    // mu = 1, exactly one extra critical visit on the only path
    CHECK(base.log_total - pen.log_total == doctest::Approx(10.0).epsilon(1e-12));
  }
}

TEST_CASE("zero-penalty layered masses match the originals") {
  for (const auto& g : enumerable_instances(4, 6, 12, 3000)) {
    LayeredInstance lay = build_layered(g, 0.0);
    Vec x = project_feasible(g, Vec(g.num_vars(), 0.1));
    LayeredMasses lm = layered_masses(lay, x);
    FlowEvaluation ev = evaluate(g, x);
    CHECK(log_close(lm.log_total, ev.log_partition_over_mu, 1e-10));
  }
}

TEST_CASE("generator determinism and shape") {
  ValidatedInstance a = generate_random(20, 0.8, 0.8, 7);
  ValidatedInstance b = generate_random(20, 0.8, 0.8, 7);
  CHECK(io::to_json(a.inst) == io::to_json(b.inst));
  CHECK(a.num_vars() == 16);
  CHECK(a.num_nodes() == 20);
  CHECK(a.inst.kinds.size() == 1);
  CHECK(a.inst.kinds[0].budget == doctest::Approx(4.0));
  for (const auto& v : a.inst.vars) {
    CHECK(v.w_f < 0);
    CHECK(v.w_l > 0);
    CHECK(v.node >= 1);
    CHECK(v.node <= 18);
  }

  ValidatedInstance c = generate_random(20, 0.8, 0.8, 8);
  CHECK(io::to_json(a.inst) != io::to_json(c.inst));
}

TEST_CASE("generator p=1 yields the complete DAG") {
  ValidatedInstance g = generate_random(6, 1.0, 0.5, 3);
  CHECK(g.inst.arcs.size() == 15);
  CHECK(oracle::enumerate_paths(g).paths.size() == 16);  // 2^(n-2)
}

TEST_CASE("generator rejects bad parameters") {
  CHECK_THROWS_WITH_AS(generate_random(2, 0.5, 0.5, 1), doctest::Contains("InvalidParams"), Error);
  CHECK_THROWS_WITH_AS(generate_random(10, 0.0, 0.5, 1), doctest::Contains("InvalidParams"), Error);
  CHECK_THROWS_WITH_AS(generate_random(10, 0.5, 1.5, 1), doctest::Contains("InvalidParams"), Error);
}

TEST_CASE("generator repairs connectivity with the chain") {
  // p tiny: the raw draw is almost surely disconnected, the chain must be added.
  ValidatedInstance g = generate_random(8, 1e-9, 0.5, 11);
  CHECK(g.num_nodes() == 8);
  CHECK(oracle::enumerate_paths(g).paths.size() >= 1);
}
