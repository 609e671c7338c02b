#include <doctest.h>

#include <cmath>
#include <map>

#include "interdict/sampler.hpp"
#include "interdict/solve.hpp"
#include "support.hpp"

using namespace interdict;
using namespace testsupport;

TEST_CASE("policy rows are probability vectors") {
  Rng rng(91);
  for (const auto& g : enumerable_instances(5, 6, 12, 3000)) {
    Vec x = project_feasible(g, interior_point(g, rng));
    FlowEvaluation ev = evaluate(g, x);
    for (int u = 0; u < g.num_nodes(); ++u) {
      if (g.succ[u].empty()) continue;
      Vec p = ev.policy(g, u);
      double total = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::fabs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("policy matches conditional path probabilities") {
  // pi(s'|s) must reproduce P(tau) = exp(U/mu)/Z when multiplied along paths.
  for (const auto& g : enumerable_instances(4, 6, 10, 400)) {
    oracle::PathSet ps = oracle::enumerate_paths(g, 400);
    Vec x = project_feasible(g, Vec(g.num_vars(), 0.2));
    FlowEvaluation ev = evaluate(g, x);
    oracle::OracleEvaluation ov = oracle::brute_evaluate(g, x, ps);
    for (size_t i = 0; i < ps.paths.size(); ++i) {
      double prob = 1.0;
      const auto& tau = ps.paths[i];
      for (size_t t = 0; t + 1 < tau.size(); ++t) {
        Vec p = ev.policy(g, tau[t]);
        for (size_t k = 0; k < g.succ[tau[t]].size(); ++k)
          if (g.succ[tau[t]][k] == tau[t + 1]) prob *= p[k];
      }
      CHECK(rel_err(prob, ov.path_prob[i]) < 1e-9);
    }
  }
}

TEST_CASE("chain3 always samples the unique path") {
  ValidatedInstance g = chain3();
  FlowEvaluation ev = evaluate(g, {0.3});
  PolicyTable pol = PolicyTable::build(g, ev);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto tau = sample_path(g, pol, rng);
    CHECK(tau == std::vector<NodeId>{0, 1, 2});
  }
}

TEST_CASE("diamond sampling frequencies") {
  ValidatedInstance g = diamond();
  auto frequency_via_1 = [&](const Vec& x, std::uint64_t seed) {
    FlowEvaluation ev = evaluate(g, x);
    PolicyTable pol = PolicyTable::build(g, ev);
    Rng rng(seed);
    int via1 = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      auto tau = sample_path(g, pol, rng);
      via1 += tau[1] == 1;
    }
    return via1 / static_cast<double>(n);
  };
  SUBCASE("symmetric point: 0.5 within 3 sigma") {
    CHECK(std::fabs(frequency_via_1({0.0, 0.0}, 12345) - 0.5) < 0.015);
  }
  SUBCASE("covered side: exact crossing probability within 3 sigma") {
    double p1 = std::exp(-1.0) / (1.0 + std::exp(-1.0));
    CHECK(std::fabs(frequency_via_1({1.0, 0.0}, 54321) - p1) < 0.014);
  }
}

TEST_CASE("sampled batches are reproducible by seed") {
  ValidatedInstance g = diamond();
  FlowEvaluation ev = evaluate(g, {0.4, 0.1});
  Rng a(777), b(777), c(778);
  SampleBatch ba = sample_batch(g, ev, {0.4, 0.1}, 64, a);
  SampleBatch bb = sample_batch(g, ev, {0.4, 0.1}, 64, b);
  SampleBatch bc = sample_batch(g, ev, {0.4, 0.1}, 64, c);
  CHECK(ba.paths == bb.paths);
  CHECK(ba.paths != bc.paths);
}

TEST_CASE("empirical total variation against exact path probabilities") {
  for (const auto& g : enumerable_instances(3, 6, 9, 60)) {
    oracle::PathSet ps = oracle::enumerate_paths(g, 60);
    Vec x = project_feasible(g, Vec(g.num_vars(), 0.1));
    FlowEvaluation ev = evaluate(g, x);
    oracle::OracleEvaluation ov = oracle::brute_evaluate(g, x, ps);
    PolicyTable pol = PolicyTable::build(g, ev);

    std::map<std::vector<NodeId>, int> counts;
    Rng rng(4242);
    const int n = 10000;
    for (int i = 0; i < n; ++i) counts[sample_path(g, pol, rng)]++;
    double tv = 0.0;
    for (size_t i = 0; i < ps.paths.size(); ++i) {
      auto it = counts.find(ps.paths[i]);
      double emp = it == counts.end() ? 0.0 : it->second / static_cast<double>(n);
      tv += std::fabs(emp - ov.path_prob[i]);
    }
    CHECK(0.5 * tv <= 3.0 * std::sqrt(ps.paths.size() / static_cast<double>(n)));
  }
}

TEST_CASE("SAA objective is deterministic at a fixed sample") {
  ValidatedInstance g = diamond();
  FlowEvaluation ev = evaluate(g, {0.2, 0.3});
  Rng rng(5);
  SampleBatch batch = sample_batch(g, ev, {0.2, 0.3}, 200, rng);
  Vec ga, gb;
  double a = saa_value_and_gradient(g, batch, {0.2, 0.3}, &ga);
  double b = saa_value_and_gradient(g, batch, {0.2, 0.3}, &gb);
  CHECK(a == b);
  CHECK(ga == gb);
}

TEST_CASE("SAA on a single-path instance reduces to the exact objective") {
  ValidatedInstance g = chain3();
  FlowEvaluation ev = evaluate(g, {0.5});
  Rng rng(6);
  SampleBatch batch = sample_batch(g, ev, {0.5}, 16, rng);
  for (double xv : {0.0, 0.3, 0.9}) {
    Vec grad;
    double v = saa_value_and_gradient(g, batch, {xv}, &grad);
    CHECK(v == doctest::Approx(xv).epsilon(1e-12));  // F = r(x) = x on the unique path
    CHECK(grad[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("baseline solve on fixtures") {
  SolveOptions opts;
  opts.restarts = 4;
  opts.baseline_iters = 40;
  opts.seed = 3;
  SUBCASE("chain3 matches the gradient solver") {
    ValidatedInstance g = chain3();
    SolveReport rep = solve(Method::BASELINE, g, opts);
    CHECK(rep.objective == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("diamond gets close to the optimum and never beats it structurally") {
    ValidatedInstance g = diamond();
    SolveReport rep = solve(Method::BASELINE, g, opts);
    CHECK(rep.objective >= 0.45);
    CHECK(rep.objective <= 0.5 + 1e-6);
  }
}
