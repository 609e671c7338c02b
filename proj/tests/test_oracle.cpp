#include <doctest.h>

#include <cmath>
#include <limits>

#include "interdict/solve.hpp"
#include "support.hpp"

using namespace interdict;
using namespace testsupport;

TEST_CASE("path enumeration counts") {
  CHECK(oracle::enumerate_paths(diamond()).paths.size() == 2);
  CHECK(oracle::enumerate_paths(chain3()).paths.size() == 1);
  CHECK(oracle::enumerate_paths(complete_dag(5)).paths.size() == 8);  // 2^(n-2)
}

TEST_CASE("path enumeration respects the cap") {
  CHECK_THROWS_WITH_AS(oracle::enumerate_paths(complete_dag(16), 1000),
                       doctest::Contains("PathExplosion"), Error);
}

TEST_CASE("enumerated paths are valid and deterministic") {
  ValidatedInstance g = complete_dag(6);
  oracle::PathSet a = oracle::enumerate_paths(g);
  oracle::PathSet b = oracle::enumerate_paths(g);
  CHECK(a.paths == b.paths);
  for (const auto& tau : a.paths) {
    CHECK(tau.front() == g.origin());
    CHECK(tau.back() == g.destination());
    for (size_t i = 0; i + 1 < tau.size(); ++i) {
      bool arc = false;
      for (NodeId v : g.succ[tau[i]]) arc |= v == tau[i + 1];
      CHECK(arc);
    }
  }
}

TEST_CASE("brute evaluation on the diamond") {
  ValidatedInstance g = diamond();
  oracle::PathSet ps = oracle::enumerate_paths(g);
  SUBCASE("one side covered") {
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, {1.0, 0.0}, ps);
    double p1 = std::exp(-1.0) / (1.0 + std::exp(-1.0));
    double total = ev.path_prob[0] + ev.path_prob[1];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ev.crossing[1] == doctest::Approx(p1).epsilon(1e-12));
    CHECK(ev.best_utility == doctest::Approx(0.0));
    CHECK(ev.best_count == 1);
    CHECK(ev.gap_alpha == doctest::Approx(1.0));
  }
  SUBCASE("tie at the uncovered point") {
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, {0.0, 0.0}, ps);
    CHECK(ev.best_count == 2);
    CHECK(std::isinf(ev.gap_alpha));
  }
}

TEST_CASE("oracle probabilities sum to one exactly") {
  for (const auto& g : enumerable_instances(5, 6, 12, 500)) {
    oracle::PathSet ps = oracle::enumerate_paths(g, 500);
    Vec x = project_feasible(g, Vec(g.num_vars(), 0.15));
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, x, ps);
    double total = 0.0;
    for (double p : ev.path_prob) total += p;
    CHECK(std::fabs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("beta conventions on fixtures") {
  SUBCASE("chain4: Delta empty, Delta+ nonempty") {
    ValidatedInstance g = chain4();
    oracle::PathSet ps = oracle::enumerate_paths(g);
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, {0.2, 0.2}, ps);
    CHECK(std::isinf(ev.beta1));
    CHECK(std::isinf(ev.beta2));
    CHECK_FALSE(ev.restricted_defined);
  }
  SUBCASE("diamond: both zero") {
    ValidatedInstance g = diamond();
    oracle::PathSet ps = oracle::enumerate_paths(g);
    oracle::OracleEvaluation ev = oracle::brute_evaluate(g, {0.2, 0.2}, ps);
    CHECK(ev.beta1 == 0.0);
    CHECK(ev.beta2 == 0.0);
  }
  SUBCASE("nonnegative and finite when every touched Delta is nonempty") {
    for (const auto& g : enumerable_instances(5, 6, 10, 400)) {
      oracle::PathSet ps = oracle::enumerate_paths(g, 400);
      Vec x = project_feasible(g, Vec(g.num_vars(), 0.1));
      oracle::OracleEvaluation ev = oracle::brute_evaluate(g, x, ps);
      bool all_backed = true;
      for (int j = 0; j < g.num_vars(); ++j)
        if (ev.log_mass_delta_plus[j] > -std::numeric_limits<double>::infinity() &&
            ev.log_mass_delta[j] == -std::numeric_limits<double>::infinity())
          all_backed = false;
      if (all_backed && ev.restricted_defined) {
        CHECK(ev.beta1 >= 0.0);
        CHECK(std::isfinite(ev.beta1));
        CHECK(ev.beta2 >= 0.0);
        CHECK(std::isfinite(ev.beta2));
      }
    }
  }
}

TEST_CASE("finite differences on a bilinear function") {
  auto f = [](const Vec& x) { return x[0] * x[1]; };
  Vec fd = oracle::finite_diff_gradient(f, {0.3, 0.4}, 1e-5, 0.0, 1.0);
  CHECK(std::fabs(fd[0] - 0.4) < 1e-9);
  CHECK(std::fabs(fd[1] - 0.3) < 1e-9);
}

TEST_CASE("finite differences fall back to one-sided at the boundary") {
  auto f = [](const Vec& x) { return x[0] * x[0]; };
  Vec fd = oracle::finite_diff_gradient(f, {0.0}, 1e-5, 0.0, 1.0);
  CHECK(std::fabs(fd[0]) < 2e-5);  // forward difference of x^2 at 0
  CHECK_THROWS_WITH_AS(oracle::finite_diff_gradient(f, {0.0}, 1e-5, 0.0, 1e-6),
                       doctest::Contains("StepTooLarge"), Error);
}

TEST_CASE("grid search on fixtures") {
  SUBCASE("diamond optimum is the symmetric split") {
    ValidatedInstance g = diamond();
    oracle::PathSet ps = oracle::enumerate_paths(g);
    auto fl = [&](const Vec& x) { return oracle::brute_evaluate(g, x, ps).defender_value; };
    oracle::GridResult best = oracle::grid_search(g, 101, fl, true);
    CHECK(best.x[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(best.x[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(best.value == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("chain3 maximizes the reward at the cap") {
    ValidatedInstance g = chain3();
    auto fl = [&](const Vec& x) { return evaluate(g, x).defender_value; };
    oracle::GridResult best = oracle::grid_search(g, 101, fl, true);
    CHECK(best.x[0] == doctest::Approx(1.0));
    CHECK(best.value == doctest::Approx(1.0));
  }
  SUBCASE("zero-sum diamond") {
    ValidatedInstance g = diamond();
    auto gam = [&](const Vec& x) { return evaluate(g, x).log_partition; };
    oracle::GridResult best = oracle::grid_search(g, 101, gam, false);
    CHECK(best.value == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-9));
  }
  SUBCASE("dimension cap") {
    ValidatedInstance g = complete_dag(8, {1, 2, 3, 4});
    CHECK_THROWS_WITH_AS(oracle::grid_search(g, 11, [](const Vec&) { return 0.0; }, true),
                         doctest::Contains("TooManyCriticalNodes"), Error);
  }
}

TEST_CASE("refined grid tightens the incumbent") {
  ValidatedInstance g = diamond();
  auto gam = [&](const Vec& x) { return evaluate(g, x).log_partition; };
  oracle::GridResult coarse = oracle::grid_search(g, 11, gam, false);
  oracle::GridResult fine = oracle::grid_search_refined(g, 11, gam, false, 3);
  CHECK(fine.value <= coarse.value + 1e-15);
  CHECK(fine.value == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-6));
}

TEST_CASE("adversary loss concentrates on the best path") {
  for (const auto& g : enumerable_instances(8, 6, 11, 500)) {
    oracle::PathSet ps = oracle::enumerate_paths(g, 500);
    Vec x = project_feasible(g, Vec(g.num_vars(), 0.2));
    double prev = std::numeric_limits<double>::infinity();
    bool unique_best = true;
    for (double mu : {2.0, 1.0, 0.5, 0.1, 0.05}) {
      ValidatedInstance gm = with_mu(g, mu);
      FlowEvaluation ev = evaluate(gm, x);
      oracle::OracleEvaluation ov = oracle::brute_evaluate(gm, x, ps);
      double lhs = std::fabs(ev.adversary_value - ov.best_utility);
      double rest = static_cast<double>(ps.paths.size() - ov.best_count);
      double rhs = rest == 0 ? 0.0
                             : (ov.max_abs_utility + 1.0) /
                                   (1.0 + ov.best_count / rest * std::exp(ov.gap_alpha / mu));
      double noise = 1e-12 * (1.0 + ov.max_abs_utility);
      CHECK(lhs <= rhs + noise);
      unique_best &= ov.best_count == 1;
      CHECK(lhs <= prev + noise);
      prev = lhs;
    }
    (void)unique_best;
  }
}

TEST_CASE("log-partition tracks the best path utility") {
  for (const auto& g : enumerable_instances(6, 6, 11, 500)) {
    oracle::PathSet ps = oracle::enumerate_paths(g, 500);
    Rng rng(55);
    for (int t = 0; t < 5; ++t) {
      Vec x = project_feasible(g, interior_point(g, rng));
      for (double mu : {2.0, 1.0, 0.5}) {
        ValidatedInstance gm = with_mu(g, mu);
        oracle::OracleEvaluation ov = oracle::brute_evaluate(gm, x, ps);
        double lhs = std::fabs(ov.log_partition - ov.best_utility);
        double rest = static_cast<double>(ps.paths.size() - ov.best_count);
        double rhs = mu * std::log(ov.best_count + rest * std::exp(-ov.gap_alpha / mu));
        CHECK(lhs <= rhs + 1e-12 * (1.0 + ov.max_abs_utility));
      }
    }
  }
}
