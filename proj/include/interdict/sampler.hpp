#pragma once

#include "interdict/flow.hpp"
#include "interdict/rng.hpp"

namespace interdict {

struct SolveOptions;
struct SolveReport;

struct SampleBatch {
  std::vector<std::vector<NodeId>> paths;
  Vec log_weight;  // U(tau; x)/mu per sampled path, at the sampling x
  std::uint64_t seed = 0;
};

/// Per-node successor-choice distribution, cumulative form for sampling.
struct PolicyTable {
  std::vector<Vec> cum;
  static PolicyTable build(const ValidatedInstance& g, const FlowEvaluation& ev);
};

/// One Markovian walk origin -> destination under the adversary policy
/// pi(s'|s) proportional to Z_{s'}. Deterministic given the rng state.
std::vector<NodeId> sample_path(const ValidatedInstance& g, const PolicyTable& pol, Rng& rng);

SampleBatch sample_batch(const ValidatedInstance& g, const FlowEvaluation& ev, const Vec& x, int n,
                         Rng& rng);

/// Sample-average value and analytic gradient of the fractional objective
/// restricted to the batch (weights renormalized within the sample).
double saa_value_and_gradient(const ValidatedInstance& g, const SampleBatch& batch, const Vec& x,
                              Vec* grad);

/// The sampling baseline: per iteration draw a fresh batch at the current x,
/// take one backtracking projected-gradient step on the batch objective;
/// multi-start and return the restart with the best exact F^l.
SolveReport baseline_solve(const ValidatedInstance& g, const SolveOptions& opts);

}  // namespace interdict
