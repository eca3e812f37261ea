#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tpsqr/design.hpp"
#include "tpsqr/event_data.hpp"
#include "tpsqr/psqr_oracle.hpp"
#include "tpsqr/solver.hpp"
#include "tpsqr/template.hpp"

namespace tpsqr {

/// score(k, k') = mean over lag windows of w_{k,k',l}; row-major p x p, 1-based accessors.
struct PairScoreTable {
  int p = 0;
  Eigen::MatrixXd scores;

  double score(int k, int k2) const { return scores(k - 1, k2 - 1); }
};

PairScoreTable score_pairs(const Template& tmpl);

/**
 * Area under the ROC curve in the Mann-Whitney form: the fraction of
 * (positive, negative) pairs where the positive scores higher, ties
 * counting one half. Throws ValidationError when a class is missing.
 */
double auc(std::span<const double> scores, const std::vector<bool>& labels);

using Edge = std::pair<int, int>;  // 0-based, first < second
using EdgeSet = std::set<Edge>;

/// Nonzero off-diagonal support of a symmetric matrix.
EdgeSet support(const Eigen::MatrixXd& theta);

struct EdgeRecoveryReport {
  EdgeSet true_edges;
  EdgeSet recovered_edges;
  double precision = 1.0;  ///< 1 when nothing is recovered
  double recall = 1.0;     ///< 1 when there is nothing to recover
  double f1 = 1.0;
  bool exact_structure_match = true;
};

EdgeRecoveryReport edge_recovery(const EdgeSet& truth, const EdgeSet& recovered);

struct SparsistencyConfig {
  int p = 8;
  int edge_count = 8;
  std::vector<int> sample_sizes{250, 1000, 4000};
  int trials = 20;
  std::uint64_t seed = 0;
  int burn_in = 500;
  int thin = 2;
  TruncationConfig trunc;
  int n_lambdas = 50;
  double lambda_min_ratio = 1e-3;
  FitConfig fit;
  int workers = 1;
};

struct SparsistencyTrial {
  int n = 0;
  int trial = 0;
  double selected_lambda = 0.0;
  EdgeRecoveryReport report;
};

struct Quantiles {
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

/// Linear-interpolation quantiles of a nonempty sample.
Quantiles quantiles(std::vector<double> values);

struct SparsistencySummary {
  int n = 0;
  Quantiles precision;
  Quantiles recall;
  Quantiles f1;
  double exact_match_rate = 0.0;
  double empty_recovery_rate = 0.0;
};

struct SparsistencyResult {
  std::vector<SparsistencyTrial> trials;  // ordered by n, then trial
  std::vector<SparsistencySummary> per_n;
};

/**
 * For each sample size and trial: draw a ground-truth model, Gibbs-sample
 * n vectors, fit the graph-case pseudo-likelihood path, select by AIC and
 * score the recovered support. The model depends only on (seed, trial), so
 * the same truths are reused across sample sizes.
 */
SparsistencyResult sparsistency_experiment(const SparsistencyConfig& config);

/// Deterministic child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/**
 * Synthetic longitudinal drug/condition data with planted excitatory
 * drug -> condition pairs.
 *
 * Types 1..n_drugs are drugs, the next n_conditions are conditions; the
 * candidate pairs are all drug -> condition pairs. Each subject has an
 * observation window of uniform length and a Gamma frailty u (mean 1) that
 * scales both drug prescribing (by sqrt(u)) and baseline condition rates
 * (by u). Drug episodes are Poisson in time, each a run of refills spaced
 * refill_gap apart. Condition episodes arise at a baseline rate, and every
 * fill of a planted drug adds Poisson(excess_mean) episodes of its
 * condition uniformly within risk_window after the fill. Condition episodes
 * repeat as short runs.
 */
struct LedBenchmarkConfig {
  int n_subjects = 1500;
  int n_drugs = 10;
  int n_conditions = 5;
  int n_planted = 5;
  double min_length = 1200.0;
  double max_length = 3000.0;
  double drug_episode_rate = 1.0 / 1200.0;
  double refill_mean = 1.5;
  double refill_gap = 30.0;
  double condition_rate = 1.0 / 1500.0;
  double condition_repeat_mean = 0.5;
  double repeat_gap = 15.0;
  double excess_mean = 0.5;
  double risk_window = 300.0;
  double frailty_shape = 2.0;
  std::uint64_t seed = 0;
};

struct CandidatePair {
  int drug = 0;       // 1-based event type
  int condition = 0;  // 1-based event type
  bool planted = false;
};

struct LedBenchmark {
  int p = 0;
  std::vector<EventRecord> events;
  std::vector<CandidatePair> candidates;
};

LedBenchmark generate_led_benchmark(const LedBenchmarkConfig& config);

/// Settings of the temporal pipeline used for pair scoring.
struct PipelineConfig {
  std::vector<double> thresholds{0.0, 250.0, 750.0, 1500.0};
  AggregateOptions aggregate{175.0, 1000.0};
  DesignOptions design{DiscountConfig::adr_preset(), true, true};
  int n_lambdas = 50;
  double lambda_min_ratio = 1e-3;
  FitConfig fit;
};

struct PairEvaluation {
  PathResult path;
  std::size_t selected = 0;
  Template tmpl;
  std::vector<double> candidate_scores;
  double auc = 0.0;
};

/// aggregate -> design -> path -> AIC -> score candidate pairs -> AUC.
PairEvaluation evaluate_candidate_pairs(std::span<const EventRecord> events, int p,
                                        std::span<const CandidatePair> candidates,
                                        const PipelineConfig& config);

}  // namespace tpsqr
