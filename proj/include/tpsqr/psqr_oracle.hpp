#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace tpsqr {

/**
 * Support truncation for exact PSQR computations. Each coordinate ranges
 * over {0..x_max}; results whose boundary mass reaches tail_tol are rejected.
 */
struct TruncationConfig {
  int x_max = 30;
  double tail_tol = 1e-10;

  void validate() const;
};

/// Largest state space log_partition will enumerate.
inline constexpr double kMaxEnumeratedStates = 1e7;

/**
 * Poisson square root graphical model over p counts:
 * log P(x) = sum_j theta_jj sqrt(x_j) + sum_{j<k} theta_jk sqrt(x_j x_k)
 *            - sum_j log(x_j!) - A(theta).
 */
class PsqrModel {
 public:
  explicit PsqrModel(Eigen::MatrixXd theta);

  int p() const { return static_cast<int>(theta_.rows()); }
  const Eigen::MatrixXd& theta() const { return theta_; }

 private:
  Eigen::MatrixXd theta_;
};

/// Unnormalized log density (everything except -A).
double log_potential(const PsqrModel& model, std::span<const int> x);

/**
 * Log-partition by enumeration of the truncated support. Throws
 * NumericalError when more than kMaxEnumeratedStates states would be needed
 * or when the outer shell (states with some x_j == x_max) carries a mass
 * fraction >= tail_tol.
 */
double log_partition(const PsqrModel& model, const TruncationConfig& trunc);

/**
 * P(x_j = v | x_{-j}) for v in {0..x_max}: proportional to
 * exp[(theta_jj + sum_{k != j} theta_jk sqrt(x_k)) sqrt(v) - log v!].
 * `x` is a full state vector; its j-th entry is ignored.
 * Throws NumericalError if P(x_j = x_max | ...) >= tail_tol.
 */
Eigen::VectorXd conditional_pmf(const PsqrModel& model, int j, std::span<const int> x,
                                const TruncationConfig& trunc);

/**
 * Largest boundary mass P(x_j = x_max | x_{-j}) over j, with every
 * positively coupled neighbour at x_max and the rest at 0. Bounds the
 * boundary mass of any conditional the sampler can meet.
 */
double worst_case_tail_mass(const PsqrModel& model, const TruncationConfig& trunc);

struct GibbsConfig {
  int n_samples = 1000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 0;
  TruncationConfig trunc;
};

/**
 * Systematic-scan Gibbs sampler started from the zero state. Returns an
 * n_samples x p matrix of counts. Throws NumericalError if the model's
 * worst-case conditional boundary mass reaches trunc.tail_tol.
 */
Eigen::MatrixXi gibbs_sample(const PsqrModel& model, const GibbsConfig& config);

/// Lag-k autocorrelation of every column (rows = lags 1..max_lag). NaN for constant columns.
Eigen::MatrixXd autocorrelation(const Eigen::MatrixXi& samples, int max_lag);

/**
 * Random sparse ground truth: `edge_count` distinct edges with magnitudes
 * uniform in [0.2, 0.5] and random signs, diagonal uniform in [-0.5, 0.5].
 * Draws are rejected until worst_case_tail_mass < 1e-12.
 */
PsqrModel random_sparse_model(int p, int edge_count, std::uint64_t seed,
                              const TruncationConfig& trunc = {});

}  // namespace tpsqr
