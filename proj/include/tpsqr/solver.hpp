#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tpsqr/design.hpp"
#include "tpsqr/template.hpp"

namespace tpsqr {

/// Linear predictors are clamped to [-kEtaClamp, kEtaClamp] before exp().
inline constexpr double kEtaClamp = 30.0;

struct FitConfig {
  double lambda = 0.0;  ///< l1 weight on the column coefficients
  double tol = 1e-7;
  int max_outer = 100;   ///< proximal Newton (IRLS) iterations
  int max_inner = 1000;  ///< coordinate sweeps per IRLS step
  bool penalize_intercepts = false;

  void validate() const;
};

struct Coefficients {
  Eigen::VectorXd intercepts;  ///< one per intercept group
  Eigen::VectorXd weights;     ///< one per design column
};

struct FitResult {
  double lambda = 0.0;
  Coefficients coef;
  double objective = 0.0;  ///< smooth part F: mean Poisson negative log-likelihood (no log y! term)
  double loglik = 0.0;     ///< -M * F
  double penalized = 0.0;  ///< F + lambda * |w|_1
  double kkt_residual = 0.0;
  std::vector<Eigen::Index> active_set;
  int free_intercepts = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< penalized objective after each accepted step

  int n_parameters() const { return static_cast<int>(active_set.size()) + free_intercepts; }
  double aic() const { return 2.0 * n_parameters() - 2.0 * loglik; }
};

struct PathResult {
  std::vector<double> lambdas;  ///< strictly decreasing
  std::vector<FitResult> fits;
  std::vector<double> aic;
};

struct ObjectiveGradient {
  double value = 0.0;
  Eigen::VectorXd intercepts;  ///< dF / d intercept_g
  Eigen::VectorXd weights;     ///< dF / d w_c
};

/**
 * F = (1/M) sum_r [ -eta_r y_r + exp(eta_r) ] and its gradient, where
 * eta_r = intercept_{group(r)} + offset_r + x_r . w. Outside the clamp both
 * value and gradient are evaluated at the clamped predictor.
 */
ObjectiveGradient objective_and_gradient(const DesignProblem& problem, const Coefficients& coef);

/**
 * Largest violation of the lasso optimality conditions:
 * |grad| for intercepts, |grad_c + lambda sign(w_c)| for nonzero weights and
 * max(0, |grad_c| - lambda) for zero weights.
 */
double kkt_residual(const DesignProblem& problem, const Coefficients& coef, double lambda);

/**
 * Minimizes F + lambda |w|_1 by proximal Newton: each outer step forms the
 * IRLS quadratic model and solves it by cyclic soft-threshold coordinate
 * descent, followed by a backtracking line search and a closed-form
 * re-profiling of every intercept group.
 *
 * Throws NumericalError if the line search cannot make progress.
 */
FitResult fit(const DesignProblem& problem, const FitConfig& config,
              const std::optional<Coefficients>& warm_start = std::nullopt);

/// Log-spaced lambdas from lambda_max down to lambda_max * lambda_min_ratio, warm-started.
PathResult fit_path(const DesignProblem& problem, int n_lambdas, double lambda_min_ratio,
                    const FitConfig& config);

/// Index of the minimal-AIC fit; ties go to the larger lambda.
std::size_t select_aic_index(const PathResult& path);
FitResult select_aic(const PathResult& path);

/// Temporal layout: intercepts become omega (zero under fixed effects), weights become w.
Template to_template(const DesignProblem& problem, const FitResult& fit);

/// Edge layout: p x p symmetric matrix, diagonal = node intercepts.
Eigen::MatrixXd to_symmetric_theta(const DesignProblem& problem, const FitResult& fit);

}  // namespace tpsqr
