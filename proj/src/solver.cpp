#include "tpsqr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tpsqr/errors.hpp"

namespace tpsqr {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using InnerIt = SpMat::InnerIterator;

double clamp_eta(double eta) { return std::clamp(eta, -kEtaClamp, kEtaClamp); }

// Values within a relative 1e-12 of the threshold snap to zero so a
// column whose score equals lambda exactly stays inactive despite rounding.
double soft_threshold(double z, double gamma)
{
  if (std::abs(z) <= gamma * (1.0 + 1e-12)) return 0.0;
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

Eigen::VectorXd linear_predictor(const DesignProblem& problem, const Coefficients& coef)
{
  Eigen::VectorXd eta = problem.offset;
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    eta(r) += coef.intercepts(problem.group[static_cast<std::size_t>(r)]);
  }
  for (Eigen::Index c = 0; c < problem.cols(); ++c) {
    const double wc = coef.weights(c);
    if (wc == 0.0) continue;
    for (InnerIt it(problem.x, c); it; ++it) eta(it.row()) += it.value() * wc;
  }
  return eta;
}

double smooth_value(const Eigen::VectorXd& eta, const Eigen::VectorXd& y)
{
  double total = 0.0;
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    const double c = clamp_eta(eta(r));
    total += -c * y(r) + std::exp(c);
  }
  return total / static_cast<double>(eta.size());
}

void check_problem(const DesignProblem& problem)
{
  const auto m = problem.rows();
  if (m == 0) throw ValidationError("fit: empty design");
  if (problem.y.size() != m || problem.offset.size() != m ||
      problem.group.size() != static_cast<std::size_t>(m)) {
    throw ValidationError("fit: design row dimensions disagree");
  }
  if (!problem.y.allFinite() || !problem.offset.allFinite()) {
    throw ValidationError("fit: non-finite responses or offsets");
  }
  for (int g : problem.group) {
    if (g < 0 || g >= problem.n_groups()) throw ValidationError("fit: row group out of range");
  }
}

/// Working state of one penalized fit.
class ProximalNewton {
 public:
  ProximalNewton(const DesignProblem& problem, const FitConfig& config)
      : problem_(problem), config_(config), m_(problem.rows()), n_cols_(problem.cols()),
        n_groups_(problem.n_groups()), group_rows_(static_cast<std::size_t>(n_groups_)),
        group_sum_y_(Eigen::VectorXd::Zero(n_groups_))
  {
    for (Eigen::Index r = 0; r < m_; ++r) {
      const int g = problem.group[static_cast<std::size_t>(r)];
      group_rows_[static_cast<std::size_t>(g)].push_back(r);
      group_sum_y_(g) += problem.y(r);
    }
    col_hess_.resize(n_cols_);
  }

  FitResult run(const std::optional<Coefficients>& warm_start)
  {
    Coefficients coef;
    if (warm_start) {
      if (warm_start->intercepts.size() != n_groups_ || warm_start->weights.size() != n_cols_) {
        throw ValidationError("fit: warm start dimensions do not match the design");
      }
      coef = *warm_start;
    } else {
      coef.intercepts = Eigen::VectorXd::Zero(n_groups_);
      coef.weights = Eigen::VectorXd::Zero(n_cols_);
    }

    Eigen::VectorXd eta = linear_predictor(problem_, coef);
    profile_intercepts(coef, eta);
    double obj = penalized(eta, coef.weights);

    FitResult result;
    result.lambda = config_.lambda;
    for (int it = 1; it <= config_.max_outer; ++it) {
      result.iterations = it;
      const Coefficients before = coef;
      const double obj_before = obj;

      if (!newton_step(coef, eta, obj)) {
        result.converged = true;
        break;
      }
      eta = linear_predictor(problem_, coef);
      profile_intercepts(coef, eta);
      obj = penalized(eta, coef.weights);
      result.trace.push_back(obj);

      const bool small_obj_change =
          std::abs(obj_before - obj) < config_.tol * std::max(1.0, std::abs(obj));
      if (small_obj_change && max_change(before, coef) < config_.tol) {
        result.converged = true;
        break;
      }
    }

    finish(result, coef, eta);
    return result;
  }

 private:
  double penalized(const Eigen::VectorXd& eta, const Eigen::VectorXd& w) const
  {
    return smooth_value(eta, problem_.y) + config_.lambda * w.lpNorm<1>();
  }

  bool degenerate(int g) const { return group_sum_y_(g) <= 0.0; }

  // Exact intercept minimizer for the current weights. Groups without any
  // positive response are pushed to the lower clamp.
  void profile_intercepts(Coefficients& coef, Eigen::VectorXd& eta) const
  {
    for (int g = 0; g < n_groups_; ++g) {
      const auto& rows = group_rows_[static_cast<std::size_t>(g)];
      if (rows.empty()) continue;
      const double a_old = coef.intercepts(g);
      double shift = -std::numeric_limits<double>::infinity();
      for (auto r : rows) shift = std::max(shift, eta(r) - a_old);
      double a_new;
      if (degenerate(g)) {
        a_new = -kEtaClamp - shift;
      } else {
        double s = 0.0;
        for (auto r : rows) s += std::exp(eta(r) - a_old - shift);
        a_new = std::log(group_sum_y_(g)) - shift - std::log(s);
      }
      coef.intercepts(g) = a_new;
      for (auto r : rows) eta(r) += a_new - a_old;
    }
  }

  double max_change(const Coefficients& a, const Coefficients& b) const
  {
    double worst = 0.0;
    for (int g = 0; g < n_groups_; ++g) {
      if (degenerate(g) || group_rows_[static_cast<std::size_t>(g)].empty()) continue;
      worst = std::max(worst, std::abs(a.intercepts(g) - b.intercepts(g)) /
                                  (1.0 + std::abs(b.intercepts(g))));
    }
    for (Eigen::Index c = 0; c < n_cols_; ++c) {
      worst = std::max(worst, std::abs(a.weights(c) - b.weights(c)) / (1.0 + std::abs(b.weights(c))));
    }
    return worst;
  }

  // One proximal Newton step. Returns false when the model step is
  // numerically zero (the current point is optimal).
  bool newton_step(Coefficients& coef, Eigen::VectorXd& eta, double obj)
  {
    const double inv_m = 1.0 / static_cast<double>(m_);
    Eigen::VectorXd weight(m_);
    Eigen::VectorXd grad_eta(m_);
    Eigen::VectorXd res(m_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      // rows of all-zero groups sit at the clamp and carry no curvature
      if (degenerate(problem_.group[static_cast<std::size_t>(r)])) {
        weight(r) = 0.0;
        grad_eta(r) = 0.0;
        res(r) = 0.0;
        continue;
      }
      const double mu = std::exp(clamp_eta(eta(r)));
      weight(r) = mu * inv_m;
      grad_eta(r) = (mu - problem_.y(r)) * inv_m;
      res(r) = (problem_.y(r) - mu) / mu;
    }
    const Eigen::VectorXd res0 = res;

    for (Eigen::Index c = 0; c < n_cols_; ++c) {
      double h = 0.0;
      for (InnerIt it(problem_.x, c); it; ++it) h += weight(it.row()) * it.value() * it.value();
      col_hess_(c) = h;
    }

    Coefficients trial = coef;
    const double thresh = 0.01 * config_.tol * config_.tol;
    std::vector<Eigen::Index> active;

    auto update_intercepts = [&]() {
      double worst = 0.0;
      for (int g = 0; g < n_groups_; ++g) {
        if (degenerate(g)) continue;
        const auto& rows = group_rows_[static_cast<std::size_t>(g)];
        double h = 0.0;
        double num = 0.0;
        for (auto r : rows) {
          h += weight(r);
          num += weight(r) * res(r);
        }
        if (h <= 0.0) continue;
        const double delta = num / h;
        if (delta == 0.0) continue;
        trial.intercepts(g) += delta;
        for (auto r : rows) res(r) -= delta;
        worst = std::max(worst, h * delta * delta);
      }
      return worst;
    };

    auto update_column = [&](Eigen::Index c) {
      const double h = col_hess_(c);
      const double w_old = trial.weights(c);
      if (h <= 0.0) {
        trial.weights(c) = 0.0;
        return 0.0;
      }
      double g = 0.0;
      for (InnerIt it(problem_.x, c); it; ++it) g += weight(it.row()) * it.value() * res(it.row());
      const double w_new = soft_threshold(g + h * w_old, config_.lambda) / h;
      const double delta = w_new - w_old;
      if (delta == 0.0) return 0.0;
      trial.weights(c) = w_new;
      for (InnerIt it(problem_.x, c); it; ++it) res(it.row()) -= it.value() * delta;
      return h * delta * delta;
    };

    int sweeps = 0;
    while (sweeps < config_.max_inner) {
      double worst = update_intercepts();
      for (Eigen::Index c = 0; c < n_cols_; ++c) worst = std::max(worst, update_column(c));
      ++sweeps;
      if (worst < thresh) break;

      active.clear();
      for (Eigen::Index c = 0; c < n_cols_; ++c) {
        if (trial.weights(c) != 0.0) active.push_back(c);
      }
      while (sweeps < config_.max_inner) {
        double w_active = update_intercepts();
        for (auto c : active) w_active = std::max(w_active, update_column(c));
        ++sweeps;
        if (w_active < thresh) break;
      }
    }

    // direction in predictor space and predicted decrease
    const Eigen::VectorXd d_eta = res0 - res;
    const Eigen::VectorXd d_int = trial.intercepts - coef.intercepts;
    const Eigen::VectorXd d_w = trial.weights - coef.weights;
    const double l1_old = coef.weights.lpNorm<1>();
    const double decrease = grad_eta.dot(d_eta) + config_.lambda * (trial.weights.lpNorm<1>() - l1_old);

    double step_size = 0.0;
    for (Eigen::Index c = 0; c < n_cols_; ++c) {
      step_size = std::max(step_size, std::abs(d_w(c)) / (1.0 + std::abs(coef.weights(c))));
    }
    for (int g = 0; g < n_groups_; ++g) {
      if (degenerate(g)) continue;
      step_size = std::max(step_size, std::abs(d_int(g)) / (1.0 + std::abs(coef.intercepts(g))));
    }
    if (step_size == 0.0) return false;

    constexpr double sigma = 1e-4;
    const double negligible = 1e-13 * (1.0 + std::abs(obj));
    double t = 1.0;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Eigen::VectorXd eta_t = eta + t * d_eta;
      const Eigen::VectorXd w_t = coef.weights + t * d_w;
      const double obj_t = penalized(eta_t, w_t);
      const bool armijo = obj_t <= obj + sigma * t * decrease;
      const bool flat = obj_t <= obj && std::abs(decrease) <= negligible;
      if (armijo || flat) {
        if (t == 1.0) {
          coef = trial;
        } else {
          coef.intercepts += t * d_int;
          coef.weights = w_t;
        }
        eta = eta_t;
        return true;
      }
      if (t * step_size < 0.1 * config_.tol) break;
    }
    if (step_size < config_.tol || std::abs(decrease) <= negligible) return false;

    std::ostringstream os;
    os << "fit: line search failed at lambda=" << config_.lambda << " (predicted decrease "
       << decrease << ", step " << step_size << ")";
    throw NumericalError(os.str());
  }

  void finish(FitResult& result, const Coefficients& coef, const Eigen::VectorXd& eta) const
  {
    result.coef = coef;
    result.objective = smooth_value(eta, problem_.y);
    result.loglik = -static_cast<double>(m_) * result.objective;
    result.penalized = result.objective + config_.lambda * coef.weights.lpNorm<1>();
    result.kkt_residual = kkt_residual(problem_, coef, config_.lambda);
    for (Eigen::Index c = 0; c < n_cols_; ++c) {
      if (coef.weights(c) != 0.0) result.active_set.push_back(c);
    }
    result.free_intercepts = 0;
    for (const auto& rows : group_rows_) result.free_intercepts += rows.empty() ? 0 : 1;
  }

  const DesignProblem& problem_;
  const FitConfig& config_;
  Eigen::Index m_;
  Eigen::Index n_cols_;
  int n_groups_;
  std::vector<std::vector<Eigen::Index>> group_rows_;
  Eigen::VectorXd group_sum_y_;
  Eigen::VectorXd col_hess_;
};

}  // namespace

void FitConfig::validate() const
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("fit: lambda must be finite and nonnegative");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("fit: tol must be positive");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("fit: iteration caps must be >= 1");
  if (penalize_intercepts) throw std::invalid_argument("fit: intercepts are never penalized");
}

ObjectiveGradient objective_and_gradient(const DesignProblem& problem, const Coefficients& coef)
{
  check_problem(problem);
  if (coef.intercepts.size() != problem.n_groups() || coef.weights.size() != problem.cols()) {
    throw ValidationError("objective: coefficient dimensions do not match the design");
  }
  const Eigen::VectorXd eta = linear_predictor(problem, coef);
  const auto m = problem.rows();
  const double inv_m = 1.0 / static_cast<double>(m);

  Eigen::VectorXd d_eta(m);
  for (Eigen::Index r = 0; r < m; ++r) d_eta(r) = (std::exp(clamp_eta(eta(r))) - problem.y(r)) * inv_m;

  ObjectiveGradient out;
  out.value = smooth_value(eta, problem.y);
  out.intercepts = Eigen::VectorXd::Zero(problem.n_groups());
  for (Eigen::Index r = 0; r < m; ++r) out.intercepts(problem.group[static_cast<std::size_t>(r)]) += d_eta(r);
  out.weights = problem.x.transpose() * d_eta;
  return out;
}

double kkt_residual(const DesignProblem& problem, const Coefficients& coef, double lambda)
{
  const auto grad = objective_and_gradient(problem, coef);
  double worst = grad.intercepts.size() > 0 ? grad.intercepts.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index c = 0; c < grad.weights.size(); ++c) {
    const double w = coef.weights(c);
    const double g = grad.weights(c);
    const double v = w != 0.0 ? std::abs(g + lambda * (w > 0.0 ? 1.0 : -1.0))
                              : std::max(0.0, std::abs(g) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

FitResult fit(const DesignProblem& problem, const FitConfig& config,
              const std::optional<Coefficients>& warm_start)
{
  config.validate();
  check_problem(problem);
  ProximalNewton solver(problem, config);
  return solver.run(warm_start);
}

PathResult fit_path(const DesignProblem& problem, int n_lambdas, double lambda_min_ratio,
                    const FitConfig& config)
{
  if (n_lambdas < 2) throw std::invalid_argument("fit_path: n_lambdas must be >= 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) {
    throw std::invalid_argument("fit_path: lambda_min_ratio must lie in (0, 1)");
  }
  PathResult path;
  const double top = lambda_max(problem);
  if (top == 0.0) {
    path.lambdas = {0.0};
  } else {
    for (int k = 0; k < n_lambdas; ++k) {
      const double frac = static_cast<double>(k) / static_cast<double>(n_lambdas - 1);
      path.lambdas.push_back(top * std::pow(lambda_min_ratio, frac));
    }
  }

  std::optional<Coefficients> warm;
  for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
    FitConfig cfg = config;
    cfg.lambda = path.lambdas[k];
    try {
      path.fits.push_back(fit(problem, cfg, warm));
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "path point " << k << " (lambda=" << cfg.lambda << "): " << e.what();
      throw NumericalError(os.str());
    }
    warm = path.fits.back().coef;
    path.aic.push_back(path.fits.back().aic());
  }
  return path;
}

std::size_t select_aic_index(const PathResult& path)
{
  if (path.fits.empty()) throw std::invalid_argument("select_aic: empty path");
  std::size_t best = 0;
  for (std::size_t k = 1; k < path.fits.size(); ++k) {
    if (path.fits[k].aic() < path.fits[best].aic()) best = k;
  }
  return best;
}

FitResult select_aic(const PathResult& path) { return path.fits[select_aic_index(path)]; }

Template to_template(const DesignProblem& problem, const FitResult& fit)
{
  if (problem.layout != ColumnLayout::temporal_pairs) {
    throw std::invalid_argument("to_template: design is not in the temporal pair layout");
  }
  Template tmpl(problem.p, problem.L);
  tmpl.w = fit.coef.weights;
  if (!problem.fixed_effects) tmpl.omega = fit.coef.intercepts;
  return tmpl;
}

Eigen::MatrixXd to_symmetric_theta(const DesignProblem& problem, const FitResult& fit)
{
  if (problem.layout != ColumnLayout::symmetric_edges) {
    throw std::invalid_argument("to_symmetric_theta: design is not in the edge layout");
  }
  const int p = problem.p;
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) theta(j, j) = fit.coef.intercepts(j);
  for (Eigen::Index c = 0; c < problem.cols(); ++c) {
    const auto [j, k] = edge_from_index(c, p);
    theta(j, k) = fit.coef.weights(c);
    theta(k, j) = fit.coef.weights(c);
  }
  return theta;
}

}  // namespace tpsqr
