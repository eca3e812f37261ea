#include "tpsqr/psqr_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tpsqr/errors.hpp"

namespace tpsqr {

namespace {

// log-sum-exp accumulator
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double v)
  {
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  double value() const { return max + std::log(sum); }
};

Eigen::VectorXd conditional_log_weights(double natural, int x_max)
{
  Eigen::VectorXd lw(x_max + 1);
  for (int v = 0; v <= x_max; ++v) lw(v) = natural * std::sqrt(static_cast<double>(v)) - std::lgamma(v + 1.0);
  return lw;
}

Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& lw)
{
  const double top = lw.maxCoeff();
  Eigen::VectorXd prob = (lw.array() - top).exp();
  return prob / prob.sum();
}

double uniform01(std::mt19937_64& rng)
{
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

void TruncationConfig::validate() const
{
  if (x_max < 1) throw std::invalid_argument("truncation: x_max must be >= 1");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("truncation: tail_tol must be positive");
}

PsqrModel::PsqrModel(Eigen::MatrixXd theta) : theta_(std::move(theta))
{
  if (theta_.rows() < 1 || theta_.rows() != theta_.cols()) {
    throw ValidationError("PSQR parameter matrix must be square and nonempty");
  }
  if (!theta_.allFinite()) throw ValidationError("PSQR parameter matrix has non-finite entries");
  for (Eigen::Index j = 0; j < theta_.rows(); ++j) {
    for (Eigen::Index k = j + 1; k < theta_.cols(); ++k) {
      if (theta_(j, k) != theta_(k, j)) throw ValidationError("PSQR parameter matrix must be symmetric");
    }
  }
}

double log_potential(const PsqrModel& model, std::span<const int> x)
{
  const auto& theta = model.theta();
  const int p = model.p();
  if (static_cast<int>(x.size()) != p) throw std::invalid_argument("log_potential: state size != p");
  double v = 0.0;
  for (int j = 0; j < p; ++j) {
    const double sj = std::sqrt(static_cast<double>(x[j]));
    v += theta(j, j) * sj - std::lgamma(x[j] + 1.0);
    for (int k = j + 1; k < p; ++k) v += theta(j, k) * sj * std::sqrt(static_cast<double>(x[k]));
  }
  return v;
}

double log_partition(const PsqrModel& model, const TruncationConfig& trunc)
{
  trunc.validate();
  const int p = model.p();
  if (std::pow(trunc.x_max + 1.0, p) > kMaxEnumeratedStates) {
    std::ostringstream os;
    os << "log_partition: " << (trunc.x_max + 1) << "^" << p << " states exceed the enumeration guard";
    throw NumericalError(os.str());
  }

  LogSum all;
  LogSum shell;
  std::vector<int> x(static_cast<std::size_t>(p), 0);
  while (true) {
    const double lv = log_potential(model, x);
    all.add(lv);
    if (std::find(x.begin(), x.end(), trunc.x_max) != x.end()) shell.add(lv);

    int j = 0;
    while (j < p && x[static_cast<std::size_t>(j)] == trunc.x_max) x[static_cast<std::size_t>(j++)] = 0;
    if (j == p) break;
    ++x[static_cast<std::size_t>(j)];
  }

  const double log_z = all.value();
  const double shell_fraction = shell.sum > 0.0 ? std::exp(shell.value() - log_z) : 0.0;
  if (shell_fraction >= trunc.tail_tol) {
    std::ostringstream os;
    os << "log_partition: outer shell holds mass fraction " << shell_fraction
       << " >= " << trunc.tail_tol << "; raise x_max or weaken positive couplings";
    throw NumericalError(os.str());
  }
  return log_z;
}

Eigen::VectorXd conditional_pmf(const PsqrModel& model, int j, std::span<const int> x,
                                const TruncationConfig& trunc)
{
  trunc.validate();
  const int p = model.p();
  if (j < 0 || j >= p) throw std::out_of_range("conditional_pmf: coordinate out of range");
  if (static_cast<int>(x.size()) != p) throw std::invalid_argument("conditional_pmf: state size != p");

  const auto& theta = model.theta();
  double natural = theta(j, j);
  for (int k = 0; k < p; ++k) {
    if (k != j) natural += theta(j, k) * std::sqrt(static_cast<double>(x[static_cast<std::size_t>(k)]));
  }
  Eigen::VectorXd prob = normalize_log_weights(conditional_log_weights(natural, trunc.x_max));
  if (prob(trunc.x_max) >= trunc.tail_tol) {
    std::ostringstream os;
    os << "conditional_pmf: boundary mass " << prob(trunc.x_max) << " at x_max=" << trunc.x_max
       << " for coordinate " << j;
    throw NumericalError(os.str());
  }
  return prob;
}

double worst_case_tail_mass(const PsqrModel& model, const TruncationConfig& trunc)
{
  trunc.validate();
  const auto& theta = model.theta();
  const double root_max = std::sqrt(static_cast<double>(trunc.x_max));
  double worst = 0.0;
  for (int j = 0; j < model.p(); ++j) {
    double natural = theta(j, j);
    for (int k = 0; k < model.p(); ++k) {
      if (k != j && theta(j, k) > 0.0) natural += theta(j, k) * root_max;
    }
    const auto prob = normalize_log_weights(conditional_log_weights(natural, trunc.x_max));
    worst = std::max(worst, prob(trunc.x_max));
  }
  return worst;
}

Eigen::MatrixXi gibbs_sample(const PsqrModel& model, const GibbsConfig& config)
{
  config.trunc.validate();
  if (config.n_samples < 0 || config.burn_in < 0 || config.thin < 1) {
    throw std::invalid_argument("gibbs_sample: need n_samples >= 0, burn_in >= 0, thin >= 1");
  }
  const double tail = worst_case_tail_mass(model, config.trunc);
  if (tail >= config.trunc.tail_tol) {
    std::ostringstream os;
    os << "gibbs_sample: worst-case boundary mass " << tail << " >= " << config.trunc.tail_tol;
    throw NumericalError(os.str());
  }

  const int p = model.p();
  const int x_max = config.trunc.x_max;
  const auto& theta = model.theta();
  std::vector<double> root(static_cast<std::size_t>(x_max) + 1);
  std::vector<double> log_fact(static_cast<std::size_t>(x_max) + 1);
  for (int v = 0; v <= x_max; ++v) {
    root[static_cast<std::size_t>(v)] = std::sqrt(static_cast<double>(v));
    log_fact[static_cast<std::size_t>(v)] = std::lgamma(v + 1.0);
  }

  std::mt19937_64 rng(config.seed);
  std::vector<int> x(static_cast<std::size_t>(p), 0);
  std::vector<double> cdf(static_cast<std::size_t>(x_max) + 1);

  auto sweep = [&]() {
    for (int j = 0; j < p; ++j) {
      double natural = theta(j, j);
      for (int k = 0; k < p; ++k) {
        if (k != j) natural += theta(j, k) * root[static_cast<std::size_t>(x[static_cast<std::size_t>(k)])];
      }
      double top = -std::numeric_limits<double>::infinity();
      for (int v = 0; v <= x_max; ++v) {
        cdf[static_cast<std::size_t>(v)] = natural * root[static_cast<std::size_t>(v)] - log_fact[static_cast<std::size_t>(v)];
        top = std::max(top, cdf[static_cast<std::size_t>(v)]);
      }
      double acc = 0.0;
      for (auto& c : cdf) {
        acc += std::exp(c - top);
        c = acc;
      }
      const double u = uniform01(rng) * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      x[static_cast<std::size_t>(j)] = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), x_max));
    }
  };

  for (int b = 0; b < config.burn_in; ++b) sweep();
  Eigen::MatrixXi samples(config.n_samples, p);
  for (int s = 0; s < config.n_samples; ++s) {
    for (int t = 0; t < config.thin; ++t) sweep();
    for (int j = 0; j < p; ++j) samples(s, j) = x[static_cast<std::size_t>(j)];
  }
  return samples;
}

Eigen::MatrixXd autocorrelation(const Eigen::MatrixXi& samples, int max_lag)
{
  const auto n = samples.rows();
  Eigen::MatrixXd out(std::max(0, max_lag), samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Eigen::VectorXd col = samples.col(j).cast<double>();
    const Eigen::VectorXd centered = col.array() - col.mean();
    const double denom = centered.squaredNorm();
    for (int k = 1; k <= max_lag; ++k) {
      if (denom == 0.0 || k >= n) {
        out(k - 1, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      out(k - 1, j) = centered.head(n - k).dot(centered.tail(n - k)) / denom;
    }
  }
  return out;
}

PsqrModel random_sparse_model(int p, int edge_count, std::uint64_t seed, const TruncationConfig& trunc)
{
  const int n_pairs = p * (p - 1) / 2;
  if (p < 1 || edge_count < 0 || edge_count > n_pairs) {
    throw std::invalid_argument("random_sparse_model: need 0 <= edge_count <= p(p-1)/2");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(0.2, 0.5);
  std::uniform_real_distribution<double> diagonal(-0.5, 0.5);
  std::bernoulli_distribution positive(0.5);

  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) pairs.emplace_back(j, k);
  }

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) theta(j, j) = diagonal(rng);
    for (int e = 0; e < edge_count; ++e) {
      const auto [j, k] = pairs[static_cast<std::size_t>(e)];
      const double v = magnitude(rng) * (positive(rng) ? 1.0 : -1.0);
      theta(j, k) = v;
      theta(k, j) = v;
    }
    PsqrModel model(std::move(theta));
    if (worst_case_tail_mass(model, trunc) < 1e-12) return model;
  }
  throw NumericalError("random_sparse_model: no draw passed the tail check");
}

}  // namespace tpsqr
