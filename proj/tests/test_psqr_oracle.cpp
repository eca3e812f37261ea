#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "tpsqr/errors.hpp"
#include "tpsqr/psqr_oracle.hpp"

using namespace tpsqr;

namespace {

// Exact joint on the truncated grid by direct product enumeration.
std::map<std::vector<int>, double> brute_joint(const Eigen::MatrixXd& theta, int x_max)
{
  const int p = static_cast<int>(theta.rows());
  std::map<std::vector<int>, double> out;
  std::vector<int> x(static_cast<std::size_t>(p), 0);
  double z = 0.0;
  while (true) {
    double lv = 0.0;
    for (int j = 0; j < p; ++j) {
      lv += theta(j, j) * std::sqrt(x[j]) - std::lgamma(x[j] + 1.0);
      for (int k = j + 1; k < p; ++k) lv += theta(j, k) * std::sqrt(static_cast<double>(x[j]) * x[k]);
    }
    out[x] = std::exp(lv);
    z += std::exp(lv);
    int j = 0;
    while (j < p && x[j] == x_max) x[j++] = 0;
    if (j == p) break;
    ++x[j];
  }
  for (auto& [k, v] : out) v /= z;
  return out;
}

double tv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

}  // namespace

TEST_CASE("single-coordinate partition at zero parameter is log e")
{
  const PsqrModel m(Eigen::MatrixXd::Zero(1, 1));
  CHECK(log_partition(m, {20, 1e-10}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent coordinates factorize")
{
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(3, 3);
  theta.diagonal() << 0.3, -0.4, 0.1;
  const TruncationConfig trunc{25, 1e-10};
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd one(1, 1);
    one(0, 0) = theta(j, j);
    sum += log_partition(PsqrModel(one), trunc);
  }
  CHECK(log_partition(PsqrModel(theta), trunc) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("two-coordinate partition matches a double loop")
{
  Eigen::MatrixXd theta(2, 2);
  theta << 0.1, -0.3, -0.3, 0.2;
  double z = 0.0;
  for (int a = 0; a <= 15; ++a) {
    for (int b = 0; b <= 15; ++b) {
      z += std::exp(0.1 * std::sqrt(a) + 0.2 * std::sqrt(b) - 0.3 * std::sqrt(a * b) - std::lgamma(a + 1.0) -
                    std::lgamma(b + 1.0));
    }
  }
  CHECK(log_partition(PsqrModel(theta), {15, 1e-10}) == doctest::Approx(std::log(z)).epsilon(1e-12));
}

TEST_CASE("conditionals agree with the enumerated joint")
{
  Eigen::MatrixXd t3(3, 3);
  t3 << 0.2, -0.3, 0.25, -0.3, -0.1, 0.0, 0.25, 0.0, 0.4;
  Eigen::MatrixXd t2(2, 2);
  t2 << -0.2, 0.35, 0.35, 0.1;
  for (const auto& theta : {t2, t3}) {
    const int p = static_cast<int>(theta.rows());
    const int x_max = 8;
    const TruncationConfig loose{x_max, 1.0};
    const PsqrModel m(theta);
    const auto joint = brute_joint(theta, x_max);
    for (const auto& [x, px] : joint) {
      (void)px;
      for (int j = 0; j < p; ++j) {
        const auto pmf = conditional_pmf(m, j, x, loose);
        Eigen::VectorXd slice(x_max + 1);
        auto y = x;
        for (int v = 0; v <= x_max; ++v) {
          y[j] = v;
          slice(v) = joint.at(y);
        }
        slice /= slice.sum();
        CHECK((pmf - slice).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
    // log_potential differences reproduce joint ratios
    std::vector<int> a(static_cast<std::size_t>(p), 1), b(static_cast<std::size_t>(p), 2);
    CHECK(log_potential(m, a) - log_potential(m, b) == doctest::Approx(std::log(joint.at(a) / joint.at(b))).epsilon(1e-10));
  }
}

TEST_CASE("exact joint is a fixed point of one systematic sweep")
{
  Eigen::MatrixXd theta(2, 2);
  theta << 0.3, -0.4, -0.4, -0.2;
  const int x_max = 6;
  const TruncationConfig loose{x_max, 1.0};
  const PsqrModel m(theta);
  const auto joint = brute_joint(theta, x_max);

  std::map<std::vector<int>, double> cur = joint;
  for (int j = 0; j < 2; ++j) {
    std::map<std::vector<int>, double> next;
    for (const auto& [x, px] : cur) {
      const auto pmf = conditional_pmf(m, j, x, loose);
      auto y = x;
      for (int v = 0; v <= x_max; ++v) {
        y[j] = v;
        next[y] += px * pmf(v);
      }
    }
    cur = std::move(next);
  }
  double worst = 0.0;
  for (const auto& [x, px] : joint) worst = std::max(worst, std::abs(cur.at(x) - px));
  CHECK(worst < 1e-8);
}

TEST_CASE("single-coordinate sampler matches its marginal")
{
  Eigen::MatrixXd theta(1, 1);
  theta << 0.4;
  const PsqrModel m(theta);
  GibbsConfig cfg;
  cfg.n_samples = 100000;
  cfg.burn_in = 10;
  cfg.seed = 99;
  const auto s = gibbs_sample(m, cfg);
  const std::vector<int> zero{0};
  const auto exact = conditional_pmf(m, 0, zero, cfg.trunc);
  Eigen::VectorXd emp = Eigen::VectorXd::Zero(cfg.trunc.x_max + 1);
  for (Eigen::Index i = 0; i < s.rows(); ++i) emp(s(i, 0)) += 1.0;
  emp /= static_cast<double>(s.rows());
  CHECK(tv(emp, exact) < 0.02);
}

TEST_CASE("decoupled coordinates are uncorrelated")
{
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 2);
  theta.diagonal() << 0.5, -0.3;
  GibbsConfig cfg;
  cfg.n_samples = 50000;
  cfg.seed = 3;
  const Eigen::MatrixXd s = gibbs_sample(PsqrModel(theta), cfg).cast<double>();
  const Eigen::VectorXd a = s.col(0).array() - s.col(0).mean();
  const Eigen::VectorXd b = s.col(1).array() - s.col(1).mean();
  CHECK(std::abs(a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm())) < 0.01);
}

TEST_CASE("sampled conditional slices match the conditional PMF")
{
  Eigen::MatrixXd theta(2, 2);
  theta << 0.2, -0.35, -0.35, 0.3;
  const PsqrModel m(theta);
  GibbsConfig cfg;
  cfg.n_samples = 100000;
  cfg.seed = 12;
  const auto s = gibbs_sample(m, cfg);
  for (int given = 0; given <= 2; ++given) {
    Eigen::VectorXd emp = Eigen::VectorXd::Zero(cfg.trunc.x_max + 1);
    double n = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      if (s(i, 1) != given) continue;
      emp(s(i, 0)) += 1.0;
      n += 1.0;
    }
    REQUIRE(n > 5000);
    const std::vector<int> state{0, given};
    CHECK(tv(emp / n, conditional_pmf(m, 0, state, cfg.trunc)) < 0.02);
  }
}

TEST_CASE("sampler is reproducible and seed-sensitive")
{
  Eigen::MatrixXd theta(2, 2);
  theta << 0.1, -0.2, -0.2, 0.1;
  GibbsConfig cfg;
  cfg.n_samples = 200;
  cfg.seed = 5;
  const PsqrModel m(theta);
  CHECK(gibbs_sample(m, cfg) == gibbs_sample(m, cfg));
  auto other = cfg;
  other.seed = 6;
  CHECK(gibbs_sample(m, cfg) != gibbs_sample(m, other));
  const auto ac = autocorrelation(gibbs_sample(m, cfg), 3);
  CHECK(ac.rows() == 3);
  CHECK(ac.cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("strong negative coupling is always admissible")
{
  Eigen::MatrixXd theta(3, 3);
  theta << 0.5, -5.0, -5.0, -5.0, 0.5, -5.0, -5.0, -5.0, 0.5;
  const PsqrModel m(theta);
  CHECK(worst_case_tail_mass(m, {}) < 1e-12);
  GibbsConfig cfg;
  cfg.n_samples = 100;
  CHECK_NOTHROW(gibbs_sample(m, cfg));
}

TEST_CASE("truncation guards raise numerical errors")
{
  Eigen::MatrixXd big(1, 1);
  big << 3.0;
  const PsqrModel strong(big);
  CHECK_THROWS_AS(log_partition(strong, {10, 1e-10}), NumericalError);
  const std::vector<int> zero{0};
  CHECK_THROWS_AS(conditional_pmf(strong, 0, zero, {10, 1e-10}), NumericalError);
  GibbsConfig cfg;
  cfg.trunc = {10, 1e-10};
  CHECK_THROWS_AS(gibbs_sample(strong, cfg), NumericalError);
  CHECK_THROWS_AS(log_partition(PsqrModel(Eigen::MatrixXd::Zero(6, 6)), {30, 1e-10}), NumericalError);

  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(PsqrModel{asym}, ValidationError);
}

TEST_CASE("random sparse models have the requested structure")
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = random_sparse_model(6, 5, seed);
    int edges = 0;
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(m.theta()(j, j)) <= 0.5);
      for (int k = j + 1; k < 6; ++k) {
        const double v = std::abs(m.theta()(j, k));
        if (v != 0.0) {
          ++edges;
          CHECK(v >= 0.2);
          CHECK(v <= 0.5);
        }
      }
    }
    CHECK(edges == 5);
    CHECK(worst_case_tail_mass(m, {}) < 1e-12);
  }
  CHECK(random_sparse_model(5, 3, 7).theta() == random_sparse_model(5, 3, 7).theta());
}
