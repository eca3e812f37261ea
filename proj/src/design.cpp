#include "tpsqr/design.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "tpsqr/errors.hpp"
#include "tpsqr/template.hpp"

namespace tpsqr {

void DiscountConfig::validate() const
{
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0) || !(lambda2 >= 0.0 && lambda2 <= 1.0)) {
    throw ValidationError("discount lambda1 and lambda2 must lie in [0, 1]");
  }
  if (count_offset < 0) throw ValidationError("count_offset must be nonnegative");
}

DesignProblem build_design(std::span<const SubjectSequence> sequences, int p,
                           const LagWindows& windows, const DesignOptions& options)
{
  options.discount.validate();
  if (p < 1) throw ValidationError("build_design: p must be >= 1");
  const int L = windows.size();
  const auto n_cols = static_cast<Eigen::Index>(p) * p * L;
  const double offset = options.discount.count_offset;
  const double lambda1 = options.discount.lambda1;
  const double lambda2 = options.discount.lambda2;

  DesignProblem problem;
  problem.layout = ColumnLayout::temporal_pairs;
  problem.p = p;
  problem.L = L;
  problem.fixed_effects = options.fixed_effects;

  if (!options.fixed_effects) {
    for (int k = 1; k <= p; ++k) problem.group_labels.push_back("type" + std::to_string(k));
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> y;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& spans = sequences[i].spans;
    problem.subject_ids.push_back(sequences[i].subject_id);
    std::map<int, int> subject_groups;  // type -> group id, fixed effects only

    for (std::size_t j = 0; j < spans.size(); ++j) {
      const auto& s = spans[j];
      if (s.o < 1 || s.o > p) {
        throw ValidationError("subject '" + sequences[i].subject_id + "': event type " +
                              std::to_string(s.o) + " outside 1.." + std::to_string(p));
      }
      if (s.x < 0) throw ValidationError("negative count in subject '" + sequences[i].subject_id + "'");
      y.push_back(static_cast<double>(s.x) + offset);
      problem.row_subject.push_back(static_cast<int>(i));
      problem.row_span.push_back(static_cast<int>(j));

      if (options.fixed_effects) {
        auto [it, inserted] = subject_groups.try_emplace(s.o, problem.n_groups());
        if (inserted) {
          problem.group_labels.push_back(sequences[i].subject_id + ":" + std::to_string(s.o));
        }
        problem.group.push_back(it->second);
      } else {
        problem.group.push_back(s.o - 1);
      }

      for (std::size_t j2 = 0; j2 < spans.size(); ++j2) {
        if (j2 == j) continue;
        const auto& other = spans[j2];
        const double count = static_cast<double>(other.x) + offset;
        if (count == 0.0) continue;
        if (j2 < j) {
          const int l = windows.window(s.t - other.t);
          if (l == 0 || (!options.include_self_pairs && other.o == s.o)) continue;
          const auto c = static_cast<Eigen::Index>(pair_index(other.o, s.o, l, p, L));
          triplets.emplace_back(row, c, count);
        } else {
          if (lambda2 == 0.0) continue;
          const int l = windows.window(other.t - s.t, lambda1);
          if (l == 0 || (!options.include_self_pairs && other.o == s.o)) continue;
          const auto c = static_cast<Eigen::Index>(pair_index(s.o, other.o, l, p, L));
          triplets.emplace_back(row, c, lambda2 * count);
        }
      }
      ++row;
    }
  }

  problem.x.resize(row, n_cols);
  problem.x.setFromTriplets(triplets.begin(), triplets.end());
  problem.x.makeCompressed();
  problem.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  problem.offset = Eigen::VectorXd::Zero(row);
  return problem;
}

Eigen::Index edge_index(int j, int k, int p)
{
  if (j == k || j < 0 || k < 0 || j >= p || k >= p) {
    throw std::out_of_range("edge_index: invalid node pair");
  }
  if (j > k) std::swap(j, k);
  // pairs (0,1),(0,2),...,(0,p-1),(1,2),...
  return static_cast<Eigen::Index>(j) * (2 * p - j - 1) / 2 + (k - j - 1);
}

std::pair<int, int> edge_from_index(Eigen::Index c, int p)
{
  for (int j = 0; j < p - 1; ++j) {
    const Eigen::Index width = p - j - 1;
    if (c < width) return {j, j + 1 + static_cast<int>(c)};
    c -= width;
  }
  throw std::out_of_range("edge_from_index: ordinal out of range");
}

DesignProblem build_graph_design(const Eigen::MatrixXi& samples)
{
  const auto n = samples.rows();
  const auto p = static_cast<int>(samples.cols());
  if (p < 2) throw ValidationError("graph design needs p >= 2");
  if ((samples.array() < 0).any()) throw ValidationError("graph design: negative counts");

  DesignProblem problem;
  problem.layout = ColumnLayout::symmetric_edges;
  problem.p = p;
  problem.L = 0;
  for (int j = 0; j < p; ++j) problem.group_labels.push_back("node" + std::to_string(j + 1));

  const Eigen::Index rows = n * p;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(p - 1));
  problem.y.resize(rows);
  problem.group.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      const Eigen::Index r = i * p + j;
      problem.y(r) = samples(i, j);
      problem.group[static_cast<std::size_t>(r)] = j;
      for (int k = 0; k < p; ++k) {
        if (k == j || samples(i, k) == 0) continue;
        triplets.emplace_back(r, edge_index(j, k, p), samples(i, k));
      }
    }
  }
  problem.x.resize(rows, static_cast<Eigen::Index>(p) * (p - 1) / 2);
  problem.x.setFromTriplets(triplets.begin(), triplets.end());
  problem.x.makeCompressed();
  problem.offset = Eigen::VectorXd::Zero(rows);
  return problem;
}

double lambda_max(const DesignProblem& problem)
{
  const auto m = problem.rows();
  if (m == 0) throw ValidationError("lambda_max: empty problem");

  const int g = problem.n_groups();
  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(g);
  Eigen::VectorXd sum_exposure = Eigen::VectorXd::Zero(g);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto grp = problem.group[static_cast<std::size_t>(r)];
    sum_y(grp) += problem.y(r);
    sum_exposure(grp) += std::exp(problem.offset(r));
  }
  if (sum_y.sum() == 0.0) {
    std::cerr << "warning: all responses are zero; lambda_max = 0\n";
    return 0.0;
  }

  Eigen::VectorXd residual(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto grp = problem.group[static_cast<std::size_t>(r)];
    const double mu = sum_y(grp) * std::exp(problem.offset(r)) / sum_exposure(grp);
    residual(r) = problem.y(r) - mu;
  }

  double best = 0.0;
  for (Eigen::Index c = 0; c < problem.cols(); ++c) {
    double dot = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(problem.x, c); it; ++it) {
      dot += it.value() * residual(it.row());
    }
    best = std::max(best, std::abs(dot));
  }
  return best / static_cast<double>(m);
}

void write_triplets(std::ostream& os, const DesignProblem& problem)
{
  const Eigen::SparseMatrix<double, Eigen::RowMajor> by_row = problem.x;
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < by_row.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_row, r); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace tpsqr
