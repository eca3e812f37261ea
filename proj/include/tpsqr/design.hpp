#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tpsqr/event_data.hpp"

namespace tpsqr {

/**
 * Future-event discount and count preprocessing.
 *
 * lambda1 scales the lag thresholds applied to spans that occur after the
 * response span; lambda2 multiplies their covariates. count_offset is added
 * to every count (responses and covariates) when the design is built.
 * Defaults reproduce the undiscounted pseudo-likelihood.
 */
struct DiscountConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  int count_offset = 0;

  /// lambda1 = lambda2 = 0.1, count_offset = 1.
  static DiscountConfig adr_preset() { return {0.1, 0.1, 1}; }
  void validate() const;
};

struct DesignOptions {
  DiscountConfig discount;
  bool fixed_effects = false;      ///< per-(subject, type) intercepts instead of per-type
  bool include_self_pairs = true;  ///< populate w_{k,k,l} columns
};

enum class ColumnLayout {
  temporal_pairs,   ///< p*p*L columns in pair_index order
  symmetric_edges,  ///< p*(p-1)/2 columns, one tied coefficient per unordered pair
};

/**
 * Stacked Poisson regressions. Row r has response y(r), linear predictor
 * intercepts(group[r]) + offset(r) + x.row(r) . weights. Only the column
 * weights are penalized.
 */
struct DesignProblem {
  Eigen::SparseMatrix<double> x;  // column-major
  Eigen::VectorXd y;
  Eigen::VectorXd offset;
  std::vector<int> group;
  std::vector<std::string> group_labels;

  ColumnLayout layout = ColumnLayout::temporal_pairs;
  int p = 0;
  int L = 0;
  bool fixed_effects = false;

  // temporal layout only: source (subject index, span index) of every row
  std::vector<int> row_subject;
  std::vector<int> row_span;
  std::vector<std::string> subject_ids;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
  int n_groups() const { return static_cast<int>(group_labels.size()); }
};

/**
 * Builds the temporal design. For the row of span j, each earlier span j'
 * adds (x_j' + offset) to column (o_j', o_j, l) with l = window(t_j - t_j');
 * each later span adds lambda2 * (x_j' + offset) to column (o_j, o_j', l)
 * with l taken against thresholds scaled by lambda1.
 */
DesignProblem build_design(std::span<const SubjectSequence> sequences, int p,
                           const LagWindows& windows, const DesignOptions& options = {});

/// Column of the unordered pair {j, k} (0-based, j != k) in the edge layout.
Eigen::Index edge_index(int j, int k, int p);
std::pair<int, int> edge_from_index(Eigen::Index c, int p);

/**
 * Graph-case design over i.i.d. count vectors (rows of `samples`, n x p):
 * one row per (sample, node) with the node's count as response and the other
 * nodes' raw counts as covariates of the tied edge coefficients. Intercept
 * group = node.
 */
DesignProblem build_graph_design(const Eigen::MatrixXi& samples);

/**
 * Smallest penalty at which every column weight is zero, with intercepts at
 * their null-model optimum. Returns 0 (and warns on stderr) when every
 * response is zero.
 */
double lambda_max(const DesignProblem& problem);

/// Writes "row col value" lines (0-based, row-major order, full precision).
void write_triplets(std::ostream& os, const DesignProblem& problem);

}  // namespace tpsqr
