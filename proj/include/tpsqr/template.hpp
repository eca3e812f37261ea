#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "tpsqr/event_data.hpp"

namespace tpsqr {

/// A directed (source, target, lag) coordinate, all 1-based.
struct PairKey {
  int source = 0;
  int target = 0;
  int lag = 0;

  bool operator==(const PairKey&) const = default;
};

/**
 * Ordinal of w_{k,k',l} in the flattened coefficient vector.
 * Layout is row-major over (k, k', l): ((k-1)*p + (k'-1))*L + (l-1).
 * Self-pairs k == k' are ordinary entries, so the table has p*p*L slots.
 */
std::size_t pair_index(int k, int k2, int l, int p, int L);

/// Inverse of pair_index.
PairKey pair_from_index(std::size_t index, int p, int L);

/**
 * Template parameterization: intercepts omega (one per event type) and the
 * directed pair x lag coefficient table w, stored flat in pair_index order.
 */
struct Template {
  int p = 0;
  int L = 0;
  Eigen::VectorXd omega;
  Eigen::VectorXd w;

  Template() = default;
  Template(int p, int L);

  double weight(int k, int k2, int l) const { return w(static_cast<Eigen::Index>(pair_index(k, k2, l, p, L))); }
  double& weight(int k, int k2, int l) { return w(static_cast<Eigen::Index>(pair_index(k, k2, l, p, L))); }

  /// Throws ValidationError on non-finite entries or inconsistent sizes.
  void validate() const;
};

/**
 * Per-subject symmetric parameter matrix: theta_jj = omega_{o_j} and, for
 * j < j', theta_jj' = w_{o_j, o_j'} . phi(|t_j' - t_j|).
 */
Eigen::MatrixXd build_theta(const Template& tmpl, const SubjectSequence& seq,
                            const LagWindows& windows);

}  // namespace tpsqr
