#include "tpsqr/template.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tpsqr/errors.hpp"

namespace tpsqr {

std::size_t pair_index(int k, int k2, int l, int p, int L)
{
  if (p < 1 || L < 1 || k < 1 || k > p || k2 < 1 || k2 > p || l < 1 || l > L) {
    throw std::out_of_range("pair_index: (" + std::to_string(k) + "," + std::to_string(k2) +
                            "," + std::to_string(l) + ") outside p=" + std::to_string(p) +
                            ", L=" + std::to_string(L));
  }
  const auto sp = static_cast<std::size_t>(p);
  const auto sl = static_cast<std::size_t>(L);
  return (static_cast<std::size_t>(k - 1) * sp + static_cast<std::size_t>(k2 - 1)) * sl +
         static_cast<std::size_t>(l - 1);
}

PairKey pair_from_index(std::size_t index, int p, int L)
{
  const auto sp = static_cast<std::size_t>(p);
  const auto sl = static_cast<std::size_t>(L);
  if (p < 1 || L < 1 || index >= sp * sp * sl) {
    throw std::out_of_range("pair_from_index: ordinal " + std::to_string(index) + " out of range");
  }
  const auto l = index % sl;
  const auto pair = index / sl;
  return {static_cast<int>(pair / sp) + 1, static_cast<int>(pair % sp) + 1, static_cast<int>(l) + 1};
}

Template::Template(int p_, int L_) : p(p_), L(L_)
{
  if (p < 1 || L < 1) throw ValidationError("template needs p >= 1 and L >= 1");
  omega = Eigen::VectorXd::Zero(p);
  w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p) * p * L);
}

void Template::validate() const
{
  if (p < 1 || L < 1 || omega.size() != p || w.size() != static_cast<Eigen::Index>(p) * p * L) {
    throw ValidationError("template dimensions inconsistent with p=" + std::to_string(p) +
                          ", L=" + std::to_string(L));
  }
  if (!omega.allFinite() || !w.allFinite()) throw ValidationError("template has non-finite entries");
}

Eigen::MatrixXd build_theta(const Template& tmpl, const SubjectSequence& seq,
                            const LagWindows& windows)
{
  tmpl.validate();
  if (windows.size() != tmpl.L) {
    throw ValidationError("lag windows define L=" + std::to_string(windows.size()) +
                          " but template has L=" + std::to_string(tmpl.L));
  }
  const auto n = static_cast<Eigen::Index>(seq.size());
  for (const auto& s : seq.spans) {
    if (s.o < 1 || s.o > tmpl.p) {
      throw ValidationError("event type " + std::to_string(s.o) + " outside template p=" +
                            std::to_string(tmpl.p));
    }
  }

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& sj = seq.spans[static_cast<std::size_t>(j)];
    theta(j, j) = tmpl.omega(sj.o - 1);
    for (Eigen::Index j2 = j + 1; j2 < n; ++j2) {
      const auto& sj2 = seq.spans[static_cast<std::size_t>(j2)];
      const int l = windows.window(std::abs(sj2.t - sj.t));
      const double v = l > 0 ? tmpl.weight(sj.o, sj2.o, l) : 0.0;
      theta(j, j2) = v;
      theta(j2, j) = v;
    }
  }
  return theta;
}

}  // namespace tpsqr
