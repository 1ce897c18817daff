#pragma once

#include <span>
#include <vector>

#include "jostlab/numerics.hpp"

namespace jostlab {

/// Chebyshev-Lobatto collocation on [-1, 1] with nodes t_j = cos(j pi / n),
/// ordered from t_0 = 1 (right end) to t_n = -1 (left end).
class ChebyshevRule {
 public:
  explicit ChebyshevRule(int degree);

  /// Shared instance of the degree used by the Volterra panels.
  static const ChebyshevRule& standard();

  int degree() const { return n_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// (R g)_k = integral of the interpolant of g from t_k to 1.
  const std::vector<double>& right_integration() const { return right_; }
  double right_integration(std::size_t k, std::size_t j) const { return right_[k * size() + j]; }

  /// Barycentric interpolation of node values at t in [-1, 1].
  cplx interpolate(std::span<const cplx> values, double t) const;

 private:
  int n_;
  std::vector<double> nodes_;
  std::vector<double> right_;
  std::vector<double> bary_;
};

}  // namespace jostlab
