#include "jostlab/chebyshev.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace jostlab {

ChebyshevRule::ChebyshevRule(int degree) : n_(degree) {
  if (degree < 2) throw Error(ErrorKind::InvalidArgument, "Chebyshev degree must be >= 2");
  const int m = n_ + 1;
  nodes_.resize(m);
  for (int j = 0; j < m; ++j) nodes_[j] = std::cos(kPi * j / n_);
  nodes_[0] = 1.0;
  nodes_[n_] = -1.0;

  // V(j, k) = T_k(t_j); P(i, k) = integral_{t_i}^{1} T_k.
  Eigen::MatrixXd V(m, m), P(m, m);
  auto cheb_integral_from = [](int k, double t) {
    // Antiderivative A_k with A_k(1) known; returns A_k(1) - A_k(t).
    auto T = [](int kk, double x) { return std::cos(kk * std::acos(std::clamp(x, -1.0, 1.0))); };
    auto A = [&](double x) {
      if (k == 0) return x;
      if (k == 1) return 0.5 * x * x;
      return T(k + 1, x) / (2.0 * (k + 1)) - T(k - 1, x) / (2.0 * (k - 1));
    };
    return A(1.0) - A(t);
  };
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      V(j, k) = std::cos(k * kPi * j / n_);
      P(j, k) = cheb_integral_from(k, nodes_[j]);
    }
  }
  Eigen::MatrixXd R = P * V.inverse();
  right_.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) right_[static_cast<std::size_t>(i) * m + j] = R(i, j);

  bary_.resize(m);
  for (int j = 0; j < m; ++j) {
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n_) w *= 0.5;
    bary_[j] = w;
  }
}

const ChebyshevRule& ChebyshevRule::standard() {
  static const ChebyshevRule rule(16);
  return rule;
}

cplx ChebyshevRule::interpolate(std::span<const cplx> values, double t) const {
  cplx num{};
  double den = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double d = t - nodes_[j];
    if (d == 0.0) return values[j];
    const double c = bary_[j] / d;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

}  // namespace jostlab
