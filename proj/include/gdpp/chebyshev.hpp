#pragma once

#include "gdpp/common.hpp"
#include "gdpp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gdpp {

/// Degree-r polynomial approximation of the ideal low-pass response
/// h(lambda) = 1 for lambda <= cutoff, 0 otherwise, on [0, lambda_max].
///
/// Stored in the Chebyshev basis of the interval mapped to [-1, 1]:
///   h~(lambda) = sum_l coefficients[l] T_l(2 lambda / lambda_max - 1).
template <typename Scalar = double>
struct ChebyshevFilter {
  Vector<Scalar> coefficients;
  Scalar lambda_max = Scalar(1);
  Scalar cutoff = Scalar(0.5);
  bool jackson = true;

  Index degree() const { return coefficients.size() - 1; }

  Scalar map(Scalar lambda) const { return Scalar(2) * lambda / lambda_max - Scalar(1); }

  /// Clenshaw evaluation of the scalar response.
  Scalar operator()(Scalar lambda) const {
    const Scalar t = map(lambda);
    Scalar b1 = 0, b2 = 0;
    for (Index l = degree(); l >= 1; --l) {
      const Scalar b0 = coefficients(l) + Scalar(2) * t * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return coefficients(0) + t * b1 - b2;
  }
};

/// Jackson damping factors g_0..g_r for a degree-r truncation.
template <typename Scalar = double>
Vector<Scalar> jackson_coefficients(Index r) {
  const double a = std::numbers::pi / static_cast<double>(r + 2);
  Vector<Scalar> g(r + 1);
  for (Index l = 0; l <= r; ++l) {
    const double ld = static_cast<double>(l);
    g(l) = static_cast<Scalar>(((1.0 - ld / (r + 2)) * std::sin(a) * std::cos(ld * a) +
                                std::cos(a) * std::sin(ld * a) / (r + 2)) /
                               std::sin(a));
  }
  return g;
}

/// Truncated Chebyshev expansion of the step at `cutoff` on [0, lambda_max].
/// Cutoffs outside the interval give the all-pass (>= lambda_max) or
/// all-stop (< 0) filter.
template <typename Scalar = double>
ChebyshevFilter<Scalar> fit_ideal_lowpass(Scalar cutoff, Scalar lambda_max, Index r, bool jackson = true) {
  if (!(lambda_max > 0)) throw std::invalid_argument("lambda_max must be positive");
  if (r < 1) throw std::invalid_argument("filter degree must be at least 1");
  ChebyshevFilter<Scalar> f;
  f.lambda_max = lambda_max;
  f.cutoff = cutoff;
  f.jackson = jackson;
  // In theta = arccos(t), the pass-band t <= t_c is theta in [theta_c, pi].
  const double tc = std::clamp(2.0 * static_cast<double>(cutoff) / lambda_max - 1.0, -1.0, 1.0);
  const double theta_c = cutoff < 0 ? std::numbers::pi : std::acos(tc);
  f.coefficients.resize(r + 1);
  f.coefficients(0) = static_cast<Scalar>((std::numbers::pi - theta_c) / std::numbers::pi);
  for (Index l = 1; l <= r; ++l) {
    const double ld = static_cast<double>(l);
    f.coefficients(l) = static_cast<Scalar>(-2.0 * std::sin(ld * theta_c) / (std::numbers::pi * ld));
  }
  if (jackson) f.coefficients.array() *= jackson_coefficients<Scalar>(r).array();
  return f;
}

/// h~(L) X through the three-term recurrence: exactly `degree()` products
/// with `op`, never forming h~(L). `op * M` must yield an N x cols matrix.
template <typename Scalar, typename Op, typename Derived>
Matrix<Scalar> apply_filter(const ChebyshevFilter<Scalar>& f, const Op& op,
                            const Eigen::MatrixBase<Derived>& x) {
  const Scalar a = Scalar(2) / f.lambda_max;
  Matrix<Scalar> prev = x;
  Matrix<Scalar> out = f.coefficients(0) * prev;
  if (f.degree() == 0) return out;
  Matrix<Scalar> cur = op * prev;
  cur = a * cur - prev;
  out += f.coefficients(1) * cur;
  Matrix<Scalar> next;
  for (Index l = 2; l <= f.degree(); ++l) {
    next = op * cur;
    next = Scalar(2) * (a * next - cur) - prev;
    out += f.coefficients(l) * next;
    prev.swap(cur);
    cur.swap(next);
  }
  return out;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> apply_filter(const ChebyshevFilter<Scalar>& f, const Laplacian<Scalar>& lap,
                            const Eigen::MatrixBase<Derived>& x) {
  return apply_filter(f, lap.matrix, x);
}

/// Chebyshev moments mu_l = tr(R^T T_l(L~) R), l = 0..2r, from r products.
/// With them, ||h~(L) R||_F^2 for any degree-r filter on the same interval
/// is a quadratic form in its coefficients (see `filtered_energy`).
template <typename Scalar = double>
struct ChebyshevMoments {
  Vector<Scalar> mu;
  Scalar lambda_max = Scalar(1);
  Index degree() const { return (mu.size() - 1) / 2; }
};

template <typename Scalar, typename Op>
ChebyshevMoments<Scalar> chebyshev_moments(const Op& op, const Matrix<Scalar>& probes, Scalar lambda_max,
                                           Index r) {
  ChebyshevMoments<Scalar> m;
  m.lambda_max = lambda_max;
  m.mu.setZero(2 * r + 1);
  const Scalar a = Scalar(2) / lambda_max;
  Matrix<Scalar> prev = probes;
  Matrix<Scalar> cur = op * prev;
  cur = a * cur - prev;
  const Scalar mu0 = prev.squaredNorm();
  const Scalar mu1 = (prev.array() * cur.array()).sum();
  m.mu(0) = mu0;
  m.mu(1) = mu1;
  // T_{2l} = 2 T_l^2 - 1 and T_{2l+1} = 2 T_{l+1} T_l - T_1.
  Matrix<Scalar> next;
  for (Index l = 1; l <= r; ++l) {
    m.mu(2 * l) = Scalar(2) * cur.squaredNorm() - mu0;
    if (2 * l + 1 > 2 * r) break;
    next = op * cur;
    next = Scalar(2) * (a * next - cur) - prev;
    m.mu(2 * l + 1) = Scalar(2) * (next.array() * cur.array()).sum() - mu1;
    prev.swap(cur);
    cur.swap(next);
  }
  return m;
}

/// ||h~(L) R||_F^2 = sum_{a,b} c_a c_b (mu_{a+b} + mu_{|a-b|}) / 2.
template <typename Scalar = double>
Scalar filtered_energy(const ChebyshevFilter<Scalar>& f, const ChebyshevMoments<Scalar>& m) {
  if (f.degree() > m.degree()) throw std::invalid_argument("moments computed for a lower degree");
  const auto& c = f.coefficients;
  Scalar total = 0;
  for (Index a = 0; a <= f.degree(); ++a)
    for (Index b = 0; b <= f.degree(); ++b)
      total += c(a) * c(b) * (m.mu(a + b) + m.mu(a > b ? a - b : b - a));
  return total / Scalar(2);
}

}  // namespace gdpp
