#pragma once

#include "gdpp/common.hpp"
#include "gdpp/dpp.hpp"
#include "gdpp/spectral.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <limits>

namespace gdpp {

template <typename Scalar = double>
struct Measurement {
  SampleSet sample;
  Vector<Scalar> values;  // y, one entry per sampled node
  Scalar noise_std = 0;
};

/// y_i = x_{s_i} + n_i with n_i ~ N(0, sigma^2).
template <typename Scalar = double>
Measurement<Scalar> measure(const Vector<Scalar>& x, const SampleSet& a, Scalar sigma, Rng& rng) {
  a.validate(x.size());
  if (sigma < 0) throw std::invalid_argument("noise standard deviation must be non-negative");
  Measurement<Scalar> meas{a, Vector<Scalar>(a.size()), sigma};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < a.size(); ++i) {
    meas.values(i) = x(a.nodes[static_cast<std::size_t>(i)]);
    if (sigma > 0) meas.values(i) += sigma * static_cast<Scalar>(normal(rng));
  }
  return meas;
}

/// Rows of U_k at the sampled nodes (M U_k).
template <typename Scalar = double>
Matrix<Scalar> sampled_rows(const EigenBasis<Scalar>& basis, const SampleSet& a) {
  a.validate(basis.size());
  Matrix<Scalar> out(a.size(), basis.band());
  for (Index i = 0; i < a.size(); ++i) out.row(i) = basis.vectors.row(a.nodes[static_cast<std::size_t>(i)]);
  return out;
}

/// Singular values of M U_k in ascending order, padded with zeros to k when
/// fewer than k nodes are sampled.
template <typename Scalar = double>
Vector<Scalar> singular_spectrum(const EigenBasis<Scalar>& basis, const SampleSet& a) {
  if (a.size() < 1) throw std::invalid_argument("singular_spectrum: empty sample");
  const Index k = basis.band();
  const Vector<Scalar> sv = Eigen::JacobiSVD<Matrix<Scalar>>(sampled_rows(basis, a)).singularValues();
  Vector<Scalar> out = Vector<Scalar>::Zero(k);
  // JacobiSVD returns descending values; place them at the top end.
  for (Index i = 0; i < sv.size(); ++i) out(k - 1 - i) = sv(i);
  return out;
}

/// Relative threshold below which M U_k is treated as rank-deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Least-squares reconstruction x_rec = U_k (M U_k)^+ y, computed from an
/// SVD of the m x k matrix M U_k. Throws RankDeficientError when its
/// smallest singular value falls below 1e-10 times the largest.
template <typename Scalar = double>
Vector<Scalar> reconstruct(const Measurement<Scalar>& meas, const EigenBasis<Scalar>& basis) {
  if (meas.values.size() != meas.sample.size()) throw std::invalid_argument("measurement size mismatch");
  const Index k = basis.band();
  const Matrix<Scalar> mu = sampled_rows(basis, meas.sample);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(mu, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() ? static_cast<double>(sv(0)) : 0.0;
  const double smallest = meas.sample.size() < k ? 0.0 : static_cast<double>(sv(sv.size() - 1));
  if (!(largest > 0) || smallest < kRankTolerance * largest)
    throw RankDeficientError("sampled rows of U_k are rank-deficient (sigma_1 = " + std::to_string(smallest) +
                                 ", sigma_k = " + std::to_string(largest) + ")",
                             smallest, largest);
  const Vector<Scalar> coeffs =
      svd.matrixV() * (sv.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * meas.values));
  return basis.vectors * coeffs;
}

/// det(U_k^T M^T M U_k) = prod_i sigma_i^2. Requires |A| = k.
template <typename Scalar = double>
double mv_objective(const EigenBasis<Scalar>& basis, const SampleSet& a) {
  if (a.size() != basis.band()) throw std::invalid_argument("mv_objective: |A| must equal k");
  const Matrix<Scalar> rows = sampled_rows(basis, a);
  const double det = static_cast<double>(rows.partialPivLu().determinant());
  return det * det;
}

/// Calls fn(indices) for every size-m subset of {0..n-1} in lexicographic
/// order.
inline void for_each_subset(Index n, Index m, const std::function<void(const std::vector<Index>&)>& fn) {
  if (m < 0 || m > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    fn(idx);
    Index j = m - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - m + j) --j;
    if (j < 0) return;
    ++idx[static_cast<std::size_t>(j)];
    for (Index t = j + 1; t < m; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

inline double binomial(Index n, Index m) {
  if (m < 0 || m > n) return 0;
  double r = 1;
  for (Index i = 1; i <= m; ++i) r = r * static_cast<double>(n - m + i) / static_cast<double>(i);
  return r;
}

/// Exhaustive maximizer of mv_objective over size-k subsets; the
/// lexicographically first set wins ties (relative 1e-12). Small N only.
template <typename Scalar = double>
SampleSet brute_force_mv(const EigenBasis<Scalar>& basis, double budget = 1e6) {
  const Index n = basis.size(), k = basis.band();
  if (binomial(n, k) > budget)
    throw std::invalid_argument("brute_force_mv: C(N, k) = " + std::to_string(binomial(n, k)) +
                                " exceeds the enumeration budget");
  SampleSet best;
  double best_val = -1;
  SampleSet cur;
  for_each_subset(n, k, [&](const std::vector<Index>& idx) {
    cur.nodes = idx;
    const double v = mv_objective(basis, cur);
    if (best_val < 0 || v > best_val * (1 + 1e-12)) {
      best_val = v;
      best = cur;
    }
  });
  return best;
}

}  // namespace gdpp
