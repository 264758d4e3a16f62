#pragma once

#include "gdpp/chebyshev.hpp"
#include "gdpp/common.hpp"
#include "gdpp/graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gdpp {

/// First k eigenpairs of the Laplacian, ascending.
template <typename Scalar = double>
struct EigenBasis {
  Matrix<Scalar> vectors;  // N x k, orthonormal columns
  Vector<Scalar> values;   // k ascending

  Index size() const { return vectors.rows(); }
  Index band() const { return vectors.cols(); }
};

/// Flips each column so that its entry of largest magnitude (first one on
/// ties) is positive.
template <typename Derived>
void normalize_signs(Eigen::MatrixBase<Derived>& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0) v.col(j) *= -1;
  }
}

struct EigensolverOptions {
  /// Block size of the Krylov iteration; 0 picks k + 4. Eigenvalues with
  /// multiplicity larger than the block size may be missed.
  Index block_size = 0;
  /// Largest Krylov dimension before giving up; 0 means N (exact).
  Index max_dimension = 0;
  /// Residual tolerance relative to the largest Ritz value.
  double tolerance = 1e-10;
  std::uint64_t seed = 0x6764707065696773ULL;
};

namespace detail {

/// Orthonormalizes the columns of `w` against the first `used` columns of
/// `basis` (two Gram-Schmidt passes) and against each other. Columns that
/// collapse are replaced by fresh random directions so the Krylov space
/// keeps growing after an invariant subspace is found.
template <typename Scalar>
Index extend_basis(Matrix<Scalar>& basis, Index used, Matrix<Scalar> w, Rng& rng) {
  const Index n = basis.rows();
  const Index room = std::min<Index>(w.cols(), n - used);
  Index added = 0;
  for (Index c = 0; c < w.cols() && added < room; ++c) {
    Vector<Scalar> v = w.col(c);
    for (int attempt = 0; attempt < 4; ++attempt) {
      const Scalar before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        auto q = basis.leftCols(used + added);
        v -= q * (q.transpose() * v);
      }
      const Scalar after = v.norm();
      if (after > Scalar(1e-8) * std::max(before, std::numeric_limits<Scalar>::min())) {
        basis.col(used + added) = v / after;
        ++added;
        break;
      }
      v = gaussian_matrix<Scalar>(n, 1, rng).col(0);
    }
  }
  return added;
}

struct KrylovResult {
  Index dimension = 0;
  bool converged = false;
};

/// Block Krylov (block Lanczos) iteration with full reorthogonalization and
/// Rayleigh-Ritz extraction of the `k` smallest (or largest) eigenpairs of
/// the symmetric operator `op`. The projected matrix is accumulated
/// explicitly as V^T (op V), so it stays accurate even if the three-term
/// structure degrades.
template <typename Scalar, typename Op>
KrylovResult block_krylov(const Op& op, Index n, Index k, bool smallest, const EigensolverOptions& opt,
                          Vector<Scalar>& values, Matrix<Scalar>& vectors) {
  const Index p = std::min<Index>(n, opt.block_size > 0 ? opt.block_size : k + 4);
  const Index cap = std::min<Index>(n, opt.max_dimension > 0 ? std::max(opt.max_dimension, k) : n);
  Rng rng(opt.seed);

  Matrix<Scalar> v(n, cap), av(n, cap), h(cap, cap);
  Index used = extend_basis<Scalar>(v, 0, gaussian_matrix<Scalar>(n, p, rng), rng);
  Index block_begin = 0;
  Index next_check = std::min<Index>(cap, std::max<Index>(k, p));
  KrylovResult res;

  for (;;) {
    const Index nb = used - block_begin;
    av.middleCols(block_begin, nb) = op * v.middleCols(block_begin, nb);
    h.block(0, block_begin, used, nb).noalias() = v.leftCols(used).transpose() * av.middleCols(block_begin, nb);
    h.block(block_begin, 0, nb, block_begin) = h.block(0, block_begin, block_begin, nb).transpose();

    // Rayleigh-Ritz on a geometric schedule keeps the dense projected
    // eigensolves from dominating on large Krylov spaces.
    if (used < next_check && used < cap) {
      const Index added = extend_basis<Scalar>(v, used, av.middleCols(block_begin, nb), rng);
      block_begin = used;
      used += added;
      continue;
    }
    next_check = std::min<Index>(cap, used + std::max<Index>(p, used / 4));

    Matrix<Scalar> hs = h.topLeftCorner(used, used);
    hs = Scalar(0.5) * (hs + hs.transpose()).eval();

    const Index want = std::min(k, used);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(hs);
    Matrix<Scalar> s(used, want);
    Vector<Scalar> theta(want);
    for (Index j = 0; j < want; ++j) {
      const Index src = smallest ? j : used - 1 - j;
      s.col(j) = es.eigenvectors().col(src);
      theta(j) = es.eigenvalues()(src);
    }
    const Scalar scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), Scalar(1e-300));
    Matrix<Scalar> y = v.leftCols(used) * s;
    Matrix<Scalar> r = av.leftCols(used) * s - y * theta.asDiagonal();
    const bool done = want == k && (r.colwise().norm().maxCoeff() <= opt.tolerance * scale);

    if (done || used >= cap) {
      res.dimension = used;
      res.converged = done || used == n;
      values = theta;
      vectors = y;
      return res;
    }

    Matrix<Scalar> w = av.middleCols(block_begin, nb);
    const Index added = extend_basis<Scalar>(v, used, std::move(w), rng);
    block_begin = used;
    used += added;
    if (added == 0) {
      res.dimension = used - added;
      res.converged = false;
      values = theta;
      vectors = y;
      return res;
    }
  }
}

}  // namespace detail

/// The k smallest eigenpairs of L, ascending, with the sign convention of
/// `normalize_signs`. Throws NumericalError if the iteration stalls before
/// reaching the requested residual tolerance.
template <typename Scalar = double>
EigenBasis<Scalar> partial_eigendecomposition(const Laplacian<Scalar>& lap, Index k,
                                              const EigensolverOptions& opt = {}) {
  const Index n = lap.size();
  if (k < 1 || k > n) throw std::invalid_argument("partial_eigendecomposition: need 1 <= k <= N");
  EigenBasis<Scalar> basis;
  const auto res = detail::block_krylov<Scalar>(lap.matrix, n, k, true, opt, basis.values, basis.vectors);
  if (!res.converged)
    throw NumericalError("eigensolver did not converge within Krylov dimension " +
                         std::to_string(res.dimension));
  normalize_signs(basis.vectors);
  return basis;
}

/// Upper estimate of lambda_N: the top Ritz value inflated by 1%, capped by
/// the Gershgorin bound 2 max_i D_ii.
template <typename Scalar = double>
Scalar estimate_lambda_max(const Laplacian<Scalar>& lap) {
  const Index n = lap.size();
  const Scalar gershgorin = Scalar(2) * (lap.degree.size() ? lap.degree.maxCoeff() : Scalar(0));
  if (gershgorin <= 0) return Scalar(0);
  EigensolverOptions opt;
  opt.block_size = std::min<Index>(n, 2);
  opt.tolerance = 1e-6;
  opt.max_dimension = std::min<Index>(n, 200);
  Vector<Scalar> theta;
  Matrix<Scalar> y;
  detail::block_krylov<Scalar>(lap.matrix, n, 1, false, opt, theta, y);
  return std::min(Scalar(1.01) * theta(0), gershgorin);
}

/// Probe matrix with i.i.d. N(0, 1/n) entries, so E[R R^T] = I_N.
template <typename Scalar = double>
Matrix<Scalar> random_probes(Index n_nodes, Index n_probes, Rng& rng) {
  if (n_probes < 1) throw std::invalid_argument("need at least one probe");
  return gaussian_matrix<Scalar>(n_nodes, n_probes, rng, Scalar(1) / static_cast<Scalar>(n_probes));
}

/// Default probe count 10 ceil(log2 N).
inline Index default_probe_count(Index n_nodes) {
  return 10 * static_cast<Index>(std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(n_nodes)))));
}

/// Stochastic estimate of #{lambda_i <= threshold}: sum_i ||delta_i^T h~(L) R||^2
/// for the degree-r low-pass at `threshold`, using the probes supplied.
template <typename Scalar = double>
Scalar eigencount(const Laplacian<Scalar>& lap, Scalar threshold, Index r, const Matrix<Scalar>& probes,
                  Scalar lambda_max) {
  const auto f = fit_ideal_lowpass<Scalar>(threshold, lambda_max, r);
  return apply_filter(f, lap, probes).squaredNorm();
}

template <typename Scalar = double>
Scalar eigencount(const Laplacian<Scalar>& lap, Scalar threshold, Index r, Index n_probes, Rng& rng) {
  const Scalar lmax = estimate_lambda_max(lap);
  const auto probes = random_probes<Scalar>(lap.size(), n_probes, rng);
  return eigencount(lap, threshold, r, probes, lmax);
}

template <typename Scalar = double>
struct LambdaKEstimate {
  Scalar value = 0;
  /// Filter cutoffs where the estimated count crosses k - 1/2 and k + 1/2.
  Scalar lower_crossing = 0;
  Scalar upper_crossing = 0;
  /// False if either crossing could not be bracketed in [0, lambda_max];
  /// `value` is then the best iterate.
  bool bracketed = true;
};

/// Cutoff between lambda_k and lambda_{k+1}. Two bisections on
/// [0, lambda_max] locate the filter cutoffs where the shared-probe
/// eigencount crosses k - 1/2 and k + 1/2. Each bisection stops at width
/// < 1e-3 lambda_max or after 50 halvings.
///
/// The count sums h(lambda_i)^2, and the smoothed step h reaches
/// h^2 = 1/2 only above its cutoff. So at the lower crossing lambda_k sits
/// near the point where h^2 = 1/2, not at the cutoff itself; likewise
/// lambda_{k+1} at the upper one. Each crossing cutoff is therefore mapped
/// to that half-energy point, and the estimate is the midpoint of the two.
/// Counts are evaluated from Chebyshev moments of the probes, which equal
/// `eigencount` with the same probes up to rounding.
template <typename Scalar = double>
LambdaKEstimate<Scalar> estimate_lambda_k(const Laplacian<Scalar>& lap, Index k, Index r, Index n_probes,
                                          Rng& rng) {
  const Index n = lap.size();
  if (k < 1 || k >= n) throw std::invalid_argument("estimate_lambda_k: need 1 <= k < N");
  if (r < 10) throw std::invalid_argument("estimate_lambda_k: need r >= 10");
  const Scalar lmax = estimate_lambda_max(lap);
  LambdaKEstimate<Scalar> est;
  if (lmax <= 0) {
    est.bracketed = false;
    return est;
  }
  const auto probes = random_probes<Scalar>(n, n_probes, rng);
  const auto moments = chebyshev_moments<Scalar>(lap.matrix, probes, lmax, r);
  auto count = [&](Scalar c) { return filtered_energy(fit_ideal_lowpass<Scalar>(c, lmax, r), moments); };

  auto crossing = [&](Scalar level, bool& ok) {
    Scalar lo = 0, hi = lmax;
    ok = count(lo) < level && count(hi) >= level;
    for (int it = 0; it < 50 && hi - lo >= Scalar(1e-3) * lmax; ++it) {
      const Scalar mid = Scalar(0.5) * (lo + hi);
      (count(mid) >= level ? hi : lo) = mid;
    }
    return Scalar(0.5) * (lo + hi);
  };
  bool ok_lo = true, ok_hi = true;
  est.lower_crossing = crossing(static_cast<Scalar>(k) - Scalar(0.5), ok_lo);
  est.upper_crossing = crossing(static_cast<Scalar>(k) + Scalar(0.5), ok_hi);
  est.bracketed = ok_lo && ok_hi;
  auto half_energy_point = [&](Scalar c) {
    const auto h = fit_ideal_lowpass<Scalar>(c, lmax, r);
    Scalar lo = 0, hi = lmax;
    if (h(lo) * h(lo) < Scalar(0.5)) return lo;
    if (h(hi) * h(hi) >= Scalar(0.5)) return hi;
    for (int it = 0; it < 60; ++it) {
      const Scalar mid = Scalar(0.5) * (lo + hi);
      (h(mid) * h(mid) >= Scalar(0.5) ? lo : hi) = mid;
    }
    return Scalar(0.5) * (lo + hi);
  };
  est.value = Scalar(0.5) * (half_energy_point(est.lower_crossing) + half_energy_point(est.upper_crossing));
  return est;
}

// ---------------------------------------------------------------------------
// Bandlimited signals

template <typename Scalar = double>
struct BandlimitedSignal {
  Vector<Scalar> values;        // x = U_k alpha, unit norm
  Vector<Scalar> coefficients;  // alpha
  Index band() const { return coefficients.size(); }
};

/// x = U_k alpha scaled to unit norm, with alpha rescaled alongside.
template <typename Scalar = double>
BandlimitedSignal<Scalar> make_bandlimited_signal(const EigenBasis<Scalar>& basis, Vector<Scalar> alpha) {
  if (alpha.size() != basis.band()) throw std::invalid_argument("coefficient count must equal the band");
  Vector<Scalar> x = basis.vectors * alpha;
  const Scalar norm = x.norm();
  if (!(norm > 0)) throw NumericalError("bandlimited signal has zero norm");
  BandlimitedSignal<Scalar> s;
  s.values = x / norm;
  s.coefficients = alpha / norm;
  return s;
}

/// Gaussian alpha ~ N(0, I_k); resamples in the (probability-zero) case of
/// a vanishing signal.
template <typename Scalar = double>
BandlimitedSignal<Scalar> generate_bandlimited_signal(const EigenBasis<Scalar>& basis, Rng& rng) {
  if (basis.band() < 1) throw std::invalid_argument("basis must have at least one vector");
  for (;;) {
    Vector<Scalar> alpha = gaussian_matrix<Scalar>(basis.band(), 1, rng).col(0);
    if ((basis.vectors * alpha).norm() > 0) return make_bandlimited_signal(basis, std::move(alpha));
  }
}

}  // namespace gdpp
