#pragma once

#include "gdpp/chebyshev.hpp"
#include "gdpp/common.hpp"
#include "gdpp/dpp.hpp"
#include "gdpp/spectral.hpp"

#include <cmath>
#include <vector>

namespace gdpp {

/// p_0(i) = ||delta_i^T h~(L) R||^2 for the given probe matrix R. An
/// unbiased estimate of diag(h~(L)^2) when E[R R^T] = I.
template <typename Scalar = double>
Vector<Scalar> estimate_diagonal(const ChebyshevFilter<Scalar>& f, const Laplacian<Scalar>& lap,
                                 const Matrix<Scalar>& probes) {
  return apply_filter(f, lap, probes).rowwise().squaredNorm();
}

template <typename Scalar = double>
Vector<Scalar> estimate_diagonal(const ChebyshevFilter<Scalar>& f, const Laplacian<Scalar>& lap, Index n_probes,
                                 Rng& rng) {
  return estimate_diagonal(f, lap, random_probes<Scalar>(lap.size(), n_probes, rng));
}

template <typename Scalar = double>
struct ApproxSampleResult {
  SampleSet sample;
  ChebyshevFilter<Scalar> filter;
  Vector<Scalar> initial_scores;
  /// Steps at which f_n(s_n) <= 0 forced the sqrt(||f_n|| / N) normalization.
  std::vector<Index> renormalized_steps;
  /// Count of (step, unselected node) pairs where p increased. Zero unless
  /// something is badly wrong: the update only subtracts squares.
  Index score_increases = 0;
  /// Columns p_0..p_m when recording.
  Matrix<Scalar> scores;
};

struct ApproxSamplerOptions {
  bool jackson = true;
  bool record_scores = false;
};

/// Greedy approximate m-DPP selection given a fitted filter and estimated
/// initial scores. Kernel columns k_s are replaced by h~(L) delta_s. After
/// each update, scores of selected nodes are forced to 0, and a
/// non-positive pivot f_n(s_n) is handled by dividing f_n by
/// sqrt(||f_n||_2 / N). Selection skips already chosen nodes, so m may
/// exceed the band.
template <typename Scalar = double>
ApproxSampleResult<Scalar> sample_approx_with(const ChebyshevFilter<Scalar>& filter, const Laplacian<Scalar>& lap,
                                              const Vector<Scalar>& initial_scores, Index m,
                                              const ApproxSamplerOptions& opt = {}) {
  const Index n = lap.size();
  if (m < 1 || m > n) throw std::invalid_argument("sample_approx: need 1 <= m <= N");
  if (initial_scores.size() != n) throw std::invalid_argument("initial score vector has wrong size");

  ApproxSampleResult<Scalar> out;
  out.filter = filter;
  out.initial_scores = initial_scores;
  if (opt.record_scores) {
    out.scores.resize(n, m + 1);
    out.scores.col(0) = initial_scores;
  }

  Vector<Scalar> p = initial_scores;
  Matrix<Scalar> f(n, m);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (Index step = 0; step < m; ++step) {
    const Index s = detail::argmax_score(p, &chosen);
    chosen[static_cast<std::size_t>(s)] = 1;
    out.sample.nodes.push_back(s);

    auto fn = f.col(step);
    fn = apply_filter(filter, lap, Vector<Scalar>::Unit(n, s));
    if (step > 0) fn.noalias() -= f.leftCols(step) * f.row(s).head(step).transpose();
    const Scalar pivot = fn(s);
    if (pivot > 0) {
      fn /= std::sqrt(pivot);
    } else {
      const Scalar scale = std::sqrt(fn.norm() / static_cast<Scalar>(n));
      if (scale > 0) fn /= scale;
      out.renormalized_steps.push_back(step);
    }

    const Vector<Scalar> before = p;
    p -= fn.cwiseAbs2();
    for (Index i : out.sample.nodes) p(i) = 0;
    for (Index i = 0; i < n; ++i)
      if (!chosen[static_cast<std::size_t>(i)] && p(i) > before(i)) ++out.score_increases;
    if (opt.record_scores) out.scores.col(step + 1) = p;
  }
  return out;
}

/// Eigendecomposition-free approximate m-DPP sampling: estimate lambda_max,
/// fit the degree-r low-pass at `lambda_k`, estimate diag(h~(L)^2) from
/// `n_probes` Gaussian probes, then run `sample_approx_with`. Randomness
/// enters only through the probes.
template <typename Scalar = double>
ApproxSampleResult<Scalar> sample_approx(const Laplacian<Scalar>& lap, Scalar lambda_k, Index r, Index m,
                                         Index n_probes, Rng& rng, const ApproxSamplerOptions& opt = {}) {
  if (r < 10) throw std::invalid_argument("sample_approx: need r >= 10");
  const Scalar lmax = estimate_lambda_max(lap);
  if (!(lmax > 0)) throw std::invalid_argument("sample_approx: graph has no edges");
  const auto filter = fit_ideal_lowpass<Scalar>(lambda_k, lmax, r, opt.jackson);
  const auto probes = random_probes<Scalar>(lap.size(), n_probes, rng);
  return sample_approx_with(filter, lap, estimate_diagonal(filter, lap, probes), m, opt);
}

}  // namespace gdpp
