#pragma once

#include "gdpp/common.hpp"
#include "gdpp/spectral.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace gdpp {

/// Ordered list of distinct selected nodes, s_1..s_m in selection order.
/// Equivalent to the measurement matrix whose rows are delta_{s_i}^T.
struct SampleSet {
  std::vector<Index> nodes;

  Index size() const { return static_cast<Index>(nodes.size()); }
  bool contains(Index i) const { return std::find(nodes.begin(), nodes.end(), i) != nodes.end(); }

  /// Throws unless all indices are distinct and lie in [0, n).
  void validate(Index n) const {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (Index i : nodes) {
      if (i < 0 || i >= n) throw std::invalid_argument("sample index out of range: " + std::to_string(i));
      if (seen[static_cast<std::size_t>(i)]++) throw std::invalid_argument("duplicate sample index " + std::to_string(i));
    }
  }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Projection kernel K = X X^T held implicitly through X (N x d, orthonormal
/// columns). Entries and columns of K are formed on demand.
template <typename Scalar = double>
class ProjectionKernel {
 public:
  /// Checks X^T X = I_d to `tolerance` (max-entry) unless tolerance < 0.
  explicit ProjectionKernel(Matrix<Scalar> basis, double tolerance = 1e-10) : x_(std::move(basis)) {
    if (x_.cols() > x_.rows()) throw std::invalid_argument("projection kernel rank exceeds N");
    if (tolerance >= 0) {
      const Matrix<Scalar> gram = x_.transpose() * x_;
      const double err = (gram - Matrix<Scalar>::Identity(x_.cols(), x_.cols())).cwiseAbs().maxCoeff();
      if (x_.cols() > 0 && err > tolerance)
        throw std::invalid_argument("kernel basis is not orthonormal (max |X^T X - I| = " + std::to_string(err) + ")");
    }
  }

  Index size() const { return x_.rows(); }
  Index rank() const { return x_.cols(); }
  const Matrix<Scalar>& basis() const { return x_; }

  Vector<Scalar> diagonal() const { return x_.rowwise().squaredNorm(); }
  Scalar operator()(Index i, Index j) const { return x_.row(i).dot(x_.row(j)); }
  /// Column k_s = X x_s^T.
  Vector<Scalar> column(Index s) const { return x_ * x_.row(s).transpose(); }

  Matrix<Scalar> submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
    Matrix<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = (*this)(rows[a], cols[b]);
    return out;
  }
  Matrix<Scalar> submatrix(std::span<const Index> idx) const { return submatrix(idx, idx); }

  /// Dense N x N kernel. Test-scale only.
  Matrix<Scalar> dense() const { return x_ * x_.transpose(); }

 private:
  Matrix<Scalar> x_;
};

template <typename Scalar = double>
ProjectionKernel<Scalar> kernel_from_basis(const EigenBasis<Scalar>& basis) {
  return ProjectionKernel<Scalar>(basis.vectors, 1e-8);
}

/// Record of one sampler run.
template <typename Scalar = double>
struct SamplerTrace {
  /// Columns p_0..p_m (only when recording was requested).
  Matrix<Scalar> scores;
  /// Columns f_1..f_m of the fast sampler (only when recording).
  Matrix<Scalar> orthogonalized;
  /// sum_i p_n(i) for n = 0..m.
  std::vector<double> normalizers;
  /// Arithmetic performed by the selection loop itself, with the kernel
  /// treated as given input (one flop per add or multiply).
  std::uint64_t sampler_flops = 0;
  /// Arithmetic spent forming kernel columns/rows from X.
  std::uint64_t kernel_flops = 0;
};

template <typename Scalar = double>
struct SamplerResult {
  SampleSet sample;
  SamplerTrace<Scalar> trace;
};

struct SamplerOptions {
  bool record_trace = false;
  /// When non-empty, step n selects forced[n] instead of drawing.
  std::vector<Index> forced;
};

/// Scores within this distance below zero are roundoff and clamp to 0.
inline constexpr double kScoreFloor = 1e-10;

namespace detail {

template <typename Scalar>
void clamp_scores(Vector<Scalar>& p) {
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) < 0) {
      if (p(i) < -kScoreFloor)
        throw NumericalError("negative conditional score " + std::to_string(static_cast<double>(p(i))) +
                             " at node " + std::to_string(i) + "; kernel is not a projection");
      p(i) = 0;
    }
  }
}

/// Inverse-CDF draw from the unnormalized scores p >= 0.
template <typename Scalar>
Index draw_from_scores(const Vector<Scalar>& p, Rng& rng) {
  const double total = static_cast<double>(p.sum());
  if (!(total > 0)) throw NumericalError("all conditional scores vanished");
  std::uniform_real_distribution<double> unif(0.0, total);
  const double u = unif(rng);
  double run = 0;
  Index last = -1;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0) continue;
    run += static_cast<double>(p(i));
    last = i;
    if (u < run) return i;
  }
  return last;
}

/// Lowest-index argmax, optionally skipping masked nodes.
template <typename Scalar>
Index argmax_score(const Vector<Scalar>& p, const std::vector<char>* excluded = nullptr) {
  Index best = -1;
  for (Index i = 0; i < p.size(); ++i) {
    if (excluded && (*excluded)[static_cast<std::size_t>(i)]) continue;
    if (best < 0 || p(i) > p(best)) best = i;
  }
  return best;
}

template <typename Scalar>
void check_size(const ProjectionKernel<Scalar>& k, Index m) {
  if (m < 0) throw std::invalid_argument("sample size must be non-negative");
  if (m > k.rank())
    throw std::invalid_argument("m-DPP needs m <= rank d (m = " + std::to_string(m) +
                                ", d = " + std::to_string(k.rank()) + ")");
}

template <typename Scalar>
void begin_trace(SamplerTrace<Scalar>& t, const Vector<Scalar>& p0, Index m, bool record, bool with_f) {
  if (record) {
    t.scores.resize(p0.size(), m + 1);
    t.scores.col(0) = p0;
    if (with_f) t.orthogonalized.resize(p0.size(), m);
  }
  t.normalizers.push_back(static_cast<double>(p0.sum()));
}

enum class Selection { Draw, Argmax };

/// Fast loop shared by the random and greedy samplers:
///   f_n = k_{s_n} - sum_{l<n} f_l f_l(s_n),  f_n /= sqrt(f_n(s_n)),  p -= f_n^2.
template <typename Scalar>
SamplerResult<Scalar> fast_loop(const ProjectionKernel<Scalar>& kernel, Index m, Selection mode, Rng* rng,
                                const SamplerOptions& opt) {
  check_size(kernel, m);
  const Index n = kernel.size();
  const auto un = static_cast<std::uint64_t>(n);
  const auto ud = static_cast<std::uint64_t>(kernel.rank());
  if (!opt.forced.empty() && static_cast<Index>(opt.forced.size()) != m)
    throw std::invalid_argument("forced sequence length must equal m");

  SamplerResult<Scalar> out;
  auto& tr = out.trace;
  Vector<Scalar> p = kernel.diagonal();
  tr.kernel_flops += 2 * un * ud;
  begin_trace(tr, p, m, opt.record_trace, true);

  Matrix<Scalar> f(n, m);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (Index step = 0; step < m; ++step) {
    Index s;
    if (!opt.forced.empty()) s = opt.forced[static_cast<std::size_t>(step)];
    else if (mode == Selection::Argmax) s = argmax_score(p);
    else s = draw_from_scores(p, *rng);
    if (s < 0 || s >= n || chosen[static_cast<std::size_t>(s)])
      throw std::invalid_argument("selected node invalid or already chosen");
    chosen[static_cast<std::size_t>(s)] = 1;
    out.sample.nodes.push_back(s);

    auto fn = f.col(step);
    fn = kernel.column(s);
    tr.kernel_flops += 2 * un * ud;
    if (step > 0) {
      fn.noalias() -= f.leftCols(step) * f.row(s).head(step).transpose();
      tr.sampler_flops += 2 * un * static_cast<std::uint64_t>(step);
    }
    const Scalar pivot = fn(s);
    if (!(pivot > 0))
      throw NumericalError("f_n(s_n) = " + std::to_string(static_cast<double>(pivot)) +
                           " <= 0; kernel is not a projection");
    fn /= std::sqrt(pivot);
    p -= fn.cwiseAbs2();
    tr.sampler_flops += 3 * un;
    clamp_scores(p);

    tr.normalizers.push_back(static_cast<double>(p.sum()));
    if (opt.record_trace) {
      tr.scores.col(step + 1) = p;
      tr.orthogonalized.col(step) = fn;
    }
  }
  return out;
}

}  // namespace detail

/// Reference m-DPP sampler. Scores are recomputed from scratch each step as
///   p(i) = p_0(i) - K_{S,i}^T K_S^{-1} K_{S,i},
/// with K_S^{-1} maintained by bordered (rank-one Schur) updates.
template <typename Scalar = double>
SamplerResult<Scalar> sample_mdpp_reference(const ProjectionKernel<Scalar>& kernel, Index m, Rng& rng,
                                            const SamplerOptions& opt = {}) {
  detail::check_size(kernel, m);
  if (!opt.forced.empty() && static_cast<Index>(opt.forced.size()) != m)
    throw std::invalid_argument("forced sequence length must equal m");
  const Index n = kernel.size();
  const auto un = static_cast<std::uint64_t>(n);
  const auto ud = static_cast<std::uint64_t>(kernel.rank());

  SamplerResult<Scalar> out;
  auto& tr = out.trace;
  const Vector<Scalar> p0 = kernel.diagonal();
  tr.kernel_flops += 2 * un * ud;
  Vector<Scalar> p = p0;
  detail::begin_trace(tr, p0, m, opt.record_trace, false);

  Matrix<Scalar> rows(m, n);  // K_{S,:}
  Matrix<Scalar> inv(m, m);   // K_S^{-1}
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (Index step = 0; step < m; ++step) {
    const Index s = opt.forced.empty() ? detail::draw_from_scores(p, rng) : opt.forced[static_cast<std::size_t>(step)];
    if (s < 0 || s >= n || chosen[static_cast<std::size_t>(s)])
      throw std::invalid_argument("selected node invalid or already chosen");
    chosen[static_cast<std::size_t>(s)] = 1;
    out.sample.nodes.push_back(s);

    rows.row(step) = kernel.column(s).transpose();
    tr.kernel_flops += 2 * un * ud;

    // Border K_S^{-1} with the new node: gamma is the Schur complement.
    const auto us = static_cast<std::uint64_t>(step);
    const Scalar kss = rows(step, s);
    if (step == 0) {
      if (!(kss > 0)) throw NumericalError("K_S is numerically singular");
      inv(0, 0) = Scalar(1) / kss;
    } else {
      Vector<Scalar> b(step);
      for (Index a = 0; a < step; ++a) b(a) = rows(a, s);
      const Vector<Scalar> ib = inv.topLeftCorner(step, step) * b;
      const Scalar gamma = kss - b.dot(ib);
      if (!(gamma > std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), kss)))
        throw NumericalError("K_S is numerically singular (Schur complement " +
                             std::to_string(static_cast<double>(gamma)) + ")");
      inv.topLeftCorner(step, step) += ib * ib.transpose() / gamma;
      inv.block(0, step, step, 1) = -ib / gamma;
      inv.block(step, 0, 1, step) = -ib.transpose() / gamma;
      inv(step, step) = Scalar(1) / gamma;
      tr.sampler_flops += 4 * us * us + 4 * us + 2;
    }

    const Index sz = step + 1;
    const auto usz = static_cast<std::uint64_t>(sz);
    const Matrix<Scalar> solved = inv.topLeftCorner(sz, sz) * rows.topRows(sz);
    p = p0 - (rows.topRows(sz).array() * solved.array()).colwise().sum().transpose().matrix();
    tr.sampler_flops += 2 * usz * usz * un + 2 * usz * un;
    detail::clamp_scores(p);

    tr.normalizers.push_back(static_cast<double>(p.sum()));
    if (opt.record_trace) tr.scores.col(step + 1) = p;
  }
  return out;
}

/// O(N m^2) m-DPP sampler built on orthogonalized kernel columns.
template <typename Scalar = double>
SamplerResult<Scalar> sample_mdpp_fast(const ProjectionKernel<Scalar>& kernel, Index m, Rng& rng,
                                       const SamplerOptions& opt = {}) {
  return detail::fast_loop(kernel, m, detail::Selection::Draw, &rng, opt);
}

/// Deterministic variant selecting argmax_i p_n(i) at each step (lowest
/// index on ties). Greedily maximizes det(K_A).
template <typename Scalar = double>
SamplerResult<Scalar> sample_mdpp_greedy_traced(const ProjectionKernel<Scalar>& kernel, Index m,
                                                const SamplerOptions& opt = {}) {
  return detail::fast_loop(kernel, m, detail::Selection::Argmax, nullptr, opt);
}

template <typename Scalar = double>
SampleSet sample_mdpp_greedy(const ProjectionKernel<Scalar>& kernel, Index m) {
  return sample_mdpp_greedy_traced(kernel, m).sample;
}

/// log Z for the m-DPP of a rank-d projection: Z = prod_{l=1}^m (d - l + 1).
inline double mdpp_log_normalizer(Index d, Index m) {
  double z = 0;
  for (Index l = 1; l <= m; ++l) z += std::log(static_cast<double>(d - l + 1));
  return z;
}

/// Log-probability that the sampler returns the set A in some order:
/// log det(K_A) - log Z + log m!. Z normalizes ordered selection sequences;
/// each set is reached by m! of them. -inf when det(K_A) <= 0 numerically.
template <typename Scalar = double>
double mdpp_log_probability(const ProjectionKernel<Scalar>& kernel, const SampleSet& a) {
  a.validate(kernel.size());
  detail::check_size(kernel, a.size());
  if (a.size() == 0) return 0.0;
  const Matrix<Scalar> ka = kernel.submatrix(a.nodes);
  const double det = static_cast<double>(ka.partialPivLu().determinant());
  if (!(det > 0)) return -std::numeric_limits<double>::infinity();
  return std::log(det) - mdpp_log_normalizer(kernel.rank(), a.size()) + std::lgamma(static_cast<double>(a.size()) + 1);
}

/// Random orthonormal N x d basis (QR of a Gaussian matrix).
template <typename Scalar = double>
Matrix<Scalar> random_orthonormal_basis(Index n, Index d, Rng& rng) {
  const Matrix<Scalar> g = gaussian_matrix<Scalar>(n, d, rng);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
  return qr.householderQ() * Matrix<Scalar>::Identity(n, d);
}

}  // namespace gdpp
