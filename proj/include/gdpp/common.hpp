#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdpp {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Random engine used throughout. Every generator takes one explicitly.
using Rng = std::mt19937_64;

/// Raised when a numerical procedure cannot produce a trustworthy answer
/// (non-projector kernel, solver non-convergence, large negative scores).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the sampled rows of U_k do not have full column rank.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double smallest, double largest)
      : std::runtime_error(what), smallest_(smallest), largest_(largest) {}

  double smallest_singular_value() const { return smallest_; }
  double largest_singular_value() const { return largest_; }

 private:
  double smallest_;
  double largest_;
};

/// SplitMix64 finalizer. Used to derive independent per-trial seeds from a
/// base seed and a tuple of integer labels.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename... Labels>
constexpr std::uint64_t derive_seed(std::uint64_t base, Labels... labels) {
  std::uint64_t s = mix_seed(base);
  ((s = mix_seed(s ^ static_cast<std::uint64_t>(labels))), ...);
  return s;
}

/// N x n matrix of i.i.d. N(0, variance) entries, filled column by column.
template <typename Scalar = double>
Matrix<Scalar> gaussian_matrix(Index rows, Index cols, Rng& rng, Scalar variance = Scalar(1)) {
  std::normal_distribution<double> normal(0.0, std::sqrt(static_cast<double>(variance)));
  Matrix<Scalar> out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = static_cast<Scalar>(normal(rng));
  return out;
}

}  // namespace gdpp
