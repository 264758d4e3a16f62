#pragma once

#include "gdpp/dpp.hpp"
#include "gdpp/graph.hpp"
#include "gdpp/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace gdpp::testing {

inline Graph path_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph(n, e);
}

inline Graph cycle_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return Graph(n, e);
}

inline Graph complete_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return Graph(n, e);
}

inline Graph star_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 1; i < n; ++i) e.push_back({0, i, 1.0});
  return Graph(n, e);
}

/// Two disjoint cliques of `size` nodes: 0..size-1 and size..2 size-1.
inline Graph two_cliques(Index size) {
  std::vector<Edge> e;
  for (Index c = 0; c < 2; ++c)
    for (Index i = 0; i < size; ++i)
      for (Index j = i + 1; j < size; ++j) e.push_back({c * size + i, c * size + j, 1.0});
  return Graph(2 * size, e);
}

inline Graph grid_graph(Index rows, Index cols) {
  std::vector<Edge> e;
  auto id = [cols](Index r, Index c) { return r * cols + c; };
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return Graph(rows * cols, e);
}

/// Points uniform in the unit square joined when closer than `radius`,
/// weighted exp(-d^2 / radius^2). A path through all nodes (in index
/// order) is added with small weight so the graph is connected.
inline Graph random_geometric(Index n, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = u(rng);
    y[static_cast<std::size_t>(i)] = u(rng);
  }
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double dx = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      const double dy = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)];
      const double d2 = dx * dx + dy * dy;
      if (d2 < radius * radius) e.push_back({i, j, std::exp(-d2 / (radius * radius))});
      else if (j == i + 1) e.push_back({i, j, 0.05});
    }
  return Graph(n, e);
}

inline Graph small_sbm(Index n, Index q, std::uint64_t seed, double degree = 8.0) {
  SbmConfig cfg;
  cfg.n_nodes = n;
  cfg.n_communities = q;
  cfg.average_degree = degree;
  cfg.seed = seed;
  return generate_sbm(cfg);
}

struct NamedGraph {
  std::string name;
  Graph graph;
};

/// Small graphs (N <= 50) used wherever a dense oracle is affordable.
inline std::vector<NamedGraph> small_corpus() {
  return {
      {"path-7", path_graph(7)},
      {"cycle-12", cycle_graph(12)},
      {"complete-6", complete_graph(6)},
      {"star-10", star_graph(10)},
      {"two-cliques-5", two_cliques(5)},
      {"grid-5x6", grid_graph(5, 6)},
      {"geometric-40", random_geometric(40, 0.3, 11)},
      {"sbm-48", small_sbm(48, 4, 3)},
  };
}

/// Dense Laplacian and its full eigendecomposition (the test oracle).
struct DenseSpectrum {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline DenseSpectrum dense_spectrum(const Graph& g) {
  DenseSpectrum d;
  d.laplacian = Eigen::MatrixXd(build_laplacian<double>(g).matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.laplacian);
  d.values = es.eigenvalues();
  d.vectors = es.eigenvectors();
  return d;
}

inline EigenBasis<double> dense_basis(const Graph& g, Index k) {
  const auto d = dense_spectrum(g);
  EigenBasis<double> b;
  b.vectors = d.vectors.leftCols(k);
  b.values = d.values.head(k);
  normalize_signs(b.vectors);
  return b;
}

/// Dense evaluation U f(Lambda) U^T.
template <typename F>
Eigen::MatrixXd spectral_function(const DenseSpectrum& d, F f) {
  Eigen::VectorXd fv(d.values.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(d.values(i));
  return d.vectors * fv.asDiagonal() * d.vectors.transpose();
}

inline double determinant(const Eigen::MatrixXd& a) { return a.rows() == 0 ? 1.0 : a.determinant(); }

}  // namespace gdpp::testing
