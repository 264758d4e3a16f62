#pragma once

#include "gdpp/common.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gdpp {

struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph. Each undirected edge is stored once with
/// i < j; the adjacency W it describes is symmetric with W_ij = W_ji >= 0.
class Graph {
 public:
  Graph() = default;

  /// Validates and canonicalizes an edge list. Each undirected pair may
  /// appear at most once (in either orientation); self-loops, negative or
  /// non-finite weights and out-of-range endpoints are rejected.
  Graph(Index n_nodes, std::vector<Edge> edges) : n_nodes_(n_nodes) {
    if (n_nodes <= 0) throw std::invalid_argument("graph must have at least one node");
    std::map<std::pair<Index, Index>, double> seen;
    for (auto& e : edges) {
      if (e.i < 0 || e.j < 0 || e.i >= n_nodes || e.j >= n_nodes)
        throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(e.i) + ", " +
                                    std::to_string(e.j) + ")");
      if (e.i == e.j) throw std::invalid_argument("self-loop on node " + std::to_string(e.i));
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
        throw std::invalid_argument("edge weight must be finite and non-negative");
      if (e.i > e.j) std::swap(e.i, e.j);
      if (!seen.emplace(std::pair{e.i, e.j}, e.weight).second)
        throw std::invalid_argument("duplicate edge (" + std::to_string(e.i) + ", " +
                                    std::to_string(e.j) + ")");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair{a.i, a.j} < std::pair{b.i, b.j}; });
    edges_ = std::move(edges);
  }

  Index n_nodes() const { return n_nodes_; }
  Index n_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  double average_degree() const { return 2.0 * static_cast<double>(edges_.size()) / n_nodes_; }

  template <typename Scalar = double>
  Eigen::SparseMatrix<Scalar> adjacency() const {
    std::vector<Eigen::Triplet<Scalar>> t;
    t.reserve(2 * edges_.size());
    for (const auto& e : edges_) {
      t.emplace_back(e.i, e.j, static_cast<Scalar>(e.weight));
      t.emplace_back(e.j, e.i, static_cast<Scalar>(e.weight));
    }
    Eigen::SparseMatrix<Scalar> w(n_nodes_, n_nodes_);
    w.setFromTriplets(t.begin(), t.end());
    return w;
  }

 private:
  Index n_nodes_ = 0;
  std::vector<Edge> edges_;
};

/// Combinatorial Laplacian L = D - W.
template <typename Scalar = double>
struct Laplacian {
  Eigen::SparseMatrix<Scalar> matrix;
  Vector<Scalar> degree;

  Index size() const { return matrix.rows(); }
};

/// Builds L = D - W. The diagonal is always stored explicitly, so
/// nnz(L) = nnz(W) + N even for isolated nodes.
template <typename Scalar = double>
Laplacian<Scalar> build_laplacian(const Graph& g) {
  const Index n = g.n_nodes();
  Vector<Scalar> degree = Vector<Scalar>::Zero(n);
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(2 * g.edges().size() + n);
  for (const auto& e : g.edges()) {
    const auto w = static_cast<Scalar>(e.weight);
    degree(e.i) += w;
    degree(e.j) += w;
    t.emplace_back(e.i, e.j, -w);
    t.emplace_back(e.j, e.i, -w);
  }
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, degree(i));
  Laplacian<Scalar> lap;
  lap.matrix.resize(n, n);
  lap.matrix.setFromTriplets(t.begin(), t.end());
  lap.matrix.makeCompressed();
  lap.degree = std::move(degree);
  return lap;
}

// ---------------------------------------------------------------------------
// Stochastic block model

struct SbmConfig {
  Index n_nodes = 1000;
  Index n_communities = 10;
  /// epsilon = epsilon_ratio * epsilon_c; 0 gives disconnected blocks.
  double epsilon_ratio = 0.25;
  double average_degree = 16.0;
  std::uint64_t seed = 0;
};

/// Detectability threshold for q equal blocks at average degree c:
/// (c - sqrt(c)) / (c + sqrt(c) (q - 1)).
inline double sbm_critical_epsilon(double c, Index q) {
  const double s = std::sqrt(c);
  return (c - s) / (c + s * static_cast<double>(q - 1));
}

struct SbmProbabilities {
  double p_in = 0.0;
  double p_out = 0.0;
};

/// Solves p_in (n_b - 1) + p_out (N - n_b) = c with p_out = epsilon p_in.
inline SbmProbabilities sbm_probabilities(const SbmConfig& cfg) {
  if (cfg.n_nodes < 2) throw std::invalid_argument("SBM needs at least two nodes");
  if (cfg.n_communities < 1 || cfg.n_nodes % cfg.n_communities != 0)
    throw std::invalid_argument("n_nodes must be divisible by n_communities");
  if (cfg.epsilon_ratio < 0.0 || cfg.epsilon_ratio > 1.0)
    throw std::invalid_argument("epsilon_ratio must lie in [0, 1]");
  if (!(cfg.average_degree > 1.0))
    throw std::invalid_argument("average_degree must exceed 1");
  const double n = static_cast<double>(cfg.n_nodes);
  const double block = n / static_cast<double>(cfg.n_communities);
  const double eps = cfg.epsilon_ratio * sbm_critical_epsilon(cfg.average_degree, cfg.n_communities);
  SbmProbabilities p;
  p.p_in = cfg.average_degree / ((block - 1.0) + eps * (n - block));
  p.p_out = eps * p.p_in;
  if (p.p_in > 1.0)
    throw std::invalid_argument("SBM configuration infeasible: solved p_in = " + std::to_string(p.p_in) +
                                " exceeds 1");
  return p;
}

inline Index sbm_community(const SbmConfig& cfg, Index node) {
  return node / (cfg.n_nodes / cfg.n_communities);
}

/// Draws one unweighted SBM realisation with equal-size contiguous blocks.
inline Graph generate_sbm(const SbmConfig& cfg, Rng& rng) {
  const auto p = sbm_probabilities(cfg);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  for (Index i = 0; i < cfg.n_nodes; ++i) {
    const Index ci = sbm_community(cfg, i);
    for (Index j = i + 1; j < cfg.n_nodes; ++j) {
      const double prob = sbm_community(cfg, j) == ci ? p.p_in : p.p_out;
      if (unif(rng) < prob) edges.push_back({i, j, 1.0});
    }
  }
  return Graph(cfg.n_nodes, std::move(edges));
}

inline Graph generate_sbm(const SbmConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_sbm(cfg, rng);
}

// ---------------------------------------------------------------------------
// Edge-list I/O (implemented in src/graph_io.cpp)

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads whitespace-separated "i j w" lines (0-indexed; w defaults to 1).
/// Lines starting with '#' are comments, except "# nodes N" which fixes
/// the node count. A reversed listing "j i w" of an edge is accepted when
/// the weight agrees; conflicting weights and repeated lines are errors.
Graph parse_edge_list(std::istream& in);
Graph load_graph(const std::filesystem::path& path);

void write_edge_list(std::ostream& out, const Graph& g);
void save_graph(const std::filesystem::path& path, const Graph& g);

}  // namespace gdpp
