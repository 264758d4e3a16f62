#include "gdpp/graph.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace gdpp {

Graph parse_edge_list(std::istream& in) {
  std::map<std::pair<Index, Index>, std::pair<double, int>> edges;  // weight, orientations seen
  Index declared = -1;
  Index max_index = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string key;
      long long n = 0;
      if (first == "#" && (ls >> key) && key == "nodes" && (ls >> n)) {
        if (n <= 0) throw ParseError("node count must be positive", lineno);
        declared = static_cast<Index>(n);
      }
      continue;
    }
    long long i = 0, j = 0;
    double w = 1.0;
    std::istringstream fs(line);
    if (!(fs >> i >> j)) throw ParseError("expected 'i j [w]'", lineno);
    if (!(fs >> w)) {
      if (!fs.eof()) throw ParseError("malformed weight", lineno);
      w = 1.0;
    }
    std::string extra;
    if (fs.clear(), fs >> extra) throw ParseError("trailing content '" + extra + "'", lineno);
    if (i < 0 || j < 0) throw ParseError("negative node index", lineno);
    if (i == j) throw ParseError("self-loop on node " + std::to_string(i), lineno);
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParseError("weight must be finite and non-negative", lineno);
    const auto key = std::pair{static_cast<Index>(std::min(i, j)), static_cast<Index>(std::max(i, j))};
    const int orientation = i < j ? 1 : 2;
    auto [it, inserted] = edges.try_emplace(key, w, orientation);
    if (!inserted) {
      // The reversed listing of an edge with equal weight is its symmetric
      // counterpart; a repeated orientation or a different weight is not.
      auto& [weight, seen] = it->second;
      const std::string pair = "(" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")";
      if (weight != w) throw ParseError("conflicting weights for edge " + pair, lineno);
      if (seen & orientation) throw ParseError("duplicate edge " + pair, lineno);
      seen |= orientation;
    }
    max_index = std::max<Index>(max_index, static_cast<Index>(std::max(i, j)));
  }
  const Index n = declared > 0 ? declared : max_index + 1;
  if (n <= 0) throw ParseError("empty edge list without a '# nodes N' header", lineno);
  if (max_index >= n) throw ParseError("node index exceeds declared node count", lineno);
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [key, val] : edges) list.push_back({key.first, key.second, val.first});
  return Graph(n, std::move(list));
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.n_nodes() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.weight << '\n';
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path.string());
  write_edge_list(out, g);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gdpp
