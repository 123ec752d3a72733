#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sepflow {

// Undirected weighted edge, canonical orientation u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simple undirected graph with nonnegative edge weights.  Edges are kept
// sorted by (u, v); parallel edges are merged by summing their weights.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::pair<int, double>>& neighbors(int v) const;

  double total_weight() const { return total_weight_; }
  // Smallest strictly positive edge weight; 0 if there is none.
  double min_positive_weight() const { return min_positive_weight_; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  double total_weight_ = 0.0;
  double min_positive_weight_ = 0.0;
};

// side[i] == 1 marks membership in the cut set S.
struct Cut {
  std::vector<char> side;
  double value = 0.0;
  double balance = 0.0;  // min(|S|, n-|S|) / n
};

// Two accepted text formats:
//   * edge list: one "i j w" triple per line, 0-based ids, '#' comments
//   * header form: "p <n> <m>" followed by m lines "e i j w", 1-based ids,
//     'c' comment lines
Graph load_graph(std::string_view text);
Graph load_graph_file(const std::string& path);

// Emits the header form with 17 significant digits so that
// load_graph(serialize(g)) reproduces g bit for bit.
std::string serialize(const Graph& g);

// Two k-cliques joined by a single unit bridge edge (k-1, k).  All edge
// weights are 1; n = 2k, m = k*(k-1) + 1.
Graph dumbbell(int k);

// G(n, p) with unit weights, deterministic in seed.
Graph random_graph(int n, double p, std::uint64_t seed);

double cut_value(const Graph& g, const std::vector<char>& side);
double edge_expansion(const Graph& g, const std::vector<char>& side);
int side_count(const std::vector<char>& side);
bool is_c_balanced(int n, const std::vector<char>& side, double c);
Cut make_cut(const Graph& g, std::vector<char> side);

}  // namespace sepflow
