#pragma once

#include <vector>

namespace sepflow {

// Undirected capacitated network.  Each edge is one capacity budget shared by
// both directions, so a unit of u->v flow frees a unit of v->u headroom.
class FlowNetwork {
 public:
  struct EdgeInfo {
    int u = 0;
    int v = 0;
    double capacity = 0.0;
  };

  explicit FlowNetwork(int node_count);
  int add_edge(int u, int v, double capacity);  // returns edge id
  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const EdgeInfo& edge(int e) const { return edges_[e]; }
  const std::vector<EdgeInfo>& edges() const { return edges_; }

 private:
  int n_ = 0;
  std::vector<EdgeInfo> edges_;
};

struct FlowResult {
  double value = 0.0;
  // Net flow per edge, positive in the u->v direction of edge(e).
  std::vector<double> edge_flow;
  // Nodes reachable from s in the residual network; a minimum cut.
  std::vector<char> source_side;
};

// Deterministic blocking-flow (Dinic) maximum flow.  Exact on integer
// capacities; bottleneck subtraction keeps saturated arcs at exactly zero.
FlowResult max_flow(const FlowNetwork& net, int s, int t);

struct PathEntry {
  int x = 0;  // first node after s
  int y = 0;  // last node before t
  double amount = 0.0;
};

struct PathFlow {
  std::vector<PathEntry> entries;
  double total() const;
};

// Strips the positive-flow graph into s->t paths, recording endpoints only.
// Cycles met along a walk are canceled in place, so injected circulations do
// not change the result.  Every path must enter through A and leave through
// B; conservation at interior nodes is validated first.  When edge_usage is
// given it receives the per-edge total of stripped path amounts.
PathFlow flow_decompose(const FlowNetwork& net, const FlowResult& flow, int s, int t,
                        const std::vector<char>& in_a, const std::vector<char>& in_b,
                        std::vector<double>* edge_usage = nullptr);

}  // namespace sepflow
