#include "sepflow/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sepflow {

FlowNetwork::FlowNetwork(int node_count) : n_(node_count) {
  if (node_count < 1) throw std::invalid_argument("flow network: need at least one node");
}

int FlowNetwork::add_edge(int u, int v, double capacity) {
  if (u < 0 || u >= n_ || v < 0 || v >= n_)
    throw std::invalid_argument("flow network: endpoint out of range");
  if (u == v) throw std::invalid_argument("flow network: self loop");
  if (!(capacity >= 0.0)) throw std::invalid_argument("flow network: negative capacity");
  edges_.push_back({u, v, capacity});
  return static_cast<int>(edges_.size()) - 1;
}

namespace {

// Residual arcs: arc 2e runs u->v, arc 2e+1 runs v->u, both starting at the
// shared capacity.  arc^1 is the reverse arc.
struct Residual {
  std::vector<double> rem;
  std::vector<int> head;
  std::vector<std::vector<int>> out;  // arc ids per node, insertion order

  Residual(const FlowNetwork& net) {
    int m = net.edge_count();
    rem.resize(2 * m);
    head.resize(2 * m);
    out.assign(net.node_count(), {});
    for (int e = 0; e < m; ++e) {
      const auto& ed = net.edge(e);
      rem[2 * e] = ed.capacity;
      rem[2 * e + 1] = ed.capacity;
      head[2 * e] = ed.v;
      head[2 * e + 1] = ed.u;
      out[ed.u].push_back(2 * e);
      out[ed.v].push_back(2 * e + 1);
    }
  }
};

struct Dinic {
  Residual res;
  std::vector<int> level;
  std::vector<size_t> it;
  int s, t;

  Dinic(const FlowNetwork& net, int s_, int t_) : res(net), s(s_), t(t_) {}

  bool bfs() {
    level.assign(res.out.size(), -1);
    std::vector<int> queue{s};
    level[s] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int a : res.out[v]) {
        int to = res.head[a];
        if (res.rem[a] > 0.0 && level[to] < 0) {
          level[to] = level[v] + 1;
          queue.push_back(to);
        }
      }
    }
    return level[t] >= 0;
  }

  double dfs(int v, double limit) {
    if (v == t) return limit;
    for (size_t& i = it[v]; i < res.out[v].size(); ++i) {
      int a = res.out[v][i];
      int to = res.head[a];
      if (res.rem[a] <= 0.0 || level[to] != level[v] + 1) continue;
      double pushed = dfs(to, std::min(limit, res.rem[a]));
      if (pushed > 0.0) {
        res.rem[a] -= pushed;
        res.rem[a ^ 1] += pushed;
        return pushed;
      }
    }
    level[v] = -1;
    return 0.0;
  }

  double run() {
    double value = 0.0;
    while (bfs()) {
      it.assign(res.out.size(), 0);
      while (true) {
        double pushed = dfs(s, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        value += pushed;
      }
    }
    return value;
  }
};

}  // namespace

FlowResult max_flow(const FlowNetwork& net, int s, int t) {
  int n = net.node_count();
  if (s < 0 || s >= n || t < 0 || t >= n) throw std::invalid_argument("max_flow: bad terminals");
  if (s == t) throw std::invalid_argument("max_flow: s == t");

  Dinic dinic(net, s, t);
  FlowResult result;
  result.value = dinic.run();

  result.edge_flow.resize(net.edge_count());
  for (int e = 0; e < net.edge_count(); ++e)
    result.edge_flow[e] = 0.5 * (dinic.res.rem[2 * e + 1] - dinic.res.rem[2 * e]);

  result.source_side.assign(n, 0);
  std::vector<int> queue{s};
  result.source_side[s] = 1;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int a : dinic.res.out[v]) {
      int to = dinic.res.head[a];
      if (dinic.res.rem[a] > 0.0 && !result.source_side[to]) {
        result.source_side[to] = 1;
        queue.push_back(to);
      }
    }
  }
  return result;
}

double PathFlow::total() const {
  double sum = 0.0;
  for (const PathEntry& e : entries) sum += e.amount;
  return sum;
}

PathFlow flow_decompose(const FlowNetwork& net, const FlowResult& flow, int s, int t,
                        const std::vector<char>& in_a, const std::vector<char>& in_b,
                        std::vector<double>* edge_usage) {
  int n = net.node_count();
  int m = net.edge_count();
  if (static_cast<int>(flow.edge_flow.size()) != m)
    throw std::invalid_argument("flow_decompose: flow does not match network");
  if (static_cast<int>(in_a.size()) != n || static_cast<int>(in_b.size()) != n)
    throw std::invalid_argument("flow_decompose: endpoint marker size mismatch");

  double cap_scale = 0.0;
  for (int e = 0; e < m; ++e) cap_scale = std::max(cap_scale, std::abs(flow.edge_flow[e]));
  double tol = 1e-9 * (1.0 + cap_scale);

  // Conservation at interior nodes before doing anything else.
  std::vector<double> balance(n, 0.0);
  for (int e = 0; e < m; ++e) {
    balance[net.edge(e).u] -= flow.edge_flow[e];
    balance[net.edge(e).v] += flow.edge_flow[e];
  }
  for (int v = 0; v < n; ++v)
    if (v != s && v != t && std::abs(balance[v]) > tol)
      throw std::invalid_argument("flow_decompose: conservation violated at node " +
                                  std::to_string(v));

  // Directed positive-flow arcs, adjacency in edge order.
  std::vector<double> rem(m, 0.0);
  std::vector<int> from(m), to(m);
  std::vector<std::vector<int>> out(n);
  double drop = 1e-12 * (1.0 + cap_scale);
  for (int e = 0; e < m; ++e) {
    double z = flow.edge_flow[e];
    if (std::abs(z) <= drop) continue;
    rem[e] = std::abs(z);
    from[e] = z > 0.0 ? net.edge(e).u : net.edge(e).v;
    to[e] = z > 0.0 ? net.edge(e).v : net.edge(e).u;
    out[from[e]].push_back(e);
  }

  if (edge_usage) edge_usage->assign(m, 0.0);

  auto next_arc = [&](int v) -> int {
    for (int e : out[v])
      if (rem[e] > drop) return e;
    return -1;
  };

  PathFlow result;
  std::vector<int> pos(n, -1);  // position on the current walk, -1 if absent
  while (true) {
    int first = next_arc(s);
    if (first < 0) break;

    std::vector<int> node_stack{s};
    std::vector<int> arc_stack;
    pos[s] = 0;
    int cur = s;
    while (true) {
      int a = next_arc(cur);
      if (a < 0)
        throw std::logic_error("flow_decompose: walk stuck at node " + std::to_string(cur));
      int nxt = to[a];
      if (nxt == t) {
        if (node_stack.size() < 2)
          throw std::invalid_argument("flow_decompose: direct s-t flow has no interior node");
        arc_stack.push_back(a);
        double b = std::numeric_limits<double>::infinity();
        for (int ea : arc_stack) b = std::min(b, rem[ea]);
        for (int ea : arc_stack) {
          rem[ea] -= b;
          if (rem[ea] <= drop) rem[ea] = 0.0;
          if (edge_usage) (*edge_usage)[ea] += b;
        }
        int x = node_stack[1];
        int y = cur;
        if (!in_a[x])
          throw std::invalid_argument("flow_decompose: path enters outside A at node " +
                                      std::to_string(x));
        if (!in_b[y])
          throw std::invalid_argument("flow_decompose: path leaves outside B at node " +
                                      std::to_string(y));
        result.entries.push_back({x, y, b});
        break;
      }
      if (pos[nxt] >= 0) {
        // Cancel the loop from nxt back to here, then resume at nxt.
        arc_stack.push_back(a);
        size_t base = static_cast<size_t>(pos[nxt]);
        double b = std::numeric_limits<double>::infinity();
        for (size_t i = base; i < arc_stack.size(); ++i) b = std::min(b, rem[arc_stack[i]]);
        for (size_t i = base; i < arc_stack.size(); ++i) {
          rem[arc_stack[i]] -= b;
          if (rem[arc_stack[i]] <= drop) rem[arc_stack[i]] = 0.0;
        }
        while (node_stack.size() > base + 1) {
          pos[node_stack.back()] = -1;
          node_stack.pop_back();
        }
        arc_stack.resize(base);
        cur = nxt;
        continue;
      }
      arc_stack.push_back(a);
      node_stack.push_back(nxt);
      pos[nxt] = static_cast<int>(node_stack.size()) - 1;
      cur = nxt;
    }
    for (int v : node_stack) pos[v] = -1;
  }
  return result;
}

}  // namespace sepflow
