#include "sepflow/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sepflow {

double MatchingConfig::pi_for(int n_active) const {
  if (n_active < 1) throw std::invalid_argument("pi_for: empty active set");
  return 6.0 * alpha / (c_prime * n_active * delta);
}

void MatchingConfig::validate() const {
  if (!(c_prime > 0.0 && c_prime < 0.25))
    throw std::invalid_argument("matching config: c' outside (0, 1/4)");
  if (!(sigma > 0.0)) throw std::invalid_argument("matching config: sigma must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("matching config: delta must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("matching config: alpha must be positive");
}

bool semantically_equal(const MatchingResult& l, const MatchingResult& r) {
  if (l.kind != r.kind || l.a_side != r.a_side || l.b_side != r.b_side || l.pi != r.pi ||
      l.n_active != r.n_active)
    return false;
  switch (l.kind) {
    case MatchingResult::Kind::kCut:
      return l.cut.side == r.cut.side && l.cut.value == r.cut.value &&
             l.cut.balance == r.cut.balance;
    case MatchingResult::Kind::kSaturatedFlow: {
      if (l.flow.observed != r.flow.observed || l.flow.flow_value != r.flow.flow_value)
        return false;
      if (l.flow.demands.entries.size() != r.flow.demands.entries.size()) return false;
      for (size_t i = 0; i < l.flow.demands.entries.size(); ++i) {
        const PathEntry& a = l.flow.demands.entries[i];
        const PathEntry& b = r.flow.demands.entries[i];
        if (a.x != b.x || a.y != b.y || a.amount != b.amount) return false;
      }
      if (l.flow.flow_support.size() != r.flow.flow_support.size()) return false;
      for (size_t i = 0; i < l.flow.flow_support.size(); ++i) {
        const Edge& a = l.flow.flow_support[i];
        const Edge& b = r.flow.flow_support[i];
        if (a.u != b.u || a.v != b.v || a.w != b.w) return false;
      }
      return true;
    }
    case MatchingResult::Kind::kMatched: {
      if (l.matched.edges.size() != r.matched.edges.size()) return false;
      for (size_t i = 0; i < l.matched.edges.size(); ++i)
        if (l.matched.edges[i].tail != r.matched.edges[i].tail ||
            l.matched.edges[i].head != r.matched.edges[i].head)
          return false;
      return true;
    }
  }
  return false;
}

MatchingResult reverse(MatchingResult r) {
  std::swap(r.a_side, r.b_side);
  for (MatchEdge& e : r.matched.edges) std::swap(e.tail, e.head);
  for (PathEntry& e : r.flow.demands.entries) std::swap(e.x, e.y);
  return r;
}

std::pair<Vector, bool> canonical_sign(const Vector& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0) return {u, false};
    if (u[i] < 0.0) return {-u, true};
  }
  throw std::invalid_argument("canonical_sign: zero direction");
}

MatchingResult matching(const Vector& u, const Embedding& emb, const Graph& g,
                        const MatchingConfig& cfg) {
  cfg.validate();
  if (u.size() != emb.dim()) throw std::invalid_argument("matching: direction dimension mismatch");
  {
    Eigen::Index i = 0;
    while (i < u.size() && u[i] == 0.0) ++i;
    if (i == u.size() || u[i] < 0.0)
      throw std::invalid_argument("matching: direction must be sign-canonical");
  }
  int m = emb.count();
  int n_orig = g.node_count();
  if (emb.total_nodes() != n_orig)
    throw std::invalid_argument("matching: embedding does not match the graph");

  int block = static_cast<int>(std::ceil(2.0 * cfg.c_prime * m));
  if (block < 1 || 2 * block > m)
    throw std::invalid_argument("matching: active set too small for the extreme blocks");

  Vector w = emb.points().transpose() * u;
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::pair(w[i], emb.nodes()[i]) < std::pair(w[j], emb.nodes()[j]);
  });

  MatchingResult result;
  result.n_active = m;
  result.pi = cfg.pi_for(m);
  std::vector<int> a_cols(order.begin(), order.begin() + block);
  std::vector<int> b_cols(order.end() - block, order.end());
  for (int c : a_cols) result.a_side.push_back(emb.nodes()[c]);
  for (int c : b_cols) result.b_side.push_back(emb.nodes()[c]);

  // Augmented network: the graph's edges first, then terminal edges in block
  // order, so edge ids 0..m_g-1 stay aligned with g.edges().
  int s = n_orig, t = n_orig + 1;
  FlowNetwork net(n_orig + 2);
  for (const Edge& e : g.edges()) net.add_edge(e.u, e.v, e.w);
  for (int v : result.a_side) net.add_edge(s, v, result.pi);
  for (int v : result.b_side) net.add_edge(v, t, result.pi);

  FlowResult fr = max_flow(net, s, t);

  double cut_capacity = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto& ed = net.edge(e);
    if (fr.source_side[ed.u] != fr.source_side[ed.v]) cut_capacity += ed.capacity;
  }
  double threshold = 6.0 * cfg.alpha / cfg.delta;  // c' * n_active * pi
  if (cut_capacity < threshold) {
    std::vector<char> side(fr.source_side.begin(), fr.source_side.begin() + n_orig);
    result.kind = MatchingResult::Kind::kCut;
    result.cut = make_cut(g, std::move(side));
    return result;
  }

  std::vector<char> in_a(net.node_count(), 0), in_b(net.node_count(), 0);
  for (int v : result.a_side) in_a[v] = 1;
  for (int v : result.b_side) in_b[v] = 1;
  PathFlow demands = flow_decompose(net, fr, s, t, in_a, in_b);

  double observed = 0.0;
  for (const PathEntry& e : demands.entries) {
    int cx = emb.col_of(e.x), cy = emb.col_of(e.y);
    observed += e.amount * (emb.point(cx) - emb.point(cy)).squaredNorm();
  }
  if (observed >= 2.0 * cfg.alpha) {
    result.kind = MatchingResult::Kind::kSaturatedFlow;
    result.flow.demands = std::move(demands);
    result.flow.observed = observed;
    result.flow.flow_value = fr.value;
    for (int e = 0; e < g.edge_count(); ++e)
      if (fr.edge_flow[e] != 0.0) {
        const Edge& ge = g.edges()[e];
        result.flow.flow_support.push_back({ge.u, ge.v, std::abs(fr.edge_flow[e])});
      }
    return result;
  }

  // Aggregate demands per endpoint pair, filter by projected stretch and
  // squared length, then take a greedy maximal matching.
  std::map<std::pair<int, int>, double> pair_demand;
  for (const PathEntry& e : demands.entries) pair_demand[{e.x, e.y}] += e.amount;

  struct Candidate {
    int tail, head;
    double stretch;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, amount] : pair_demand) {
    if (!(amount > 0.0)) continue;
    auto [x, y] = key;
    int cx = emb.col_of(x), cy = emb.col_of(y);
    double stretch = w[cy] - w[cx];
    if (stretch < cfg.sigma) continue;
    if ((emb.point(cx) - emb.point(cy)).squaredNorm() > cfg.delta) continue;
    candidates.push_back({x, y, stretch});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.stretch != b.stretch) return a.stretch > b.stretch;
    return std::pair(a.tail, a.head) < std::pair(b.tail, b.head);
  });

  std::vector<char> tail_used(n_orig, 0), head_used(n_orig, 0);
  result.kind = MatchingResult::Kind::kMatched;
  for (const Candidate& c : candidates) {
    if (tail_used[c.tail] || head_used[c.head]) continue;
    tail_used[c.tail] = 1;
    head_used[c.head] = 1;
    result.matched.edges.push_back({c.tail, c.head});
  }
  return result;
}

MatchingResult oriented_matching(const Vector& u, const Embedding& emb, const Graph& g,
                                 const MatchingConfig& cfg) {
  auto [canonical, flipped] = canonical_sign(u);
  MatchingResult r = matching(canonical, emb, g, cfg);
  if (flipped) {
    r = reverse(std::move(r));
    r.flipped = true;
  }
  return r;
}

MatchingEstimate matching_size_estimate(const Embedding& emb, const Graph& g,
                                        const MatchingConfig& cfg, int trials, RngStream& rng) {
  if (trials < 1) throw std::invalid_argument("matching_size_estimate: trials < 1");
  long matched_trials = 0, terminated = 0;
  double size_sum = 0.0;
  for (int i = 0; i < trials; ++i) {
    Vector u = sample_gaussian(emb.dim(), rng);
    MatchingResult r = oriented_matching(u, emb, g, cfg);
    if (r.kind == MatchingResult::Kind::kMatched) {
      ++matched_trials;
      size_sum += static_cast<double>(r.matched.edges.size());
    } else {
      ++terminated;
    }
  }
  MatchingEstimate est;
  if (matched_trials > 0)
    est.mean_size_fraction = size_sum / (static_cast<double>(matched_trials) * emb.count());
  est.termination_rate = static_cast<double>(terminated) / trials;
  return est;
}

}  // namespace sepflow
