#include "sepflow/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace sepflow {

namespace {

double dist_sq(const Embedding& emb, int node_a, int node_b) {
  return (emb.point(emb.col_of(node_a)) - emb.point(emb.col_of(node_b))).squaredNorm();
}

bool has_repeated_node(const std::vector<int>& nodes) {
  std::unordered_set<int> seen;
  for (int v : nodes) {
    if (!seen.insert(v).second) return true;
  }
  return false;
}

GPath annotate(std::vector<int> nodes, const Embedding& emb, double delta) {
  GPath p;
  p.nodes = std::move(nodes);
  if (auto span = detect_violating(p.nodes, emb, delta)) {
    p.violating = true;
    p.span_begin = span->begin;
    p.span_end = span->end;
  }
  return p;
}

}  // namespace

std::optional<ViolationSpan> detect_violating(const std::vector<int>& nodes, const Embedding& emb,
                                              double delta) {
  if (nodes.empty()) throw std::invalid_argument("detect_violating: empty path");
  const int len = static_cast<int>(nodes.size());
  // prefix[i] = sum of squared hop lengths over the first i hops
  std::vector<double> prefix(len, 0.0);
  for (int i = 1; i < len; ++i) {
    prefix[i] = prefix[i - 1] + dist_sq(emb, nodes[i - 1], nodes[i]);
  }
  for (int s = 0; s + 1 < len; ++s) {
    for (int e = s + 1; e < len; ++e) {
      double hops_sq = prefix[e] - prefix[s];
      double disp_sq = dist_sq(emb, nodes[s], nodes[e]);
      if (hops_sq <= disp_sq - delta) return ViolationSpan{s, e};
    }
  }
  return std::nullopt;
}

GeneralizedMatching to_paths(const DirectedMatching& m, const Embedding& emb, double delta) {
  GeneralizedMatching out;
  out.reserve(m.edges.size());
  for (const MatchEdge& e : m.edges) {
    out.push_back(annotate({e.tail, e.head}, emb, delta));
  }
  return out;
}

GeneralizedMatching compose(const GeneralizedMatching& m1, const GeneralizedMatching& m2,
                            const Embedding& emb, double delta) {
  std::unordered_map<int, const GPath*> by_start;
  by_start.reserve(m2.size());
  for (const GPath& p : m2) {
    if (p.nodes.empty()) throw std::invalid_argument("compose: empty path");
    if (!by_start.emplace(p.nodes.front(), &p).second) {
      throw std::invalid_argument("compose: two paths start at the same node");
    }
  }
  GeneralizedMatching out;
  for (const GPath& p : m1) {
    if (p.nodes.empty()) throw std::invalid_argument("compose: empty path");
    auto it = by_start.find(p.nodes.back());
    if (it == by_start.end()) continue;  // unjoined paths are dropped
    std::vector<int> joined = p.nodes;
    const std::vector<int>& tail = it->second->nodes;
    joined.insert(joined.end(), tail.begin() + 1, tail.end());
    out.push_back(annotate(std::move(joined), emb, delta));
  }
  return out;
}

GeneralizedMatching truncate_matching(const GeneralizedMatching& m, const Vector& u, double sigma,
                                      const Embedding& emb) {
  GeneralizedMatching out;
  for (const GPath& p : m) {
    if (p.nodes.empty()) throw std::invalid_argument("truncate_matching: empty path");
    if (p.violating) {
      out.push_back(p);
      continue;
    }
    Vector disp =
        emb.point(emb.col_of(p.nodes.back())) - emb.point(emb.col_of(p.nodes.front()));
    if (disp.dot(u) >= sigma) out.push_back(p);
  }
  return out;
}

namespace {

// Shared driver: runs the oracle on each direction in order, composing the
// resulting matchings; a cut or saturated flow stops the chain immediately.
ChainOutcome run_chain(const std::vector<Vector>& dirs, const MatchingOracle& oracle,
                       const Embedding& emb, double delta) {
  ChainOutcome out;
  GeneralizedMatching acc;
  for (std::size_t t = 0; t < dirs.size(); ++t) {
    MatchingResult r = oracle(dirs[t]);
    if (r.kind != MatchingResult::Kind::kMatched) {
      out.terminated = true;
      out.termination = std::move(r);
      out.paths.clear();
      out.revisit_count = 0;
      return out;
    }
    GeneralizedMatching step = to_paths(r.matched, emb, delta);
    acc = (t == 0) ? std::move(step) : compose(acc, step, emb, delta);
  }
  out.paths = std::move(acc);
  for (const GPath& p : out.paths) {
    if (has_repeated_node(p.nodes)) ++out.revisit_count;
  }
  return out;
}

}  // namespace

ChainOutcome sample_paths(const Vector& u1, int big_k, const MatchingOracle& oracle,
                          const Embedding& emb, double delta, RngStream& rng) {
  if (big_k < 1) throw std::invalid_argument("sample_paths: chain length must be >= 1");
  double omega = 1.0 - 1.0 / static_cast<double>(big_k);
  std::vector<Vector> dirs = chain(u1, omega, big_k, rng);
  return run_chain(dirs, oracle, emb, delta);
}

ChainOutcome sample_paths_bits(const Vector& u1, const std::vector<int>& bits,
                               const MatchingOracle& oracle, const Embedding& emb, double delta,
                               RngStream& rng) {
  if (bits.empty()) throw std::invalid_argument("sample_paths_bits: empty bit pattern");
  int ones = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("sample_paths_bits: bits must be 0 or 1");
    ones += b;
  }
  // All-zero patterns degenerate to fully independent directions; u1 is unused.
  double omega = ones > 0 ? 1.0 - 1.0 / static_cast<double>(ones) : 0.0;
  const auto d = u1.size();

  std::vector<Vector> dirs(bits.size());
  bool chain_started = false;
  Vector prev;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 1) {
      if (!chain_started) {
        dirs[i] = u1;
        chain_started = true;
      } else {
        dirs[i] = correlate(prev, omega, rng);
      }
      prev = dirs[i];
    } else {
      dirs[i] = sample_gaussian(static_cast<int>(d), rng);
    }
  }
  return run_chain(dirs, oracle, emb, delta);
}

Schedule make_schedule(int n, double eps, double a_const, double b_const, double c2) {
  if (n < 2) throw std::invalid_argument("make_schedule: need n >= 2");
  if (eps <= 0.0 || a_const <= 0.0 || b_const <= 0.0 || c2 <= 0.0) {
    throw std::invalid_argument("make_schedule: parameters must be positive");
  }
  Schedule s;
  s.eps = eps;
  double log_n = std::log(static_cast<double>(n));
  s.delta = b_const * std::sqrt(eps / log_n);
  double raw = a_const * s.delta * log_n;
  if (raw < 1.0) {
    throw std::invalid_argument("make_schedule: chain length parameter below 1; increase eps or the leading constant");
  }
  int k = 1;
  while (static_cast<double>(k) < raw) k *= 2;
  s.big_k = k;
  s.omega = 1.0 - 1.0 / static_cast<double>(k);
  s.sigma_target = c2 * static_cast<double>(k);
  return s;
}

}  // namespace sepflow
