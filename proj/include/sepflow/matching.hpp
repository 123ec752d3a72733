#pragma once

#include <cstdint>
#include <vector>

#include "sepflow/graph.hpp"
#include "sepflow/maxflow.hpp"
#include "sepflow/random.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

struct MatchingConfig {
  double c_prime = 1.0 / 32;  // block-size fraction, in (0, 1/4)
  double sigma = 0.05;        // minimum projected stretch kept in a matching
  double delta = 0.25;        // squared-distance scale
  double alpha = 1.0;         // current objective threshold

  // Capacity of each terminal edge: pi = 6 alpha / (c' * n_active * delta).
  double pi_for(int n_active) const;
  void validate() const;
};

struct MatchEdge {
  int tail = 0;
  int head = 0;
};

struct DirectedMatching {
  std::vector<MatchEdge> edges;
};

struct SaturatedFlowInfo {
  PathFlow demands;                 // aggregated per stripped path
  double observed = 0.0;            // sum of amount * |v_x - v_y|^2
  double flow_value = 0.0;
  std::vector<Edge> flow_support;   // |net flow| per original edge, zeros dropped
};

// One oracle call ends in exactly one of three ways: a balanced cut of the
// augmented network, a spread-out saturated flow, or a directed matching
// between the extreme blocks.
struct MatchingResult {
  enum class Kind { kCut, kSaturatedFlow, kMatched };

  Kind kind = Kind::kMatched;
  Cut cut;                  // kCut
  SaturatedFlowInfo flow;   // kSaturatedFlow
  DirectedMatching matched;  // kMatched

  std::vector<int> a_side;  // least-projection block, selection order
  std::vector<int> b_side;  // greatest-projection block, selection order
  double pi = 0.0;
  int n_active = 0;
  bool flipped = false;  // diagnostic: direction was sign-canonicalized
};

bool semantically_equal(const MatchingResult& lhs, const MatchingResult& rhs);

// Edge reversal: swaps tails with heads, the two blocks, and demand
// endpoints.  An involution.
MatchingResult reverse(MatchingResult r);

// Flips u so its first nonzero coordinate is positive.  Returns the
// canonical vector and whether a flip happened.
std::pair<Vector, bool> canonical_sign(const Vector& u);

// Core oracle; requires u already canonical.  The embedding holds the active
// nodes; flow may route through inactive nodes of g.
MatchingResult matching(const Vector& u, const Embedding& emb, const Graph& g,
                        const MatchingConfig& cfg);

// Public entry: canonicalizes u, runs the core, and mirrors the output back,
// so oriented_matching(-u) is exactly the reversal of oriented_matching(u).
MatchingResult oriented_matching(const Vector& u, const Embedding& emb, const Graph& g,
                                 const MatchingConfig& cfg);

struct MatchingEstimate {
  double mean_size_fraction = 0.0;  // average |M| / n_active over matched trials
  double termination_rate = 0.0;    // fraction of trials ending in cut or flow
};

MatchingEstimate matching_size_estimate(const Embedding& emb, const Graph& g,
                                        const MatchingConfig& cfg, int trials, RngStream& rng);

}  // namespace sepflow
