#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sepflow/matching.hpp"
#include "sepflow/random.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

// Directed node path produced by composing matchings.  A path may revisit a
// node (for example a-b-a); consecutive nodes are always distinct.
struct GPath {
  std::vector<int> nodes;
  bool violating = false;
  int span_begin = -1;  // indices into nodes when violating
  int span_end = -1;
};

// Paths such that every node starts at most one of them and ends at most one
// of them.
using GeneralizedMatching = std::vector<GPath>;

struct ViolationSpan {
  int begin = 0;
  int end = 0;
};

// First contiguous span (by start index, then end index) whose hop lengths
// satisfy  sum_{j} |q_j - q_{j-1}|^2 <= |q_end - q_begin|^2 - delta.
std::optional<ViolationSpan> detect_violating(const std::vector<int>& nodes, const Embedding& emb,
                                              double delta);

// Wraps single hops as length-1 paths (which can never violate).
GeneralizedMatching to_paths(const DirectedMatching& m, const Embedding& emb, double delta);

// Joins each path of m1 whose end node starts a path of m2; everything
// unjoined is dropped.  Violation status is recomputed on the joined paths
// since a join can create new spans.
GeneralizedMatching compose(const GeneralizedMatching& m1, const GeneralizedMatching& m2,
                            const Embedding& emb, double delta);

// Keeps violating paths, and non-violating ones whose endpoint displacement
// projects on u at least sigma.
GeneralizedMatching truncate_matching(const GeneralizedMatching& m, const Vector& u, double sigma,
                                      const Embedding& emb);

using MatchingOracle = std::function<MatchingResult(const Vector&)>;

struct ChainOutcome {
  bool terminated = false;
  MatchingResult termination;  // cut or saturated flow, when terminated
  GeneralizedMatching paths;
  int revisit_count = 0;  // paths whose node sequence repeats a node
};

// Runs the oracle along a chain of correlated directions u_1 ~ ... ~ u_K
// (omega = 1 - 1/K) and composes the matchings in order.
ChainOutcome sample_paths(const Vector& u1, int big_k, const MatchingOracle& oracle,
                          const Embedding& emb, double delta, RngStream& rng);

// Bit-pattern variant: positions holding 1 share one correlated chain with
// omega = 1 - 1/(number of ones), started at u1; positions holding 0 draw
// fresh independent directions.  Directions are drawn in slot order.  An
// all-zero pattern uses independent directions everywhere and ignores u1.
ChainOutcome sample_paths_bits(const Vector& u1, const std::vector<int>& bits,
                               const MatchingOracle& oracle, const Embedding& emb, double delta,
                               RngStream& rng);

struct Schedule {
  double eps = 0.0;           // accuracy knob
  double delta = 0.0;         // B * sqrt(eps / ln n)
  int big_k = 1;              // smallest power of two >= A * delta * ln n
  double omega = 0.0;         // 1 - 1/K
  double sigma_target = 0.0;  // c2 * K
};

// Derives the chain length and distance scale from the accuracy knob.
// Requires A * delta * ln n >= 1 so that the rounding is meaningful.
Schedule make_schedule(int n, double eps, double a_const = 1.0, double b_const = 1.0,
                       double c2 = 0.05 / 16.0);

}  // namespace sepflow
