#pragma once

#include <cstdint>
#include <vector>

#include "sepflow/chaining.hpp"
#include "sepflow/graph.hpp"
#include "sepflow/matching.hpp"
#include "sepflow/operators.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

struct HarvestConfig {
  int runs = 8;    // independent chaining rounds
  int big_k = 4;   // chain length per round
  int option = 2;  // 1 = sequential greedy union, 2 = per-run reduce + tree merge
  int workers = 1;
  std::uint64_t seed = 0;
  int target = 1;  // caller stops retrying once |paths| reaches this

  void validate() const;
};

// Exponent of the size penalty paid by the combining strategy.
int h_for_option(int option);

// max(1, ceil(delta_hat * n / (16 * K^(1+h)))) with h determined by option.
int harvest_target(double delta_hat, int n, int big_k, int option);

struct RunStats {
  int run = 0;
  bool terminated = false;
  int raw_paths = 0;        // chain outputs after composition
  int violating_paths = 0;  // of which violating
  int revisit_paths = 0;    // of which revisiting a node
  int reduced_size = 0;     // option 2: size of the per-run disjoint reduction
};

struct HarvestResult {
  bool terminated = false;
  MatchingResult termination;  // from the lowest terminating run
  int termination_run = -1;
  GeneralizedMatching paths;  // node-disjoint violating paths, all simple
  std::vector<RunStats> stats;
  int skipped_revisit_spans = 0;
};

// Keeps all of ma, then adds each path of mb in order when its nodes avoid
// everything accumulated so far.  Both inputs must be internally
// node-disjoint; the result is then maximal within their union.
GeneralizedMatching merge_disjoint(const GeneralizedMatching& ma, const GeneralizedMatching& mb);

// Runs cfg.runs independent chaining rounds over (g, emb), extracts the
// violating span of every violating path, and combines the spans into one
// node-disjoint set.  A round whose matching call ends in a cut or saturated
// flow overrides the path output; ties go to the lowest run index, so the
// outcome does not depend on the worker count.
HarvestResult harvest(const Graph& g, const Embedding& emb, const HarvestConfig& cfg,
                      const MatchingConfig& mcfg);

struct PathFeedback {
  StructuredOperator op;
  double rho = 0.0;
  double pi_f = 0.0;  // max weighted degree of the hop graph
  double pi_d = 0.0;  // max weighted degree of the endpoint graph
};

// Feedback operator charging each violating path equally:
//   op = (alpha/n_active) * I_active + (2*alpha/(|M|*delta)) * (F - D)
// where F sums unit Laplacians over consecutive hops and D over endpoint
// pairs, and rho = alpha/n_active + 4*alpha*(pi_f + pi_d)/(|M|*delta).
// Paths must be simple and pairwise node-disjoint.
PathFeedback path_feedback(const GeneralizedMatching& m, double delta, double alpha,
                           const std::vector<int>& active, int n_total);

}  // namespace sepflow
