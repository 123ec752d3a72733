#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepflow/chaining.hpp"
#include "sepflow/graph.hpp"
#include "sepflow/harvest.hpp"
#include "sepflow/matching.hpp"
#include "sepflow/maxflow.hpp"
#include "sepflow/operators.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/types.hpp"

namespace sepflow {

// How the per-iteration embedding of the current candidate solution is
// produced.  kDense eigendecomposes the accumulated exponent (exact up to
// floating point, cost O(n^3) per step); kSketch uses the randomized
// Gram factorization, whose dimension explodes for tight distortion targets,
// so it is practical only with loose calibration constants.
enum class EmbeddingBackend { kDense, kSketch };

struct SolverConfig {
  double c = 0.25;         // balance target, in (0, 1/2)
  double eps_param = 0.5;  // accuracy knob feeding the schedule
  double a_const = 1.0;    // chain-length constant (schedule K)
  double b_const = 1.0;    // distance-scale constant (schedule delta)
  double c2 = 0.05 / 16;   // stretch filter sigma = c2 * K
  double c_prime = 1.0 / 32;

  int harvest_runs = 8;
  int harvest_option = 2;
  int harvest_retries = 32;
  int workers = 1;
  int estimate_trials = 64;  // matching-size probe for the harvest target

  std::uint64_t seed = 0;
  long long iteration_cap = 10000;
  bool strict_t = false;  // run the full theoretical budget even when huge
  EmbeddingBackend backend = EmbeddingBackend::kDense;
  double cd = 24.0;  // sketch dimension constant
  double ck = 4.0;   // sketch Taylor-order constant

  bool verify_feedback = true;  // densified spectral checks on small graphs
  int verify_max_n = 32;

  void validate() const;
};

struct Feedback {
  StructuredOperator op;
  double rho = 0.0;
};

struct ActiveSet {
  std::vector<int> nodes;
  Embedding emb;
};

// Nodes whose embedded squared norm is at most 2.  By Markov at least half
// the nodes qualify when the embedding has trace n; fewer means the trace
// normalization upstream is broken, reported as a logic error.
ActiveSet restrict_active(const Embedding& emb);

// Sum of squared pairwise distances over the active points, computed in
// O(count * dim) from the first and second moments.
double spread_moment(const Embedding& emb);

// Fires when the active points are insufficiently spread
// (spread_moment < a*n^2/4).  Feedback pushes mass onto the complete
// Laplacian of the active set:
//   op  = -(alpha/n) * I + (2*alpha/(a*n^2)) * K_active
//   rho = alpha/n + 2*alpha*|active|/(a*n^2)
std::optional<Feedback> spread_feedback(const Embedding& emb, double a, double alpha, int n_total);

// Feedback from a saturated spread-out flow: op = (alpha/n_active)*I_active - D
// with D the Laplacian of the demand pairs; rho = alpha/n_active + 2*pi.
Feedback flow_feedback(const PathFlow& demands, double pi, double alpha,
                       const std::vector<int>& active, int n_total);

enum class AlphaOutcome { kCut, kLowerBound, kInconclusive };

struct IterationTallies {
  long long spread = 0;
  long long flow = 0;
  long long paths = 0;
  long long harvest_rounds = 0;   // chaining rounds run in total
  long long harvest_retries = 0;  // harvests that missed the target
};

// Spectral spot checks of emitted feedback (densified; small graphs only).
struct VerifyStats {
  long long width_checked = 0;
  double max_width_excess = 0.0;  // max (norm - declared rho)
  long long capacity_checked = 0;
  double min_capacity_margin = 0.0;  // min eigenvalue of C - F
  long long charge_checked = 0;
  double max_path_charge = 0.0;  // max over steps of sum_p f_p*(hops^2-disp^2)
};

struct AlphaReport {
  double alpha = 0.0;
  double eps = 0.0;  // alpha / 2
  AlphaOutcome outcome = AlphaOutcome::kInconclusive;
  std::string inconclusive_reason;  // "iteration-cap" | "harvest-retries"

  long long iterations = 0;  // oracle steps executed
  double t_required = 0.0;   // theoretical budget (can be astronomically big)
  long long t_effective = 0; // budget actually enforced
  double rho_budget = 0.0;
  double eta = 0.0;
  double max_emitted_rho = 0.0;
  double delta_hat = 0.0;  // matching-size estimate feeding the target
  int harvest_target_size = 0;
  double estimate_termination_rate = 0.0;

  IterationTallies tallies;
  VerifyStats verify;

  std::optional<Cut> cut;
  long long cut_iteration = -1;

  double ms = 0.0;  // wall clock, excluded from determinism comparisons
};

// Iterations needed before the averaged feedback certifies the threshold:
// ceil(4 rho^2 n^2 ln n / eps^2).
double mw_iteration_budget(double rho, int n, double eps);

// One multiplicative-weights run at a fixed threshold alpha.
AlphaReport mw_solve_for_alpha(const Graph& g, double alpha, const Schedule& schedule,
                               const SolverConfig& cfg);

struct SolveReport {
  SolverConfig config;
  Schedule schedule;
  int n = 0;
  std::vector<double> alpha_grid;
  std::vector<AlphaReport> alphas;  // in evaluation order

  std::optional<Cut> best_cut;
  double best_cut_alpha = 0.0;
  double expansion = 0.0;  // of best_cut

  bool has_certificate = false;
  double certified_alpha = 0.0;
  double certified_eps = 0.0;
  double certified_lower_bound = 0.0;  // (alpha - eps) / 4
  std::optional<double> ratio;         // best cut value / certified lower bound

  double total_ms = 0.0;
};

// Threshold search over a factor-2 grid from the smallest positive edge
// weight to the total weight, narrowed by bisection: cuts push the upper
// end down, certificates (and inconclusive runs) push the lower end up.
SolveReport solve_balanced_separator(const Graph& g, const SolverConfig& cfg);

// Single fixed threshold wrapped in a full report (the --alpha override).
SolveReport solve_single_alpha(const Graph& g, double alpha, const SolverConfig& cfg);

}  // namespace sepflow
