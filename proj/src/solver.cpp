#include "sepflow/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "sepflow/random.hpp"

namespace sepflow {

namespace {

constexpr std::uint64_t kEstimateTag = 0xE571;
constexpr std::uint64_t kSketchTagBase = 0x5AE7ull << 32;

std::uint64_t harvest_seed(std::uint64_t base, long long t, int retry) {
  return mix_seed(mix_seed(base, static_cast<std::uint64_t>(t)),
                  0x48D1ull + static_cast<std::uint64_t>(retry));
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

double spectral_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

// Smallest eigenvalue of C - F: nonnegative (up to float error) exactly when
// the extracted flow respects the edge capacities.
double capacity_margin(const Graph& g, const std::vector<Edge>& flow_support) {
  StructuredOperator diff(g.node_count());
  diff.add(EdgeLaplacianTerm{g.edges(), 1.0});
  diff.add(EdgeLaplacianTerm{flow_support, -1.0});
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff.densify(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double path_dist_sq(const Embedding& emb, int a, int b) {
  return (emb.point(emb.col_of(a)) - emb.point(emb.col_of(b))).squaredNorm();
}

// sum_p f_p * (sum of squared hops - squared endpoint distance); each
// violating path contributes at most -f_p * delta.
double path_charge(const GeneralizedMatching& paths, const Embedding& emb, double alpha,
                   double delta) {
  double f = 2.0 * alpha / (static_cast<double>(paths.size()) * delta);
  double charge = 0.0;
  for (const GPath& p : paths) {
    double hops = 0.0;
    for (std::size_t i = 1; i < p.nodes.size(); ++i) {
      hops += path_dist_sq(emb, p.nodes[i - 1], p.nodes[i]);
    }
    charge += f * (hops - path_dist_sq(emb, p.nodes.front(), p.nodes.back()));
  }
  return charge;
}

// Picks the best cut (smallest value, then largest balance, then smallest
// alpha) and the strongest certificate out of the per-alpha runs.
void aggregate_outcomes(SolveReport& rep, const Graph& g) {
  const AlphaReport* best = nullptr;
  for (const AlphaReport& r : rep.alphas) {
    if (r.outcome == AlphaOutcome::kCut) {
      bool better = best == nullptr || r.cut->value < best->cut->value ||
                    (r.cut->value == best->cut->value &&
                     (r.cut->balance > best->cut->balance ||
                      (r.cut->balance == best->cut->balance && r.alpha < best->alpha)));
      if (better) best = &r;
    }
    if (r.outcome == AlphaOutcome::kLowerBound &&
        (!rep.has_certificate || r.alpha > rep.certified_alpha)) {
      rep.has_certificate = true;
      rep.certified_alpha = r.alpha;
      rep.certified_eps = r.eps;
      rep.certified_lower_bound = (r.alpha - r.eps) / 4.0;
    }
  }
  if (best != nullptr) {
    rep.best_cut = best->cut;
    rep.best_cut_alpha = best->alpha;
    rep.expansion = edge_expansion(g, best->cut->side);
    if (rep.has_certificate && rep.certified_lower_bound > 0.0) {
      rep.ratio = best->cut->value / rep.certified_lower_bound;
    }
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("SolverConfig: c must lie in (0, 1/2)");
  if (eps_param <= 0.0) throw std::invalid_argument("SolverConfig: eps_param must be positive");
  if (a_const <= 0.0 || b_const <= 0.0 || c2 <= 0.0) {
    throw std::invalid_argument("SolverConfig: schedule constants must be positive");
  }
  if (!(c_prime > 0.0 && c_prime < 0.25)) {
    throw std::invalid_argument("SolverConfig: c_prime must lie in (0, 1/4)");
  }
  if (harvest_runs < 1) throw std::invalid_argument("SolverConfig: harvest_runs must be >= 1");
  if (harvest_option != 1 && harvest_option != 2) {
    throw std::invalid_argument("SolverConfig: harvest_option must be 1 or 2");
  }
  if (harvest_retries < 1) throw std::invalid_argument("SolverConfig: harvest_retries must be >= 1");
  if (workers < 1) throw std::invalid_argument("SolverConfig: workers must be >= 1");
  if (estimate_trials < 1) throw std::invalid_argument("SolverConfig: estimate_trials must be >= 1");
  if (iteration_cap < 1) throw std::invalid_argument("SolverConfig: iteration_cap must be >= 1");
  if (cd <= 0.0 || ck < 0.0) throw std::invalid_argument("SolverConfig: bad sketch constants");
  if (verify_max_n < 0) throw std::invalid_argument("SolverConfig: verify_max_n must be >= 0");
}

ActiveSet restrict_active(const Embedding& emb) {
  std::vector<int> cols;
  std::vector<int> nodes;
  for (int c = 0; c < emb.count(); ++c) {
    if (emb.point(c).squaredNorm() <= 2.0) {
      cols.push_back(c);
      nodes.push_back(emb.nodes()[c]);
    }
  }
  if (2 * static_cast<int>(nodes.size()) < emb.count()) {
    throw std::logic_error("restrict_active: under half the nodes have norm^2 <= 2; trace normalization is broken");
  }
  return ActiveSet{std::move(nodes), emb.restricted_to(cols)};
}

double spread_moment(const Embedding& emb) {
  Vector sum = emb.points().rowwise().sum();
  return static_cast<double>(emb.count()) * emb.sum_sq() - sum.squaredNorm();
}

std::optional<Feedback> spread_feedback(const Embedding& emb, double a, double alpha,
                                        int n_total) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("spread_feedback: a must lie in (0, 1]");
  if (alpha <= 0.0) throw std::invalid_argument("spread_feedback: alpha must be positive");
  if (n_total < 1) throw std::invalid_argument("spread_feedback: n_total must be >= 1");
  double n = static_cast<double>(n_total);
  if (spread_moment(emb) >= a * n * n / 4.0) return std::nullopt;

  Feedback fb;
  fb.op = StructuredOperator(n_total);
  fb.op.add(ScaledIdentity{-alpha / n});
  fb.op.add(SubsetLaplacianTerm{emb.nodes(), 2.0 * alpha / (a * n * n)});
  fb.rho = alpha / n + 2.0 * alpha * static_cast<double>(emb.count()) / (a * n * n);
  return fb;
}

Feedback flow_feedback(const PathFlow& demands, double pi, double alpha,
                       const std::vector<int>& active, int n_total) {
  if (demands.entries.empty()) throw std::invalid_argument("flow_feedback: no demands");
  if (pi <= 0.0 || alpha <= 0.0) {
    throw std::invalid_argument("flow_feedback: pi and alpha must be positive");
  }
  if (active.empty()) throw std::invalid_argument("flow_feedback: empty active set");

  double n_active = static_cast<double>(active.size());
  Vector diag = Vector::Zero(n_total);
  for (int v : active) diag[v] = alpha / n_active;

  std::vector<Edge> pairs;
  pairs.reserve(demands.entries.size());
  for (const PathEntry& e : demands.entries) {
    pairs.push_back(Edge{std::min(e.x, e.y), std::max(e.x, e.y), e.amount});
  }

  Feedback fb;
  fb.op = StructuredOperator(n_total);
  fb.op.add(DiagonalTerm{std::move(diag)});
  fb.op.add(EdgeLaplacianTerm{std::move(pairs), -1.0});
  fb.rho = alpha / n_active + 2.0 * pi;
  return fb;
}

double mw_iteration_budget(double rho, int n, double eps) {
  return std::ceil(4.0 * rho * rho * n * static_cast<double>(n) * std::log(static_cast<double>(n)) /
                   (eps * eps));
}

AlphaReport mw_solve_for_alpha(const Graph& g, double alpha, const Schedule& schedule,
                               const SolverConfig& cfg) {
  cfg.validate();
  if (alpha <= 0.0) throw std::invalid_argument("mw_solve_for_alpha: alpha must be positive");
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("mw_solve_for_alpha: need at least 2 nodes");

  auto started = std::chrono::steady_clock::now();
  AlphaReport rep;
  rep.alpha = alpha;
  rep.eps = alpha / 2.0;

  const double a = 3.0 * cfg.c - 4.0 * cfg.c * cfg.c;
  MatchingConfig mcfg;
  mcfg.c_prime = cfg.c_prime;
  mcfg.sigma = schedule.sigma_target;
  mcfg.delta = schedule.delta;
  mcfg.alpha = alpha;
  mcfg.validate();

  // Harvest target from a matching-size probe against the identity embedding
  // (the candidate at step 1).
  {
    Embedding probe = Embedding::dense(Matrix::Identity(n, n));
    RngStream est_rng(cfg.seed, kEstimateTag);
    MatchingEstimate est = matching_size_estimate(probe, g, mcfg, cfg.estimate_trials, est_rng);
    rep.delta_hat = est.mean_size_fraction;
    rep.estimate_termination_rate = est.termination_rate;
  }
  const int target = harvest_target(rep.delta_hat, n, schedule.big_k, cfg.harvest_option);
  rep.harvest_target_size = target;

  // Width budget: the worst case over the three feedback shapes, taken
  // before the loop so eta and the iteration budget are fixed up front.
  const int n_half = (n + 1) / 2;
  const double rho_spread = alpha / n + 2.0 * alpha / (a * n);
  const double rho_flow = alpha / n_half + 2.0 * mcfg.pi_for(n_half);
  const double rho_paths = alpha / n_half + 12.0 * alpha / (target * schedule.delta);
  const double rho = std::max({rho_spread, rho_flow, rho_paths});
  rep.rho_budget = rho;
  rep.eta = rep.eps / (2.0 * rho * rho * n);
  const double log_n = std::log(static_cast<double>(n));
  rep.t_required = mw_iteration_budget(rho, n, rep.eps);
  long long budget;
  if (cfg.strict_t) {
    budget = rep.t_required > 9e18 ? std::numeric_limits<long long>::max()
                                   : static_cast<long long>(rep.t_required);
  } else {
    budget = rep.t_required > static_cast<double>(cfg.iteration_cap)
                 ? cfg.iteration_cap
                 : static_cast<long long>(rep.t_required);
  }
  rep.t_effective = budget;

  SketchParams sparams;
  if (cfg.backend == EmbeddingBackend::kSketch) {
    double pi_worst = mcfg.pi_for(n_half);
    double gamma = std::min({alpha / (20.0 * n * pi_worst),
                             schedule.delta / (20.0 * (schedule.big_k + 1)), 0.5});
    double tau = std::min(2.0, a / 2.0);
    double lambda = 4.0 * rho * n * log_n / alpha;
    sparams = params_for(n, gamma, tau, lambda, cfg.cd, cfg.ck);
    if (sparams.k > 200000) {
      throw std::invalid_argument(
          "mw_solve_for_alpha: sketch Taylor order is impractical here; use the dense backend or loosen the constants");
    }
  }

  Matrix exponent;  // dense backend accumulator
  StructuredOperator history(n);
  if (cfg.backend == EmbeddingBackend::kDense) exponent = Matrix::Zero(n, n);

  const bool verify = cfg.verify_feedback && n <= cfg.verify_max_n;

  for (long long t = 1; t <= budget; ++t) {
    ++rep.iterations;

    Embedding emb;
    if (cfg.backend == EmbeddingBackend::kDense) {
      emb = exact_gram_embedding(exponent);
    } else {
      RngStream sketch_rng(cfg.seed, kSketchTagBase + static_cast<std::uint64_t>(t));
      emb = exp_sketch(history, sparams, sketch_rng);
    }
    ActiveSet active = restrict_active(emb);

    Feedback fb;
    bool have_fb = false;
    if (auto spread = spread_feedback(active.emb, a, alpha, n)) {
      fb = std::move(*spread);
      have_fb = true;
      ++rep.tallies.spread;
    } else {
      for (int r = 0; r < cfg.harvest_retries && !have_fb; ++r) {
        HarvestConfig hcfg;
        hcfg.runs = cfg.harvest_runs;
        hcfg.big_k = schedule.big_k;
        hcfg.option = cfg.harvest_option;
        hcfg.workers = cfg.workers;
        hcfg.seed = harvest_seed(cfg.seed, t, r);
        hcfg.target = target;
        HarvestResult h = harvest(g, active.emb, hcfg, mcfg);
        rep.tallies.harvest_rounds += hcfg.runs;

        if (h.terminated) {
          if (h.termination.kind == MatchingResult::Kind::kCut) {
            rep.outcome = AlphaOutcome::kCut;
            rep.cut = h.termination.cut;
            rep.cut_iteration = t;
            rep.ms = elapsed_ms(started);
            return rep;
          }
          fb = flow_feedback(h.termination.flow.demands, h.termination.pi, alpha, active.nodes, n);
          have_fb = true;
          ++rep.tallies.flow;
          if (verify) {
            double margin = capacity_margin(g, h.termination.flow.flow_support);
            rep.verify.min_capacity_margin = rep.verify.capacity_checked == 0
                                                 ? margin
                                                 : std::min(rep.verify.min_capacity_margin, margin);
            ++rep.verify.capacity_checked;
          }
        } else if (static_cast<int>(h.paths.size()) >= target) {
          PathFeedback pf = path_feedback(h.paths, schedule.delta, alpha, active.nodes, n);
          fb = Feedback{std::move(pf.op), pf.rho};
          have_fb = true;
          ++rep.tallies.paths;
          if (verify) {
            double charge = path_charge(h.paths, active.emb, alpha, schedule.delta);
            rep.verify.max_path_charge = rep.verify.charge_checked == 0
                                             ? charge
                                             : std::max(rep.verify.max_path_charge, charge);
            ++rep.verify.charge_checked;
          }
        } else {
          ++rep.tallies.harvest_retries;
        }
      }
      if (!have_fb) {
        rep.outcome = AlphaOutcome::kInconclusive;
        rep.inconclusive_reason = "harvest-retries";
        rep.ms = elapsed_ms(started);
        return rep;
      }
    }

    if (fb.rho > rho * (1.0 + 1e-12)) {
      throw std::logic_error("mw_solve_for_alpha: feedback width exceeds the a-priori budget");
    }
    rep.max_emitted_rho = std::max(rep.max_emitted_rho, fb.rho);
    if (verify) {
      double excess = spectral_norm(fb.op.densify()) - fb.rho;
      rep.verify.max_width_excess = rep.verify.width_checked == 0
                                        ? excess
                                        : std::max(rep.verify.max_width_excess, excess);
      ++rep.verify.width_checked;
    }

    if (cfg.backend == EmbeddingBackend::kDense) {
      fb.op.densify_into(exponent, rep.eta);
    } else {
      history.add_scaled(fb.op, rep.eta);
    }
  }

  if (static_cast<double>(budget) >= rep.t_required) {
    rep.outcome = AlphaOutcome::kLowerBound;
  } else {
    rep.outcome = AlphaOutcome::kInconclusive;
    rep.inconclusive_reason = "iteration-cap";
  }
  rep.ms = elapsed_ms(started);
  return rep;
}

SolveReport solve_balanced_separator(const Graph& g, const SolverConfig& cfg) {
  cfg.validate();
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("solve_balanced_separator: need at least 2 nodes");
  auto started = std::chrono::steady_clock::now();

  SolveReport rep;
  rep.config = cfg;
  rep.n = n;

  if (g.total_weight() <= 0.0) {
    // Nothing to cut: half the nodes on each side is optimal at value 0.
    // Settled before the schedule so bad constants cannot block the answer.
    std::vector<char> side(n, 0);
    for (int i = 0; i < n / 2; ++i) side[i] = 1;
    rep.best_cut = make_cut(g, std::move(side));
    rep.expansion = edge_expansion(g, rep.best_cut->side);
    rep.total_ms = elapsed_ms(started);
    return rep;
  }
  rep.schedule = make_schedule(n, cfg.eps_param, cfg.a_const, cfg.b_const, cfg.c2);

  for (double a = g.min_positive_weight();; a *= 2.0) {
    rep.alpha_grid.push_back(a);
    if (a >= g.total_weight()) break;
  }
  const int m = static_cast<int>(rep.alpha_grid.size());

  auto eval = [&](int idx) -> const AlphaReport& {
    SolverConfig run_cfg = cfg;
    run_cfg.seed = mix_seed(cfg.seed, 0xA1FAull + static_cast<std::uint64_t>(idx));
    rep.alphas.push_back(mw_solve_for_alpha(g, rep.alpha_grid[idx], rep.schedule, run_cfg));
    return rep.alphas.back();
  };

  // Anchor at the top of the grid, where the cut branch is easiest, then
  // bisect: a cut moves the upper end down; anything else moves the lower
  // end up.
  int lo = -1;
  int hi = m - 1;
  if (eval(hi).outcome != AlphaOutcome::kCut) {
    lo = hi;
    hi = m;
  }
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (eval(mid).outcome == AlphaOutcome::kCut) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  aggregate_outcomes(rep, g);
  rep.total_ms = elapsed_ms(started);
  return rep;
}

SolveReport solve_single_alpha(const Graph& g, double alpha, const SolverConfig& cfg) {
  cfg.validate();
  if (g.node_count() < 2) throw std::invalid_argument("solve_single_alpha: need at least 2 nodes");
  auto started = std::chrono::steady_clock::now();

  SolveReport rep;
  rep.config = cfg;
  rep.n = g.node_count();
  rep.schedule = make_schedule(rep.n, cfg.eps_param, cfg.a_const, cfg.b_const, cfg.c2);
  rep.alpha_grid = {alpha};
  rep.alphas.push_back(mw_solve_for_alpha(g, alpha, rep.schedule, cfg));
  aggregate_outcomes(rep, g);
  rep.total_ms = elapsed_ms(started);
  return rep;
}

}  // namespace sepflow
