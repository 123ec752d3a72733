#include "sepflow/harvest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "sepflow/random.hpp"

namespace sepflow {

void HarvestConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("HarvestConfig: runs must be >= 1");
  if (big_k < 1) throw std::invalid_argument("HarvestConfig: big_k must be >= 1");
  if (option != 1 && option != 2) throw std::invalid_argument("HarvestConfig: option must be 1 or 2");
  if (workers < 1) throw std::invalid_argument("HarvestConfig: workers must be >= 1");
  if (target < 1) throw std::invalid_argument("HarvestConfig: target must be >= 1");
}

int h_for_option(int option) {
  if (option == 1) return 0;
  if (option == 2) return 3;
  throw std::invalid_argument("h_for_option: option must be 1 or 2");
}

int harvest_target(double delta_hat, int n, int big_k, int option) {
  if (delta_hat < 0.0 || delta_hat > 1.0) {
    throw std::invalid_argument("harvest_target: delta_hat must lie in [0, 1]");
  }
  if (n < 1 || big_k < 1) throw std::invalid_argument("harvest_target: need n >= 1 and big_k >= 1");
  double denom = 16.0 * std::pow(static_cast<double>(big_k), 1 + h_for_option(option));
  int t = static_cast<int>(std::ceil(delta_hat * static_cast<double>(n) / denom));
  return std::max(1, t);
}

namespace {

bool is_simple(const std::vector<int>& nodes) {
  std::unordered_set<int> seen;
  for (int v : nodes) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

bool disjoint_from(const std::vector<int>& nodes, const std::unordered_set<int>& used) {
  for (int v : nodes) {
    if (used.count(v)) return false;
  }
  return true;
}

void mark_used(const std::vector<int>& nodes, std::unordered_set<int>& used) {
  used.insert(nodes.begin(), nodes.end());
}

struct RunOutput {
  RunStats stats;
  MatchingResult termination;
  GeneralizedMatching spans;  // violating spans, simple ones only
  int skipped_revisit_spans = 0;
};

GPath extract_span(const GPath& p) {
  GPath out;
  out.nodes.assign(p.nodes.begin() + p.span_begin, p.nodes.begin() + p.span_end + 1);
  out.violating = true;
  out.span_begin = 0;
  out.span_end = static_cast<int>(out.nodes.size()) - 1;
  return out;
}

RunOutput do_run(const Graph& g, const Embedding& emb, const HarvestConfig& cfg,
                 const MatchingConfig& mcfg, int run) {
  RunOutput out;
  out.stats.run = run;
  RngStream rng(cfg.seed, static_cast<std::uint64_t>(run));
  Vector u = sample_gaussian(emb.dim(), rng);
  MatchingOracle oracle = [&](const Vector& dir) { return oriented_matching(dir, emb, g, mcfg); };
  ChainOutcome chain_out = sample_paths(u, cfg.big_k, oracle, emb, mcfg.delta, rng);
  if (chain_out.terminated) {
    out.stats.terminated = true;
    out.termination = std::move(chain_out.termination);
    return out;
  }
  out.stats.raw_paths = static_cast<int>(chain_out.paths.size());
  out.stats.revisit_paths = chain_out.revisit_count;
  for (const GPath& p : chain_out.paths) {
    if (!p.violating) continue;
    ++out.stats.violating_paths;
    GPath span = extract_span(p);
    if (!is_simple(span.nodes)) {
      ++out.skipped_revisit_spans;
      continue;
    }
    out.spans.push_back(std::move(span));
  }
  return out;
}

// Maximal internally node-disjoint subset, keeping paths in order.
GeneralizedMatching reduce_disjoint(const GeneralizedMatching& m) {
  GeneralizedMatching out;
  std::unordered_set<int> used;
  for (const GPath& p : m) {
    if (!disjoint_from(p.nodes, used)) continue;
    mark_used(p.nodes, used);
    out.push_back(p);
  }
  return out;
}

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([w, count, workers, &fn] {
      for (int i = w; i < count; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

GeneralizedMatching merge_disjoint(const GeneralizedMatching& ma, const GeneralizedMatching& mb) {
  GeneralizedMatching out = ma;
  std::unordered_set<int> used;
  for (const GPath& p : ma) mark_used(p.nodes, used);
  for (const GPath& p : mb) {
    if (!disjoint_from(p.nodes, used)) continue;
    mark_used(p.nodes, used);
    out.push_back(p);
  }
  return out;
}

HarvestResult harvest(const Graph& g, const Embedding& emb, const HarvestConfig& cfg,
                      const MatchingConfig& mcfg) {
  cfg.validate();
  mcfg.validate();

  std::vector<RunOutput> runs(cfg.runs);
  parallel_for(cfg.runs, cfg.workers,
               [&](int i) { runs[i] = do_run(g, emb, cfg, mcfg, i); });

  HarvestResult result;
  result.stats.reserve(cfg.runs);
  for (const RunOutput& r : runs) result.stats.push_back(r.stats);

  for (int i = 0; i < cfg.runs; ++i) {
    if (runs[i].stats.terminated) {
      result.terminated = true;
      result.termination = runs[i].termination;
      result.termination_run = i;
      return result;
    }
  }

  for (const RunOutput& r : runs) result.skipped_revisit_spans += r.skipped_revisit_spans;

  if (cfg.option == 1) {
    std::unordered_set<int> used;
    for (const RunOutput& r : runs) {
      for (const GPath& p : r.spans) {
        if (!disjoint_from(p.nodes, used)) continue;
        mark_used(p.nodes, used);
        result.paths.push_back(p);
      }
    }
    return result;
  }

  // Option 2: reduce each run, then merge along a binary tree whose shape is
  // fixed by padding to a power of two, so any worker count gives the same
  // answer.
  int leaves = 1;
  while (leaves < cfg.runs) leaves *= 2;
  std::vector<GeneralizedMatching> level(leaves);
  parallel_for(cfg.runs, cfg.workers, [&](int i) {
    level[i] = reduce_disjoint(runs[i].spans);
    result.stats[i].reduced_size = static_cast<int>(level[i].size());
  });
  while (level.size() > 1) {
    std::vector<GeneralizedMatching> next(level.size() / 2);
    parallel_for(static_cast<int>(next.size()), cfg.workers,
                 [&](int i) { next[i] = merge_disjoint(level[2 * i], level[2 * i + 1]); });
    level = std::move(next);
  }
  result.paths = std::move(level.front());
  return result;
}

PathFeedback path_feedback(const GeneralizedMatching& m, double delta, double alpha,
                           const std::vector<int>& active, int n_total) {
  if (m.empty()) throw std::invalid_argument("path_feedback: no paths");
  if (delta <= 0.0 || alpha <= 0.0) {
    throw std::invalid_argument("path_feedback: delta and alpha must be positive");
  }
  if (active.empty()) throw std::invalid_argument("path_feedback: empty active set");

  auto canonical = [](int a, int b) {
    return Edge{std::min(a, b), std::max(a, b), 1.0};
  };
  std::vector<Edge> hops;
  std::vector<Edge> ends;
  std::unordered_map<int, double> hop_degree;
  std::unordered_map<int, double> end_degree;
  for (const GPath& p : m) {
    if (p.nodes.size() < 2) throw std::invalid_argument("path_feedback: path with fewer than 2 nodes");
    for (std::size_t i = 1; i < p.nodes.size(); ++i) {
      hops.push_back(canonical(p.nodes[i - 1], p.nodes[i]));
      hop_degree[p.nodes[i - 1]] += 1.0;
      hop_degree[p.nodes[i]] += 1.0;
    }
    ends.push_back(canonical(p.nodes.front(), p.nodes.back()));
    end_degree[p.nodes.front()] += 1.0;
    end_degree[p.nodes.back()] += 1.0;
  }

  PathFeedback fb;
  for (const auto& [node, deg] : hop_degree) fb.pi_f = std::max(fb.pi_f, deg);
  for (const auto& [node, deg] : end_degree) fb.pi_d = std::max(fb.pi_d, deg);
  if (fb.pi_f > 2.0 + 1e-12 || fb.pi_d > 1.0 + 1e-12) {
    throw std::logic_error("path_feedback: paths are not simple and node-disjoint");
  }

  double n_active = static_cast<double>(active.size());
  double f = 2.0 * alpha / (static_cast<double>(m.size()) * delta);
  Vector diag = Vector::Zero(n_total);
  for (int v : active) diag[v] = alpha / n_active;
  fb.op = StructuredOperator(n_total);
  fb.op.add(DiagonalTerm{std::move(diag)});
  fb.op.add(EdgeLaplacianTerm{std::move(hops), f});
  fb.op.add(EdgeLaplacianTerm{std::move(ends), -f});
  fb.rho = alpha / n_active + 4.0 * alpha * (fb.pi_f + fb.pi_d) / (static_cast<double>(m.size()) * delta);
  return fb;
}

}  // namespace sepflow
