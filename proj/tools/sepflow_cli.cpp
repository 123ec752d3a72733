#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepflow/chaining.hpp"
#include "sepflow/graph.hpp"
#include "sepflow/harvest.hpp"
#include "sepflow/matching.hpp"
#include "sepflow/random.hpp"
#include "sepflow/report.hpp"
#include "sepflow/sketch.hpp"
#include "sepflow/solver.hpp"

namespace {

using nlohmann::json;
using namespace sepflow;

std::string kind_name(MatchingResult::Kind kind) {
  switch (kind) {
    case MatchingResult::Kind::kCut:
      return "cut";
    case MatchingResult::Kind::kSaturatedFlow:
      return "saturated_flow";
    case MatchingResult::Kind::kMatched:
      return "matched";
  }
  return "unknown";
}

json matching_json(const MatchingResult& r) {
  json j;
  j["kind"] = kind_name(r.kind);
  j["pi"] = r.pi;
  j["n_active"] = r.n_active;
  j["a_side"] = r.a_side;
  j["b_side"] = r.b_side;
  j["flipped"] = r.flipped;
  switch (r.kind) {
    case MatchingResult::Kind::kCut:
      j["cut"] = cut_json(r.cut);
      break;
    case MatchingResult::Kind::kSaturatedFlow: {
      json demands = json::array();
      for (const PathEntry& e : r.flow.demands.entries) {
        demands.push_back(json{{"x", e.x}, {"y", e.y}, {"amount", e.amount}});
      }
      j["flow"] = json{{"value", r.flow.flow_value},
                       {"observed", r.flow.observed},
                       {"demands", demands}};
      break;
    }
    case MatchingResult::Kind::kMatched: {
      json edges = json::array();
      for (const MatchEdge& e : r.matched.edges) edges.push_back(json{e.tail, e.head});
      j["edges"] = edges;
      break;
    }
  }
  return j;
}

json paths_json(const GeneralizedMatching& paths) {
  json out = json::array();
  for (const GPath& p : paths) {
    out.push_back(json{{"nodes", p.nodes},
                       {"violating", p.violating},
                       {"span", p.violating ? json{p.span_begin, p.span_end} : json(nullptr)}});
  }
  return out;
}

void emit(const json& j, const std::string& format, const std::string& text,
          const std::string& csv) {
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << csv;
  } else {
    std::cout << text;
  }
}

struct CommonFlags {
  std::string input;
  std::string format = "json";
  std::uint64_t seed = 0;
};

void add_format_flag(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
}

int run_solve(const Graph& g, const SolverConfig& cfg, double alpha_override,
              const std::string& format) {
  SolveReport rep = alpha_override > 0.0 ? solve_single_alpha(g, alpha_override, cfg)
                                         : solve_balanced_separator(g, cfg);
  emit(solve_report_json(rep), format, solve_report_text(rep), solve_report_csv(rep));
  return 0;
}

int run_matching(const Graph& g, const MatchingConfig& mcfg, std::uint64_t seed,
                 const std::string& format) {
  int n = g.node_count();
  Embedding emb = Embedding::dense(Matrix::Identity(n, n));
  RngStream rng(seed);
  Vector u = sample_gaussian(n, rng);
  MatchingResult r = oriented_matching(u, emb, g, mcfg);
  json j = matching_json(r);

  std::ostringstream text;
  text << "kind: " << kind_name(r.kind) << ", pi " << r.pi << ", active " << r.n_active << "\n";
  if (r.kind == MatchingResult::Kind::kCut) {
    text << "cut value " << r.cut.value << ", balance " << r.cut.balance << "\n";
  } else if (r.kind == MatchingResult::Kind::kSaturatedFlow) {
    text << "flow value " << r.flow.flow_value << ", observed " << r.flow.observed << "\n";
  } else {
    text << r.matched.edges.size() << " matched pairs\n";
  }
  std::ostringstream csv;
  csv << "kind,pi,n_active,cut_value,flow_value,matched\n";
  csv << kind_name(r.kind) << ',' << r.pi << ',' << r.n_active << ',';
  if (r.kind == MatchingResult::Kind::kCut) csv << r.cut.value;
  csv << ',';
  if (r.kind == MatchingResult::Kind::kSaturatedFlow) csv << r.flow.flow_value;
  csv << ',' << (r.kind == MatchingResult::Kind::kMatched ? r.matched.edges.size() : 0) << '\n';
  emit(j, format, text.str(), csv.str());
  return 0;
}

int run_harvest(const Graph& g, const HarvestConfig& hcfg, const MatchingConfig& mcfg,
                const std::string& format) {
  int n = g.node_count();
  Embedding emb = Embedding::dense(Matrix::Identity(n, n));
  HarvestResult r = harvest(g, emb, hcfg, mcfg);

  json stats = json::array();
  for (const RunStats& s : r.stats) {
    stats.push_back(json{{"run", s.run},
                         {"terminated", s.terminated},
                         {"raw_paths", s.raw_paths},
                         {"violating_paths", s.violating_paths},
                         {"revisit_paths", s.revisit_paths},
                         {"reduced_size", s.reduced_size}});
  }
  json j;
  j["terminated"] = r.terminated;
  j["termination_run"] = r.termination_run;
  if (r.terminated) j["termination"] = matching_json(r.termination);
  j["paths"] = paths_json(r.paths);
  j["skipped_revisit_spans"] = r.skipped_revisit_spans;
  j["runs"] = stats;

  std::ostringstream text;
  if (r.terminated) {
    text << "terminated by run " << r.termination_run << " ("
         << kind_name(r.termination.kind) << ")\n";
  } else {
    text << r.paths.size() << " disjoint violating paths\n";
  }
  for (const RunStats& s : r.stats) {
    text << "run " << s.run << ": raw " << s.raw_paths << ", violating " << s.violating_paths
         << ", revisit " << s.revisit_paths << ", reduced " << s.reduced_size
         << (s.terminated ? ", terminated" : "") << "\n";
  }
  std::ostringstream csv;
  csv << "run,terminated,raw_paths,violating_paths,revisit_paths,reduced_size\n";
  for (const RunStats& s : r.stats) {
    csv << s.run << ',' << (s.terminated ? 1 : 0) << ',' << s.raw_paths << ','
        << s.violating_paths << ',' << s.revisit_paths << ',' << s.reduced_size << '\n';
  }
  emit(j, format, text.str(), csv.str());
  return 0;
}

int run_concentration(double omega, double delta, int d, long trials, std::uint64_t seed,
                      const std::string& format) {
  RngStream rng(seed);
  ConcentrationResult r = concentration_estimate(omega, delta, d, trials, rng);
  json j{{"omega", omega},       {"delta", delta},
         {"d", d},               {"trials", trials},
         {"estimate", r.estimate}, {"stderr", r.stderr_},
         {"lower_bound", r.lower_bound}};
  std::ostringstream text;
  text << "omega " << omega << ", delta " << delta << ": estimate " << r.estimate << " +- "
       << r.stderr_ << ", lower bound " << r.lower_bound << "\n";
  std::ostringstream csv;
  csv << "omega,delta,d,trials,estimate,stderr,lower_bound\n";
  csv << omega << ',' << delta << ',' << d << ',' << trials << ',' << r.estimate << ','
      << r.stderr_ << ',' << r.lower_bound << '\n';
  emit(j, format, text.str(), csv.str());
  return 0;
}

struct BenchRow {
  std::string method;
  int trials = 0;
  int terminated = 0;
  double mean_paths = 0.0;
  double mean_len = 0.0;
  double mean_violating = 0.0;
  double mean_stretch = 0.0;
};

BenchRow summarize(const std::string& method, const std::vector<ChainOutcome>& outs,
                   const std::vector<Vector>& dirs, const Embedding& emb) {
  BenchRow row;
  row.method = method;
  row.trials = static_cast<int>(outs.size());
  long long paths = 0, hops = 0, violating = 0;
  double stretch = 0.0;
  long long stretch_count = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (outs[i].terminated) {
      ++row.terminated;
      continue;
    }
    paths += static_cast<long long>(outs[i].paths.size());
    for (const GPath& p : outs[i].paths) {
      hops += static_cast<long long>(p.nodes.size()) - 1;
      if (p.violating) ++violating;
      Vector disp = emb.point(emb.col_of(p.nodes.back())) - emb.point(emb.col_of(p.nodes.front()));
      stretch += disp.dot(dirs[i]);
      ++stretch_count;
    }
  }
  int completed = row.trials - row.terminated;
  if (completed > 0) {
    row.mean_paths = static_cast<double>(paths) / completed;
    row.mean_violating = static_cast<double>(violating) / completed;
  }
  if (paths > 0) row.mean_len = static_cast<double>(hops) / static_cast<double>(paths);
  if (stretch_count > 0) row.mean_stretch = stretch / static_cast<double>(stretch_count);
  return row;
}

int run_bench(const Graph& g, const MatchingConfig& mcfg, int big_k, int trials,
              std::uint64_t seed, const std::string& format) {
  int n = g.node_count();
  Embedding emb = Embedding::dense(Matrix::Identity(n, n));
  MatchingOracle oracle = [&](const Vector& dir) { return oriented_matching(dir, emb, g, mcfg); };

  std::vector<ChainOutcome> chain_outs, bits_outs;
  std::vector<Vector> chain_dirs, bits_dirs;
  for (int i = 0; i < trials; ++i) {
    {
      RngStream rng(seed, 2 * static_cast<std::uint64_t>(i));
      Vector u1 = sample_gaussian(n, rng);
      chain_dirs.push_back(u1);
      chain_outs.push_back(sample_paths(u1, big_k, oracle, emb, mcfg.delta, rng));
    }
    {
      RngStream rng(seed, 2 * static_cast<std::uint64_t>(i) + 1);
      Vector u1 = sample_gaussian(n, rng);
      std::vector<int> bits(big_k);
      for (int& b : bits) b = rng.next_u64() & 1 ? 1 : 0;
      bits_dirs.push_back(u1);
      bits_outs.push_back(sample_paths_bits(u1, bits, oracle, emb, mcfg.delta, rng));
    }
  }
  BenchRow rows[2] = {summarize("correlated-chain", chain_outs, chain_dirs, emb),
                      summarize("bit-pattern", bits_outs, bits_dirs, emb)};

  json j = json::array();
  std::ostringstream text, csv;
  csv << "method,trials,terminated,mean_paths,mean_len,mean_violating,mean_stretch\n";
  for (const BenchRow& r : rows) {
    j.push_back(json{{"method", r.method},
                     {"trials", r.trials},
                     {"terminated", r.terminated},
                     {"mean_paths", r.mean_paths},
                     {"mean_len", r.mean_len},
                     {"mean_violating", r.mean_violating},
                     {"mean_stretch", r.mean_stretch}});
    text << r.method << ": trials " << r.trials << ", terminated " << r.terminated
         << ", mean paths " << r.mean_paths << ", mean hops " << r.mean_len
         << ", mean violating " << r.mean_violating << ", mean stretch " << r.mean_stretch
         << "\n";
    csv << r.method << ',' << r.trials << ',' << r.terminated << ',' << r.mean_paths << ','
        << r.mean_len << ',' << r.mean_violating << ',' << r.mean_stretch << '\n';
  }
  emit(j, format, text.str(), csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced-separator toolkit built on matching-oracle multiplicative weights"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Full balanced-separator run with threshold search");
  CommonFlags sf;
  SolverConfig cfg;
  double alpha_override = 0.0;
  std::string backend = "dense";
  solve->add_option("--input", sf.input, "Graph file")->required();
  solve->add_option("--c", cfg.c, "Balance target")->capture_default_str();
  solve->add_option("--epsilon", cfg.eps_param, "Accuracy knob")->capture_default_str();
  solve->add_option("--alpha", alpha_override, "Run only this threshold");
  solve->add_option("--a-const", cfg.a_const, "Chain-length constant")->capture_default_str();
  solve->add_option("--b-const", cfg.b_const, "Distance-scale constant")->capture_default_str();
  solve->add_option("--c2", cfg.c2, "Stretch-filter constant")->capture_default_str();
  solve->add_option("--c-prime", cfg.c_prime, "Block-size fraction")->capture_default_str();
  solve->add_option("--runs", cfg.harvest_runs, "Chaining rounds per harvest")->capture_default_str();
  solve->add_option("--option", cfg.harvest_option, "Harvest combine option (1 or 2)")
      ->capture_default_str();
  solve->add_option("--retries", cfg.harvest_retries, "Harvest retries per step")->capture_default_str();
  solve->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  solve->add_option("--estimate-trials", cfg.estimate_trials, "Matching-size probe trials")
      ->capture_default_str();
  solve->add_option("--seed", cfg.seed, "RNG seed")->envname("SEPFLOW_SEED")->capture_default_str();
  solve->add_option("--cap", cfg.iteration_cap, "Practical iteration cap")->capture_default_str();
  solve->add_flag("--strict-t", cfg.strict_t, "Run the full theoretical iteration budget");
  solve->add_option("--backend", backend, "Embedding backend")
      ->check(CLI::IsMember({"dense", "sketch"}))
      ->capture_default_str();
  solve->add_option("--cd", cfg.cd, "Sketch dimension constant")->capture_default_str();
  solve->add_option("--ck", cfg.ck, "Sketch Taylor constant")->capture_default_str();
  add_format_flag(solve, sf.format);

  // matching
  auto* match = app.add_subcommand("matching", "One matching-oracle call on the identity embedding");
  CommonFlags mf;
  MatchingConfig mcfg;
  match->add_option("--input", mf.input, "Graph file")->required();
  match->add_option("--alpha", mcfg.alpha, "Threshold")->capture_default_str();
  match->add_option("--c-prime", mcfg.c_prime, "Block-size fraction")->capture_default_str();
  match->add_option("--sigma", mcfg.sigma, "Stretch filter")->capture_default_str();
  match->add_option("--delta", mcfg.delta, "Squared-distance scale")->capture_default_str();
  match->add_option("--seed", mf.seed, "RNG seed")->envname("SEPFLOW_SEED")->capture_default_str();
  add_format_flag(match, mf.format);

  // harvest
  auto* harv = app.add_subcommand("harvest", "One violating-path harvest on the identity embedding");
  CommonFlags hf;
  MatchingConfig hmcfg;
  HarvestConfig hcfg;
  harv->add_option("--input", hf.input, "Graph file")->required();
  harv->add_option("--alpha", hmcfg.alpha, "Threshold")->capture_default_str();
  harv->add_option("--c-prime", hmcfg.c_prime, "Block-size fraction")->capture_default_str();
  harv->add_option("--sigma", hmcfg.sigma, "Stretch filter")->capture_default_str();
  harv->add_option("--delta", hmcfg.delta, "Squared-distance scale")->capture_default_str();
  harv->add_option("--runs", hcfg.runs, "Chaining rounds")->capture_default_str();
  harv->add_option("--K", hcfg.big_k, "Chain length")->capture_default_str();
  harv->add_option("--option", hcfg.option, "Combine option (1 or 2)")->capture_default_str();
  harv->add_option("--workers", hcfg.workers, "Worker threads")->capture_default_str();
  harv->add_option("--target", hcfg.target, "Target path count")->capture_default_str();
  harv->add_option("--seed", hcfg.seed, "RNG seed")->envname("SEPFLOW_SEED")->capture_default_str();
  add_format_flag(harv, hf.format);

  // concentration
  auto* conc = app.add_subcommand("concentration", "Correlated-pair tail mass vs the proved bound");
  double omega = 0.5, cdelta = 0.5;
  int cdim = 8;
  long ctrials = 100000;
  CommonFlags cf;
  conc->add_option("--omega", omega, "Correlation")->capture_default_str();
  conc->add_option("--delta", cdelta, "Tail mass of the halfspace")->capture_default_str();
  conc->add_option("--d", cdim, "Sample dimension")->capture_default_str();
  conc->add_option("--trials", ctrials, "Monte Carlo trials")->capture_default_str();
  conc->add_option("--seed", cf.seed, "RNG seed")->envname("SEPFLOW_SEED")->capture_default_str();
  add_format_flag(conc, cf.format);

  // bench-chaining
  auto* bench = app.add_subcommand("bench-chaining",
                                   "Correlated-chain vs bit-pattern sampling comparison");
  CommonFlags bf;
  MatchingConfig bmcfg;
  int bench_k = 4, bench_trials = 20;
  bench->add_option("--input", bf.input, "Graph file")->required();
  bench->add_option("--K", bench_k, "Chain length")->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per method")->capture_default_str();
  bench->add_option("--alpha", bmcfg.alpha, "Threshold")->capture_default_str();
  bench->add_option("--c-prime", bmcfg.c_prime, "Block-size fraction")->capture_default_str();
  bench->add_option("--sigma", bmcfg.sigma, "Stretch filter")->capture_default_str();
  bench->add_option("--delta", bmcfg.delta, "Squared-distance scale")->capture_default_str();
  bench->add_option("--seed", bf.seed, "RNG seed")->envname("SEPFLOW_SEED")->capture_default_str();
  add_format_flag(bench, bf.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) {
      cfg.backend = backend == "sketch" ? EmbeddingBackend::kSketch : EmbeddingBackend::kDense;
      return run_solve(load_graph_file(sf.input), cfg, alpha_override, sf.format);
    }
    if (match->parsed()) {
      return run_matching(load_graph_file(mf.input), mcfg, mf.seed, mf.format);
    }
    if (harv->parsed()) {
      return run_harvest(load_graph_file(hf.input), hcfg, hmcfg, hf.format);
    }
    if (conc->parsed()) {
      return run_concentration(omega, cdelta, cdim, ctrials, cf.seed, cf.format);
    }
    if (bench->parsed()) {
      return run_bench(load_graph_file(bf.input), bmcfg, bench_k, bench_trials, bf.seed,
                       bf.format);
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
