#include "sepflow/report.hpp"

#include <sstream>

namespace sepflow {

using nlohmann::json;

std::string outcome_name(AlphaOutcome outcome) {
  switch (outcome) {
    case AlphaOutcome::kCut:
      return "cut";
    case AlphaOutcome::kLowerBound:
      return "lower_bound";
    case AlphaOutcome::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

json cut_json(const Cut& cut) {
  std::vector<int> nodes;
  for (int i = 0; i < static_cast<int>(cut.side.size()); ++i) {
    if (cut.side[i]) nodes.push_back(i);
  }
  return json{{"nodes", nodes}, {"value", cut.value}, {"balance", cut.balance}};
}

json alpha_report_json(const AlphaReport& rep) {
  json verify;
  verify["width_checked"] = rep.verify.width_checked;
  verify["max_width_excess"] =
      rep.verify.width_checked > 0 ? json(rep.verify.max_width_excess) : json(nullptr);
  verify["capacity_checked"] = rep.verify.capacity_checked;
  verify["min_capacity_margin"] =
      rep.verify.capacity_checked > 0 ? json(rep.verify.min_capacity_margin) : json(nullptr);
  verify["charge_checked"] = rep.verify.charge_checked;
  verify["max_path_charge"] =
      rep.verify.charge_checked > 0 ? json(rep.verify.max_path_charge) : json(nullptr);

  json j;
  j["alpha"] = rep.alpha;
  j["eps"] = rep.eps;
  j["outcome"] = outcome_name(rep.outcome);
  j["inconclusive_reason"] =
      rep.inconclusive_reason.empty() ? json(nullptr) : json(rep.inconclusive_reason);
  j["iterations"] = rep.iterations;
  j["t_required"] = rep.t_required;
  j["t_effective"] = rep.t_effective;
  j["rho_budget"] = rep.rho_budget;
  j["eta"] = rep.eta;
  j["max_emitted_rho"] = rep.max_emitted_rho;
  j["delta_hat"] = rep.delta_hat;
  j["harvest_target"] = rep.harvest_target_size;
  j["estimate_termination_rate"] = rep.estimate_termination_rate;
  j["tallies"] = json{{"spread", rep.tallies.spread},
                      {"flow", rep.tallies.flow},
                      {"paths", rep.tallies.paths},
                      {"harvest_rounds", rep.tallies.harvest_rounds},
                      {"harvest_retries", rep.tallies.harvest_retries}};
  j["verify"] = verify;
  j["cut"] = rep.cut ? cut_json(*rep.cut) : json(nullptr);
  j["cut_iteration"] = rep.cut_iteration;
  return j;
}

namespace {

json config_json(const SolverConfig& cfg) {
  json j;
  j["c"] = cfg.c;
  j["eps_param"] = cfg.eps_param;
  j["a_const"] = cfg.a_const;
  j["b_const"] = cfg.b_const;
  j["c2"] = cfg.c2;
  j["c_prime"] = cfg.c_prime;
  j["harvest_runs"] = cfg.harvest_runs;
  j["harvest_option"] = cfg.harvest_option;
  j["harvest_retries"] = cfg.harvest_retries;
  j["workers"] = cfg.workers;
  j["estimate_trials"] = cfg.estimate_trials;
  j["seed"] = cfg.seed;
  j["iteration_cap"] = cfg.iteration_cap;
  j["strict_t"] = cfg.strict_t;
  j["backend"] = cfg.backend == EmbeddingBackend::kDense ? "dense" : "sketch";
  j["cd"] = cfg.cd;
  j["ck"] = cfg.ck;
  j["verify_feedback"] = cfg.verify_feedback;
  j["verify_max_n"] = cfg.verify_max_n;
  return j;
}

json schedule_json(const Schedule& s) {
  return json{{"eps", s.eps},
              {"delta", s.delta},
              {"big_k", s.big_k},
              {"omega", s.omega},
              {"sigma_target", s.sigma_target}};
}

std::string status_of(const SolveReport& rep) {
  if (rep.best_cut) return "cut";
  if (rep.has_certificate) return "lower_bound";
  return "inconclusive";
}

}  // namespace

json solve_report_json(const SolveReport& rep) {
  json result;
  result["status"] = status_of(rep);
  result["n"] = rep.n;
  result["schedule"] = schedule_json(rep.schedule);
  result["alpha_grid"] = rep.alpha_grid;
  json alphas = json::array();
  for (const AlphaReport& a : rep.alphas) alphas.push_back(alpha_report_json(a));
  result["alphas"] = alphas;
  if (rep.best_cut) {
    json c = cut_json(*rep.best_cut);
    c["expansion"] = rep.expansion;
    result["cut"] = c;
    result["cut_alpha"] = rep.best_cut_alpha;
  } else {
    result["cut"] = nullptr;
    result["cut_alpha"] = nullptr;
  }
  if (rep.has_certificate) {
    result["certificate"] = json{{"alpha", rep.certified_alpha},
                                 {"eps", rep.certified_eps},
                                 {"lower_bound", rep.certified_lower_bound}};
  } else {
    result["certificate"] = nullptr;
  }
  result["ratio"] = rep.ratio ? json(*rep.ratio) : json(nullptr);

  json timings;
  timings["total_ms"] = rep.total_ms;
  json per_alpha = json::array();
  for (const AlphaReport& a : rep.alphas) {
    per_alpha.push_back(json{{"alpha", a.alpha}, {"ms", a.ms}});
  }
  timings["per_alpha"] = per_alpha;

  return json{{"config", config_json(rep.config)}, {"result", result}, {"timings", timings}};
}

std::string solve_report_text(const SolveReport& rep) {
  std::ostringstream out;
  out << "status: " << status_of(rep) << "\n";
  out << "n: " << rep.n << ", schedule: delta=" << rep.schedule.delta
      << " K=" << rep.schedule.big_k << " omega=" << rep.schedule.omega
      << " sigma=" << rep.schedule.sigma_target << "\n";
  for (const AlphaReport& a : rep.alphas) {
    out << "alpha " << a.alpha << ": " << outcome_name(a.outcome);
    if (!a.inconclusive_reason.empty()) out << " (" << a.inconclusive_reason << ")";
    out << ", iterations " << a.iterations << "/" << a.t_effective << ", feedback s/f/p "
        << a.tallies.spread << "/" << a.tallies.flow << "/" << a.tallies.paths << "\n";
  }
  if (rep.best_cut) {
    out << "cut: value " << rep.best_cut->value << ", balance " << rep.best_cut->balance
        << ", expansion " << rep.expansion << " (alpha " << rep.best_cut_alpha << ")\n";
  } else {
    out << "cut: none\n";
  }
  if (rep.has_certificate) {
    out << "certified lower bound: " << rep.certified_lower_bound << " (alpha "
        << rep.certified_alpha << ", eps " << rep.certified_eps << ")\n";
  } else {
    out << "certified lower bound: none\n";
  }
  if (rep.ratio) {
    out << "ratio: " << *rep.ratio << "\n";
  } else {
    out << "ratio: n/a\n";
  }
  return out.str();
}

std::string solve_report_csv(const SolveReport& rep) {
  std::ostringstream out;
  out << "alpha,outcome,iterations,t_effective,rho_budget,eta,spread,flow,paths,"
         "harvest_rounds,harvest_retries,cut_value,cut_balance\n";
  for (const AlphaReport& a : rep.alphas) {
    out << a.alpha << ',' << outcome_name(a.outcome) << ',' << a.iterations << ','
        << a.t_effective << ',' << a.rho_budget << ',' << a.eta << ',' << a.tallies.spread << ','
        << a.tallies.flow << ',' << a.tallies.paths << ',' << a.tallies.harvest_rounds << ','
        << a.tallies.harvest_retries << ',';
    if (a.cut) {
      out << a.cut->value << ',' << a.cut->balance;
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sepflow
