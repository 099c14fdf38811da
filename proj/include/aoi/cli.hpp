#pragma once

// The `aoi` command-line tool. `run` is kept separate from main so tests can
// drive it in-process.

#include "aoi/analysis.hpp"
#include "aoi/closed_form.hpp"
#include "aoi/report.hpp"
#include "aoi/shs.hpp"
#include "aoi/shs_models.hpp"
#include "aoi/simulator.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace aoi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundViolated = 1;
inline constexpr int kExitUsage = 2;

using Config = std::vector<std::pair<std::string, std::string>>;

inline std::string models_help() {
  std::string s = "Models (closed-form, shs, simulate):\n";
  for (ClosedForm id : kAllClosedForms) s += "  " + std::string(to_string(id)) + "  " + std::string(describe(id)) + "\n";
  s += "  mm1-ps  M/M/1 processor sharing (shs: truncated at --buffer; simulate only otherwise)\n";
  s += "Two-source sweep models: ps, fgfs, mm11star\n";
  s += "Propositions (verify, extremum):\n";
  for (auto p : analysis::kAllPropositions)
    s += "  " + std::string(analysis::to_string(p)) + "  " + std::string(analysis::describe(p)) + "\n";
  return s;
}

/// Seed from AOI_SEED when set, else 1.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("AOI_SEED")) {
    try {
      std::size_t used = 0;
      const std::string s(env);
      const auto v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("AOI_SEED must be a non-negative integer");
  }
  return 1;
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

/// A simulated queue selected by name: closed-form ids plus mm1-ps.
inline sim::QueueModel sim_queue(const std::string& name, std::size_t buffer) {
  sim::QueueModel q;
  if (name == "mm1-ps") {
    q = {sim::Discipline::PS, 0, sim::FullPolicy::Block};
  } else {
    const ClosedForm id = parse_closed_form(name);
    if (id == ClosedForm::MM1_PS_LOWER_BOUND) throw std::invalid_argument("mm1-ps-lb is a bound, not a queue; use mm1-ps");
    q = sim::queue_model(id);
  }
  if (buffer != 0) {
    if (q.capacity != 0) throw std::invalid_argument("--buffer applies only to mm1-ps and mm1-fgfs");
    q.capacity = buffer;
  }
  return q;
}

inline std::string canonical_model(const std::string& name) {
  return name == "mm1-ps" ? name : std::string(to_string(parse_closed_form(name)));
}

struct Options {
  // shared
  std::string model;
  std::string out;
  double mu = 1.0;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  // closed-form
  std::string lambda_range;
  // shs / simulate
  double lambda = 0.0;
  double lambda2 = 0.0;
  std::size_t buffer = 0;
  std::size_t source = 1;
  bool dump = false;
  double events = 1e6;
  std::optional<double> time;
  std::size_t reps = 20;
  double warmup = 0.1;
  std::string trace_path;
  std::size_t trace_points = 10000;
  // verify / extremum
  std::vector<std::string> props;
  std::string grid;
  double lo = 1e-4;
  double hi = 1e4;
  // conjecture
  std::string rho_range = "0.1:0.9:9";
  std::size_t start_n = 20;
  std::size_t step_n = 40;
  std::size_t max_n = 400;
  double tol = 1e-7;
  bool with_sim = false;
  // sweep
  double lambda1 = 0.1;
  std::string lambda2_range;
  std::vector<std::string> models;
  std::string objective = "source1";
  std::string method = "shs";
};

inline int cmd_closed_form(const Options& o, std::ostream& out) {
  std::vector<ClosedForm> ids;
  if (o.model == "all") {
    ids.assign(kAllClosedForms.begin(), kAllClosedForms.end());
  } else {
    ids.push_back(parse_closed_form(o.model));
  }
  const auto lambdas = report::parse_range(o.lambda_range);
  if (ids.size() == 1 && lambdas.size() == 1 && o.out.empty()) {
    out << report::num(aaoi(ids[0], RateParams(lambdas[0], o.mu))) << '\n';
    return kExitOk;
  }
  std::ostringstream os;
  report::write_config(os, {{"command", "closed-form"}, {"model", o.model}, {"lambda", o.lambda_range}, {"mu", report::num(o.mu)}});
  os << "model,lambda,mu,aaoi\n";
  for (ClosedForm id : ids)
    for (double l : lambdas) {
      const RateParams p(l, o.mu);
      std::string v;
      try {
        v = report::num(aaoi(id, p));
      } catch (const std::domain_error&) {
        if (o.model != "all") throw;
        v = "nan"; // M/M/1 forms outside their stability region
      }
      os << to_string(id) << ',' << report::num(l) << ',' << report::num(o.mu) << ',' << v << '\n';
    }
  emit(os.str(), o.out, out);
  return kExitOk;
}

inline int cmd_shs(const Options& o, std::ostream& out) {
  const std::string model = canonical_model(o.model);
  const bool two = o.lambda2 > 0.0;
  if (o.lambda2 < 0.0) throw std::invalid_argument("--lambda2 must be >= 0");
  if (o.source != 1 && o.source != 2) throw std::invalid_argument("--source must be 1 or 2");
  if (o.source == 2 && !two) throw std::invalid_argument("--source 2 needs --lambda2 > 0");
  const std::size_t soi = o.source - 1;
  const double rates[] = {o.lambda, o.lambda2};
  const std::span<const double> lambdas(rates, two ? 2 : 1);
  std::size_t buffer = 0;
  std::optional<double> reference;
  shs::Model m = [&]() -> shs::Model {
    if (model == "mm1-ps" || model == "mm1-fgfs") {
      buffer = o.buffer != 0 ? o.buffer : (two ? shs::kDefaultCapTwoSources : shs::kDefaultCapOneSource);
      const auto d = model == "mm1-ps" ? shs::Discipline::PS : shs::Discipline::FGFS;
      if (!two && d == shs::Discipline::FGFS && o.lambda < o.mu)
        reference = aaoi(ClosedForm::MM1_FGFS, RateParams(o.lambda, o.mu));
      return shs::build_truncated_mm1(d, lambdas, o.mu, {buffer, buffer}, soi);
    }
    if (o.buffer != 0) throw std::invalid_argument("--buffer applies only to mm1-ps and mm1-fgfs");
    const ClosedForm id = parse_closed_form(model);
    if (id == ClosedForm::MM11S && two) {
      reference = (1.0 + (o.lambda + o.lambda2) / o.mu) / rates[soi];
      return shs::build_preemptive_server(lambdas, o.mu, soi);
    }
    if (two) throw std::invalid_argument("two sources are supported for mm1-ps, mm1-fgfs and mm11star");
    const RateParams p(o.lambda, o.mu);
    if (!is_finite_buffer(id)) throw std::invalid_argument("'" + model + "' has no finite SHS table; use mm1-ps or mm1-fgfs");
    reference = aaoi(id, p);
    return shs::build_finite_model(id, p);
  }();

  std::ostringstream os;
  if (o.dump) {
    os << shs::dump_table(m);
    emit(os.str(), o.out, out);
    return kExitOk;
  }
  const auto sol = shs::solve_age_system(m);
  report::write_config(os, {{"command", "shs"},
                            {"model", model},
                            {"lambda1", report::num(o.lambda)},
                            {"lambda2", report::num(o.lambda2)},
                            {"mu", report::num(o.mu)},
                            {"source", std::to_string(o.source)},
                            {"buffer", std::to_string(buffer)}});
  os << "model,lambda1,lambda2,mu,source,buffer,aaoi,closed_form,unknowns,residual\n";
  os << model << ',' << report::num(o.lambda) << ',' << report::num(o.lambda2) << ',' << report::num(o.mu) << ','
     << o.source << ',' << buffer << ',' << report::num(sol.aaoi) << ',' << (reference ? report::num(*reference) : "")
     << ',' << sol.unknowns << ',' << report::num(sol.max_relative_residual) << '\n';
  emit(os.str(), o.out, out);
  return kExitOk;
}

inline sim::SimConfig sim_config(const Options& o, const sim::QueueModel& q) {
  sim::SimConfig c;
  c.model = q;
  c.lambdas = {o.lambda};
  if (o.lambda2 > 0.0) c.lambdas.push_back(o.lambda2);
  if (o.lambda2 < 0.0) throw std::invalid_argument("--lambda2 must be >= 0");
  c.mu = o.mu;
  c.horizon = o.time ? sim::Horizon::time(*o.time) : sim::Horizon::events(o.events);
  c.warmup = o.warmup;
  c.seed = o.seed;
  c.replications = o.reps;
  c.threads = o.threads;
  c.validate();
  return c;
}

inline Config sim_config_echo(const std::string& command, const std::string& model, const Options& o,
                              const sim::SimConfig& c) {
  return {{"command", command},
          {"model", model},
          {"lambda1", report::num(o.lambda)},
          {"lambda2", report::num(o.lambda2)},
          {"mu", report::num(o.mu)},
          {"buffer", std::to_string(c.model.capacity)},
          {"horizon", c.horizon.kind == sim::HorizonKind::Time ? "time:" + report::num(c.horizon.value)
                                                                 : "events:" + report::num(c.horizon.value)},
          {"warmup", report::num(c.warmup)},
          {"replications", std::to_string(c.replications)},
          {"seed", std::to_string(c.seed)}};
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  const std::string model = canonical_model(o.model);
  const auto c = sim_config(o, sim_queue(model, o.buffer));
  if (!o.trace_path.empty()) {
    if (o.source < 1 || o.source > c.lambdas.size()) throw std::invalid_argument("--source out of range");
    const auto trace = sim::sawtooth_trace(c, o.source - 1, o.trace_points);
    std::ostringstream ts;
    report::write_config(ts, sim_config_echo("simulate", model, o, c));
    report::write_config(ts, {{"trace_source", std::to_string(o.source)}, {"trace_points", std::to_string(o.trace_points)}});
    ts << report::kTraceHeader << '\n';
    report::write_trace_rows(ts, trace, o.source - 1);
    emit(ts.str(), o.trace_path, out);
  }
  const auto est = sim::simulate(c);
  std::ostringstream os;
  report::write_config(os, sim_config_echo("simulate", model, o, c));
  os << report::kEstimateHeader << '\n';
  report::write_estimate_rows(os, model, c, est);
  emit(os.str(), o.out, out);
  return kExitOk;
}

inline std::vector<analysis::Proposition> selected_props(const std::vector<std::string>& names,
                                                         const std::vector<analysis::Proposition>& all) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) return all;
  std::vector<analysis::Proposition> ps;
  for (const auto& n : names) ps.push_back(analysis::parse_proposition(n));
  return ps;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const auto props = selected_props(o.props, {analysis::kAllPropositions.begin(), analysis::kAllPropositions.end()});
  analysis::ConjectureOptions mm1;
  mm1.start_packets = o.start_n;
  mm1.step = o.step_n;
  mm1.max_packets = o.max_n;
  mm1.rel_tol = o.tol;
  std::ostringstream os, summary;
  std::string prop_list;
  for (auto p : props) prop_list += (prop_list.empty() ? "" : ",") + std::string(analysis::to_string(p));
  report::write_config(os, {{"command", "verify"},
                            {"props", prop_list},
                            {"grid", o.grid.empty() ? "log:0.001:1000:200 (ratios), 0.1:0.9:9 (lemma1, conj1)" : o.grid},
                            {"truncation", "start=" + std::to_string(o.start_n) + " step=" + std::to_string(o.step_n) +
                                               " max=" + std::to_string(o.max_n) + " tol=" + report::num(o.tol)}});
  os << report::kBoundHeader << '\n';
  bool all_pass = true;
  for (auto p : props) {
    std::string grid_desc = o.grid;
    if (grid_desc.empty()) grid_desc = analysis::is_ratio_claim(p) ? "log:0.001:1000:200" : "0.1:0.9:9";
    const auto rep = analysis::verify_bound(p, report::parse_range(grid_desc), grid_desc, mm1);
    report::write_bound_report(os, rep);
    all_pass = all_pass && rep.pass;
    summary << analysis::to_string(p) << ' ' << (rep.pass ? "pass" : "FAIL") << " min=" << report::num(rep.min_value)
            << " at rho=" << report::num(rep.rho_at_min) << " max=" << report::num(rep.max_value)
            << " at rho=" << report::num(rep.rho_at_max);
    if (analysis::is_ratio_claim(p))
      summary << " bounds=[" << report::num(rep.lower) << "," << report::num(rep.upper)
              << "] literal_excess=" << report::num(rep.literal_excess);
    if (rep.rho_star) summary << " rho_star=" << report::num(*rep.rho_star);
    summary << '\n';
  }
  std::istringstream lines(summary.str());
  for (std::string line; std::getline(lines, line);) os << "# result: " << line << '\n';
  emit(os.str(), o.out, out);
  if (!o.out.empty()) out << summary.str();
  return all_pass ? kExitOk : kExitBoundViolated;
}

inline int cmd_extremum(const Options& o, std::ostream& out) {
  const auto props = selected_props(
      o.props, {analysis::Proposition::P8, analysis::Proposition::P11_MM11_VS_MM12PS, analysis::Proposition::P12_MM11STAR});
  std::ostringstream os;
  report::write_config(os, {{"command", "extremum"}, {"bracket", report::num(o.lo) + ":" + report::num(o.hi)}});
  os << "prop,rho_star,ratio,polynomial_root,kind,agrees\n";
  bool ok = true;
  for (auto p : props) {
    const auto r = analysis::find_ratio_extremum(p, o.lo, o.hi);
    ok = ok && r.agrees;
    os << analysis::to_string(p) << ',' << report::num(r.rho_star) << ',' << report::num(r.ratio) << ','
       << report::num(r.polynomial_root) << ',' << (r.is_maximum ? "max" : "min") << ',' << report::flag(r.agrees) << '\n';
  }
  emit(os.str(), o.out, out);
  return ok ? kExitOk : kExitBoundViolated;
}

inline int cmd_conjecture(const Options& o, std::ostream& out, std::ostream& err) {
  analysis::ConjectureOptions co;
  co.start_packets = o.start_n;
  co.step = o.step_n;
  co.max_packets = o.max_n;
  co.rel_tol = o.tol;
  if (o.with_sim) co.simulation = analysis::SimBudget{o.events, o.reps, o.warmup, o.seed, o.threads};
  const auto rows = analysis::conjecture_evidence(report::parse_range(o.rho_range), co);
  std::ostringstream os;
  Config cfg{{"command", "conjecture"},
             {"rho", o.rho_range},
             {"truncation", "start=" + std::to_string(o.start_n) + " step=" + std::to_string(o.step_n) +
                                " max=" + std::to_string(o.max_n) + " tol=" + report::num(o.tol)},
             {"simulation", o.with_sim ? "events=" + report::num(o.events) + " reps=" + std::to_string(o.reps) +
                                             " warmup=" + report::num(o.warmup) + " seed=" + std::to_string(o.seed)
                                       : "off"}};
  report::write_config(os, cfg);
  os << "rho,aaoi,c,lower,upper,large_lower,large_upper,large_applicable,within,within_large,lemma_bound,lemma_holds,"
        "truncation,converged,sim_mean,sim_ci95,sim_agrees\n";
  bool ok = true;
  for (const auto& r : rows) {
    os << report::num(r.rho) << ',' << report::num(r.aaoi) << ',' << report::num(r.c) << ','
       << report::num(r.bounds.lower) << ',' << report::num(r.bounds.upper) << ',' << report::num(r.bounds.large_rho_lower)
       << ',' << report::num(r.bounds.large_rho_upper) << ',' << report::flag(r.bounds.large_rho_applicable) << ','
       << report::flag(r.within_general) << ','
       << (r.bounds.large_rho_applicable ? report::flag(r.within_large_rho) : "n/a") << ','
       << report::num(r.lemma1_bound) << ',' << report::flag(r.lemma1_holds) << ',' << r.truncation << ','
       << report::flag(r.converged) << ',' << (r.sim_mean ? report::num(*r.sim_mean) : "") << ','
       << (r.sim_ci95 ? report::num(*r.sim_ci95) : "") << ',' << (r.sim_agrees ? report::flag(*r.sim_agrees) : "")
       << '\n';
    if (!r.within_general)
      err << "*** C(rho) = " << report::num(r.c) << " outside [" << report::num(r.bounds.lower) << ", "
          << report::num(r.bounds.upper) << "] at rho = " << report::num(r.rho)
          << (r.violation_confirmed ? " (confirmed)" : " (not confirmed)") << '\n';
    if (!r.converged) err << "*** truncation not converged at rho = " << report::num(r.rho) << '\n';
    ok = ok && r.lemma1_holds && r.converged && !r.violation_confirmed;
  }
  emit(os.str(), o.out, out);
  return ok ? kExitOk : kExitBoundViolated;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  analysis::SweepConfig c;
  c.lambda1 = o.lambda1;
  c.lambda2 = report::parse_range(o.lambda2_range);
  c.mu = o.mu;
  if (!o.models.empty()) {
    c.models.clear();
    for (const auto& m : o.models) c.models.push_back(analysis::parse_two_source_model(m));
  }
  c.objective = analysis::parse_objective(o.objective);
  c.method = analysis::parse_method(o.method);
  c.max_packets = o.buffer != 0 ? o.buffer : shs::kDefaultCapTwoSources;
  c.simulation = {o.events, o.reps, o.warmup, o.seed, o.threads};
  c.sim_time_horizon = o.time;
  const auto rows = analysis::two_source_sweep(c);

  std::string model_list;
  for (auto m : c.models) model_list += (model_list.empty() ? "" : ",") + std::string(analysis::to_string(m));
  std::ostringstream os;
  Config cfg{{"command", "sweep"},
             {"lambda1", report::num(c.lambda1)},
             {"lambda2", o.lambda2_range},
             {"mu", report::num(c.mu)},
             {"models", model_list},
             {"objective", std::string(analysis::to_string(c.objective))},
             {"method", std::string(analysis::to_string(c.method))},
             {"buffer", std::to_string(c.max_packets)}};
  if (c.method == analysis::Method::Simulate) {
    cfg.emplace_back("horizon", o.time ? "time:" + report::num(*o.time) : "events:" + report::num(o.events));
    cfg.emplace_back("warmup", report::num(o.warmup));
    cfg.emplace_back("replications", std::to_string(o.reps));
    cfg.emplace_back("seed", std::to_string(o.seed));
  }
  report::write_config(os, cfg);
  std::string overloaded;
  for (const auto& r : rows)
    if (r.overloaded && r.model != analysis::TwoSourceModel::MM11S) {
      const std::string v = report::num(r.lambda2);
      if (overloaded.find(" " + v + " ") == std::string::npos) overloaded += " " + v + " ";
    }
  if (!overloaded.empty())
    os << "# note: total load >= 1 at lambda2 =" << overloaded
       << "; ps/fgfs values describe the blocking queue with the given buffer\n";
  os << report::kSweepHeader << '\n';
  report::write_sweep_rows(os, rows);
  emit(os.str(), o.out, out);
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Average age of information: closed forms, SHS solver, simulator and bound checks", "aoi"};
  app.footer(models_help());
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;

  auto* cf = app.add_subcommand("closed-form", "Evaluate a closed-form AAoI");
  cf->add_option("--model", o.model, "Model name, or 'all'")->required();
  cf->add_option("--lambda", o.lambda_range, "Arrival rate, or a range start:stop:count / log:start:stop:count")->required();
  cf->add_option("--mu", o.mu, "Service rate")->capture_default_str();
  cf->add_option("--out", o.out, "Write CSV here instead of stdout");

  auto* sh = app.add_subcommand("shs", "Solve the SHS age system of a model");
  sh->add_option("--model", o.model, "Model name (finite models, mm1-ps, mm1-fgfs, mm11star)")->required();
  sh->add_option("--lambda", o.lambda, "Arrival rate of source 1")->required();
  sh->add_option("--lambda2", o.lambda2, "Arrival rate of source 2 (0 = single source)")->capture_default_str();
  sh->add_option("--mu", o.mu, "Service rate")->capture_default_str();
  sh->add_option("--buffer", o.buffer, "Truncation N for mm1-ps / mm1-fgfs (default 60, or 8 with two sources)");
  sh->add_option("--source", o.source, "Source of interest (1 or 2)")->capture_default_str();
  sh->add_flag("--dump", o.dump, "Print the transition table instead of solving");
  sh->add_option("--out", o.out, "Write output here instead of stdout");

  auto* si = app.add_subcommand("simulate", "Estimate the AAoI by discrete-event simulation");
  si->add_option("--model", o.model, "Model name (finite models, mm1-ps, mm1-fgfs)")->required();
  si->add_option("--lambda", o.lambda, "Arrival rate of source 1")->required();
  si->add_option("--lambda2", o.lambda2, "Arrival rate of source 2 (0 = single source)")->capture_default_str();
  si->add_option("--mu", o.mu, "Service rate")->capture_default_str();
  si->add_option("--buffer", o.buffer, "Blocking buffer size for mm1-ps / mm1-fgfs (0 = unbounded)")->capture_default_str();
  auto* ev = si->add_option("--events", o.events, "Events per replication")->capture_default_str();
  si->add_option("--time", o.time, "Simulated time per replication (instead of --events)")->excludes(ev);
  si->add_option("--reps", o.reps, "Replications")->capture_default_str();
  si->add_option("--warmup", o.warmup, "Fraction of the horizon discarded")->capture_default_str();
  si->add_option("--seed", seed_flag, "Seed (default: AOI_SEED or 1)");
  si->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  si->add_option("--trace", o.trace_path, "Also write the sawtooth trace of replication 0 to this CSV");
  si->add_option("--trace-points", o.trace_points, "Maximum trace breakpoints")->capture_default_str();
  si->add_option("--source", o.source, "Source whose trace is written")->capture_default_str();
  si->add_option("--out", o.out, "Write CSV here instead of stdout");

  auto* ve = app.add_subcommand("verify", "Check proposition bounds over a load grid");
  ve->add_option("--prop", o.props, "Propositions (comma separated, or 'all')")->delimiter(',');
  ve->add_option("--grid", o.grid, "Load grid (default log:0.001:1000:200; 0.1:0.9:9 for lemma1/conj1)");
  ve->add_option("--start-n", o.start_n, "Initial truncation for lemma1/conj1")->capture_default_str();
  ve->add_option("--step-n", o.step_n, "Truncation step")->capture_default_str();
  ve->add_option("--max-n", o.max_n, "Largest truncation tried")->capture_default_str();
  ve->add_option("--tol", o.tol, "Relative change declaring convergence")->capture_default_str();
  ve->add_option("--out", o.out, "Write CSV here; the summary goes to stdout");

  auto* ex = app.add_subcommand("extremum", "Locate the extremal load of a ratio");
  ex->add_option("--prop", o.props, "p8, p11, p12 (comma separated, or 'all')")->delimiter(',');
  ex->add_option("--lo", o.lo, "Lower end of the search bracket")->capture_default_str();
  ex->add_option("--hi", o.hi, "Upper end of the search bracket")->capture_default_str();
  ex->add_option("--out", o.out, "Write CSV here instead of stdout");

  auto* co = app.add_subcommand("conjecture", "Evidence for the M/M/1-PS bounds on C(rho)");
  co->add_option("--rho", o.rho_range, "Loads in (0,1)")->capture_default_str();
  co->add_option("--start-n", o.start_n, "Initial truncation")->capture_default_str();
  co->add_option("--step-n", o.step_n, "Truncation step")->capture_default_str();
  co->add_option("--max-n", o.max_n, "Largest truncation tried")->capture_default_str();
  co->add_option("--tol", o.tol, "Relative change declaring convergence")->capture_default_str();
  co->add_flag("--sim", o.with_sim, "Cross-check each point by simulation");
  co->add_option("--events", o.events, "Events per replication (with --sim)")->capture_default_str();
  co->add_option("--reps", o.reps, "Replications (with --sim)")->capture_default_str();
  co->add_option("--warmup", o.warmup, "Warm-up fraction (with --sim)")->capture_default_str();
  co->add_option("--seed", seed_flag, "Seed (default: AOI_SEED or 1)");
  co->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  co->add_option("--out", o.out, "Write CSV here instead of stdout");

  auto* sw = app.add_subcommand("sweep", "Two-source AAoI comparison over lambda2");
  sw->add_option("--lambda1", o.lambda1, "Arrival rate of source 1")->capture_default_str();
  sw->add_option("--lambda2", o.lambda2_range, "Range of source-2 rates")->required();
  sw->add_option("--mu", o.mu, "Service rate")->capture_default_str();
  sw->add_option("--models", o.models, "ps, fgfs, mm11star (comma separated)")->delimiter(',');
  sw->add_option("--objective", o.objective, "source1 or sum")->capture_default_str();
  sw->add_option("--method", o.method, "shs or simulate")->capture_default_str();
  sw->add_option("--buffer", o.buffer, "Buffer size N of the ps/fgfs queues (default 8)");
  auto* sev = sw->add_option("--events", o.events, "Events per replication (simulate)")->capture_default_str();
  sw->add_option("--time", o.time, "Simulated time per replication (instead of --events)")->excludes(sev);
  sw->add_option("--reps", o.reps, "Replications (simulate)")->capture_default_str();
  sw->add_option("--warmup", o.warmup, "Warm-up fraction (simulate)")->capture_default_str();
  sw->add_option("--seed", seed_flag, "Seed (default: AOI_SEED or 1)");
  sw->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sw->add_option("--out", o.out, "Write CSV here instead of stdout");

  for (auto* sub : app.get_subcommands({})) sub->footer(models_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    o.seed = seed_flag ? *seed_flag : default_seed();
    if (*cf) return cmd_closed_form(o, out);
    if (*sh) return cmd_shs(o, out);
    if (*si) return cmd_simulate(o, out);
    if (*ve) return cmd_verify(o, out);
    if (*ex) return cmd_extremum(o, out);
    if (*co) return cmd_conjecture(o, out, err);
    if (*sw) return cmd_sweep(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace aoi::cli
