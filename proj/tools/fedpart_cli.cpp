// fedpart: command-line front end for the participation-game engine.
//
// Exit codes: 0 success, 2 usage error, 3 capacity error, 4 numerical failure.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedpart/fedpart.hpp"
#include "fedpart/harness.hpp"

namespace {

using namespace fedpart;
using namespace fedpart::harness;

constexpr const char* kOutDirEnv = "FEDPART_OUTPUT_DIR";

struct GlobalOptions {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string format = "csv";
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

ExperimentConfig load(const std::string& path, const GlobalOptions& g) {
  ExperimentConfig cfg = load_config(path);
  if (g.seed) cfg.seed = g.seed;
  if (g.tol) {
    cfg.solver.tol.feas = *g.tol;
    cfg.solver.tol.cs = *g.tol;
    cfg.solver.tol.gap = 10.0 * *g.tol;
    cfg.solver.ce_tol = *g.tol;
  }
  cfg.validate();
  return cfg;
}

/// --out, then the config's output.path, then $FEDPART_OUTPUT_DIR/<name>.csv, else stdout.
void emit(const CsvTable& table, const GlobalOptions& g, const std::optional<std::string>& config_path,
          const std::string& name) {
  std::string path = g.out;
  if (path.empty() && config_path) path = *config_path;
  if (path.empty())
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) path = (std::filesystem::path(dir) / (name + ".csv")).string();
  if (path.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write output file '" + path + "'");
  table.write(out);
}

void write_side_file(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write output file '" + path + "'");
  table.write(out);
}

CsvTable distribution_table(const CorrelatedDistribution& dist, const ProfitTable& table) {
  CsvTable t({"outcome", "decision", "probability", "outcome_profit", "pi", "pi_negative"});
  for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
    if (dist.probabilities[k] == 0.0) continue;
    t.add_row({std::to_string(k), DecisionVector::from_index(k, dist.n).to_string(),
               format_number(dist.probabilities[k]), format_number(table.total(k)),
               format_number(table.incentive(k)), table.incentive(k) < 0.0 ? "1" : "0"});
  }
  return t;
}

int run_fit_error(const std::string& csv, const GlobalOptions& g) {
  const auto points = read_error_csv(csv);
  const ErrorCurve curve = fit_power_law(points);
  CsvTable t({"a", "b", "r2", "points"});
  t.add_row({format_number(curve.a), format_number(curve.b), format_number(curve.fit_r2.value_or(0.0)),
             std::to_string(points.size())});
  emit(t, g, std::nullopt, "fit-error");
  return 0;
}

int run_solve_gpm(const std::string& path, const std::string& dist_out, const GlobalOptions& g) {
  const ExperimentConfig cfg = load(path, g);
  const std::uint64_t seed = cfg.effective_seed();
  const auto devices = profiles(cfg.materialize(derive_seed(seed, 0)));
  const ProfitTable table = profit_tensor(devices, cfg.game, cfg.solver.enumeration_cap);
  const GpmSolution sol = solve_gpm(table, cfg.solver.tol);
  const CeVerdict ce = verify_ce(sol.distribution, table, cfg.solver.ce_tol);
  if (!ce.ok) throw NumericalError("solution failed the correlated-equilibrium check");
  const auto marg = marginals(sol.distribution);
  const DecisionVector thr = threshold_decision(marg);
  const DecisionVector sampled = sample_decision(sol.distribution, seed);

  CsvTable t({"device", "id", "size", "marginal", "decision_threshold", "decision_sampled", "objective",
              "alternative_optima", "seed"});
  for (std::size_t i = 0; i < devices.size(); ++i)
    t.add_row({std::to_string(i), std::to_string(devices[i].id), format_number(devices[i].size),
               format_number(marg[i]), std::to_string(thr[i]), std::to_string(sampled[i]),
               format_number(sol.total_expected_profit), sol.alternative_optima ? "1" : "0",
               std::to_string(seed)});
  emit(t, g, cfg.output_path, "solve-gpm");
  if (!dist_out.empty()) write_side_file(distribution_table(sol.distribution, table), dist_out);
  return 0;
}

int run_solve_sgpm(const std::string& path, std::size_t xi, const GlobalOptions& g) {
  const ExperimentConfig cfg = load(path, g);
  const std::uint64_t seed = cfg.effective_seed();
  const auto devices = profiles(cfg.materialize(derive_seed(seed, 0)));
  const DecomposedResult dec = solve_decomposed(devices, cfg.game, xi, seed, cfg.solver.tol,
                                                ExecutionMode::Serialized, cfg.solver.enumeration_cap);
  CsvTable t({"device", "id", "size", "subset", "subset_objective", "marginal", "decision_threshold",
              "decision_sampled", "reported_profit", "xi", "seed"});
  for (std::size_t j = 0; j < dec.partition.assignment.size(); ++j) {
    const auto& chunk = dec.partition.assignment[j];
    const auto marg = marginals(dec.subsets[j].distribution);
    for (std::size_t t_i = 0; t_i < chunk.size(); ++t_i) {
      const std::size_t i = chunk[t_i];
      t.add_row({std::to_string(i), std::to_string(devices[i].id), format_number(devices[i].size),
                 std::to_string(j), format_number(dec.subsets[j].total_expected_profit), format_number(marg[t_i]),
                 marg[t_i] >= kDecisionThreshold ? "1" : "0", std::to_string(dec.decision[i]),
                 format_number(dec.reported_profit), std::to_string(xi), std::to_string(seed)});
    }
  }
  emit(t, g, cfg.output_path, "solve-sgpm");
  return 0;
}

int run_mechanism(const std::string& path, const std::string& axis_name, const std::string& values_text,
                  bool timing, const GlobalOptions& g) {
  const ExperimentConfig cfg = load(path, g);
  const Axis axis = parse_axis(axis_name);
  const auto values = values_text.empty() ? default_values(axis) : parse_list(values_text, "--values");
  emit(sweep(cfg, axis, values, cfg.effective_seed(), {timing}), g, cfg.output_path, "mechanism");
  return 0;
}

int run_simulate(const std::string& path, const std::string& trace_out, const GlobalOptions& g) {
  const ExperimentConfig cfg = load(path, g);
  const std::uint64_t seed = cfg.effective_seed();
  const ProtocolResult res = run_protocol(cfg, seed);
  CsvTable t({"device", "id", "theta", "report", "reward", "ud_max", "ue_max", "accepted", "marginal",
              "decision", "total_profit", "expected_profit", "seed"});
  for (std::size_t i = 0; i < res.participants.size(); ++i) {
    const auto& m = res.mechanism[i];
    t.add_row({std::to_string(i), std::to_string(res.participants[i].profile.id),
               format_number(res.participants[i].mech.theta), format_number(m.report), format_number(m.reward),
               format_number(m.device_utility), format_number(m.server_utility), res.accepted[i] ? "1" : "0",
               format_number(res.marginals[i]), std::to_string(res.decision[i]), format_number(res.total_profit),
               format_number(res.expected_profit), std::to_string(seed)});
  }
  emit(t, g, cfg.output_path, "simulate");
  if (!trace_out.empty()) write_side_file(trace_table(res.trace), trace_out);
  return 0;
}

int run_compare(const std::string& path, const std::string& n_list_text, std::size_t xi, bool timing,
                const GlobalOptions& g) {
  const ExperimentConfig cfg = load(path, g);
  std::vector<std::size_t> n_list;
  for (double v : parse_list(n_list_text, "--n-list")) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw UsageError("--n-list entries must be positive integers");
    n_list.push_back(static_cast<std::size_t>(v));
  }
  const auto rows = compare_solvers(cfg, n_list, xi, cfg.effective_seed());
  emit(compare_table(rows, timing), g, cfg.output_path, "compare");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Participation-game engine: GPM solver, decomposition, mechanism sweeps and protocol simulation"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--out", g.out, "Output CSV path (default: config output.path, $FEDPART_OUTPUT_DIR, stdout)");
  app.add_option("--seed", g.seed, "64-bit seed for every stochastic step");
  app.add_option("--tol", g.tol, "Feasibility / slackness / CE tolerance (gap tolerance is 10x)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv"}));

  std::string csv_path, config, dist_out, trace_out, axis, values, n_list;
  std::size_t xi = 2;
  bool timing = false;

  auto* fit = app.add_subcommand("fit-error", "Fit a power-law error curve to a (size, error) CSV");
  fit->add_option("csv", csv_path, "CSV with header row and two columns: size, error")->required();

  auto* gpm = app.add_subcommand("solve-gpm", "Solve the GPM program directly");
  gpm->add_option("config", config, "Experiment config (JSON)")->required();
  gpm->add_option("--dist-out", dist_out, "Also write the support of the distribution to this CSV");

  auto* sgpm = app.add_subcommand("solve-sgpm", "Solve by subset decomposition");
  sgpm->add_option("config", config, "Experiment config (JSON)")->required();
  sgpm->add_option("--xi", xi, "Number of subsets")->required()->check(CLI::PositiveNumber);

  auto* mech = app.add_subcommand("mechanism", "Parameter sweep of mechanism and GPM outputs");
  mech->add_option("config", config, "Experiment config (JSON)")->required();
  mech->add_option("--sweep", axis, "Axis: theta, a_d, b_d, a_e, b_e, sigma, rho, s0, r0, s1, n, xi")->required();
  mech->add_option("--values", values, "Comma-separated values (default: built-in grid for the axis)");
  mech->add_flag("--timing", timing, "Add a wall-clock column (output no longer byte-reproducible)");

  auto* sim = app.add_subcommand("simulate", "Run one round of the server/device protocol");
  sim->add_option("config", config, "Experiment config (JSON)")->required();
  sim->add_option("--trace-out", trace_out, "Write the event trace to this CSV");

  auto* cmp = app.add_subcommand("compare", "Compare direct and decomposed solvers");
  cmp->add_option("config", config, "Experiment config (JSON)")->required();
  cmp->add_option("--n-list", n_list, "Comma-separated device counts")->required();
  cmp->add_option("--xi", xi, "Number of subsets for the decomposed solver")->check(CLI::PositiveNumber);
  cmp->add_flag("--timing", timing, "Add wall-clock columns (output no longer byte-reproducible)");

  for (auto* sub : {sgpm, mech, sim, cmp, gpm, fit}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit) return run_fit_error(csv_path, g);
    if (*gpm) return run_solve_gpm(config, dist_out, g);
    if (*sgpm) return run_solve_sgpm(config, xi, g);
    if (*mech) return run_mechanism(config, axis, values, timing, g);
    if (*sim) return run_simulate(config, trace_out, g);
    if (*cmp) return run_compare(config, n_list, xi, timing, g);
  } catch (const fedpart::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
