// dcosp: generate scenarios, run solver sweeps, replay and verify runs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcosp/bench.hpp"
#include "dcosp/generator.hpp"
#include "dcosp/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dcosp;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kInvariantViolation = 3,
  kOracleBudgetExhausted = 4,
};

// Flags mirroring ScenarioConfig. Unset flags leave the preset value.
struct ConfigFlags {
  std::string preset = "tiny";
  std::string config_file;
  std::optional<std::string> constellation, constellation_file, target_file, oracle;
  std::optional<double> altitude_km, horizon_hours, p_u, bnb_time_limit_s;
  std::optional<int> target_count, scenario_count, gnd_n, neighborhood_size, max_iters,
      workers, swo_rounds;
  std::optional<long long> bnb_node_budget;
  std::optional<bool> randomize_horizon_start, stop_on_convergence, w_counts_self, repair_skip_covered;
  std::vector<int> periodicity, volatility;
  std::optional<std::uint64_t> seed, repair_seed, solver_seed, gnd_seed, random_seed;
  std::vector<std::string> solvers;

  void attach(CLI::App& app) {
    app.add_option("--preset", preset, "Base preset")
        ->check(CLI::IsMember(preset_names()))
        ->capture_default_str();
    app.add_option("--config", config_file,
                   "JSON config file; its fields override the flags")
        ->check(CLI::ExistingFile);
    app.add_option("--constellation", constellation, "planet | walker | custom");
    app.add_option("--constellation-file", constellation_file, "Custom constellation JSON");
    app.add_option("--altitude-km", altitude_km, "Orbit altitude override (0 keeps default)");
    app.add_option("--targets", target_file, "Target CSV (id,lat,lon)");
    app.add_option("--target-count", target_count, "Synthetic target count");
    app.add_option("--horizon-hours", horizon_hours);
    app.add_option("--randomize-horizon-start", randomize_horizon_start);
    app.add_option("--periodicity", periodicity, "MIN MAX")->expected(2);
    app.add_option("--volatility", volatility, "MIN MAX")->expected(2);
    app.add_option("--scenario-count", scenario_count);
    app.add_option("--seed", seed, "Scenario base seed (incremented per scenario)");
    app.add_option("--repair-seed", repair_seed);
    app.add_option("--solver-seed", solver_seed);
    app.add_option("--gnd-seed", gnd_seed);
    app.add_option("--random-seed", random_seed);
    app.add_option("--solvers", solvers, "Comma-separated solver names")->delimiter(',');
    app.add_option("--oracle", oracle, "bnb | swo | none");
    app.add_option("--gnd-n", gnd_n);
    app.add_option("--neighborhood-size", neighborhood_size);
    app.add_option("--p-u", p_u);
    app.add_option("--max-iters", max_iters);
    app.add_option("--stop-on-convergence", stop_on_convergence);
    app.add_option("--w-counts-self", w_counts_self);
    app.add_option("--repair-skip-covered", repair_skip_covered);
    app.add_option("--workers", workers, "Threads per solver step");
    app.add_option("--bnb-node-budget", bnb_node_budget);
    app.add_option("--bnb-time-limit", bnb_time_limit_s, "Seconds");
    app.add_option("--swo-rounds", swo_rounds);
  }

  ScenarioConfig resolve() const {
    ScenarioConfig c = preset_config(preset);
    auto set = [](auto& field, const auto& flag) {
      if (flag) field = *flag;
    };
    set(c.constellation, constellation);
    set(c.constellation_file, constellation_file);
    set(c.target_file, target_file);
    set(c.oracle, oracle);
    set(c.altitude_km, altitude_km);
    set(c.horizon_hours, horizon_hours);
    set(c.p_u, p_u);
    set(c.bnb_time_limit_s, bnb_time_limit_s);
    set(c.target_count, target_count);
    set(c.scenario_count, scenario_count);
    set(c.gnd_n, gnd_n);
    set(c.neighborhood_size, neighborhood_size);
    set(c.max_iters, max_iters);
    set(c.workers, workers);
    set(c.swo_rounds, swo_rounds);
    set(c.bnb_node_budget, bnb_node_budget);
    set(c.randomize_horizon_start, randomize_horizon_start);
    set(c.stop_on_convergence, stop_on_convergence);
    set(c.w_counts_self, w_counts_self);
    set(c.repair_skip_covered, repair_skip_covered);
    set(c.seeds.scenario, seed);
    set(c.seeds.repair, repair_seed);
    set(c.seeds.solver, solver_seed);
    set(c.seeds.gnd, gnd_seed);
    set(c.seeds.random_solver, random_seed);
    if (!periodicity.empty()) {
      c.periodicity_min = periodicity[0];
      c.periodicity_max = periodicity[1];
    }
    if (!volatility.empty()) {
      c.volatility_min = volatility[0];
      c.volatility_max = volatility[1];
    }
    if (!solvers.empty()) c.solvers = solvers;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        from_json(json::parse(in), c);
      } catch (const json::exception& e) {
        throw StructuralError(config_file + ": " + e.what());
      }
    }
    for (const auto& s : c.solvers) parse_solver(s);
    c.validate();
    return c;
  }
};

std::string scenario_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scenario_%04d", i);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StructuralError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw StructuralError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("scenario_", 0) == 0 && e.path().extension() == ".json")
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw StructuralError("no scenario_*.json files in " + dir.string());
  return out;
}

std::string summary_line(int index, const DcospInstance& d) {
  std::ostringstream os;
  os << scenario_name(index) << " seed " << d.seeds.scenario << ": " << d.agents.size()
     << " agents, " << d.requests.size() << " requests, " << d.ever_active().size()
     << " ever active, " << d.tasks.size() << " tasks, " << d.events.size() << " events";
  return os.str();
}

// ---- generate -------------------------------------------------------------

int cmd_generate(const ConfigFlags& flags, const std::string& out_dir) {
  const ScenarioConfig c = flags.resolve();
  ensure_dir(out_dir);
  json cj = c;
  write_text(fs::path(out_dir) / "config.json", dump_json(cj));
  for (int i = 0; i < c.scenario_count; ++i) {
    const DcospInstance d = generate_scenario(c, i);
    save_scenario(d, (fs::path(out_dir) / (scenario_name(i) + ".json")).string());
    std::cout << summary_line(i, d) << "\n";
  }
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOptions {
  std::string scenarios_dir;
  std::string out_dir;
  int jobs = 1;
  bool strict_oracle = false;
};

int cmd_bench(const ConfigFlags& flags, const BenchOptions& o) {
  const ScenarioConfig c = flags.resolve();
  std::vector<fs::path> files;
  if (!o.scenarios_dir.empty()) files = scenario_files(o.scenarios_dir);
  const std::size_t n = files.empty() ? static_cast<std::size_t>(c.scenario_count) : files.size();

  std::vector<ScenarioEvaluation> evals(n);
  parallel_for(n, o.jobs, [&](std::size_t i) {
    const int index = static_cast<int>(i);
    const DcospInstance d =
        files.empty() ? generate_scenario(c, index) : load_scenario(files[i].string());
    evals[i] = evaluate_scenario(d, index, c);
  });

  bool exhausted = false;
  for (const auto& e : evals) {
    std::cout << scenario_name(e.index) << " seed " << e.seed << ": " << e.ever_active
              << " ever-active requests";
    if (e.reference) {
      std::cout << ", reference " << e.reference->method << " " << e.reference->value << " ("
                << (e.reference->proven ? "proven optimal" : "lower bound") << ")";
      if (e.bnb) std::cout << ", bnb nodes " << e.bnb->nodes;
    }
    std::cout << "\n";
    if (e.bnb && !e.bnb->proven) exhausted = true;
  }
  const auto rows = summarize(evals);
  const std::string table = format_table(rows);
  std::cout << "\n" << table;

  if (!o.out_dir.empty()) {
    const fs::path out(o.out_dir);
    ensure_dir(out / "runs");
    ensure_dir(out / "traces");
    json cj = c;
    write_text(out / "config.json", dump_json(cj));
    write_text(out / "table.txt", table);
    write_text(out / "table.json", dump_json(table_to_json(rows)));
    json all = json::array();
    for (const auto& e : evals) {
      all.push_back(evaluation_to_json(e));
      const std::string stem = scenario_name(e.index);
      std::ofstream csv(out / "traces" / (stem + ".csv"));
      write_trace_csv_header(csv);
      for (const auto& r : e.runs) {
        write_trace_csv(csv, r.metrics);
        save_run(r, (out / "runs" / (stem + "_" + r.metrics.solver + ".json")).string());
      }
      if (e.oracle_run) {
        write_trace_csv(csv, e.oracle_run->metrics);
        save_run(*e.oracle_run,
                 (out / "runs" / (stem + "_" + e.oracle_run->metrics.solver + ".json")).string());
      }
    }
    write_text(out / "evaluations.json", dump_json(all));
  }
  if (exhausted && o.strict_oracle) {
    std::cerr << "error: branch and bound exhausted its budget on at least one scenario\n";
    return kOracleBudgetExhausted;
  }
  return kOk;
}

// ---- replay ---------------------------------------------------------------

struct ReplayOptions {
  std::string scenario;
  std::string solver;
  std::string reference_run;
  std::string out;
  std::string trace_csv;
  std::string allocation;
};

int cmd_replay(const ConfigFlags& flags, const ReplayOptions& o) {
  const DcospInstance d = load_scenario(o.scenario);
  SolverKind kind;
  SolverParams params;
  std::optional<RunResult> reference;
  if (!o.reference_run.empty()) {
    reference = load_run(o.reference_run);
    if (!reference->params)
      throw StructuralError(o.reference_run + " was not produced by an online solver");
    kind = parse_solver(reference->metrics.solver);
    params = *reference->params;
  } else {
    if (o.solver.empty()) throw StructuralError("replay needs --solver or --run");
    kind = parse_solver(o.solver);
    params = SolverParams::from_config(flags.resolve());
  }

  json allocations = json::array();
  StepObserver observer;
  if (!o.allocation.empty()) {
    observer = [&](std::size_t t, const DynamicSolver& s) {
      const auto* search = dynamic_cast<const StochasticSearchSolver*>(&s);
      if (!search) throw StructuralError(s.name() + " has no request allocation to dump");
      json a = allocation_to_json(search->allocation());
      a["instance"] = t;
      allocations.push_back(std::move(a));
    };
  }
  const RunResult r = run(d, kind, params, observer);
  std::cout << dump_json(metrics_to_json(r.metrics, false)) << "\n";
  if (!o.out.empty()) save_run(r, o.out);
  if (!o.trace_csv.empty()) {
    std::ofstream csv(o.trace_csv);
    if (!csv) throw StructuralError("cannot write " + o.trace_csv);
    write_trace_csv_header(csv);
    write_trace_csv(csv, r.metrics);
  }
  if (!o.allocation.empty()) write_text(o.allocation, dump_json(allocations));

  if (reference) {
    const json a = metrics_to_json(r.metrics, false);
    const json b = metrics_to_json(reference->metrics, false);
    if (a != b || r.schedules != reference->schedules) {
      std::cerr << "replay differs from " << o.reference_run << "\n";
      return kFailure;
    }
    std::cerr << "replay matches " << o.reference_run << "\n";
  }
  return kOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const std::string& scenario, const std::vector<std::string>& runs) {
  const DcospInstance d = load_scenario(scenario);
  int bad = 0;
  for (const auto& path : runs) {
    const RunResult r = load_run(path);
    const auto problems = verify_run(d, r);
    if (problems.empty()) {
      std::cout << "ok   " << path << " (" << r.metrics.solver << ", utility "
                << r.metrics.dynamic_utility << ")\n";
      continue;
    }
    ++bad;
    std::cout << "FAIL " << path << "\n";
    for (const auto& p : problems) std::cout << "     " << p << "\n";
  }
  return bad ? kInvariantViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic constellation observation scheduling harness"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, bench_flags, replay_flags;

  auto* gen = app.add_subcommand("generate", "Write seeded scenario files");
  gen_flags.attach(*gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Run every configured solver on every scenario");
  bench_flags.attach(*bench);
  BenchOptions bopts;
  bench->add_option("--scenarios", bopts.scenarios_dir,
                    "Directory of scenario_*.json (default: generate from the config)");
  bench->add_option("--out", bopts.out_dir, "Directory for tables, run records and traces");
  bench->add_option("--jobs", bopts.jobs, "Scenarios evaluated concurrently")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--strict-oracle", bopts.strict_oracle,
                  "Exit with code 4 if branch and bound runs out of budget");

  auto* replay = app.add_subcommand("replay", "Run one solver on a stored scenario");
  replay_flags.attach(*replay);
  ReplayOptions ropts;
  replay->add_option("--scenario", ropts.scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--solver", ropts.solver, "Solver name");
  replay->add_option("--run", ropts.reference_run,
                     "Stored run record to reproduce (solver and parameters come from it)")
      ->check(CLI::ExistingFile);
  replay->add_option("--out", ropts.out, "Write the run record here");
  replay->add_option("--trace-csv", ropts.trace_csv, "Write the per-iteration trace here");
  replay->add_option("--allocation", ropts.allocation,
                     "Write the per-instance request allocation here (search solvers)");

  auto* verify = app.add_subcommand("verify", "Check stored runs against their scenario");
  std::string vscenario;
  std::vector<std::string> vruns;
  verify->add_option("--scenario", vscenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("runs", vruns, "Run record files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_generate(gen_flags, gen_out);
    if (*bench) return cmd_bench(bench_flags, bopts);
    if (*replay) return cmd_replay(replay_flags, ropts);
    if (*verify) return cmd_verify(vscenario, vruns);
  } catch (const SolverInvariantError& e) {
    std::cerr << "solver invariant violated: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
