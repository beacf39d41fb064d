// crudesched: command-line front end for the scheduling library.
//
// Exit codes: 0 success, 1 usage error, 2 validation error, 3 oracle guard
// exceeded.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crudesched/export.hpp"
#include "crudesched/generator.hpp"
#include "crudesched/instance_io.hpp"
#include "crudesched/oracle.hpp"
#include "crudesched/simulator.hpp"
#include "crudesched/solver.hpp"
#include "crudesched/stats.hpp"

namespace fs = std::filesystem;
using namespace crudesched;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

struct SolveOptions {
  std::string instance;
  std::string variant = "dsea-hr";
  std::vector<std::string> variants;
  std::uint64_t seed = 1;
  Index runs = 20;
  Index global_evals = 100000;
  Index local_evals = 30000;
  Index swarm = 100;
  Index pop = 60;
  std::string out_dir;
  std::string format = "csv";
};

SolverConfig make_config(const SolveOptions& o, Variant variant, std::uint64_t seed) {
  SolverConfig c;
  c.variant = variant;
  c.seed = seed;
  c.global.max_evaluations = o.global_evals;
  c.global.swarm_size = o.swarm;
  c.local.max_evaluations = o.local_evals;
  c.local.population_size = o.pop;
  return c;
}

Variant require_variant(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw CLI::ValidationError("--variant", fmt::format("unknown variant '{}'", name));
  return *v;
}

void add_budget_flags(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--global-evals", o.global_evals, "Evaluation budget of the swarm stage");
  cmd->add_option("--local-evals", o.local_evals, "Evaluation budget of the repair stage");
  cmd->add_option("--swarm", o.swarm, "Swarm size (even)");
  cmd->add_option("--pop", o.pop, "Repair-stage population size");
}

int run_solve(const SolveOptions& o) {
  const Instance inst = load_instance(o.instance);
  const Variant variant = require_variant(o.variant);
  const RunReport report = solve(inst, make_config(o, variant, o.seed));
  const Schedule schedule = decode_genome(report.best, inst);
  const Trajectory traj = simulate(inst, schedule);

  const fs::path dir = o.out_dir.empty() ? fs::path("out") : fs::path(o.out_dir);
  fs::create_directories(dir);
  write_text_file(dir / "report.json", report_json(inst, report, traj));
  write_text_file(dir / "trace.csv", trace_csv(report.trace));
  write_text_file(dir / "schedule.json", schedule_to_json(schedule, inst));
  write_text_file(dir / "schedule.csv", schedule_to_csv(schedule, inst));
  if (o.format == "json") {
    write_text_file(dir / "trajectory.json", trajectory_json(inst, traj));
  } else {
    write_text_file(dir / "trajectory.csv", trajectory_csv(inst, traj));
  }
  const GanttChart chart = gantt_from_trajectory(inst, traj);
  write_text_file(dir / "gantt.json", gantt_to_json(chart));
  write_text_file(dir / "gantt.svg", render_gantt_svg(chart));

  fmt::print("{} seed {}: feasible={} cvn={} cv={} objective={} evals={}+{} time={:.2f}s\n", variant_name(variant),
             o.seed, report.feasible(), report.fitness.cvn, report.fitness.cv, report.fitness.objective,
             report.global_evaluations, report.local_evaluations, report.wall_seconds);
  return 0;
}

int run_bench(const SolveOptions& o) {
  const Instance inst = load_instance(o.instance);
  if (o.runs < 1) throw CLI::ValidationError("--runs", "must be at least 1");
  std::vector<Variant> variants;
  for (const auto& name : o.variants.empty() ? std::vector<std::string>{o.variant} : o.variants) {
    variants.push_back(require_variant(name));
  }
  std::vector<BenchRow> rows;
  std::vector<RunReport> runs;
  for (Variant v : variants) {
    std::vector<Fitness> best;
    for (Index r = 0; r < o.runs; ++r) {
      RunReport rep = solve(inst, make_config(o, v, o.seed + r));
      std::cerr << fmt::format("{} seed {}: cvn={} objective={} time={:.2f}s\n", variant_name(v), rep.seed,
                               rep.fitness.cvn, rep.fitness.objective, rep.wall_seconds);
      best.push_back(rep.fitness);
      rep.best.clear();
      rep.trace.clear();
      runs.push_back(std::move(rep));
    }
    rows.push_back({std::string(variant_name(v)), aggregate(best)});
  }
  const std::string table = o.format == "json" ? bench_table_json(rows, runs) : bench_table_csv(rows);
  std::cout << table;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_text_file(fs::path(o.out_dir) / (o.format == "json" ? "bench.json" : "bench.csv"), table);
    write_text_file(fs::path(o.out_dir) / "bench_runs.json", bench_table_json(rows, runs));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crude-oil scheduling solver and experiment harness"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance with one variant and seed");
  solve_cmd->add_option("--instance", so.instance, "Instance file")->required();
  solve_cmd->add_option("--variant", so.variant, "dsea-hr, v1, v2 or cso-only");
  solve_cmd->add_option("--seed", so.seed, "Master seed");
  solve_cmd->add_option("--out-dir", so.out_dir, "Output directory (default: out)");
  solve_cmd->add_option("--format", so.format, "Trajectory file format")->check(CLI::IsMember({"csv", "json"}));
  add_budget_flags(solve_cmd, so);

  SolveOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Repeated runs with aggregate statistics");
  bench_cmd->add_option("--instance", bo.instance, "Instance file")->required();
  bench_cmd->add_option("--variant", bo.variants, "Variant(s); repeat or comma-separate")->delimiter(',');
  bench_cmd->add_option("--seed", bo.seed, "First seed; run r uses seed + r");
  bench_cmd->add_option("--runs", bo.runs, "Runs per variant");
  bench_cmd->add_option("--out-dir", bo.out_dir, "Also write the table and raw runs here");
  bench_cmd->add_option("--format", bo.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  add_budget_flags(bench_cmd, bo);

  GeneratorParams gp;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Generate an instance with a planted feasible schedule");
  gen_cmd->add_option("--tanks", gp.tanks);
  gen_cmd->add_option("--cdus", gp.cdus);
  gen_cmd->add_option("--periods", gp.periods);
  gen_cmd->add_option("--crudes", gp.crudes);
  gen_cmd->add_option("--vessels", gp.vessels);
  gen_cmd->add_option("--residues", gp.residues);
  gen_cmd->add_option("--properties", gp.properties);
  gen_cmd->add_option("--max-tanks", gp.max_tanks);
  gen_cmd->add_option("--berths", gp.berths);
  gen_cmd->add_option("--seed", gp.seed);
  gen_cmd->add_option("--out-dir", gen_out, "Writes instance.json and witness.json here")->required();

  std::string oracle_instance;
  std::string oracle_out;
  std::string oracle_format = "json";
  OracleConfig oc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive enumeration on a tiny instance");
  oracle_cmd->add_option("--instance", oracle_instance, "Instance file")->required();
  oracle_cmd->add_option("--grid", oc.flow_grid, "Flow grid points per charge slot");
  oracle_cmd->add_option("--guard", oc.guard, "Largest space to enumerate");
  oracle_cmd->add_option("--out-dir", oracle_out, "Write the best schedule here");
  oracle_cmd->add_option("--format", oracle_format, "Summary format")->check(CLI::IsMember({"csv", "json"}));

  std::string validate_instance_path;
  std::string validate_schedule;
  auto* validate_cmd = app.add_subcommand("validate", "Check an instance, and optionally a schedule against it");
  validate_cmd->add_option("--instance", validate_instance_path, "Instance file")->required();
  validate_cmd->add_option("--schedule", validate_schedule, "Schedule file to simulate");

  std::string gantt_in;
  std::string gantt_out;
  auto* gantt_cmd = app.add_subcommand("export-gantt", "Render a Gantt JSON file as SVG");
  gantt_cmd->add_option("--trajectory", gantt_in, "Gantt JSON written by solve")->required();
  gantt_cmd->add_option("--output", gantt_out, "SVG path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(so);
    if (*bench_cmd) return run_bench(bo);
    if (*gen_cmd) {
      const GeneratedInstance g = generate_instance(gp);
      fs::create_directories(gen_out);
      save_instance(g.instance, fs::path(gen_out) / "instance.json");
      write_text_file(fs::path(gen_out) / "witness.json", schedule_to_json(g.witness, g.instance));
      fmt::print("wrote {}\n", (fs::path(gen_out) / "instance.json").string());
      return 0;
    }
    if (*oracle_cmd) {
      const Instance inst = load_instance(oracle_instance);
      const OracleResult r = oracle_enumerate(inst, oc);
      const std::string best = r.best_changeovers ? fmt::format("{}", *r.best_changeovers) : "none";
      if (oracle_format == "csv") {
        fmt::print("enumerated,feasible,best_changeovers\n{},{},{}\n", r.enumerated, r.feasible_count, best);
      } else {
        fmt::print("{{\"enumerated\": {}, \"feasible\": {}, \"best_changeovers\": {}}}\n", r.enumerated,
                   r.feasible_count, r.best_changeovers ? best : "null");
      }
      if (!oracle_out.empty() && r.best) {
        fs::create_directories(oracle_out);
        write_text_file(fs::path(oracle_out) / "oracle_best.json", schedule_to_json(*r.best, inst));
      }
      return 0;
    }
    if (*validate_cmd) {
      const Instance inst = load_instance(validate_instance_path);
      if (validate_schedule.empty()) {
        fmt::print("{}: valid ({} periods, {} tanks, {} CDUs)\n", inst.name, inst.horizon, inst.tank_count(),
                   inst.cdu_count());
        return 0;
      }
      const Schedule s = load_schedule(validate_schedule, inst);
      const Trajectory traj = simulate(inst, s);
      const Fitness f = fitness_from(traj.violations, inst.changeover_cost * static_cast<double>(traj.changeovers));
      fmt::print("cvn={} cv={} objective={} changeovers={}\n", f.cvn, f.cv, f.objective, traj.changeovers);
      for (const auto& v : traj.violations) {
        fmt::print("  P{} {} entity={} detail={} magnitude={}\n", v.period + 1, constraint_name(v.kind), v.entity,
                   v.detail, v.magnitude);
      }
      return f.feasible() ? 0 : kExitValidation;
    }
    if (*gantt_cmd) {
      const std::string svg = render_gantt_svg(parse_gantt(read_text_file(gantt_in)));
      if (gantt_out.empty()) {
        std::cout << svg;
      } else {
        write_text_file(gantt_out, svg);
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const InstanceError& e) {
    std::cerr << "error: invalid instance\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
