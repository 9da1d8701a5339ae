// iabplan command-line front end.
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad input or usage, 3 no feasible
// plan found, 4 validation failure, 5 external solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iabplan/channel.hpp"
#include "iabplan/experiment.hpp"
#include "iabplan/external.hpp"
#include "iabplan/model.hpp"
#include "iabplan/mps.hpp"
#include "iabplan/resilience.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/scenario_io.hpp"
#include "iabplan/solution_io.hpp"
#include "iabplan/solve.hpp"
#include "iabplan/validate.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum Exit { kOk = 0, kError = 1, kUsage = 2, kInfeasible = 3, kInvalid = 4, kExternal = 5 };

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw iab::ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

bool on_off(const std::string& v) { return v == "on"; }

iab::McsTable mcs_table(const std::string& spec) {
  if (spec == "synthetic4") return iab::McsTable::synthetic4();
  return iab::load_mcs_csv(spec);
}

// "1-30", "1,2,5" or a mix of both.
template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    try {
      if (dash == std::string::npos) {
        out.push_back(static_cast<T>(std::stoll(item)));
      } else {
        const long long a = std::stoll(item.substr(0, dash)), b = std::stoll(item.substr(dash + 1));
        if (b < a) throw std::invalid_argument(item);
        for (long long v = a; v <= b; ++v) out.push_back(static_cast<T>(v));
      }
    } catch (const std::logic_error&) {
      throw iab::ParseError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw iab::ParseError(std::string("empty ") + what + " list");
  return out;
}

struct ModelFlags {
  int R = 1;
  int depth = 3;
  int out_degree = 4;
  std::string flow = "on";
  std::string airtime = "on";
  double donor_capacity = -1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--R", R, "redundancy: edge-disjoint trees per node")->check(CLI::PositiveNumber);
    cmd->add_option("--depth", depth, "maximum hops to a donor (D)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out-degree", out_degree, "children per node must stay below this (delta)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--flow", flow, "flow constraints")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--airtime-per-node", airtime, "airtime of all links at a node sums to at most 1")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--donor-capacity", donor_capacity, "donor backhaul capacity in Mb/s (default: total demand)");
  }

  iab::ModelParams params() const {
    iab::ModelParams p;
    p.redundancy = R;
    p.max_depth = depth;
    p.max_out_degree = out_degree;
    p.flow_enabled = on_off(flow);
    p.airtime_per_node = on_off(airtime);
    if (donor_capacity >= 0.0) p.donor_capacity_mbps = donor_capacity;
    p.validate();
    return p;
  }
};

struct InstanceFlags {
  int n = 15;
  double density = 45.0;
  int mimo_layers = 1;
  double radius = 100.0;
  double lambda = 1000.0;
  std::string mcs = "synthetic4";
  bool keep_isolated = false;

  void add(CLI::App* cmd, bool with_n) {
    if (with_n) {
      cmd->add_option("--n", n, "number of gNBs")->check(CLI::PositiveNumber);
      cmd->add_option("--mimo-layers", mimo_layers, "MIMO layers (Lambda)")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--density", density, "gNBs per km^2")->check(CLI::PositiveNumber);
    cmd->add_option("--radius", radius, "coverage radius in meters")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", lambda, "nominal per-gNB load in Mb/s")->check(CLI::PositiveNumber);
    cmd->add_option("--mcs", mcs, "MCS table: 'synthetic4' or a CSV file");
    cmd->add_flag("--keep-isolated", keep_isolated, "keep nodes left without candidate edges");
  }

  iab::InstanceOptions options() const {
    iab::InstanceOptions o;
    o.n = n;
    o.density_per_km2 = density;
    o.mimo_layers = mimo_layers;
    o.coverage_radius_m = radius;
    o.lambda_mbps = lambda;
    o.mcs = mcs_table(mcs);
    o.drop_isolated = !keep_isolated;
    return o;
  }
};

int cmd_generate(const InstanceFlags& f, std::uint64_t seed, const std::string& out) {
  auto o = f.options();
  o.seed = seed;
  const auto g = iab::make_instance(o);
  write_output(out, iab::dump_scenario(g));
  return kOk;
}

struct PlanFlags {
  std::string input;
  std::string out;
  std::string backend = "native";
  std::string solver_cmd;
  double time_limit = 600.0;
  std::uint64_t seed = 1;
  std::vector<int> fix;
  std::string export_mps;
};

int cmd_plan(const PlanFlags& f, const ModelFlags& mf) {
  const auto graph = iab::load_scenario(f.input);
  const auto params = mf.params();
  auto model = iab::build_model(graph, params);
  std::vector<int> pinned = f.fix;
  for (const auto& n : graph.nodes)
    if (n.fixed_donor) pinned.push_back(n.id);
  if (!pinned.empty()) model = iab::fix_donors(std::move(model), pinned);
  if (!f.export_mps.empty()) iab::export_mps(model, f.export_mps);

  iab::SolveLimits lim;
  lim.time_limit_s = f.time_limit;
  lim.seed = f.seed;
  iab::Solution sol;
  if (f.backend == "external") {
    if (f.solver_cmd.empty()) throw Failure{kUsage, "--backend external needs --solver-cmd"};
    sol = iab::run_external(graph, model, f.solver_cmd, lim);
  } else {
    sol = iab::solve_exact(model, lim);
  }
  std::cerr << "status " << iab::to_string(sol.status) << ", donors " << sol.objective << " of "
            << graph.nodes.size() << ", gap " << sol.gap << ", " << sol.solve_time_s << " s\n";
  if (!sol.has_plan()) throw Failure{kInfeasible, std::string("no feasible plan (") + iab::to_string(sol.status) + ")"};
  const auto report = iab::validate_solution(graph, params, sol);
  if (!report.ok()) throw Failure{kInvalid, "plan failed validation:\n" + report.summary()};
  write_output(f.out, iab::dump_plan(sol, params));
  return kOk;
}

int cmd_validate(const std::string& input, const std::string& plan_path, bool quiet) {
  const auto graph = iab::load_scenario(input);
  const auto plan = iab::load_plan(plan_path);
  const auto report = iab::validate_solution(graph, plan.params, plan.solution);
  if (!quiet) std::cout << report.summary();
  return report.ok() ? kOk : kInvalid;
}

int cmd_simulate(const std::string& input, const std::string& plan_path, const std::string& faults,
                 const iab::TraceOptions& opt, const std::string& out) {
  const auto graph = iab::load_scenario(input);
  const auto plan = iab::load_plan(plan_path);
  const auto report = iab::validate_solution(graph, plan.params, plan.solution);
  if (!report.ok()) throw Failure{kInvalid, "plan failed validation:\n" + report.summary()};
  const auto topo = iab::extract_multitree(plan.solution, graph, plan.params);
  const auto schedule = faults.empty() ? std::vector<iab::ScheduledFault>{} : iab::parse_fault_schedule(read_file(faults));
  write_output(out, iab::trace_csv(iab::simulate_trace(topo, schedule, opt)));
  return kOk;
}

struct ExperimentFlags {
  std::string seeds = "1-30";
  std::string sizes = "15";
  std::string R = "1,2";
  std::string layers = "1,2";
  double time_limit = 600.0;
  int jobs = 1;
  std::string out_dir = ".";
};

int cmd_experiment(const ExperimentFlags& f, const InstanceFlags& inst, const ModelFlags& mf) {
  iab::ExperimentSpec spec;
  spec.seeds = parse_list<std::uint64_t>(f.seeds, "seed");
  spec.node_counts = parse_list<int>(f.sizes, "node count");
  spec.redundancy = parse_list<int>(f.R, "R");
  spec.mimo_layers = parse_list<int>(f.layers, "MIMO layer");
  spec.density_per_km2 = inst.density;
  spec.instance = inst.options();
  spec.model = mf.params();
  spec.limits.time_limit_s = f.time_limit;
  spec.jobs = f.jobs;
  const auto rows = iab::run_experiment(spec);
  std::filesystem::create_directories(f.out_dir);
  const auto path = (std::filesystem::path(f.out_dir) / "results.csv").string();
  write_output(path, iab::experiment_csv(rows));
  std::cerr << rows.size() << " rows written to " << path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IAB backhaul planner and failure simulator"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "print tool and file-format versions");

  InstanceFlags gen_inst;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "synthetic scenario with demands and candidate edges");
  gen_inst.add(gen, true);
  gen->add_option("--seed", gen_seed, "placement and LoS seed");
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  PlanFlags pf;
  ModelFlags plan_model;
  auto* plan = app.add_subcommand("plan", "minimum-donor plan for a scenario");
  plan->add_option("--input", pf.input, "scenario JSON")->required();
  plan_model.add(plan);
  plan->add_option("--backend", pf.backend, "solver backend")->check(CLI::IsMember({"native", "external"}));
  plan->add_option("--solver-cmd", pf.solver_cmd, "external solver command with {mps}, {sol} and optional {time}");
  plan->add_option("--time-limit", pf.time_limit, "seconds")->check(CLI::PositiveNumber);
  plan->add_option("--seed", pf.seed, "seed of the primal heuristic");
  plan->add_option("--fix-donors", pf.fix, "node ids that must be donors")->delimiter(',');
  plan->add_option("--export-mps", pf.export_mps, "also write the model as free MPS");
  plan->add_option("--out", pf.out, "plan JSON (default: stdout)");

  std::string val_input, val_plan;
  bool val_quiet = false;
  auto* val = app.add_subcommand("validate", "check a plan against its scenario");
  val->add_option("--input", val_input, "scenario JSON")->required();
  val->add_option("--plan", val_plan, "plan JSON")->required();
  val->add_flag("--quiet", val_quiet, "exit code only");

  std::string sim_input, sim_plan, sim_faults, sim_out;
  iab::TraceOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "link failures and recovery, as a per-tick CSV");
  sim->add_option("--input", sim_input, "scenario JSON")->required();
  sim->add_option("--plan", sim_plan, "plan JSON")->required();
  sim->add_option("--faults", sim_faults, "fault schedule JSON: [{\"tick\": 19, \"edge\": [1, 3]}]");
  sim->add_option("--hop-latency", sim_opt.hop_latency_ms, "one-way latency per hop in ms")->check(CLI::NonNegativeNumber);
  sim->add_option("--switch-allowance", sim_opt.switch_allowance_ms, "extra ms per hop")->check(CLI::NonNegativeNumber);
  sim->add_option("--ticks", sim_opt.ticks, "number of ticks (default: last fault + 10, at least 30)");
  sim->add_option("--out", sim_out, "CSV output (default: stdout)");

  ExperimentFlags ef;
  InstanceFlags exp_inst;
  ModelFlags exp_model;
  auto* exp = app.add_subcommand("experiment", "batch of synthetic instances, one CSV row per configuration");
  exp->add_option("--seeds", ef.seeds, "seed list, e.g. 1-30 or 1,4,9");
  exp->add_option("--n", ef.sizes, "node counts, e.g. 15 or 10,15");
  exp->add_option("--R-values", ef.R, "redundancy values");
  exp->add_option("--mimo-layers", ef.layers, "Lambda values");
  exp->add_option("--time-limit", ef.time_limit, "seconds per instance")->check(CLI::PositiveNumber);
  exp->add_option("--jobs", ef.jobs, "worker threads")->check(CLI::PositiveNumber);
  exp->add_option("--out", ef.out_dir, "output directory for results.csv");
  exp_inst.add(exp, false);
  exp_model.add(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (version) {
      std::cout << "iabplan " << kToolVersion << "\n"
                << "scenario " << iab::kScenarioSchemaVersion << "\n"
                << "plan " << iab::kPlanSchemaVersion << "\n"
                << "trace " << iab::kTraceCsvSchema << "\n"
                << "experiment " << iab::kExperimentCsvSchema << "\n";
      return kOk;
    }
    if (*gen) return cmd_generate(gen_inst, gen_seed, gen_out);
    if (*plan) return cmd_plan(pf, plan_model);
    if (*val) return cmd_validate(val_input, val_plan, val_quiet);
    if (*sim) return cmd_simulate(sim_input, sim_plan, sim_faults, sim_opt, sim_out);
    if (*exp) return cmd_experiment(ef, exp_inst, exp_model);
    std::cout << app.help();
    return kUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const iab::ExternalValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const iab::ExternalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExternal;
  } catch (const iab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const iab::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const iab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
