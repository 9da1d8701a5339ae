#pragma once

// Synthetic instance pipeline and batch experiments over (seed, n, R, Lambda).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "iabplan/channel.hpp"
#include "iabplan/errors.hpp"
#include "iabplan/model.hpp"
#include "iabplan/scenario.hpp"
#include "iabplan/solve.hpp"

namespace iab {

inline constexpr const char* kExperimentCsvSchema = "iabplan-experiment/1";
inline constexpr const char* kExperimentCsvHeader =
    "seed,n,density,R,mimo_layers,rho,objective,gap,status,solve_time_s";

struct InstanceOptions {
  int n = 15;
  double density_per_km2 = 45.0;
  std::uint64_t seed = 1;
  int mimo_layers = 1;
  double coverage_radius_m = 100.0;
  double lambda_mbps = 1000.0;
  bool drop_isolated = true;
  McsTable mcs = McsTable::synthetic4();
  RadioParams radio{};
};

/// Placement, demand, channel, pruning and (optionally) isolated-node
/// removal for one synthetic scenario. The LoS draws use the scenario seed,
/// so the same seed at another Lambda sees the same propagation.
inline ScenarioGraph make_instance(const InstanceOptions& o) {
  SyntheticOptions so;
  so.lambda_mbps = o.lambda_mbps;
  auto g = generate_synthetic(o.n, o.density_per_km2, o.seed, so);
  g = apply_demand(std::move(g), estimate_demand(sample_coverage(g, o.coverage_radius_m), o.lambda_mbps));
  RadioParams radio = o.radio;
  radio.mimo_layers = o.mimo_layers;
  g = prune_edges(populate_edges(std::move(g), radio, o.mcs, o.seed));
  if (o.drop_isolated) g = remove_isolated(std::move(g)).graph;
  return g;
}

struct ExperimentSpec {
  std::vector<std::uint64_t> seeds;
  std::vector<int> node_counts;
  double density_per_km2 = 45.0;
  std::vector<int> redundancy{1, 2};
  std::vector<int> mimo_layers{1, 2};
  ModelParams model{};  // redundancy is overridden per row
  SolveLimits limits{};
  InstanceOptions instance{};  // n, seed and mimo_layers are overridden per row
  int jobs = 1;

  void validate() const {
    if (seeds.empty()) throw ParameterError("experiment needs at least one seed");
    if (node_counts.empty()) throw ParameterError("experiment needs at least one node count");
    if (redundancy.empty() || mimo_layers.empty()) throw ParameterError("experiment needs R and Lambda values");
    if (jobs < 1) throw ParameterError("jobs must be >= 1");
    limits.validate();
  }
};

struct ExperimentRow {
  std::uint64_t seed = 0;
  int n = 0;
  double density = 0.0;
  int R = 1;
  int mimo_layers = 1;
  double rho = 0.0;
  double objective = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  double solve_time_s = 0.0;
};

inline ExperimentRow run_one(const ExperimentSpec& spec, std::uint64_t seed, int n, int R, int layers) {
  InstanceOptions io = spec.instance;
  io.n = n;
  io.seed = seed;
  io.mimo_layers = layers;
  io.density_per_km2 = spec.density_per_km2;
  const auto g = make_instance(io);
  ModelParams mp = spec.model;
  mp.redundancy = R;
  SolveLimits lim = spec.limits;
  lim.seed = seed;
  const auto sol = solve_exact(build_model(g, mp), lim);
  ExperimentRow row{seed, n, spec.density_per_km2, R, layers};
  row.objective = sol.objective;
  // rho relative to the planned graph; unsolved rows report rho = 1.
  row.rho = sol.has_plan() && !g.nodes.empty() ? donor_ratio(sol, g.nodes.size()) : 1.0;
  row.gap = sol.gap;
  row.status = sol.status;
  row.solve_time_s = sol.solve_time_s;
  return row;
}

/// One row per (seed, n, R, Lambda) in that nesting order, whatever the
/// number of worker threads.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Job {
    std::uint64_t seed;
    int n, R, layers;
  };
  std::vector<Job> jobs;
  for (auto s : spec.seeds)
    for (int n : spec.node_counts)
      for (int R : spec.redundancy)
        for (int L : spec.mimo_layers) jobs.push_back({s, n, R, L});
  std::vector<ExperimentRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        rows[i] = run_one(spec, jobs[i].seed, jobs[i].n, jobs[i].R, jobs[i].layers);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(spec.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << kExperimentCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << r.n << ',' << r.density << ',' << r.R << ',' << r.mimo_layers << ','
       << std::fixed << std::setprecision(6) << r.rho << ',' << std::setprecision(0) << r.objective << ','
       << std::setprecision(6) << r.gap << ',' << to_string(r.status) << ',' << std::setprecision(3)
       << r.solve_time_s << std::defaultfloat << "\n";
  }
  return os.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ParameterError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace iab
