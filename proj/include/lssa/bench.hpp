#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lssa/driver.hpp"
#include "lssa/parallel.hpp"
#include "lssa/portfolio.hpp"

// Configuration-driven experiment runner: reproducible sweeps over problem
// size, subsystem size, subsystem count, shots and ansatz structure, with
// machine-readable result tables, per-grid-point summaries and row replay.

namespace lssa {

enum class ExperimentKind {
  random_ising_sweep,
  ns_sweep,
  ng_sweep,
  portfolio_sweep,
  ansatz_ablation,
  shots_ablation,
  level2_portfolio,
  single_run,
};

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::random_ising_sweep: return "random-ising-sweep";
    case ExperimentKind::ns_sweep: return "ns-sweep";
    case ExperimentKind::ng_sweep: return "ng-sweep";
    case ExperimentKind::portfolio_sweep: return "portfolio-sweep";
    case ExperimentKind::ansatz_ablation: return "ansatz-ablation";
    case ExperimentKind::shots_ablation: return "shots-ablation";
    case ExperimentKind::level2_portfolio: return "level2-portfolio";
    case ExperimentKind::single_run: return "single-run";
  }
  return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::random_ising_sweep, ExperimentKind::ns_sweep, ExperimentKind::ng_sweep,
        ExperimentKind::portfolio_sweep, ExperimentKind::ansatz_ablation,
        ExperimentKind::shots_ablation, ExperimentKind::level2_portfolio,
        ExperimentKind::single_run})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("config: unknown experiment kind '" + s + "'");
}

enum class ProblemKind { fully_connected, three_regular, portfolio_simulated, portfolio_csv };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::fully_connected: return "fully_connected";
    case ProblemKind::three_regular: return "three_regular";
    case ProblemKind::portfolio_simulated: return "portfolio_simulated";
    case ProblemKind::portfolio_csv: return "portfolio_csv";
  }
  return "?";
}

inline ProblemKind problem_kind_from_string(const std::string& s) {
  for (ProblemKind k : {ProblemKind::fully_connected, ProblemKind::three_regular,
                        ProblemKind::portfolio_simulated, ProblemKind::portfolio_csv})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("config: unknown problem kind '" + s + "'");
}

// How the subsystem size derives from the problem size at each grid point.
struct NgRule {
  enum class Kind { fixed, np_over_2, np_over_4 } kind = Kind::np_over_2;
  std::size_t value = 0;  // for fixed

  std::size_t resolve(std::size_t np) const {
    switch (kind) {
      case Kind::fixed: return value;
      case Kind::np_over_2: return std::max<std::size_t>(1, np / 2);
      case Kind::np_over_4: return std::max<std::size_t>(1, np / 4);
    }
    throw std::invalid_argument("NgRule: unknown kind");
  }

  std::string label() const {
    switch (kind) {
      case Kind::fixed: return std::to_string(value);
      case Kind::np_over_2: return "np/2";
      case Kind::np_over_4: return "np/4";
    }
    return "?";
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::single_run;
  std::uint64_t seed = 0;
  std::size_t instances = 1;
  std::size_t attempts = 1;
  std::size_t workers = 1;
  std::vector<std::size_t> np_list;
  ProblemKind problem = ProblemKind::fully_connected;
  std::size_t n_periods = 30;  // simulated price history length
  std::string csv_path;        // for ProblemKind::portfolio_csv
  NgRule ng;
  NsRule ns_rule = NsRule::twice_np_over_ng;
  std::size_t ns_value = 0;                // for NsRule::explicit_count
  std::vector<std::size_t> ns_values;      // ns-sweep grid
  std::vector<std::size_t> ng_values;      // ng-sweep grid
  std::vector<std::uint64_t> shots_values; // shots-ablation grid; 0 = exact
  std::vector<std::uint32_t> layers_values{0, 1, 2, 3};  // ansatz-ablation grid
  SubsolverConfig subsolver;
  VqeConfig vqe;
  BaselinePolicy baseline = BaselinePolicy::auto_regime;
  TabuParams baseline_tabu;
  int level = 1;
  Level2Config level2;
  std::string out_dir = "results";

  void validate() const {
    if (np_list.empty()) throw std::invalid_argument("config: 'np' must be non-empty");
    if (instances == 0) throw std::invalid_argument("config: 'instances' must be >= 1");
    if (attempts == 0) throw std::invalid_argument("config: 'attempts' must be >= 1");
    if (kind == ExperimentKind::ns_sweep && ns_values.empty())
      throw std::invalid_argument("config: ns-sweep requires 'ns_values'");
    if (kind == ExperimentKind::ng_sweep && ng_values.empty())
      throw std::invalid_argument("config: ng-sweep requires 'ng_values'");
    if (kind == ExperimentKind::shots_ablation && shots_values.empty())
      throw std::invalid_argument("config: shots-ablation requires 'shots_values'");
    if (kind == ExperimentKind::ansatz_ablation && layers_values.empty())
      throw std::invalid_argument("config: ansatz-ablation requires 'layers_values'");
    if (problem == ProblemKind::portfolio_csv && csv_path.empty())
      throw std::invalid_argument("config: portfolio_csv requires 'csv_path'");
    if (problem == ProblemKind::portfolio_csv && instances != 1)
      throw std::invalid_argument("config: portfolio_csv supports a single instance");
    if (kind == ExperimentKind::level2_portfolio && level != 2)
      throw std::invalid_argument("config: level2-portfolio requires level = 2");
  }
};

// One logged run. Every field needed to replay the run is recorded. The
// energies are the full Hamiltonian values; r_ar is the ratio of the
// operator parts (energy minus the problem's constant offset), which is the
// identical quantity for pure Ising ensembles (offset 0) and the convention
// QUBO-derived problems are scored under.
struct ResultRow {
  std::string experiment;
  std::size_t np = 0, ng = 0, ns = 0;
  std::string variant;  // ablation label, empty otherwise
  std::size_t instance = 0, attempt = 0;
  std::uint64_t seed = 0;  // the run seed handed to the driver
  double lssa_energy = 0.0;
  double baseline_energy = 0.0;
  double offset = 0.0;  // constant part of the problem Hamiltonian
  double r_ar = 0.0;    // (lssa_energy - offset) / (baseline_energy - offset)
  double t_sub_s = 0.0, t_vqe_s = 0.0, t_total_s = 0.0;
  std::string subsolver;
  std::string baseline_solver;
  std::uint32_t vqe_layers = 2;
  std::string vqe_entanglement = "full";
  std::uint64_t vqe_shots = 0;  // 0 = exact probabilities
  int level = 1;

  static const char* csv_header() {
    return "experiment,np,ng,ns,variant,instance,attempt,seed,lssa_energy,"
           "baseline_energy,offset,r_ar,t_sub_s,t_vqe_s,t_total_s,subsolver,"
           "baseline_solver,vqe_layers,vqe_entanglement,vqe_shots,level";
  }

  std::string to_csv_line() const {
    char num[640];
    std::snprintf(num, sizeof(num), "%.17g,%.17g,%.17g,%.17g,%.6f,%.6f,%.6f", lssa_energy,
                  baseline_energy, offset, r_ar, t_sub_s, t_vqe_s, t_total_s);
    std::ostringstream os;
    os << experiment << ',' << np << ',' << ng << ',' << ns << ',' << variant << ','
       << instance << ',' << attempt << ',' << seed << ',' << num << ',' << subsolver << ','
       << baseline_solver << ',' << vqe_layers << ',' << vqe_entanglement << ',' << vqe_shots
       << ',' << level;
    return os.str();
  }

  static ResultRow from_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 21)
      throw std::runtime_error("result row: expected 21 columns, got " +
                               std::to_string(cells.size()));
    ResultRow row;
    std::size_t k = 0;
    row.experiment = cells[k++];
    row.np = std::stoull(cells[k++]);
    row.ng = std::stoull(cells[k++]);
    row.ns = std::stoull(cells[k++]);
    row.variant = cells[k++];
    row.instance = std::stoull(cells[k++]);
    row.attempt = std::stoull(cells[k++]);
    row.seed = std::stoull(cells[k++]);
    row.lssa_energy = std::stod(cells[k++]);
    row.baseline_energy = std::stod(cells[k++]);
    row.offset = std::stod(cells[k++]);
    row.r_ar = std::stod(cells[k++]);
    row.t_sub_s = std::stod(cells[k++]);
    row.t_vqe_s = std::stod(cells[k++]);
    row.t_total_s = std::stod(cells[k++]);
    row.subsolver = cells[k++];
    row.baseline_solver = cells[k++];
    row.vqe_layers = static_cast<std::uint32_t>(std::stoul(cells[k++]));
    row.vqe_entanglement = cells[k++];
    row.vqe_shots = std::stoull(cells[k++]);
    row.level = std::stoi(cells[k++]);
    return row;
  }
};

namespace detail {

// Grid point with everything resolved (sizes, variant overrides).
struct GridPoint {
  std::size_t np = 0;
  std::size_t ng = 0;
  NsRule ns_rule = NsRule::explicit_count;
  std::size_t ns = 0;  // resolved count
  std::string variant;
  std::uint32_t vqe_layers = 2;
  Entanglement vqe_entanglement = Entanglement::full;
  bool override_shots = false;             // shots ablation / replay
  std::optional<std::uint64_t> vqe_shots;  // meaningful when override_shots
  int level = 1;
};

inline std::size_t resolve_ns(NsRule rule, std::size_t explicit_value, std::size_t np,
                              std::size_t ng) {
  LssaConfig probe;
  probe.subsystem_size = ng;
  probe.ns_rule = rule;
  probe.n_subsystems = explicit_value;
  return probe.resolve_n_subsystems(np);
}

inline std::vector<GridPoint> build_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> grid;
  const auto base_point = [&](std::size_t np, std::size_t ng) {
    GridPoint g;
    g.np = np;
    g.ng = ng;
    g.ns_rule = config.ns_rule;
    g.ns = resolve_ns(config.ns_rule, config.ns_value, np, ng);
    g.vqe_layers = config.vqe.ansatz.repetitions;
    g.vqe_entanglement = config.vqe.ansatz.entanglement;
    g.level = config.level;
    return g;
  };
  switch (config.kind) {
    case ExperimentKind::random_ising_sweep:
    case ExperimentKind::portfolio_sweep:
    case ExperimentKind::level2_portfolio:
    case ExperimentKind::single_run:
      for (std::size_t np : config.np_list) grid.push_back(base_point(np, config.ng.resolve(np)));
      break;
    case ExperimentKind::ns_sweep:
      for (std::size_t np : config.np_list)
        for (std::size_t ns : config.ns_values) {
          GridPoint g = base_point(np, config.ng.resolve(np));
          g.ns_rule = NsRule::explicit_count;
          g.ns = ns;
          grid.push_back(g);
        }
      break;
    case ExperimentKind::ng_sweep:
      for (std::size_t np : config.np_list)
        for (std::size_t ng : config.ng_values) {
          GridPoint g = base_point(np, ng);
          grid.push_back(g);
        }
      break;
    case ExperimentKind::ansatz_ablation:
      for (std::size_t np : config.np_list)
        for (std::uint32_t layers : config.layers_values)
          for (Entanglement ent : {Entanglement::full, Entanglement::linear}) {
            GridPoint g = base_point(np, config.ng.resolve(np));
            g.vqe_layers = layers;
            g.vqe_entanglement = ent;
            g.variant = "p=" + std::to_string(layers) + "," +
                        (ent == Entanglement::full ? "fe" : "le");
            grid.push_back(g);
          }
      break;
    case ExperimentKind::shots_ablation:
      for (std::size_t np : config.np_list)
        for (std::uint64_t shots : config.shots_values) {
          GridPoint g = base_point(np, config.ng.resolve(np));
          g.override_shots = true;
          g.vqe_shots = shots ? std::optional<std::uint64_t>(shots) : std::nullopt;
          g.variant = shots ? "shots=" + std::to_string(shots) : "exact";
          grid.push_back(g);
        }
      break;
  }
  return grid;
}

inline std::uint64_t instance_seed(const ExperimentConfig& config, std::size_t np,
                                   std::size_t instance) {
  return derive_seed(config.seed, {0x9137a7ceULL, np, instance});
}

inline std::uint64_t run_seed(const ExperimentConfig& config, std::size_t np,
                              std::size_t instance, std::size_t grid_idx,
                              std::size_t attempt) {
  return derive_seed(instance_seed(config, np, instance), {0xa77e39ULL, grid_idx, attempt});
}

}  // namespace detail

// Builds the problem instance for one (np, instance) cell. Portfolio
// problems come from a simulated or CSV price series through the
// mean-variance QUBO with gamma = 1, rho = 10 * np, K = np / 2.
inline IsingProblem make_problem(const ExperimentConfig& config, std::size_t np,
                                 std::size_t instance) {
  const std::uint64_t seed = detail::instance_seed(config, np, instance);
  switch (config.problem) {
    case ProblemKind::fully_connected:
      return generate_fully_connected(np, seed);
    case ProblemKind::three_regular:
      return generate_3regular(np, seed);
    case ProblemKind::portfolio_simulated: {
      const PriceSeries series = simulate_stock_data(np, config.n_periods, seed);
      return qubo_to_ising(build_portfolio_qubo(portfolio_spec_from_series(series)));
    }
    case ProblemKind::portfolio_csv: {
      const PriceSeries full = load_prices_csv(config.csv_path);
      if (full.n_assets < np)
        throw std::invalid_argument("config: CSV has " + std::to_string(full.n_assets) +
                                    " assets, need " + std::to_string(np));
      PriceSeries sliced;
      sliced.n_assets = np;
      sliced.n_periods = full.n_periods;
      sliced.prices = full.prices.topRows(static_cast<Eigen::Index>(np));
      sliced.labels.assign(full.labels.begin(), full.labels.begin() + np);
      return qubo_to_ising(build_portfolio_qubo(portfolio_spec_from_series(sliced)));
    }
  }
  throw std::invalid_argument("make_problem: unknown problem kind");
}

struct ExperimentTable {
  ExperimentConfig config;
  std::vector<ResultRow> rows;       // every attempt
  std::vector<ResultRow> best_rows;  // best-of-attempts per (grid point, instance)
};

namespace detail {

inline LssaConfig lssa_config_for(const ExperimentConfig& config, const GridPoint& g,
                                  std::uint64_t seed) {
  LssaConfig lc;
  lc.subsystem_size = g.ng;
  lc.ns_rule = g.ns_rule;
  lc.n_subsystems = g.ns_rule == NsRule::explicit_count ? g.ns : 0;
  lc.subsolver = config.subsolver;
  lc.vqe = config.vqe;
  lc.vqe.ansatz.repetitions = g.vqe_layers;
  lc.vqe.ansatz.entanglement = g.vqe_entanglement;
  if (g.override_shots) lc.vqe.shots = g.vqe_shots;
  lc.level = g.level;
  if (g.level == 2) lc.level2 = config.level2;
  lc.seed = seed;
  lc.n_workers = 1;  // parallelism lives at the job level
  return lc;
}

inline ResultRow make_row(const ExperimentConfig& config, const GridPoint& g,
                          std::size_t instance, std::size_t attempt, std::uint64_t seed,
                          const LssaResult& result, const SolveOutcome& baseline,
                          double problem_offset) {
  ResultRow row;
  row.experiment = to_string(config.kind);
  row.np = g.np;
  row.ng = g.ng;
  row.ns = result.resolved_n_subsystems;
  row.variant = g.variant;
  row.instance = instance;
  row.attempt = attempt;
  row.seed = seed;
  row.lssa_energy = result.energy;
  row.baseline_energy = baseline.energy;
  row.offset = problem_offset;
  row.r_ar = approximation_ratio(result.energy - problem_offset,
                                 baseline.energy - problem_offset)
                 .value;
  row.t_sub_s = result.timings.t_sub_total_s;
  row.t_vqe_s = result.timings.t_vqe_s;
  row.t_total_s = result.timings.t_total_s;
  row.subsolver = to_string(config.subsolver.kind);
  row.baseline_solver = baseline.solver_name;
  row.vqe_layers = g.vqe_layers;
  row.vqe_entanglement = to_string(g.vqe_entanglement);
  row.vqe_shots = lssa_config_for(config, g, seed).vqe.shots.value_or(0);
  row.level = g.level;
  return row;
}

}  // namespace detail

// Baseline solve for one (np, instance) cell, with a seed derived from the
// instance so it is shared by every grid point and attempt on that instance.
inline SolveOutcome baseline_for(const ExperimentConfig& config, const IsingProblem& problem,
                                 std::size_t np, std::size_t instance) {
  TabuParams tabu = config.baseline_tabu;
  tabu.seed = derive_seed(detail::instance_seed(config, np, instance), 0xba5eULL);
  return run_baseline(problem, config.baseline, tabu, config.subsolver.brute_cap);
}

// Executes the full grid: one LSSA run per (grid point, instance, attempt),
// baselines computed once per instance, best-of-attempts reduction for the
// summary. Jobs are scheduled over `config.workers` threads; rows land in
// deterministic order regardless of scheduling.
inline ExperimentTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<detail::GridPoint> grid = detail::build_grid(config);
  if (grid.empty()) throw std::invalid_argument("config: empty grid");

  ExperimentTable table;
  table.config = config;

  // Unique (np, instance) cells, with baselines solved up front in parallel.
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t np : config.np_list)
    for (std::size_t inst = 0; inst < config.instances; ++inst) cells.push_back({np, inst});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  std::map<std::pair<std::size_t, std::size_t>, SolveOutcome> baselines;
  for (const auto& cell : cells) baselines[cell] = {};
  parallel_for(cells.size(), config.workers, [&](std::size_t k) {
    const auto [np, inst] = cells[k];
    const IsingProblem problem = make_problem(config, np, inst);
    baselines[cells[k]] = baseline_for(config, problem, np, inst);
  });

  // One job per (grid point, instance); attempts run inside the job.
  struct Job {
    std::size_t grid_idx, instance;
  };
  std::vector<Job> jobs;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t inst = 0; inst < config.instances; ++inst) jobs.push_back({g, inst});

  std::vector<std::vector<ResultRow>> job_rows(jobs.size());
  std::vector<ResultRow> job_best(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t j) {
    const auto& [grid_idx, instance] = jobs[j];
    const detail::GridPoint& g = grid[grid_idx];
    const IsingProblem problem = make_problem(config, g.np, instance);
    const SolveOutcome& baseline = baselines.at({g.np, instance});
    std::size_t best_attempt = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::size_t attempt = 0; attempt < config.attempts; ++attempt) {
      const std::uint64_t seed =
          detail::run_seed(config, g.np, instance, grid_idx, attempt);
      const LssaConfig lc = detail::lssa_config_for(config, g, seed);
      const LssaResult result = run_lssa(problem, lc);
      job_rows[j].push_back(detail::make_row(config, g, instance, attempt, seed, result,
                                             baseline, problem.offset()));
      if (result.energy < best_energy) {
        best_energy = result.energy;
        best_attempt = attempt;
      }
    }
    job_best[j] = job_rows[j][best_attempt];
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (auto& row : job_rows[j]) table.rows.push_back(std::move(row));
    table.best_rows.push_back(std::move(job_best[j]));
  }
  return table;
}

// Grid-point aggregate over the best-of-attempts rows.
struct SummaryPoint {
  std::size_t np = 0, ng = 0, ns = 0;
  std::string variant;
  std::size_t n = 0;
  double mean_r_ar = 0.0;
  double stderr_r_ar = 0.0;
  double mean_lssa_energy = 0.0;
  double mean_baseline_energy = 0.0;
};

inline std::vector<SummaryPoint> summarize(const ExperimentTable& table) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::string>,
           std::vector<const ResultRow*>>
      groups;
  for (const auto& row : table.best_rows)
    groups[{row.np, row.ng, row.ns, row.variant}].push_back(&row);
  std::vector<SummaryPoint> points;
  for (const auto& [key, rows] : groups) {
    SummaryPoint p;
    std::tie(p.np, p.ng, p.ns, p.variant) = key;
    p.n = rows.size();
    for (const auto* r : rows) {
      p.mean_r_ar += r->r_ar;
      p.mean_lssa_energy += r->lssa_energy;
      p.mean_baseline_energy += r->baseline_energy;
    }
    const double n = static_cast<double>(p.n);
    p.mean_r_ar /= n;
    p.mean_lssa_energy /= n;
    p.mean_baseline_energy /= n;
    if (p.n > 1) {
      double ss = 0.0;
      for (const auto* r : rows) {
        const double d = r->r_ar - p.mean_r_ar;
        ss += d * d;
      }
      p.stderr_r_ar = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    points.push_back(std::move(p));
  }
  return points;
}

inline void write_results_csv(const ExperimentTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << ResultRow::csv_header() << '\n';
  for (const auto& row : table.rows) out << row.to_csv_line() << '\n';
}

inline nlohmann::json summary_json(const ExperimentTable& table) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : summarize(table)) {
    points.push_back({{"np", p.np},
                      {"ng", p.ng},
                      {"ns", p.ns},
                      {"variant", p.variant},
                      {"n", p.n},
                      {"mean_r_ar", p.mean_r_ar},
                      {"stderr_r_ar", p.stderr_r_ar},
                      {"mean_lssa_energy", p.mean_lssa_energy},
                      {"mean_baseline_energy", p.mean_baseline_energy},
                      {"log2_hilbert_multiple", static_cast<double>(p.np) -
                                                    static_cast<double>(p.ng)}});
  }
  return {{"experiment", to_string(table.config.kind)},
          {"seed", table.config.seed},
          {"instances", table.config.instances},
          {"attempts", table.config.attempts},
          {"rows", table.rows.size()},
          {"grid", std::move(points)}};
}

// Plot-ready table: one line per grid point, stable column order, fixed
// formatting (re-running on the same table is byte-identical).
inline void emit_plot_data(const ExperimentTable& table, const std::string& path) {
  if (table.rows.empty()) throw std::invalid_argument("emit_plot_data: empty table");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "np,ng,ns,variant,mean_r_ar,stderr_r_ar,n\n";
  for (const auto& p : summarize(table)) {
    char line[256];
    std::snprintf(line, sizeof(line), "%zu,%zu,%zu,%s,%.17g,%.17g,%zu", p.np, p.ng, p.ns,
                  p.variant.c_str(), p.mean_r_ar, p.stderr_r_ar, p.n);
    out << line << '\n';
  }
}

// Re-executes one logged row from the recorded config and seed and checks
// the logged energies. Throws on mismatch.
inline LssaResult replay(const ExperimentConfig& config, const ResultRow& row,
                         double tolerance = 1e-9) {
  const IsingProblem problem = make_problem(config, row.np, row.instance);
  detail::GridPoint g;
  g.np = row.np;
  g.ng = row.ng;
  g.ns_rule = NsRule::explicit_count;
  g.ns = row.ns;
  g.variant = row.variant;
  g.vqe_layers = row.vqe_layers;
  g.vqe_entanglement =
      row.vqe_entanglement == "full" ? Entanglement::full : Entanglement::linear;
  g.override_shots = true;  // the row records the resolved shot count (0 = exact)
  g.vqe_shots = row.vqe_shots ? std::optional<std::uint64_t>(row.vqe_shots) : std::nullopt;
  g.level = row.level;
  const LssaConfig lc = detail::lssa_config_for(config, g, row.seed);
  const LssaResult result = run_lssa(problem, lc);
  if (std::abs(result.energy - row.lssa_energy) > tolerance)
    throw std::runtime_error(
        "replay: energy mismatch (logged " + std::to_string(row.lssa_energy) +
        ", recomputed " + std::to_string(result.energy) + ") for seed " +
        std::to_string(row.seed));
  const SolveOutcome baseline = baseline_for(config, problem, row.np, row.instance);
  if (std::abs(baseline.energy - row.baseline_energy) > tolerance)
    throw std::runtime_error("replay: baseline mismatch for seed " + std::to_string(row.seed));
  return result;
}

// Deterministic ~1% spot check (always at least row 0).
inline void spot_check_replay(const ExperimentTable& table) {
  if (table.rows.empty()) return;
  const std::size_t step = std::min<std::size_t>(table.rows.size(), 100);
  for (std::size_t k = 0; k < table.rows.size(); k += step) replay(table.config, table.rows[k]);
}

// Writes results.csv, summary.json and plot.csv; single-run experiments also
// write the full result JSON and the VQE cost trace.
inline void write_outputs(const ExperimentTable& table, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  write_results_csv(table, path("results.csv"));
  {
    std::ofstream out(path("summary.json"));
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << summary_json(table).dump(2) << '\n';
  }
  emit_plot_data(table, path("plot.csv"));
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const T& fallback,
            const char* context) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config: field '") + context + "." + key +
                                "' has the wrong type");
  }
}

}  // namespace detail

// Parses an experiment configuration from JSON. Unknown experiment/problem/
// solver names and malformed fields produce precise errors.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("experiment"))
    throw std::invalid_argument("config: missing required field 'experiment'");
  c.kind = experiment_kind_from_string(j.at("experiment").get<std::string>());
  c.seed = detail::get_field<std::uint64_t>(j, "seed", 0, "");
  c.instances = detail::get_field<std::size_t>(j, "instances", 1, "");
  c.attempts = detail::get_field<std::size_t>(j, "attempts", 1, "");
  c.workers = detail::get_field<std::size_t>(j, "workers", 1, "");
  c.out_dir = detail::get_field<std::string>(j, "out", "results", "");
  if (!j.contains("np"))
    throw std::invalid_argument("config: missing required field 'np' (list of sizes)");
  c.np_list = detail::get_field<std::vector<std::size_t>>(j, "np", {}, "");

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    c.problem = problem_kind_from_string(
        detail::get_field<std::string>(p, "kind", "fully_connected", "problem"));
    c.n_periods = detail::get_field<std::size_t>(p, "n_periods", 30, "problem");
    c.csv_path = detail::get_field<std::string>(p, "csv_path", "", "problem");
  }

  if (j.contains("ng")) {
    const auto& g = j.at("ng");
    if (g.is_number_unsigned() || g.is_number_integer()) {
      c.ng.kind = NgRule::Kind::fixed;
      c.ng.value = g.get<std::size_t>();
    } else if (g.is_object()) {
      const std::string rule = detail::get_field<std::string>(g, "rule", "np_over_2", "ng");
      if (rule == "fixed") {
        c.ng.kind = NgRule::Kind::fixed;
        if (!g.contains("value"))
          throw std::invalid_argument("config: ng.rule 'fixed' requires ng.value");
        c.ng.value = g.at("value").get<std::size_t>();
      } else if (rule == "np_over_2") {
        c.ng.kind = NgRule::Kind::np_over_2;
      } else if (rule == "np_over_4") {
        c.ng.kind = NgRule::Kind::np_over_4;
      } else {
        throw std::invalid_argument("config: unknown ng.rule '" + rule + "'");
      }
    } else {
      throw std::invalid_argument("config: 'ng' must be an integer or an object");
    }
  }

  if (j.contains("ns")) {
    const auto& s = j.at("ns");
    if (s.is_number_unsigned() || s.is_number_integer()) {
      c.ns_rule = NsRule::explicit_count;
      c.ns_value = s.get<std::size_t>();
    } else if (s.is_object()) {
      c.ns_rule = ns_rule_from_string(
          detail::get_field<std::string>(s, "rule", "twice_np_over_ng", "ns"));
      c.ns_value = detail::get_field<std::size_t>(s, "value", 0, "ns");
    } else if (s.is_string()) {
      c.ns_rule = ns_rule_from_string(s.get<std::string>());
    } else {
      throw std::invalid_argument("config: 'ns' must be an integer, string rule, or object");
    }
  }

  c.ns_values = detail::get_field<std::vector<std::size_t>>(j, "ns_values", {}, "");
  c.ng_values = detail::get_field<std::vector<std::size_t>>(j, "ng_values", {}, "");
  c.shots_values = detail::get_field<std::vector<std::uint64_t>>(j, "shots_values", {}, "");
  if (j.contains("layers_values"))
    c.layers_values = j.at("layers_values").get<std::vector<std::uint32_t>>();

  if (j.contains("subsolver")) {
    const auto& s = j.at("subsolver");
    c.subsolver.kind = solver_kind_from_string(
        detail::get_field<std::string>(s, "kind", "brute", "subsolver"));
    c.subsolver.brute_cap =
        detail::get_field<std::size_t>(s, "brute_cap", kBruteForceCap, "subsolver");
    if (s.contains("tabu")) {
      const auto& t = s.at("tabu");
      c.subsolver.tabu.n_restarts =
          detail::get_field<std::size_t>(t, "n_restarts", 8, "subsolver.tabu");
      c.subsolver.tabu.max_moves_per_restart =
          detail::get_field<std::size_t>(t, "max_moves", 0, "subsolver.tabu");
      c.subsolver.tabu.tenure = detail::get_field<std::size_t>(t, "tenure", 0, "subsolver.tabu");
    }
    if (s.contains("qaoa")) {
      const auto& q = s.at("qaoa");
      c.subsolver.qaoa.layers = detail::get_field<std::size_t>(q, "layers", 1, "subsolver.qaoa");
      c.subsolver.qaoa.optimizer_iterations =
          detail::get_field<std::size_t>(q, "optimizer_iterations", 5, "subsolver.qaoa");
      c.subsolver.qaoa.shots =
          detail::get_field<std::uint64_t>(q, "shots", 8192, "subsolver.qaoa");
    }
  }

  if (j.contains("vqe")) {
    const auto& v = j.at("vqe");
    c.vqe.optimizer =
        optimizer_from_string(detail::get_field<std::string>(v, "optimizer", "cobyla", "vqe"));
    c.vqe.max_iterations = detail::get_field<std::size_t>(v, "max_iterations", 200, "vqe");
    const auto shots = detail::get_field<std::uint64_t>(v, "shots", 0, "vqe");
    c.vqe.shots = shots ? std::optional<std::uint64_t>(shots) : std::nullopt;
    c.vqe.ansatz.repetitions = detail::get_field<std::uint32_t>(v, "repetitions", 2, "vqe");
    const std::string ent =
        detail::get_field<std::string>(v, "entanglement", "full", "vqe");
    if (ent == "full") c.vqe.ansatz.entanglement = Entanglement::full;
    else if (ent == "linear") c.vqe.ansatz.entanglement = Entanglement::linear;
    else throw std::invalid_argument("config: unknown vqe.entanglement '" + ent + "'");
    const std::string init =
        detail::get_field<std::string>(v, "theta_init", "random", "vqe");
    if (init == "random") c.vqe.theta_init = ThetaInit::random_uniform;
    else if (init == "zeros") c.vqe.theta_init = ThetaInit::zeros;
    else throw std::invalid_argument("config: unknown vqe.theta_init '" + init + "'");
  }

  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    c.baseline = baseline_policy_from_string(
        detail::get_field<std::string>(b, "policy", "auto", "baseline"));
    if (b.contains("tabu")) {
      const auto& t = b.at("tabu");
      c.baseline_tabu.n_restarts =
          detail::get_field<std::size_t>(t, "n_restarts", 8, "baseline.tabu");
      c.baseline_tabu.max_moves_per_restart =
          detail::get_field<std::size_t>(t, "max_moves", 0, "baseline.tabu");
      c.baseline_tabu.tenure = detail::get_field<std::size_t>(t, "tenure", 0, "baseline.tabu");
    }
  }

  c.level = detail::get_field<int>(j, "level", 1, "");
  if (j.contains("level2")) {
    const auto& l = j.at("level2");
    c.level2.inner_subsystem_size =
        detail::get_field<std::size_t>(l, "inner_ng", 5, "level2");
    c.level2.inner_n_subsystems =
        detail::get_field<std::size_t>(l, "inner_ns", 32, "level2");
  }

  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
  return parse_experiment_config(j);
}

}  // namespace lssa
