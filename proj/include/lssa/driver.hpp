#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lssa/ising.hpp"
#include "lssa/parallel.hpp"
#include "lssa/sampler.hpp"
#include "lssa/solvers.hpp"
#include "lssa/vqe.hpp"

// Orchestration of full runs: sample subsystems, solve them (concurrently),
// optimize the amplitude contributions against the full Hamiltonian, and
// reconstruct an approximate ground-state configuration. Supports one level
// of recursion (each subsystem itself solved by a nested level-1 run).

namespace lssa {

// How the number of subsystems is chosen. Both auto rules appear in the
// experiment protocols, so the rule in force is always named explicitly and
// echoed into the result.
enum class NsRule { explicit_count, twice_np_over_ng, np_over_ng };

inline const char* to_string(NsRule r) {
  switch (r) {
    case NsRule::explicit_count: return "explicit";
    case NsRule::twice_np_over_ng: return "ceil(2*Np/Ng)";
    case NsRule::np_over_ng: return "ceil(Np/Ng)";
  }
  return "?";
}

inline NsRule ns_rule_from_string(const std::string& s) {
  if (s == "explicit") return NsRule::explicit_count;
  if (s == "twice_np_over_ng" || s == "2np/ng") return NsRule::twice_np_over_ng;
  if (s == "np_over_ng" || s == "np/ng") return NsRule::np_over_ng;
  throw std::invalid_argument("unknown ns rule '" + s + "'");
}

struct Level2Config {
  std::size_t inner_subsystem_size = 5;  // N_g at the inner level
  std::size_t inner_n_subsystems = 32;   // N_s at the inner level
};

struct LssaConfig {
  std::size_t subsystem_size = 0;  // N_g (outer level)
  NsRule ns_rule = NsRule::explicit_count;
  std::size_t n_subsystems = 0;  // used when ns_rule == explicit_count
  SubsolverConfig subsolver;
  VqeConfig vqe;  // ansatz width is derived from the resolved N_s
  int level = 1;
  std::optional<Level2Config> level2;
  std::uint64_t seed = 0;
  std::size_t n_workers = 1;

  std::size_t resolve_n_subsystems(std::size_t n_vars) const {
    switch (ns_rule) {
      case NsRule::explicit_count:
        if (n_subsystems == 0)
          throw std::invalid_argument("LssaConfig: explicit N_s must be positive");
        return n_subsystems;
      case NsRule::twice_np_over_ng:
        return (2 * n_vars + subsystem_size - 1) / subsystem_size;
      case NsRule::np_over_ng:
        return (n_vars + subsystem_size - 1) / subsystem_size;
    }
    throw std::invalid_argument("LssaConfig: unknown ns rule");
  }
};

// Qubit count needed to index n_subsystems amplitudes.
inline std::uint32_t vqe_width_for(std::size_t n_subsystems) {
  std::uint32_t q = 0;
  while ((std::size_t{1} << q) < n_subsystems) ++q;
  return std::max<std::uint32_t>(1, q);
}

struct StageTimings {
  double t_sub_total_s = 0.0;  // summed over subsystem solves
  double t_sub_wall_s = 0.0;   // wall clock of the (possibly parallel) stage
  double t_vqe_s = 0.0;
  double t_total_s = 0.0;
};

struct LssaResult {
  SpinConfiguration config;
  double energy = 0.0;
  std::optional<double> baseline_energy;
  std::optional<double> approximation_ratio;
  std::vector<SolveOutcome> subsystem_outcomes;
  SamplingPlan plan;
  VqeResult vqe;
  StageTimings timings;
  std::uint64_t seed = 0;
  std::size_t resolved_n_subsystems = 0;
  NsRule ns_rule_applied = NsRule::explicit_count;
  int level = 1;

  nlohmann::json to_json() const {
    nlohmann::json sub = nlohmann::json::array();
    for (const auto& o : subsystem_outcomes)
      sub.push_back({{"energy", o.energy}, {"solver", o.solver_name}});
    std::vector<int> spins(config.spins.begin(), config.spins.end());
    return {{"energy", energy},
            {"config", spins},
            {"baseline_energy", baseline_energy ? nlohmann::json(*baseline_energy)
                                                : nlohmann::json()},
            {"approximation_ratio", approximation_ratio
                                        ? nlohmann::json(*approximation_ratio)
                                        : nlohmann::json()},
            {"level", level},
            {"seed", seed},
            {"n_subsystems", resolved_n_subsystems},
            {"ns_rule", to_string(ns_rule_applied)},
            {"subsystem_size", plan.subsystem_size},
            {"plan", plan.to_json()},
            {"subsystems", std::move(sub)},
            {"vqe", {{"evaluations", vqe.evaluations},
                     {"best_energy", vqe.best_energy},
                     {"cost_trace", vqe.cost_trace}}},
            {"timings", {{"t_sub_total_s", timings.t_sub_total_s},
                         {"t_sub_wall_s", timings.t_sub_wall_s},
                         {"t_vqe_s", timings.t_vqe_s},
                         {"t_total_s", timings.t_total_s}}}};
  }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Level-1 pipeline: sample -> solve each subsystem -> lift -> optimize
// amplitudes against the full Hamiltonian. Subsystem solves run over a
// bounded worker pool with per-subsystem seeds derived from (run seed,
// subsystem index), so results do not depend on scheduling order.
inline LssaResult run_level1(const IsingProblem& problem, const LssaConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = problem.n_vars();
  const std::size_t n_subsystems = config.resolve_n_subsystems(n);

  LssaResult result;
  result.seed = config.seed;
  result.level = 1;
  result.ns_rule_applied = config.ns_rule;
  result.resolved_n_subsystems = n_subsystems;
  result.plan = sample_subsystems(n, config.subsystem_size, n_subsystems,
                                  derive_seed(config.seed, 0x9aULL));

  const auto t_sub_start = std::chrono::steady_clock::now();
  result.subsystem_outcomes.resize(n_subsystems);
  std::vector<double> solve_seconds(n_subsystems, 0.0);
  parallel_for(n_subsystems, config.n_workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const IsingProblem sub = extract_subproblem(problem, result.plan.selections[i].indices);
    const SubsolverConfig sub_config =
        config.subsolver.with_seed(derive_seed(config.seed, {0x50bULL, i}));
    result.subsystem_outcomes[i] = solve(sub, sub_config);
    solve_seconds[i] = detail::seconds_since(t0);
  });
  for (double s : solve_seconds) result.timings.t_sub_total_s += s;
  result.timings.t_sub_wall_s = detail::seconds_since(t_sub_start);

  std::vector<SpinConfiguration> sub_configs;
  sub_configs.reserve(n_subsystems);
  for (const auto& o : result.subsystem_outcomes) sub_configs.push_back(o.config);

  VqeConfig vqe_config = config.vqe;
  vqe_config.ansatz.n_qubits = vqe_width_for(n_subsystems);
  vqe_config.seed = derive_seed(config.seed, 0xc0e0ULL);
  const auto t_vqe_start = std::chrono::steady_clock::now();
  result.vqe = optimize_amplitudes(problem, result.plan, sub_configs, vqe_config);
  result.timings.t_vqe_s = detail::seconds_since(t_vqe_start);

  result.config = result.vqe.best_config;
  result.energy = result.vqe.best_energy;
  result.timings.t_total_s = detail::seconds_since(t_start);
  return result;
}

// Level-2 pipeline: level-1 subsystems of size N_g^(1) are each solved by a
// nested level-1 run with the inner sizes, then the outer amplitude
// optimization runs against the full Hamiltonian.
inline LssaResult run_level2(const IsingProblem& problem, const LssaConfig& config) {
  if (!config.level2)
    throw std::invalid_argument("run_level2: missing level-2 inner configuration");
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = problem.n_vars();
  const std::size_t n_subsystems = config.resolve_n_subsystems(n);

  LssaResult result;
  result.seed = config.seed;
  result.level = 2;
  result.ns_rule_applied = config.ns_rule;
  result.resolved_n_subsystems = n_subsystems;
  result.plan = sample_subsystems(n, config.subsystem_size, n_subsystems,
                                  derive_seed(config.seed, 0x9aULL));

  const auto t_sub_start = std::chrono::steady_clock::now();
  result.subsystem_outcomes.resize(n_subsystems);
  std::vector<double> solve_seconds(n_subsystems, 0.0);
  parallel_for(n_subsystems, config.n_workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const IsingProblem sub = extract_subproblem(problem, result.plan.selections[i].indices);
    LssaConfig inner;
    inner.subsystem_size = config.level2->inner_subsystem_size;
    inner.ns_rule = NsRule::explicit_count;
    inner.n_subsystems = config.level2->inner_n_subsystems;
    inner.subsolver = config.subsolver;
    inner.vqe = config.vqe;
    inner.seed = derive_seed(config.seed, {0x1e2ULL, i});
    inner.n_workers = 1;  // the outer pool already owns the parallelism
    const LssaResult inner_result = run_level1(sub, inner);
    SolveOutcome outcome;
    outcome.config = inner_result.config;
    outcome.energy = inner_result.energy;
    outcome.solver_name = "level1";
    outcome.diagnostics["inner_n_subsystems"] =
        static_cast<double>(inner_result.resolved_n_subsystems);
    outcome.diagnostics["inner_vqe_evaluations"] =
        static_cast<double>(inner_result.vqe.evaluations);
    result.subsystem_outcomes[i] = std::move(outcome);
    solve_seconds[i] = detail::seconds_since(t0);
  });
  for (double s : solve_seconds) result.timings.t_sub_total_s += s;
  result.timings.t_sub_wall_s = detail::seconds_since(t_sub_start);

  std::vector<SpinConfiguration> sub_configs;
  sub_configs.reserve(n_subsystems);
  for (const auto& o : result.subsystem_outcomes) sub_configs.push_back(o.config);

  VqeConfig vqe_config = config.vqe;
  vqe_config.ansatz.n_qubits = vqe_width_for(n_subsystems);
  vqe_config.seed = derive_seed(config.seed, 0xc0e0ULL);
  const auto t_vqe_start = std::chrono::steady_clock::now();
  result.vqe = optimize_amplitudes(problem, result.plan, sub_configs, vqe_config);
  result.timings.t_vqe_s = detail::seconds_since(t_vqe_start);

  result.config = result.vqe.best_config;
  result.energy = result.vqe.best_energy;
  result.timings.t_total_s = detail::seconds_since(t_start);
  return result;
}

inline LssaResult run_lssa(const IsingProblem& problem, const LssaConfig& config) {
  if (config.level == 1) return run_level1(problem, config);
  if (config.level == 2) return run_level2(problem, config);
  throw std::invalid_argument("run_lssa: level must be 1 or 2");
}

enum class RatioFlag { ok, superior_to_baseline, non_comparable };

struct RatioResult {
  double value = 0.0;
  RatioFlag flag = RatioFlag::ok;
};

// R_ar: candidate energy divided by baseline energy. Both are expected to be
// negative; a candidate below the baseline (ratio > 1 against a heuristic
// baseline) is flagged, not rejected. Sign-mismatched energies are flagged
// non-comparable; a zero baseline has no defined ratio.
inline RatioResult approximation_ratio(double lssa_energy, double baseline_energy) {
  if (baseline_energy == 0.0)
    throw std::domain_error("approximation_ratio: zero baseline energy");
  RatioResult r;
  r.value = lssa_energy / baseline_energy;
  if ((lssa_energy < 0.0) != (baseline_energy < 0.0) || lssa_energy == 0.0)
    r.flag = RatioFlag::non_comparable;
  else if (r.value > 1.0)
    r.flag = RatioFlag::superior_to_baseline;
  return r;
}

enum class BaselinePolicy { auto_regime, brute_force, tabu };

inline BaselinePolicy baseline_policy_from_string(const std::string& s) {
  if (s == "auto") return BaselinePolicy::auto_regime;
  if (s == "brute" || s == "brute_force") return BaselinePolicy::brute_force;
  if (s == "tabu") return BaselinePolicy::tabu;
  throw std::invalid_argument("unknown baseline policy '" + s + "'");
}

inline const char* to_string(BaselinePolicy p) {
  switch (p) {
    case BaselinePolicy::auto_regime: return "auto";
    case BaselinePolicy::brute_force: return "brute";
    case BaselinePolicy::tabu: return "tabu";
  }
  return "?";
}

// Produces the denominator for R_ar: exhaustive enumeration while the
// problem is small enough, tabu search beyond that.
inline SolveOutcome run_baseline(const IsingProblem& problem,
                                 BaselinePolicy policy = BaselinePolicy::auto_regime,
                                 TabuParams tabu_params = {},
                                 std::size_t brute_cap = kBruteForceCap) {
  switch (policy) {
    case BaselinePolicy::brute_force:
      return brute_force_ground_state(problem, brute_cap);
    case BaselinePolicy::tabu:
      return tabu_search(problem, tabu_params);
    case BaselinePolicy::auto_regime:
      return problem.n_vars() <= brute_cap ? brute_force_ground_state(problem, brute_cap)
                                           : tabu_search(problem, tabu_params);
  }
  throw std::invalid_argument("run_baseline: unknown policy");
}

}  // namespace lssa
