#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/ising.hpp"
#include "lssa/optimize.hpp"
#include "lssa/qsim.hpp"
#include "lssa/rng.hpp"
#include "lssa/sampler.hpp"

// Amplitude-optimization stage: circuit probabilities become subsystem
// weights, the weighted combination of lifted subsystem solutions is
// collapsed to a sign configuration, and a derivative-free optimizer tunes
// the circuit parameters against the full-problem Hamiltonian.

namespace lssa {

struct WeightedCombination {
  std::vector<double> values;
};

// Weight of subsystem i is the measurement probability of basis index i:
// exact |a_i|^2, or the shot-frequency estimate when shots is set. Mass at
// indices >= n_subsystems is discarded without renormalizing (scaling C by a
// positive factor cannot change any sign).
inline std::vector<double> coefficients_from_state(const Statevector& state,
                                                   std::size_t n_subsystems,
                                                   std::optional<std::uint64_t> shots,
                                                   std::uint64_t seed) {
  const std::size_t dim = std::size_t{1} << state.n_qubits();
  if (dim < n_subsystems)
    throw std::invalid_argument("coefficients_from_state: " +
                                std::to_string(state.n_qubits()) +
                                " qubits cannot index " + std::to_string(n_subsystems) +
                                " subsystems");
  std::vector<double> c(n_subsystems);
  if (shots) {
    const auto counts = state.sample_shots(*shots, seed);
    for (std::size_t i = 0; i < n_subsystems; ++i)
      c[i] = static_cast<double>(counts[i]) / static_cast<double>(*shots);
  } else {
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < n_subsystems; ++i) c[i] = std::norm(amps[i]);
  }
  return c;
}

inline WeightedCombination weighted_combination(
    const std::vector<std::vector<std::int8_t>>& lifted_solutions,
    std::span<const double> coefficients) {
  if (lifted_solutions.size() != coefficients.size())
    throw std::invalid_argument("weighted_combination: " +
                                std::to_string(coefficients.size()) + " coefficients for " +
                                std::to_string(lifted_solutions.size()) + " solutions");
  if (lifted_solutions.empty())
    throw std::invalid_argument("weighted_combination: no solutions");
  const std::size_t n = lifted_solutions.front().size();
  WeightedCombination wc;
  wc.values.assign(n, 0.0);
  for (std::size_t i = 0; i < lifted_solutions.size(); ++i) {
    if (lifted_solutions[i].size() != n)
      throw std::invalid_argument("weighted_combination: lifted vector length mismatch");
    const double ci = coefficients[i];
    for (std::size_t k = 0; k < n; ++k)
      wc.values[k] += ci * static_cast<double>(lifted_solutions[i][k]);
  }
  return wc;
}

// Entrywise sign with the >= 0 -> +1 rule.
inline SpinConfiguration sign_reconstruct(const WeightedCombination& wc) {
  SpinConfiguration config;
  config.spins.resize(wc.values.size());
  for (std::size_t k = 0; k < wc.values.size(); ++k)
    config.spins[k] = wc.values[k] >= 0.0 ? std::int8_t{1} : std::int8_t{-1};
  return config;
}

enum class Optimizer { cobyla, nelder_mead };

inline Optimizer optimizer_from_string(const std::string& name) {
  if (name == "cobyla") return Optimizer::cobyla;
  if (name == "nelder_mead" || name == "nelder-mead") return Optimizer::nelder_mead;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

inline const char* to_string(Optimizer o) {
  return o == Optimizer::cobyla ? "cobyla" : "nelder_mead";
}

enum class ThetaInit { random_uniform, zeros };

struct VqeConfig {
  AnsatzSpec ansatz;  // n_qubits is derived from N_s by the caller
  Optimizer optimizer = Optimizer::cobyla;
  std::size_t max_iterations = 200;        // cost-evaluation budget
  std::optional<std::uint64_t> shots;      // nullopt = exact probabilities
  std::uint64_t seed = 0;
  ThetaInit theta_init = ThetaInit::random_uniform;
};

struct VqeResult {
  std::vector<double> best_theta;
  SpinConfiguration best_config;
  double best_energy = 0.0;
  std::vector<double> cost_trace;  // one entry per cost evaluation
  std::size_t evaluations = 0;
};

// Everything a single cost evaluation needs. Subsystem solutions are kept in
// sparse (index, spin) form so one evaluation costs O(N_s * N_g) for the
// combination plus one full-problem energy sum.
struct AmplitudeCostContext {
  const IsingProblem* problem = nullptr;
  const SamplingPlan* plan = nullptr;
  const std::vector<SpinConfiguration>* sub_configs = nullptr;
  VqeConfig config;

  void validate() const {
    if (!problem || !plan || !sub_configs)
      throw std::invalid_argument("amplitude cost: missing problem/plan/solutions");
    if (plan->n_vars != problem->n_vars())
      throw std::invalid_argument("amplitude cost: plan and problem sizes differ");
    if (sub_configs->size() != plan->n_subsystems())
      throw std::invalid_argument("amplitude cost: " + std::to_string(sub_configs->size()) +
                                  " solutions for " + std::to_string(plan->n_subsystems()) +
                                  " subsystems");
    for (std::size_t i = 0; i < sub_configs->size(); ++i)
      if ((*sub_configs)[i].size() != plan->subsystem_size)
        throw std::invalid_argument("amplitude cost: solution " + std::to_string(i) +
                                    " length mismatch");
    if ((std::size_t{1} << config.ansatz.n_qubits) < plan->n_subsystems())
      throw std::invalid_argument("amplitude cost: ansatz too narrow for N_s");
  }

  SpinConfiguration reconstruct(std::span<const double> coefficients) const {
    WeightedCombination wc;
    wc.values.assign(problem->n_vars(), 0.0);
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      const auto& sel = plan->selections[i].indices;
      const auto& spins = (*sub_configs)[i].spins;
      const double ci = coefficients[i];
      for (std::size_t k = 0; k < sel.size(); ++k)
        wc.values[sel[k]] += ci * static_cast<double>(spins[k]);
    }
    return sign_reconstruct(wc);
  }

  // Ansatz -> coefficients -> combination -> sign -> full-problem energy.
  std::pair<double, SpinConfiguration> evaluate(std::span<const double> theta,
                                                std::uint64_t shot_seed) const {
    const Statevector sv = ansatz_state(config.ansatz, theta);
    const auto c =
        coefficients_from_state(sv, plan->n_subsystems(), config.shots, shot_seed);
    SpinConfiguration reconstructed = reconstruct(c);
    const double e = problem->energy(reconstructed);
    return {e, std::move(reconstructed)};
  }
};

// The VQE cost for one parameter vector, with the shot seed for this
// evaluation drawn from the run seed and the evaluation index.
inline double amplitude_cost(std::span<const double> theta, const AmplitudeCostContext& ctx,
                             std::size_t evaluation_index = 0) {
  ctx.validate();
  return ctx.evaluate(theta, derive_seed(ctx.config.seed, {0x5407ULL, evaluation_index}))
      .first;
}

// Runs the configured optimizer for at most config.max_iterations cost
// evaluations and returns the best (theta, configuration, energy) seen over
// the whole trace. With one subsystem the reconstruction is independent of
// theta, so the single lifted solution's sign configuration is returned
// directly.
inline VqeResult optimize_amplitudes(const IsingProblem& problem, const SamplingPlan& plan,
                                     const std::vector<SpinConfiguration>& sub_configs,
                                     const VqeConfig& config) {
  AmplitudeCostContext ctx{&problem, &plan, &sub_configs, config};
  ctx.validate();
  if (config.max_iterations == 0)
    throw std::invalid_argument("optimize_amplitudes: zero iteration budget");

  VqeResult result;
  if (plan.n_subsystems() == 1) {
    const std::vector<double> c{1.0};
    result.best_config = ctx.reconstruct(c);
    result.best_energy = problem.energy(result.best_config);
    result.best_theta.assign(config.ansatz.parameter_count(), 0.0);
    result.cost_trace = {result.best_energy};
    result.evaluations = 1;
    return result;
  }

  std::vector<double> theta0(config.ansatz.parameter_count(), 0.0);
  if (config.theta_init == ThetaInit::random_uniform) {
    Rng rng(derive_seed(config.seed, 0x1417ULL));
    for (auto& t : theta0) t = rng.uniform(-3.14159265358979323846, 3.14159265358979323846);
  }

  result.best_energy = std::numeric_limits<double>::infinity();
  std::size_t eval_index = 0;
  const auto objective = [&](std::span<const double> theta) {
    auto [e, cfg] =
        ctx.evaluate(theta, derive_seed(config.seed, {0x5407ULL, eval_index}));
    ++eval_index;
    result.cost_trace.push_back(e);
    if (e < result.best_energy) {
      result.best_energy = e;
      result.best_config = std::move(cfg);
      result.best_theta.assign(theta.begin(), theta.end());
    }
    return e;
  };

  if (config.optimizer == Optimizer::cobyla) {
    cobyla(objective, theta0, config.max_iterations);
  } else {
    nelder_mead(objective, theta0, config.max_iterations);
  }
  result.evaluations = result.cost_trace.size();
  return result;
}

// Cost-trace export: iteration, raw cost, best-so-far, and the cost divided
// by |min cost| (the normalized cost).
inline void export_cost_trace_csv(const VqeResult& result, std::ostream& os) {
  double min_cost = std::numeric_limits<double>::infinity();
  for (double c : result.cost_trace) min_cost = std::min(min_cost, c);
  const double denom = result.cost_trace.empty() ? 0.0 : std::abs(min_cost);
  os << "iteration,cost,best_so_far,normalized_cost\n";
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < result.cost_trace.size(); ++k) {
    const double c = result.cost_trace[k];
    best = std::min(best, c);
    os << k << ',' << c << ',' << best << ',' << (denom > 0.0 ? c / denom : c) << '\n';
  }
}

}  // namespace lssa
