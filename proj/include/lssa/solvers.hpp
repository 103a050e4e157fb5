#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/ising.hpp"
#include "lssa/optimize.hpp"
#include "lssa/qsim.hpp"
#include "lssa/rng.hpp"

// Pluggable ground-state solvers: exhaustive enumeration, multi-start tabu
// search, and a simulated shot-based QAOA. All are pure functions of
// (problem, params, seed) and safe to run concurrently.

namespace lssa {

struct SolveOutcome {
  SpinConfiguration config;
  double energy = 0.0;
  std::string solver_name;
  std::map<std::string, double> diagnostics;
};

inline constexpr std::size_t kBruteForceCap = 26;

// Exact minimizer by Gray-code enumeration of all 2^n configurations.
// Ties break to the lexicographically smallest configuration (-1 before +1).
inline SolveOutcome brute_force_ground_state(const IsingProblem& problem,
                                             std::size_t cap = kBruteForceCap) {
  const std::size_t n = problem.n_vars();
  if (n > cap)
    throw std::invalid_argument("brute_force_ground_state: " + std::to_string(n) +
                                " variables exceeds cap " + std::to_string(cap));
  const Adjacency adj = Adjacency::build(problem);
  double best_e = std::numeric_limits<double>::infinity();
  std::uint64_t best_basis = 0;
  bool have = false;
  gray_code_energy_scan(problem, adj, [&](std::uint64_t basis, double e) {
    if (!have || e < best_e) {
      best_e = e;
      best_basis = basis;
      have = true;
    } else if (e == best_e) {
      const auto cand = SpinConfiguration::from_basis_index(basis, n);
      const auto cur = SpinConfiguration::from_basis_index(best_basis, n);
      if (lex_less(cand, cur)) best_basis = basis;
    }
  });
  SolveOutcome out;
  out.config = SpinConfiguration::from_basis_index(best_basis, n);
  out.energy = problem.energy(out.config);
  out.solver_name = "brute";
  out.diagnostics["configurations"] = static_cast<double>(std::uint64_t{1} << n);
  return out;
}

struct TabuParams {
  std::size_t n_restarts = 8;
  // 0 means the default of 200 * n_vars single-flip moves per restart.
  std::size_t max_moves_per_restart = 0;
  // 0 means the default of max(7, n_vars / 4).
  std::size_t tenure = 0;
  std::uint64_t seed = 0;

  std::size_t moves_for(std::size_t n_vars) const {
    return max_moves_per_restart ? max_moves_per_restart : 200 * n_vars;
  }
  std::size_t tenure_for(std::size_t n_vars) const {
    return tenure ? tenure : std::max<std::size_t>(7, n_vars / 4);
  }
};

// Single-flip tabu search: best-improvement move selection over all
// variables, recency tenure on flipped variables, aspiration (a tabu move is
// allowed when it beats the incumbent), random restarts. Local fields are
// cached so one move costs O(n + degree).
inline SolveOutcome tabu_search(const IsingProblem& problem, const TabuParams& params) {
  const std::size_t n = problem.n_vars();
  if (n == 0) throw std::invalid_argument("tabu_search: empty problem");
  const Adjacency adj = Adjacency::build(problem);
  const std::size_t max_moves = params.moves_for(n);
  const std::size_t tenure = params.tenure_for(n);

  SpinConfiguration best;
  double best_e = std::numeric_limits<double>::infinity();
  std::size_t total_moves = 0;

  std::vector<double> field(n);
  std::vector<std::size_t> tabu_until(n);
  SpinConfiguration current;
  current.spins.resize(n);

  for (std::size_t restart = 0; restart < params.n_restarts; ++restart) {
    Rng rng(derive_seed(params.seed, {0x7ab0ULL, restart}));
    for (auto& s : current.spins) s = rng.uniform01() < 0.5 ? std::int8_t{-1} : std::int8_t{1};
    double e = problem.energy(current);
    for (std::size_t k = 0; k < n; ++k) {
      double f = problem.biases()[k];
      for (const auto& [nb, w] : adj.row(k)) f += w * static_cast<double>(current[nb]);
      field[k] = f;
    }
    std::fill(tabu_until.begin(), tabu_until.end(), std::size_t{0});

    SpinConfiguration restart_best = current;
    double restart_best_e = e;

    for (std::size_t move = 1; move <= max_moves; ++move) {
      // Delta for flipping k is -2 z_k field_k; pick the best admissible flip.
      std::size_t pick = n;
      double pick_delta = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double delta = -2.0 * static_cast<double>(current[k]) * field[k];
        if (tabu_until[k] >= move && e + delta >= restart_best_e) continue;
        if (delta < pick_delta) {
          pick_delta = delta;
          pick = k;
        }
      }
      if (pick == n) continue;  // every move tabu and none aspirates
      current.spins[pick] = static_cast<std::int8_t>(-current[pick]);
      e += pick_delta;
      tabu_until[pick] = move + tenure;
      const double zk = static_cast<double>(current[pick]);
      for (const auto& [nb, w] : adj.row(pick)) field[nb] += 2.0 * w * zk;
      ++total_moves;
      if (e < restart_best_e) {
        restart_best_e = e;
        restart_best = current;
      }
    }
    // Re-evaluate from scratch so incremental drift never leaks out.
    restart_best_e = problem.energy(restart_best);
    if (restart_best_e < best_e) {
      best_e = restart_best_e;
      best = restart_best;
    }
  }

  SolveOutcome out;
  out.config = std::move(best);
  out.energy = best_e;
  out.solver_name = "tabu";
  out.diagnostics["restarts"] = static_cast<double>(params.n_restarts);
  out.diagnostics["moves"] = static_cast<double>(total_moves);
  return out;
}

struct QaoaParams {
  std::size_t layers = 1;
  std::size_t optimizer_iterations = 5;  // Nelder-Mead iterations
  std::uint64_t shots = 8192;
  std::uint64_t seed = 0;
};

namespace detail {

inline double counts_expectation(const std::vector<std::uint64_t>& counts,
                                 const std::vector<double>& energies,
                                 std::uint64_t n_shots) {
  double acc = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k]) acc += static_cast<double>(counts[k]) * energies[k];
  return acc / static_cast<double>(n_shots);
}

}  // namespace detail

// Builds the depth-p QAOA state for the given angles: uniform superposition,
// then alternating cost phase exp(-i gamma H) and transverse mixer.
inline Statevector qaoa_state(const IsingProblem& problem,
                              const std::vector<double>& energies,
                              std::span<const double> gammas,
                              std::span<const double> betas) {
  const auto n = static_cast<std::uint32_t>(problem.n_vars());
  Statevector sv = Statevector::zero_state(n);
  for (std::uint32_t q = 0; q < n; ++q) sv.apply_ry(q, 3.14159265358979323846 / 2.0);
  for (std::size_t layer = 0; layer < gammas.size(); ++layer) {
    sv.apply_diagonal_phase(energies, gammas[layer]);
    sv.apply_mixer(betas[layer]);
  }
  return sv;
}

// Simulated QAOA: Nelder-Mead over (gammas, betas) on the shot-estimated
// expectation of H, then the lowest-energy bitstring among a final round of
// shots. Parameters start at 0.1 with simplex step 0.3.
inline SolveOutcome qaoa_solve(const IsingProblem& problem, const QaoaParams& params) {
  const std::size_t n = problem.n_vars();
  if (n > kMaxQubits)
    throw std::invalid_argument("qaoa_solve: " + std::to_string(n) +
                                " variables exceeds the statevector cap");
  if (params.layers == 0 || params.optimizer_iterations == 0 || params.shots == 0)
    throw std::invalid_argument("qaoa_solve: params must be positive");
  const std::vector<double> energies = Statevector::basis_energies(problem);
  const std::size_t p = params.layers;

  std::size_t eval_index = 0;
  const auto objective = [&](std::span<const double> angles) {
    const std::span<const double> gammas = angles.subspan(0, p);
    const std::span<const double> betas = angles.subspan(p, p);
    const Statevector sv = qaoa_state(problem, energies, gammas, betas);
    const auto counts =
        sv.sample_shots(params.shots, derive_seed(params.seed, {0x0a0aULL, eval_index++}));
    return detail::counts_expectation(counts, energies, params.shots);
  };

  std::vector<double> x0(2 * p, 0.1);
  NelderMeadParams nm;
  nm.initial_step = 0.3;
  nm.max_iterations = params.optimizer_iterations;
  // Evaluation cap: simplex setup plus a generous per-iteration allowance;
  // the iteration cap is what actually stops the run.
  const std::size_t max_evals = (2 * p + 1) + params.optimizer_iterations * (2 * p + 2);
  OptimResult opt = nelder_mead(objective, x0, max_evals, nm);

  const Statevector final_state =
      qaoa_state(problem, energies, std::span<const double>(opt.x).subspan(0, p),
                 std::span<const double>(opt.x).subspan(p, p));
  const auto counts =
      final_state.sample_shots(params.shots, derive_seed(params.seed, {0xf17a1ULL}));
  std::uint64_t best_basis = 0;
  double best_e = std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (!counts[k]) continue;
    if (!have || energies[k] < best_e) {
      best_e = energies[k];
      best_basis = k;
      have = true;
    }
  }

  SolveOutcome out;
  out.config = SpinConfiguration::from_basis_index(best_basis, n);
  out.energy = problem.energy(out.config);
  out.solver_name = "qaoa";
  out.diagnostics["layers"] = static_cast<double>(p);
  out.diagnostics["shots"] = static_cast<double>(params.shots);
  out.diagnostics["expectation_evaluations"] = static_cast<double>(opt.evaluations);
  return out;
}

enum class SolverKind { brute_force, tabu, qaoa };

inline SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "brute" || name == "brute_force") return SolverKind::brute_force;
  if (name == "tabu") return SolverKind::tabu;
  if (name == "qaoa") return SolverKind::qaoa;
  throw std::invalid_argument("unknown solver '" + name + "' (expected brute|tabu|qaoa)");
}

inline const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::brute_force: return "brute";
    case SolverKind::tabu: return "tabu";
    case SolverKind::qaoa: return "qaoa";
  }
  return "?";
}

// Solver choice plus the parameter blocks for each backend; only the block
// matching `kind` is consulted.
struct SubsolverConfig {
  SolverKind kind = SolverKind::brute_force;
  TabuParams tabu;
  QaoaParams qaoa;
  std::size_t brute_cap = kBruteForceCap;

  SubsolverConfig with_seed(std::uint64_t seed) const {
    SubsolverConfig c = *this;
    c.tabu.seed = seed;
    c.qaoa.seed = seed;
    return c;
  }
};

inline SolveOutcome solve(const IsingProblem& problem, const SubsolverConfig& config) {
  switch (config.kind) {
    case SolverKind::brute_force: return brute_force_ground_state(problem, config.brute_cap);
    case SolverKind::tabu: return tabu_search(problem, config.tabu);
    case SolverKind::qaoa: return qaoa_solve(problem, config.qaoa);
  }
  throw std::invalid_argument("solve: unknown solver kind");
}

}  // namespace lssa
