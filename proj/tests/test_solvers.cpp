#include "lssa/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

using namespace lssa;

// Naive enumeration oracle, independent of the Gray-code scan.
std::pair<SpinConfiguration, double> enumerate_ground_state(const IsingProblem& p) {
  double best = std::numeric_limits<double>::infinity();
  SpinConfiguration best_config;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << p.n_vars()); ++k) {
    const auto z = SpinConfiguration::from_basis_index(k, p.n_vars());
    const double e = p.energy(z);
    if (e < best || (e == best && lex_less(z, best_config))) {
      best = e;
      best_config = z;
    }
  }
  return {best_config, best};
}

TEST(BruteForce, SingleSpin) {
  const IsingProblem p(1, {}, {0.7});
  const SolveOutcome out = brute_force_ground_state(p);
  EXPECT_EQ(out.config.spins, (std::vector<std::int8_t>{-1}));
  EXPECT_DOUBLE_EQ(out.energy, -0.7);
}

TEST(BruteForce, FerromagnetTieBreaksLexicographically) {
  const IsingProblem p(2, {{0, 1, -1.0}}, {0.0, 0.0});
  const SolveOutcome out = brute_force_ground_state(p);
  EXPECT_DOUBLE_EQ(out.energy, -1.0);
  EXPECT_EQ(out.config.spins, (std::vector<std::int8_t>{-1, -1}));
}

TEST(BruteForce, MatchesEnumerationOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const IsingProblem p = generate_fully_connected(8, 500 + seed);
    const auto [oracle_config, oracle_energy] = enumerate_ground_state(p);
    const SolveOutcome out = brute_force_ground_state(p);
    EXPECT_NEAR(out.energy, oracle_energy, 1e-12);
    EXPECT_EQ(out.config.spins, oracle_config.spins);
  }
}

TEST(BruteForce, BeatsRandomSampling) {
  const IsingProblem p = generate_fully_connected(10, 3);
  const SolveOutcome out = brute_force_ground_state(p);
  Rng rng(44);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto z = SpinConfiguration::from_basis_index(rng.uniform_int(1024), 10);
    EXPECT_LE(out.energy, p.energy(z) + 1e-12);
  }
}

TEST(BruteForce, CapEnforced) {
  const IsingProblem p = generate_fully_connected(12, 0);
  EXPECT_THROW(brute_force_ground_state(p, 10), std::invalid_argument);
}

TEST(BruteForce, ReportedEnergyReEvaluates) {
  const IsingProblem p = generate_3regular(12, 8);
  const SolveOutcome out = brute_force_ground_state(p);
  EXPECT_NEAR(out.energy, p.energy(out.config), 1e-9);
}

TEST(Tabu, SingleVariableMatchesBrute) {
  const IsingProblem p(1, {}, {-0.4});
  TabuParams params;
  params.seed = 5;
  const SolveOutcome out = tabu_search(p, params);
  EXPECT_DOUBLE_EQ(out.energy, -0.4);
  EXPECT_EQ(out.config.spins, (std::vector<std::int8_t>{1}));
}

TEST(Tabu, DeterministicPerSeed) {
  const IsingProblem p = generate_fully_connected(30, 7);
  TabuParams params;
  params.seed = 99;
  const SolveOutcome a = tabu_search(p, params);
  const SolveOutcome b = tabu_search(p, params);
  EXPECT_EQ(a.config.spins, b.config.spins);
  EXPECT_EQ(a.energy, b.energy);
}

TEST(Tabu, NeverBeatsBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const IsingProblem p = generate_fully_connected(10, 900 + seed);
    const double exact = brute_force_ground_state(p).energy;
    TabuParams params;
    params.seed = seed;
    EXPECT_GE(tabu_search(p, params).energy, exact - 1e-9);
  }
}

TEST(Tabu, HitsExactOptimumAtLeast95OutOf100) {
  std::size_t hits = 0;
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    const std::size_t n = 8 + (inst % 9);  // sizes 8..16
    const IsingProblem p = generate_fully_connected(n, 3000 + inst);
    const double exact = brute_force_ground_state(p).energy;
    TabuParams params;
    params.seed = inst;
    const double found = tabu_search(p, params).energy;
    EXPECT_GE(found, exact - 1e-9);
    if (found <= exact + 1e-9) ++hits;
  }
  EXPECT_GE(hits, 95u);
}

TEST(Tabu, ReportedEnergyReEvaluates) {
  const IsingProblem p = generate_fully_connected(25, 31);
  TabuParams params;
  params.seed = 2;
  const SolveOutcome out = tabu_search(p, params);
  EXPECT_NEAR(out.energy, p.energy(out.config), 1e-9);
}

TEST(Qaoa, SeparableProblemOpposesBias) {
  // Large uniform bias, no couplings: every spin should oppose the bias sign.
  const IsingProblem p(4, {}, {0.9, 0.9, 0.9, 0.9});
  QaoaParams params;
  params.seed = 17;
  const SolveOutcome out = qaoa_solve(p, params);
  EXPECT_EQ(out.config.spins, (std::vector<std::int8_t>{-1, -1, -1, -1}));
}

TEST(Qaoa, TwoSpinFerromagnetFindsAlignedState) {
  const IsingProblem p(2, {{0, 1, -1.0}}, {0.0, 0.0});
  const double exact = brute_force_ground_state(p).energy;
  QaoaParams params;
  params.seed = 23;
  const SolveOutcome out = qaoa_solve(p, params);
  EXPECT_NEAR(out.energy, exact, 1e-12);
  const bool aligned = out.config.spins == std::vector<std::int8_t>{-1, -1} ||
                       out.config.spins == std::vector<std::int8_t>{1, 1};
  EXPECT_TRUE(aligned);
}

TEST(Qaoa, ZeroAnglesExpectationEqualsOffset) {
  // The uniform superposition has <z_i> = <z_i z_j> = 0, so the expected
  // energy is the offset; with shots it is the sample mean of the table.
  const IsingProblem p(3, {{0, 1, 0.4}, {1, 2, -0.7}}, {0.1, -0.2, 0.3}, 1.25);
  const auto energies = Statevector::basis_energies(p);
  const std::vector<double> zeros{0.0};
  const Statevector sv = qaoa_state(p, energies, zeros, zeros);
  const auto probs = sv.probabilities();
  double expectation = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) expectation += probs[k] * energies[k];
  EXPECT_NEAR(expectation, 1.25, 1e-10);
}

TEST(Qaoa, DeterministicPerSeed) {
  const IsingProblem p = generate_fully_connected(5, 77);
  QaoaParams params;
  params.seed = 4;
  const SolveOutcome a = qaoa_solve(p, params);
  const SolveOutcome b = qaoa_solve(p, params);
  EXPECT_EQ(a.config.spins, b.config.spins);
  EXPECT_EQ(a.energy, b.energy);
}

TEST(Qaoa, NeverBeatsBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const IsingProblem p = generate_fully_connected(6, 600 + seed);
    const double exact = brute_force_ground_state(p).energy;
    QaoaParams params;
    params.seed = seed;
    EXPECT_GE(qaoa_solve(p, params).energy, exact - 1e-9);
  }
}

TEST(Qaoa, MoreShotsDoNotHurtOnAverage) {
  // Best-of-shots extraction: with more shots the best sampled bitstring is
  // at least as good in expectation.
  double mean_large = 0.0, mean_small = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const IsingProblem p = generate_fully_connected(5, 7000 + seed);
    QaoaParams large;
    large.shots = 8192;
    large.seed = seed;
    QaoaParams small;
    small.shots = 128;
    small.seed = seed;
    mean_large += qaoa_solve(p, large).energy;
    mean_small += qaoa_solve(p, small).energy;
  }
  EXPECT_LE(mean_large / 50.0, mean_small / 50.0 + 1e-12);
}

TEST(Qaoa, CapEnforced) {
  const IsingProblem p = generate_fully_connected(21, 0);
  EXPECT_THROW(qaoa_solve(p, QaoaParams{}), std::invalid_argument);
}

TEST(Dispatch, RoutesToTheRightSolver) {
  const IsingProblem p = generate_fully_connected(3, 1);
  SubsolverConfig config;
  config.kind = SolverKind::brute_force;
  const SolveOutcome direct = brute_force_ground_state(p);
  const SolveOutcome via = solve(p, config);
  EXPECT_EQ(via.config.spins, direct.config.spins);
  EXPECT_EQ(via.solver_name, "brute");

  config.kind = SolverKind::tabu;
  config.tabu.seed = 11;
  const SolveOutcome t1 = solve(p, config);
  const SolveOutcome t2 = solve(p, config);
  EXPECT_EQ(t1.config.spins, t2.config.spins);
  EXPECT_EQ(t1.solver_name, "tabu");
}

TEST(Dispatch, UnknownSolverNameThrows) {
  EXPECT_THROW(solver_kind_from_string("annealer"), std::invalid_argument);
  EXPECT_EQ(solver_kind_from_string("brute"), SolverKind::brute_force);
  EXPECT_EQ(solver_kind_from_string("qaoa"), SolverKind::qaoa);
}

}  // namespace
