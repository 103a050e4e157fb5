#include "lssa/qsim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numeric>

namespace {

using namespace lssa;

constexpr double kPi = 3.14159265358979323846;

TEST(Statevector, ZeroState) {
  const auto sv = Statevector::zero_state(3);
  ASSERT_EQ(sv.amplitudes().size(), 8u);
  EXPECT_EQ(sv.amplitudes()[0], std::complex<double>(1.0, 0.0));
  for (std::size_t k = 1; k < 8; ++k)
    EXPECT_EQ(sv.amplitudes()[k], std::complex<double>(0.0, 0.0));
  EXPECT_NEAR(sv.norm_squared(), 1.0, 1e-15);
  EXPECT_THROW(Statevector::zero_state(0), std::invalid_argument);
  EXPECT_THROW(Statevector::zero_state(kMaxQubits + 1), std::invalid_argument);
}

TEST(Gates, RyPiFlipsZeroToOne) {
  auto sv = Statevector::zero_state(1);
  sv.apply_ry(0, kPi);
  EXPECT_NEAR(std::abs(sv.amplitudes()[0]), 0.0, 1e-12);
  EXPECT_NEAR(sv.amplitudes()[1].real(), 1.0, 1e-12);
}

TEST(Gates, RzLeavesProbabilitiesUnchanged) {
  auto sv = Statevector::zero_state(2);
  sv.apply_ry(0, 0.7);
  sv.apply_ry(1, 1.3);
  const auto before = sv.probabilities();
  sv.apply_rz(0, 0.9);
  sv.apply_rz(1, -2.1);
  const auto after = sv.probabilities();
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(after[k], before[k], 1e-12);
}

TEST(Gates, CxTruthTable) {
  // |10> (control qubit 1 set) -> |11>.
  auto sv = Statevector::zero_state(2);
  sv.apply_ry(1, kPi);  // sets qubit 1
  sv.apply_cx(1, 0);
  EXPECT_NEAR(std::abs(sv.amplitudes()[3]), 1.0, 1e-12);
  // Control clear: nothing happens.
  auto sv2 = Statevector::zero_state(2);
  sv2.apply_cx(1, 0);
  EXPECT_NEAR(std::abs(sv2.amplitudes()[0]), 1.0, 1e-12);
  EXPECT_THROW(sv2.apply_cx(0, 0), std::invalid_argument);
  EXPECT_THROW(sv2.apply_cx(0, 5), std::invalid_argument);
}

TEST(Gates, InvolutionsHoldToTightTolerance) {
  auto sv = Statevector::zero_state(3);
  Rng rng(4);
  for (std::uint32_t q = 0; q < 3; ++q) sv.apply_ry(q, rng.uniform(-kPi, kPi));
  const auto reference =
      std::vector<std::complex<double>>(sv.amplitudes().begin(), sv.amplitudes().end());
  sv.apply_cx(0, 2);
  sv.apply_cx(0, 2);
  sv.apply_rz(1, 0.37);
  sv.apply_rz(1, -0.37);
  for (std::size_t k = 0; k < reference.size(); ++k) {
    EXPECT_NEAR(sv.amplitudes()[k].real(), reference[k].real(), 1e-12);
    EXPECT_NEAR(sv.amplitudes()[k].imag(), reference[k].imag(), 1e-12);
  }
}

TEST(Gates, NormPreservedByRandomCircuits) {
  Rng rng(11);
  auto sv = Statevector::zero_state(5);
  for (int step = 0; step < 200; ++step) {
    const auto q = static_cast<std::uint32_t>(rng.uniform_int(5));
    switch (rng.uniform_int(4)) {
      case 0: sv.apply_ry(q, rng.uniform(-kPi, kPi)); break;
      case 1: sv.apply_rz(q, rng.uniform(-kPi, kPi)); break;
      case 2: sv.apply_rx(q, rng.uniform(-kPi, kPi)); break;
      default: {
        const auto t = static_cast<std::uint32_t>(rng.uniform_int(5));
        if (t != q) sv.apply_cx(q, t);
      }
    }
  }
  EXPECT_NEAR(sv.norm_squared(), 1.0, 1e-9);
}

TEST(Ansatz, AllZeroAnglesGiveZeroState) {
  AnsatzSpec spec{3, 2, Entanglement::full};
  const std::vector<double> theta(spec.parameter_count(), 0.0);
  const auto sv = ansatz_state(spec, theta);
  EXPECT_NEAR(std::abs(sv.amplitudes()[0]), 1.0, 1e-12);
}

TEST(Ansatz, SingleQubitNoRepsRyPi) {
  AnsatzSpec spec{1, 0, Entanglement::full};
  ASSERT_EQ(spec.parameter_count(), 2u);
  const std::vector<double> theta{kPi, 0.0};
  const auto sv = ansatz_state(spec, theta);
  EXPECT_NEAR(std::norm(sv.amplitudes()[1]), 1.0, 1e-12);
}

TEST(Ansatz, ParameterCountMatchesTwoLayerFormula) {
  // Two entanglement layers sandwiched by three rotation layers: 6 * n.
  for (std::uint32_t n : {2u, 5u, 8u}) {
    AnsatzSpec spec{n, 2, Entanglement::full};
    EXPECT_EQ(spec.parameter_count(), 6u * n);
  }
  AnsatzSpec spec{5, 2, Entanglement::full};
  EXPECT_THROW(ansatz_state(spec, std::vector<double>(29, 0.0)), std::invalid_argument);
}

TEST(Ansatz, LinearAndFullEntanglementDiffer) {
  AnsatzSpec full{3, 1, Entanglement::full};
  AnsatzSpec linear{3, 1, Entanglement::linear};
  Rng rng(8);
  std::vector<double> theta(full.parameter_count());
  for (auto& t : theta) t = rng.uniform(-kPi, kPi);
  const auto a = ansatz_state(full, theta);
  const auto b = ansatz_state(linear, theta);
  double max_diff = 0.0;
  for (std::size_t k = 0; k < a.amplitudes().size(); ++k)
    max_diff = std::max(max_diff, std::abs(a.amplitudes()[k] - b.amplitudes()[k]));
  EXPECT_GT(max_diff, 1e-6);
  EXPECT_NEAR(a.norm_squared(), 1.0, 1e-12);
  EXPECT_NEAR(b.norm_squared(), 1.0, 1e-12);
}

TEST(Ansatz, ProbabilitiesAreContinuousInTheta) {
  AnsatzSpec spec{4, 2, Entanglement::full};
  Rng rng(15);
  std::vector<double> theta(spec.parameter_count());
  for (auto& t : theta) t = rng.uniform(-kPi, kPi);
  const auto base = ansatz_state(spec, theta).probabilities();
  const double eps = 1e-6;
  for (std::size_t d = 0; d < theta.size(); d += 7) {
    auto bumped = theta;
    bumped[d] += eps;
    const auto probs = ansatz_state(spec, bumped).probabilities();
    for (std::size_t k = 0; k < probs.size(); ++k)
      EXPECT_NEAR(probs[k], base[k], 20 * eps) << "param " << d;
  }
}

TEST(DiagonalPhase, GammaZeroIsIdentity) {
  const IsingProblem p = generate_fully_connected(3, 6);
  auto sv = Statevector::zero_state(3);
  for (std::uint32_t q = 0; q < 3; ++q) sv.apply_ry(q, kPi / 2.0);
  const auto before =
      std::vector<std::complex<double>>(sv.amplitudes().begin(), sv.amplitudes().end());
  sv.apply_diagonal_phase(p, 0.0);
  for (std::size_t k = 0; k < before.size(); ++k)
    EXPECT_EQ(sv.amplitudes()[k], before[k]);
}

TEST(DiagonalPhase, PhasesMatchEnergyEnumeration) {
  const IsingProblem p = generate_fully_connected(3, 42);
  const double gamma = 0.37;
  auto sv = Statevector::zero_state(3);
  for (std::uint32_t q = 0; q < 3; ++q) sv.apply_ry(q, kPi / 2.0);
  sv.apply_diagonal_phase(p, gamma);
  for (std::uint64_t k = 0; k < 8; ++k) {
    const auto z = SpinConfiguration::from_basis_index(k, 3);
    const double expected_phase = -gamma * p.energy(z);
    const double actual_phase = std::arg(sv.amplitudes()[k]);
    // Compare phases on the unit circle.
    EXPECT_NEAR(std::cos(actual_phase), std::cos(expected_phase), 1e-12);
    EXPECT_NEAR(std::sin(actual_phase), std::sin(expected_phase), 1e-12);
  }
}

TEST(Mixer, HalfPiFlipsAllQubits) {
  auto sv = Statevector::zero_state(3);
  sv.apply_mixer(kPi / 2.0);
  EXPECT_NEAR(std::norm(sv.amplitudes()[7]), 1.0, 1e-12);
}

TEST(Sampling, CountsSumToShots) {
  auto sv = Statevector::zero_state(3);
  for (std::uint32_t q = 0; q < 3; ++q) sv.apply_ry(q, 1.1 + q);
  const auto counts = sv.sample_shots(4096, 7);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), 4096u);
  EXPECT_THROW(sv.sample_shots(0, 7), std::invalid_argument);
}

TEST(Sampling, BasisStateIsCertain) {
  const auto sv = Statevector::zero_state(2);
  const auto counts = sv.sample_shots(100, 3);
  EXPECT_EQ(counts[0], 100u);
}

TEST(Sampling, UniformTwoQubitWithinFiveSigma) {
  auto sv = Statevector::zero_state(2);
  for (std::uint32_t q = 0; q < 2; ++q) sv.apply_ry(q, kPi / 2.0);
  const std::uint64_t shots = 100000;
  const auto counts = sv.sample_shots(shots, 12345);
  const double expect = static_cast<double>(shots) / 4.0;
  const double sigma = std::sqrt(static_cast<double>(shots) * 0.25 * 0.75);
  for (auto c : counts)
    EXPECT_NEAR(static_cast<double>(c), expect, 5.0 * sigma);
}

TEST(Sampling, DeterministicPerSeed) {
  auto sv = Statevector::zero_state(4);
  for (std::uint32_t q = 0; q < 4; ++q) sv.apply_ry(q, 0.3 * (q + 1));
  EXPECT_EQ(sv.sample_shots(2048, 9), sv.sample_shots(2048, 9));
  EXPECT_NE(sv.sample_shots(2048, 9), sv.sample_shots(2048, 10));
}

TEST(BasisEnergies, TableMatchesDirectEvaluation) {
  const IsingProblem p = generate_fully_connected(6, 19);
  const auto table = Statevector::basis_energies(p);
  ASSERT_EQ(table.size(), 64u);
  for (std::uint64_t k = 0; k < 64; ++k) {
    const auto z = SpinConfiguration::from_basis_index(k, 6);
    EXPECT_NEAR(table[k], p.energy(z), 1e-10);
  }
}

}  // namespace
