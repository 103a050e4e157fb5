#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/ising.hpp"
#include "lssa/rng.hpp"

// Minimal dense statevector simulator. Basis ordering is little-endian:
// qubit 0 is the least-significant bit of the amplitude index. Capped at 20
// qubits (~16M complex amplitudes), which covers every configuration this
// library needs.

namespace lssa {

inline constexpr std::uint32_t kMaxQubits = 20;

class Statevector {
 public:
  static Statevector zero_state(std::uint32_t n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
      throw std::invalid_argument("zero_state: n_qubits must be in [1, " +
                                  std::to_string(kMaxQubits) + "]");
    Statevector sv;
    sv.n_qubits_ = n_qubits;
    sv.amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    sv.amps_[0] = {1.0, 0.0};
    return sv;
  }

  std::uint32_t n_qubits() const { return n_qubits_; }
  std::span<const std::complex<double>> amplitudes() const { return amps_; }

  // R_y(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
  void apply_ry(std::uint32_t qubit, double angle) {
    check_qubit(qubit);
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    for_each_pair(qubit, [&](std::complex<double>& a0, std::complex<double>& a1) {
      const auto lo = a0, hi = a1;
      a0 = c * lo - s * hi;
      a1 = s * lo + c * hi;
    });
  }

  // R_z(t) = diag(e^{-it/2}, e^{+it/2})
  void apply_rz(std::uint32_t qubit, double angle) {
    check_qubit(qubit);
    const std::complex<double> p0 = std::polar(1.0, -angle / 2.0);
    const std::complex<double> p1 = std::polar(1.0, +angle / 2.0);
    for_each_pair(qubit, [&](std::complex<double>& a0, std::complex<double>& a1) {
      a0 *= p0;
      a1 *= p1;
    });
  }

  // R_x(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
  void apply_rx(std::uint32_t qubit, double angle) {
    check_qubit(qubit);
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const std::complex<double> mis{0.0, -s};
    for_each_pair(qubit, [&](std::complex<double>& a0, std::complex<double>& a1) {
      const auto lo = a0, hi = a1;
      a0 = c * lo + mis * hi;
      a1 = mis * lo + c * hi;
    });
  }

  void apply_cx(std::uint32_t control, std::uint32_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target)
      throw std::invalid_argument("apply_cx: control equals target");
    const std::uint64_t cbit = std::uint64_t{1} << control;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    const std::uint64_t size = amps_.size();
    for (std::uint64_t k = 0; k < size; ++k)
      if ((k & cbit) && !(k & tbit)) std::swap(amps_[k], amps_[k | tbit]);
  }

  // Multiplies amplitude k by exp(-i * gamma * E_k) where E_k is the Ising
  // energy of basis state k (bit b -> spin 2b - 1), the QAOA cost phase.
  void apply_diagonal_phase(std::span<const double> basis_energies, double gamma) {
    if (basis_energies.size() != amps_.size())
      throw std::invalid_argument("apply_diagonal_phase: energy table size mismatch");
    for (std::size_t k = 0; k < amps_.size(); ++k)
      amps_[k] *= std::polar(1.0, -gamma * basis_energies[k]);
  }

  void apply_diagonal_phase(const IsingProblem& problem, double gamma) {
    apply_diagonal_phase(basis_energies(problem), gamma);
  }

  // Transverse mixer: R_x(2 * beta) on every qubit.
  void apply_mixer(double beta) {
    for (std::uint32_t q = 0; q < n_qubits_; ++q) apply_rx(q, 2.0 * beta);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t k = 0; k < amps_.size(); ++k) p[k] = std::norm(amps_[k]);
    return p;
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  // Multinomial shot sampling by inverse CDF; counts sum to n_shots exactly
  // and the draw is deterministic per seed.
  std::vector<std::uint64_t> sample_shots(std::uint64_t n_shots, std::uint64_t seed) const {
    if (n_shots == 0) throw std::invalid_argument("sample_shots: n_shots must be positive");
    std::vector<double> cdf(amps_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < amps_.size(); ++k) {
      acc += std::norm(amps_[k]);
      cdf[k] = acc;
    }
    const double total = acc;
    Rng rng(seed);
    std::vector<std::uint64_t> counts(amps_.size(), 0);
    for (std::uint64_t s = 0; s < n_shots; ++s) {
      const double u = rng.uniform01() * total;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      const std::size_t k = it == cdf.end() ? amps_.size() - 1
                                            : static_cast<std::size_t>(it - cdf.begin());
      ++counts[k];
    }
    return counts;
  }

  // Energy of each basis state under `problem`, as a dense table indexed by
  // basis index. Built with a Gray-code scan, so it costs O(2^n * degree).
  static std::vector<double> basis_energies(const IsingProblem& problem) {
    if (problem.n_vars() > kMaxQubits)
      throw std::invalid_argument("basis_energies: problem too large for a dense table");
    std::vector<double> table(std::size_t{1} << problem.n_vars());
    const Adjacency adj = Adjacency::build(problem);
    gray_code_energy_scan(problem, adj,
                          [&](std::uint64_t basis, double e) { table[basis] = e; });
    return table;
  }

 private:
  template <typename F>
  void for_each_pair(std::uint32_t qubit, F&& f) {
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    const std::uint64_t size = amps_.size();
    for (std::uint64_t k = 0; k < size; ++k)
      if (!(k & bit)) f(amps_[k], amps_[k | bit]);
  }

  void check_qubit(std::uint32_t qubit) const {
    if (qubit >= n_qubits_)
      throw std::invalid_argument("qubit index " + std::to_string(qubit) +
                                  " out of range for " + std::to_string(n_qubits_) +
                                  " qubits");
  }

  std::uint32_t n_qubits_ = 0;
  std::vector<std::complex<double>> amps_;
};

enum class Entanglement { full, linear };

inline const char* to_string(Entanglement e) {
  return e == Entanglement::full ? "full" : "linear";
}

// Hardware-efficient ansatz: an R_y+R_z rotation layer, then `repetitions`
// blocks of (entanglement layer, rotation layer). Full entanglement applies
// CX for every pair control < target; linear applies the chain 0->1->...->n-1.
struct AnsatzSpec {
  std::uint32_t n_qubits = 1;
  std::uint32_t repetitions = 2;
  Entanglement entanglement = Entanglement::full;

  // 2 angles per qubit per rotation layer, repetitions + 1 rotation layers.
  std::size_t parameter_count() const {
    return std::size_t{2} * n_qubits * (repetitions + 1);
  }
};

// Parameter layout: for each rotation layer, first the R_y angles for qubits
// 0..n-1, then the R_z angles for qubits 0..n-1.
inline Statevector ansatz_state(const AnsatzSpec& spec, std::span<const double> theta) {
  if (theta.size() != spec.parameter_count())
    throw std::invalid_argument("ansatz_state: expected " +
                                std::to_string(spec.parameter_count()) +
                                " parameters, got " + std::to_string(theta.size()));
  Statevector sv = Statevector::zero_state(spec.n_qubits);
  std::size_t next = 0;
  const auto rotation_layer = [&] {
    for (std::uint32_t q = 0; q < spec.n_qubits; ++q) sv.apply_ry(q, theta[next + q]);
    for (std::uint32_t q = 0; q < spec.n_qubits; ++q)
      sv.apply_rz(q, theta[next + spec.n_qubits + q]);
    next += 2 * spec.n_qubits;
  };
  rotation_layer();
  for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
    if (spec.entanglement == Entanglement::full) {
      for (std::uint32_t c = 0; c + 1 < spec.n_qubits; ++c)
        for (std::uint32_t t = c + 1; t < spec.n_qubits; ++t) sv.apply_cx(c, t);
    } else {
      for (std::uint32_t c = 0; c + 1 < spec.n_qubits; ++c) sv.apply_cx(c, c + 1);
    }
    rotation_layer();
  }
  return sv;
}

}  // namespace lssa
