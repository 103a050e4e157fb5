#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lssa/rng.hpp"

// Problem representation: Ising and QUBO forms, energy evaluation,
// conversions, subproblem extraction and random instance generators.
//
// Conventions used throughout the library:
//   - couplings are stored once per unordered pair, canonicalized to i < j;
//   - diagonal terms are rejected (a z_i^2 term is a constant and belongs in
//     the offset);
//   - all types are immutable after construction and safe to share across
//     threads.

namespace lssa {

struct CouplingTerm {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double value = 0.0;
};

// Spin assignment, entries are exactly -1 or +1.
struct SpinConfiguration {
  std::vector<std::int8_t> spins;

  std::size_t size() const { return spins.size(); }
  std::int8_t operator[](std::size_t k) const { return spins[k]; }

  // Basis index -> spins, little-endian: bit q of `index` set means spin q
  // is +1. This is the same convention the statevector simulator uses.
  static SpinConfiguration from_basis_index(std::uint64_t index, std::size_t n) {
    SpinConfiguration c;
    c.spins.resize(n);
    for (std::size_t q = 0; q < n; ++q)
      c.spins[q] = (index >> q) & 1 ? std::int8_t{1} : std::int8_t{-1};
    return c;
  }

  std::uint64_t to_basis_index() const {
    std::uint64_t k = 0;
    for (std::size_t q = 0; q < spins.size(); ++q)
      if (spins[q] > 0) k |= (std::uint64_t{1} << q);
    return k;
  }

  void validate() const {
    for (std::size_t k = 0; k < spins.size(); ++k)
      if (spins[k] != 1 && spins[k] != -1)
        throw std::invalid_argument("SpinConfiguration: entry " +
                                    std::to_string(k) + " is not +-1");
  }

  bool operator==(const SpinConfiguration& other) const {
    return spins == other.spins;
  }
};

// Lexicographic order with -1 before +1, comparing index 0 first. Used as
// the deterministic tie-break between degenerate ground states.
inline bool lex_less(const SpinConfiguration& a, const SpinConfiguration& b) {
  return std::lexicographical_compare(a.spins.begin(), a.spins.end(),
                                      b.spins.begin(), b.spins.end());
}

namespace detail {

inline void canonicalize_terms(std::vector<CouplingTerm>& terms,
                               std::size_t n_vars, const char* what) {
  for (auto& t : terms) {
    if (t.i == t.j)
      throw std::invalid_argument(std::string(what) + ": diagonal term at index " +
                                  std::to_string(t.i));
    if (t.i > t.j) std::swap(t.i, t.j);
    if (t.j >= n_vars)
      throw std::invalid_argument(std::string(what) + ": index " +
                                  std::to_string(t.j) + " out of range [0, " +
                                  std::to_string(n_vars) + ")");
  }
  std::sort(terms.begin(), terms.end(), [](const CouplingTerm& a, const CouplingTerm& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  // Merge duplicate pairs by summation.
  std::size_t out = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (out > 0 && terms[out - 1].i == terms[k].i && terms[out - 1].j == terms[k].j) {
      terms[out - 1].value += terms[k].value;
    } else {
      terms[out++] = terms[k];
    }
  }
  terms.resize(out);
}

}  // namespace detail

// H(z) = offset + sum_{(i<j)} J_ij z_i z_j + sum_i h_i z_i,  z_i in {-1,+1}.
class IsingProblem {
 public:
  IsingProblem() = default;

  IsingProblem(std::size_t n_vars, std::vector<CouplingTerm> couplings,
               std::vector<double> biases, double offset = 0.0)
      : n_vars_(n_vars),
        couplings_(std::move(couplings)),
        biases_(std::move(biases)),
        offset_(offset) {
    if (n_vars_ == 0) throw std::invalid_argument("IsingProblem: n_vars must be positive");
    if (biases_.size() != n_vars_)
      throw std::invalid_argument("IsingProblem: biases length " +
                                  std::to_string(biases_.size()) + " != n_vars " +
                                  std::to_string(n_vars_));
    detail::canonicalize_terms(couplings_, n_vars_, "IsingProblem");
  }

  std::size_t n_vars() const { return n_vars_; }
  std::span<const CouplingTerm> couplings() const { return couplings_; }
  std::span<const double> biases() const { return biases_; }
  double offset() const { return offset_; }

  double energy(const SpinConfiguration& config) const {
    if (config.size() != n_vars_)
      throw std::invalid_argument("energy: config length " +
                                  std::to_string(config.size()) + " != n_vars " +
                                  std::to_string(n_vars_));
    double e = offset_;
    for (const auto& t : couplings_)
      e += t.value * static_cast<double>(config[t.i]) * static_cast<double>(config[t.j]);
    for (std::size_t k = 0; k < n_vars_; ++k)
      e += biases_[k] * static_cast<double>(config[k]);
    return e;
  }

  nlohmann::json to_json() const {
    nlohmann::json couplings = nlohmann::json::array();
    for (const auto& t : couplings_)
      couplings.push_back(nlohmann::json::array({t.i, t.j, t.value}));
    return {{"n_vars", n_vars_},
            {"couplings", std::move(couplings)},
            {"biases", biases_},
            {"offset", offset_}};
  }

  // Strict reader: rejects non-canonical (i >= j) and duplicate pairs
  // instead of silently repairing them.
  static IsingProblem from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("problem JSON: expected object");
    for (const char* key : {"n_vars", "couplings", "biases", "offset"})
      if (!j.contains(key))
        throw std::invalid_argument(std::string("problem JSON: missing field '") + key + "'");
    const std::size_t n = j.at("n_vars").get<std::size_t>();
    std::vector<CouplingTerm> terms;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& entry : j.at("couplings")) {
      if (!entry.is_array() || entry.size() != 3)
        throw std::invalid_argument("problem JSON: coupling entries must be [i, j, value]");
      CouplingTerm t{entry[0].get<std::uint32_t>(), entry[1].get<std::uint32_t>(),
                     entry[2].get<double>()};
      if (t.i >= t.j)
        throw std::invalid_argument("problem JSON: non-canonical pair (" +
                                    std::to_string(t.i) + ", " + std::to_string(t.j) + ")");
      if (!seen.insert({t.i, t.j}).second)
        throw std::invalid_argument("problem JSON: duplicate pair (" +
                                    std::to_string(t.i) + ", " + std::to_string(t.j) + ")");
      terms.push_back(t);
    }
    return IsingProblem(n, std::move(terms), j.at("biases").get<std::vector<double>>(),
                        j.at("offset").get<double>());
  }

 private:
  std::size_t n_vars_ = 0;
  std::vector<CouplingTerm> couplings_;
  std::vector<double> biases_;
  double offset_ = 0.0;
};

// E(x) = offset + sum_{(i<j)} q_ij x_i x_j + sum_i q_i x_i,  x_i in {0,1}.
class QuboProblem {
 public:
  QuboProblem() = default;

  QuboProblem(std::size_t n_vars, std::vector<CouplingTerm> quadratic,
              std::vector<double> linear, double offset = 0.0)
      : n_vars_(n_vars),
        quadratic_(std::move(quadratic)),
        linear_(std::move(linear)),
        offset_(offset) {
    if (n_vars_ == 0) throw std::invalid_argument("QuboProblem: n_vars must be positive");
    if (linear_.size() != n_vars_)
      throw std::invalid_argument("QuboProblem: linear length != n_vars");
    detail::canonicalize_terms(quadratic_, n_vars_, "QuboProblem");
  }

  std::size_t n_vars() const { return n_vars_; }
  std::span<const CouplingTerm> quadratic() const { return quadratic_; }
  std::span<const double> linear() const { return linear_; }
  double offset() const { return offset_; }

  double energy(const std::vector<std::uint8_t>& x) const {
    if (x.size() != n_vars_)
      throw std::invalid_argument("qubo energy: assignment length != n_vars");
    double e = offset_;
    for (const auto& t : quadratic_)
      if (x[t.i] && x[t.j]) e += t.value;
    for (std::size_t k = 0; k < n_vars_; ++k)
      if (x[k]) e += linear_[k];
    return e;
  }

 private:
  std::size_t n_vars_ = 0;
  std::vector<CouplingTerm> quadratic_;
  std::vector<double> linear_;
  double offset_ = 0.0;
};

// Exact QUBO -> Ising mapping under x_i = (z_i + 1) / 2:
//   q_i x_i       ->  h_i += q_i/2, offset += q_i/2
//   q_ij x_i x_j  ->  J_ij += q_ij/4, h_i += q_ij/4, h_j += q_ij/4, offset += q_ij/4
inline IsingProblem qubo_to_ising(const QuboProblem& qubo) {
  const std::size_t n = qubo.n_vars();
  std::vector<CouplingTerm> terms;
  terms.reserve(qubo.quadratic().size());
  std::vector<double> biases(n, 0.0);
  double offset = qubo.offset();
  for (std::size_t k = 0; k < n; ++k) {
    biases[k] += qubo.linear()[k] / 2.0;
    offset += qubo.linear()[k] / 2.0;
  }
  for (const auto& t : qubo.quadratic()) {
    terms.push_back({t.i, t.j, t.value / 4.0});
    biases[t.i] += t.value / 4.0;
    biases[t.j] += t.value / 4.0;
    offset += t.value / 4.0;
  }
  return IsingProblem(n, std::move(terms), std::move(biases), offset);
}

// Fully connected random instance: every pair coupled, J_ij and h_i i.i.d.
// uniform on the open interval (-1, 1).
inline IsingProblem generate_fully_connected(std::size_t n_vars, std::uint64_t seed) {
  if (n_vars < 2)
    throw std::invalid_argument("generate_fully_connected: n_vars must be >= 2");
  Rng rng(seed);
  std::vector<CouplingTerm> terms;
  terms.reserve(n_vars * (n_vars - 1) / 2);
  for (std::uint32_t i = 0; i + 1 < n_vars; ++i)
    for (std::uint32_t j = i + 1; j < n_vars; ++j)
      terms.push_back({i, j, rng.uniform_open_sym()});
  std::vector<double> biases(n_vars);
  for (auto& h : biases) h = rng.uniform_open_sym();
  return IsingProblem(n_vars, std::move(terms), std::move(biases), 0.0);
}

// Random simple 3-regular coupling graph via the pairing (configuration)
// model: three stubs per vertex, shuffled and paired; resample on self-loops
// or parallel edges. Weights and biases uniform on (-1, 1).
inline IsingProblem generate_3regular(std::size_t n_vars, std::uint64_t seed) {
  if (n_vars < 4 || n_vars % 2 != 0)
    throw std::invalid_argument(
        "generate_3regular: n_vars must be even and >= 4");
  Rng rng(seed);
  std::vector<std::uint32_t> stubs(3 * n_vars);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (;;) {
    for (std::size_t k = 0; k < stubs.size(); ++k)
      stubs[k] = static_cast<std::uint32_t>(k / 3);
    rng.shuffle(stubs);
    edges.clear();
    bool simple = true;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      std::uint32_t a = stubs[k], b = stubs[k + 1];
      if (a == b) { simple = false; break; }
      auto e = std::minmax(a, b);
      if (!seen.insert({e.first, e.second}).second) { simple = false; break; }
      edges.push_back({e.first, e.second});
    }
    if (simple) break;
  }
  std::vector<CouplingTerm> terms;
  terms.reserve(edges.size());
  for (auto [i, j] : edges) terms.push_back({i, j, rng.uniform_open_sym()});
  std::vector<double> biases(n_vars);
  for (auto& h : biases) h = rng.uniform_open_sym();
  return IsingProblem(n_vars, std::move(terms), std::move(biases), 0.0);
}

// Induced subproblem on `indices`: keeps couplings with both endpoints
// selected and the selected biases, relabeled by position. Offset is zero
// (a constant shift never moves the subproblem's argmin).
inline IsingProblem extract_subproblem(const IsingProblem& problem,
                                       const std::vector<std::uint32_t>& indices) {
  const std::size_t n = problem.n_vars();
  std::vector<std::uint32_t> position(n, UINT32_MAX);
  for (std::size_t p = 0; p < indices.size(); ++p) {
    const std::uint32_t idx = indices[p];
    if (idx >= n)
      throw std::invalid_argument("extract_subproblem: index " +
                                  std::to_string(idx) + " out of range");
    if (position[idx] != UINT32_MAX)
      throw std::invalid_argument("extract_subproblem: duplicate index " +
                                  std::to_string(idx));
    position[idx] = static_cast<std::uint32_t>(p);
  }
  if (indices.empty())
    throw std::invalid_argument("extract_subproblem: empty index set");
  std::vector<CouplingTerm> terms;
  for (const auto& t : problem.couplings()) {
    const std::uint32_t pi = position[t.i], pj = position[t.j];
    if (pi == UINT32_MAX || pj == UINT32_MAX) continue;
    terms.push_back({std::min(pi, pj), std::max(pi, pj), t.value});
  }
  std::vector<double> biases(indices.size());
  for (std::size_t p = 0; p < indices.size(); ++p)
    biases[p] = problem.biases()[indices[p]];
  return IsingProblem(indices.size(), std::move(terms), std::move(biases), 0.0);
}

// Symmetric adjacency in CSR layout; shared by the tabu solver, the
// brute-force scan and the QAOA energy table.
struct Adjacency {
  std::vector<std::size_t> offsets;                       // n + 1
  std::vector<std::pair<std::uint32_t, double>> entries;  // (neighbor, J)

  static Adjacency build(const IsingProblem& p) {
    Adjacency adj;
    const std::size_t n = p.n_vars();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& t : p.couplings()) {
      ++degree[t.i];
      ++degree[t.j];
    }
    adj.offsets.assign(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) adj.offsets[k + 1] = adj.offsets[k] + degree[k];
    adj.entries.resize(adj.offsets.back());
    std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& t : p.couplings()) {
      adj.entries[cursor[t.i]++] = {t.j, t.value};
      adj.entries[cursor[t.j]++] = {t.i, t.value};
    }
    return adj;
  }

  std::span<const std::pair<std::uint32_t, double>> row(std::size_t k) const {
    return {entries.data() + offsets[k], offsets[k + 1] - offsets[k]};
  }
};

// Streams (basis_index, energy) over all 2^n configurations in Gray-code
// order, updating the energy incrementally in O(degree) per step. `visit`
// receives the little-endian basis index of each configuration.
template <typename Visitor>
void gray_code_energy_scan(const IsingProblem& problem, const Adjacency& adj,
                           Visitor&& visit) {
  const std::size_t n = problem.n_vars();
  SpinConfiguration config;
  config.spins.assign(n, -1);
  double e = problem.energy(config);
  visit(std::uint64_t{0}, e);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t basis = 0;
  for (std::uint64_t m = 1; m < total; ++m) {
    const unsigned bit = static_cast<unsigned>(__builtin_ctzll(m));
    config.spins[bit] = static_cast<std::int8_t>(-config.spins[bit]);
    basis ^= (std::uint64_t{1} << bit);
    // Delta for flipping spin `bit`: 2 * z_new * (h + sum_j J z_j).
    double field = problem.biases()[bit];
    for (const auto& [nb, w] : adj.row(bit))
      field += w * static_cast<double>(config.spins[nb]);
    e += 2.0 * static_cast<double>(config.spins[bit]) * field;
    visit(basis, e);
  }
}

}  // namespace lssa
