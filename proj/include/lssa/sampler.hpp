#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lssa/ising.hpp"
#include "lssa/rng.hpp"

// Round-based random subsystem sampling and the index bookkeeping that maps
// subsystem solutions back into the full problem's variable space.

namespace lssa {

// Ordered list of distinct full-problem indices; the order IS the relabeling
// map between subsystem position and full-problem variable.
struct SubsystemSelection {
  std::vector<std::uint32_t> indices;

  std::size_t size() const { return indices.size(); }
};

struct SamplingPlan {
  std::size_t n_vars = 0;
  std::size_t subsystem_size = 0;  // N_g
  std::vector<SubsystemSelection> selections;
  std::uint64_t seed = 0;

  std::size_t n_subsystems() const { return selections.size(); }

  // Per-variable selection counts.
  std::vector<std::size_t> coverage() const {
    std::vector<std::size_t> count(n_vars, 0);
    for (const auto& sel : selections)
      for (auto idx : sel.indices) ++count[idx];
    return count;
  }

  // Structural checks: sizes, index validity, distinctness, full coverage,
  // and the per-variable lower bound floor(N_s / ceil(N_p / N_g)) that the
  // round procedure guarantees (equal to floor(N_s*N_g/N_p) whenever N_g
  // divides N_p).
  void validate() const {
    if (n_vars == 0 || subsystem_size == 0 || subsystem_size > n_vars)
      throw std::invalid_argument("SamplingPlan: invalid sizes");
    if (n_subsystems() * subsystem_size < n_vars)
      throw std::invalid_argument("SamplingPlan: N_s * N_g < N_p cannot cover all variables");
    for (const auto& sel : selections) {
      if (sel.size() != subsystem_size)
        throw std::invalid_argument("SamplingPlan: selection size mismatch");
      std::vector<bool> seen(n_vars, false);
      for (auto idx : sel.indices) {
        if (idx >= n_vars) throw std::invalid_argument("SamplingPlan: index out of range");
        if (seen[idx]) throw std::invalid_argument("SamplingPlan: duplicate index in selection");
        seen[idx] = true;
      }
    }
    const std::size_t per_round = (n_vars + subsystem_size - 1) / subsystem_size;
    const std::size_t guaranteed = n_subsystems() / per_round;
    for (auto c : coverage()) {
      if (c == 0) throw std::invalid_argument("SamplingPlan: uncovered variable");
      if (c < guaranteed)
        throw std::invalid_argument("SamplingPlan: variable covered " + std::to_string(c) +
                                    " times, below round bound " + std::to_string(guaranteed));
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json sels = nlohmann::json::array();
    for (const auto& s : selections) sels.push_back(s.indices);
    return {{"n_vars", n_vars},
            {"subsystem_size", subsystem_size},
            {"selections", std::move(sels)},
            {"seed", seed}};
  }

  static SamplingPlan from_json(const nlohmann::json& j) {
    SamplingPlan plan;
    plan.n_vars = j.at("n_vars").get<std::size_t>();
    plan.subsystem_size = j.at("subsystem_size").get<std::size_t>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& sel : j.at("selections"))
      plan.selections.push_back({sel.get<std::vector<std::uint32_t>>()});
    plan.validate();
    return plan;
  }
};

// Draws n_subsystems selections of subsystem_size variables. Sampling runs
// in rounds: each round shuffles the full variable set into a fresh pool and
// consumes it N_g at a time, so every variable is picked once per complete
// round. When a round's tail holds fewer than N_g variables, the final
// selection of that round is topped up with distinct variables already used
// in the same round. Rounds repeat until exactly n_subsystems selections
// exist. Sampling is blind to problem data: it depends only on
// (n_vars, subsystem_size, n_subsystems, seed).
inline SamplingPlan sample_subsystems(std::size_t n_vars, std::size_t subsystem_size,
                                      std::size_t n_subsystems, std::uint64_t seed) {
  if (subsystem_size == 0 || subsystem_size > n_vars)
    throw std::invalid_argument("sample_subsystems: require 1 <= N_g <= N_p");
  if (n_subsystems == 0 || n_subsystems * subsystem_size < n_vars)
    throw std::invalid_argument("sample_subsystems: require N_s * N_g >= N_p");

  Rng rng(seed);
  SamplingPlan plan;
  plan.n_vars = n_vars;
  plan.subsystem_size = subsystem_size;
  plan.seed = seed;
  plan.selections.reserve(n_subsystems);

  std::vector<std::uint32_t> pool(n_vars);
  while (plan.selections.size() < n_subsystems) {
    // New round: fresh shuffled pool of all variables.
    std::iota(pool.begin(), pool.end(), 0u);
    rng.shuffle(pool);
    std::size_t cursor = 0;
    while (cursor < n_vars && plan.selections.size() < n_subsystems) {
      SubsystemSelection sel;
      const std::size_t take = std::min(subsystem_size, n_vars - cursor);
      sel.indices.assign(pool.begin() + cursor, pool.begin() + cursor + take);
      if (take < subsystem_size) {
        // Tail of the round: pad with distinct variables already picked in
        // this round, drawn uniformly without replacement.
        std::vector<std::uint32_t> used(pool.begin(), pool.begin() + cursor);
        rng.shuffle(used);
        sel.indices.insert(sel.indices.end(), used.begin(),
                           used.begin() + (subsystem_size - take));
      }
      plan.selections.push_back(std::move(sel));
      cursor += take;
    }
  }
  plan.validate();
  return plan;
}

// Embeds a solved subsystem configuration into the full index space:
// entry selection.indices[k] takes sub_config[k], everything else is 0
// ("no information").
inline std::vector<std::int8_t> lift_solution(const SubsystemSelection& selection,
                                              const SpinConfiguration& sub_config,
                                              std::size_t n_vars) {
  if (sub_config.size() != selection.size())
    throw std::invalid_argument("lift_solution: config length " +
                                std::to_string(sub_config.size()) +
                                " != selection length " + std::to_string(selection.size()));
  std::vector<std::int8_t> lifted(n_vars, 0);
  for (std::size_t k = 0; k < selection.size(); ++k) {
    if (selection.indices[k] >= n_vars)
      throw std::invalid_argument("lift_solution: selection index out of range");
    lifted[selection.indices[k]] = sub_config[k];
  }
  return lifted;
}

// A sampled subsystem together with its solved spin values.
struct SubsystemSolution {
  SubsystemSelection selection;
  SpinConfiguration config;
};

}  // namespace lssa
