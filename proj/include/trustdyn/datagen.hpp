#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustdyn/core_model.hpp"
#include "trustdyn/inference.hpp"

namespace trustdyn {

enum class Archetype { bayesian, oscillator, disbeliever };

std::string_view to_string(Archetype a);
/// Throws std::invalid_argument for an unknown name.
Archetype archetype_from_string(std::string_view name);

/// Proportions of each archetype in a generated population.
struct ArchetypeMix {
  double bayesian = 1.0;
  double oscillator = 0.0;
  double disbeliever = 0.0;
};

/// Gamma marginals with shape 4 and means (alpha0, beta0, ws, wf) = (4, 2, 20, 50).
PriorModel default_generation_prior();

struct PopulationSpec {
  int n_agents = 39;
  int n_trials = 100;
  double reliability = 0.8;
  /// Used when `thetas` is empty.
  PriorModel theta_prior = default_generation_prior();
  /// Explicit per-agent parameters, cycled over agents when non-empty.
  std::vector<ThetaParams> thetas;
  ArchetypeMix mix;
  std::uint64_t seed = 0;

  double oscillator_amplitude = 0.25;
  int oscillator_period = 12;
  double disbeliever_level_min = 0.02;
  double disbeliever_level_max = 0.12;
  double disbeliever_jitter = 0.02;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Seed for agent `index`: seed XOR splitmix64(index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// n independent Bernoulli(r) trials.
std::vector<Outcome> simulate_robot(double reliability, int n, std::uint64_t seed);

/// Dense reports drawn from Beta(alpha_i, beta_i) along the update trajectory.
AgentRecord simulate_bayesian_agent(std::string agent_id, const ThetaParams& theta, std::vector<Outcome> outcomes,
                                    std::uint64_t seed);

/// Bayesian reports plus a sinusoid of the given amplitude and period (phase
/// drawn from the seed), clamped to [eps, 1 - eps].
AgentRecord simulate_oscillator_agent(std::string agent_id, const ThetaParams& base_theta,
                                      std::vector<Outcome> outcomes, double amplitude, int period,
                                      std::uint64_t seed);

/// Reports drawn i.i.d. around `level` with Gaussian jitter, ignoring outcomes.
AgentRecord simulate_disbeliever_agent(std::string agent_id, double level, std::vector<Outcome> outcomes,
                                       std::uint64_t seed, double jitter = 0.02);

/// Generator-side truth for one agent. Never part of the model inputs.
struct AgentLabel {
  std::string agent_id;
  Archetype archetype = Archetype::bayesian;
  /// Generating parameters; absent for disbelievers.
  std::optional<ThetaParams> theta;
};

struct GeneratedPopulation {
  std::vector<AgentRecord> records;
  std::vector<AgentLabel> labels;
};

/// Zero-padded agent identifier so that lexicographic order matches numeric order.
std::string agent_name(int index, int n_agents);

GeneratedPopulation generate_population(const PopulationSpec& spec);

}  // namespace trustdyn
