#include "trustdyn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trustdyn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double draw_component(const GammaMarginal& m, Rng& rng) {
  std::gamma_distribution<double> g(m.shape, 1.0 / m.rate);
  return std::clamp(g(rng), kThetaLower, kThetaUpper);
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::bayesian:
      return "bayesian";
    case Archetype::oscillator:
      return "oscillator";
    case Archetype::disbeliever:
      return "disbeliever";
  }
  return "unknown";
}

Archetype archetype_from_string(std::string_view name) {
  if (name == "bayesian") return Archetype::bayesian;
  if (name == "oscillator") return Archetype::oscillator;
  if (name == "disbeliever") return Archetype::disbeliever;
  throw std::invalid_argument("unknown archetype '" + std::string(name) + "'");
}

void PopulationSpec::validate() const {
  if (n_agents < 1) throw std::invalid_argument("population: n_agents must be >= 1");
  if (n_trials < 1) throw std::invalid_argument("population: n_trials must be >= 1");
  if (!(reliability >= 0.0 && reliability <= 1.0))
    throw std::invalid_argument("population: reliability must lie in [0, 1]");
  const double total = mix.bayesian + mix.oscillator + mix.disbeliever;
  if (mix.bayesian < 0 || mix.oscillator < 0 || mix.disbeliever < 0 || std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("population: archetype proportions must be non-negative and sum to 1");
  if (!(oscillator_amplitude > 0.0 && oscillator_amplitude <= 0.5))
    throw std::invalid_argument("population: oscillator amplitude must lie in (0, 0.5]");
  if (oscillator_period < 2) throw std::invalid_argument("population: oscillator period must be >= 2");
  if (!(disbeliever_level_min > 0.0 && disbeliever_level_min <= disbeliever_level_max &&
        disbeliever_level_max <= 0.15))
    throw std::invalid_argument("population: disbeliever levels must satisfy 0 < min <= max <= 0.15");
  if (!(disbeliever_jitter >= 0.0 && disbeliever_jitter <= 0.03))
    throw std::invalid_argument("population: disbeliever jitter must lie in [0, 0.03]");
  for (const ThetaParams& t : thetas) t.validate();
}

PriorModel default_generation_prior() {
  constexpr double shape = 4.0;
  auto m = [](double mean) { return GammaMarginal{shape, shape / mean}; };
  return {m(4.0), m(2.0), m(20.0), m(50.0)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ splitmix64(index); }

std::vector<Outcome> simulate_robot(double reliability, int n, std::uint64_t seed) {
  if (!(reliability >= 0.0 && reliability <= 1.0))
    throw std::invalid_argument("simulate_robot: reliability must lie in [0, 1]");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Outcome> out(static_cast<std::size_t>(std::max(n, 0)));
  for (Outcome& o : out) o = u(rng) < reliability ? Outcome::success : Outcome::failure;
  return out;
}

AgentRecord simulate_bayesian_agent(std::string agent_id, const ThetaParams& theta, std::vector<Outcome> outcomes,
                                    std::uint64_t seed) {
  theta.validate();
  Rng rng(seed);
  AgentRecord rec{std::move(agent_id), std::move(outcomes), {}};
  const auto states = state_trajectory(theta, rec.outcomes);
  for (std::size_t i = 0; i < states.size(); ++i) rec.reports.emplace(i + 1, sample_trust(states[i], rng));
  return rec;
}

AgentRecord simulate_oscillator_agent(std::string agent_id, const ThetaParams& base_theta,
                                      std::vector<Outcome> outcomes, double amplitude, int period,
                                      std::uint64_t seed) {
  if (!(amplitude > 0.0 && amplitude <= 0.5)) throw std::invalid_argument("oscillator: amplitude must lie in (0, 0.5]");
  if (period < 2) throw std::invalid_argument("oscillator: period must be >= 2");
  base_theta.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const double phase = u(rng);
  AgentRecord rec{std::move(agent_id), std::move(outcomes), {}};
  const auto states = state_trajectory(base_theta, rec.outcomes);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double wave = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i + 1) / period + phase);
    rec.reports.emplace(i + 1, clamp_trust(sample_trust(states[i], rng) + wave));
  }
  return rec;
}

AgentRecord simulate_disbeliever_agent(std::string agent_id, double level, std::vector<Outcome> outcomes,
                                       std::uint64_t seed, double jitter) {
  if (!(level > 0.0 && level <= 0.15)) throw std::invalid_argument("disbeliever: level must lie in (0, 0.15]");
  if (!(jitter >= 0.0 && jitter <= 0.03)) throw std::invalid_argument("disbeliever: jitter must lie in [0, 0.03]");
  if (outcomes.empty()) throw std::invalid_argument("disbeliever: no outcomes");
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  AgentRecord rec{std::move(agent_id), std::move(outcomes), {}};
  for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
    const double z = noise(rng);
    rec.reports.emplace(i + 1, clamp_trust(level + jitter * z));
  }
  return rec;
}

std::string agent_name(int index, int n_agents) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(n_agents).size()));
  std::string num = std::to_string(index);
  if (static_cast<int>(num.size()) < width) num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
  return "agent_" + num;
}

GeneratedPopulation generate_population(const PopulationSpec& spec) {
  spec.validate();
  GeneratedPopulation pop;
  pop.records.reserve(static_cast<std::size_t>(spec.n_agents));
  pop.labels.reserve(static_cast<std::size_t>(spec.n_agents));

  for (int i = 0; i < spec.n_agents; ++i) {
    // Every agent draws from its own stream so agents are independent of
    // generation order.
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> u(0.0, 1.0);

    const double pick = u(rng);
    Archetype kind = Archetype::disbeliever;
    if (pick < spec.mix.bayesian)
      kind = Archetype::bayesian;
    else if (pick < spec.mix.bayesian + spec.mix.oscillator)
      kind = Archetype::oscillator;
    // Guard against rounding when the last non-zero proportion is not disbeliever.
    if (kind == Archetype::disbeliever && spec.mix.disbeliever == 0.0)
      kind = spec.mix.oscillator > 0.0 ? Archetype::oscillator : Archetype::bayesian;

    ThetaParams theta;
    if (!spec.thetas.empty()) {
      theta = spec.thetas[static_cast<std::size_t>(i) % spec.thetas.size()];
    } else {
      theta = {draw_component(spec.theta_prior.alpha0, rng), draw_component(spec.theta_prior.beta0, rng),
               draw_component(spec.theta_prior.ws, rng), draw_component(spec.theta_prior.wf, rng)};
    }
    const double level = spec.disbeliever_level_min + (spec.disbeliever_level_max - spec.disbeliever_level_min) * u(rng);
    const std::uint64_t outcome_seed = rng();
    const std::uint64_t report_seed = rng();

    std::string id = agent_name(i + 1, spec.n_agents);
    auto outcomes = simulate_robot(spec.reliability, spec.n_trials, outcome_seed);
    AgentLabel label{id, kind, theta};
    switch (kind) {
      case Archetype::bayesian:
        pop.records.push_back(simulate_bayesian_agent(id, theta, std::move(outcomes), report_seed));
        break;
      case Archetype::oscillator:
        pop.records.push_back(simulate_oscillator_agent(id, theta, std::move(outcomes), spec.oscillator_amplitude,
                                                        spec.oscillator_period, report_seed));
        break;
      case Archetype::disbeliever:
        pop.records.push_back(
            simulate_disbeliever_agent(id, level, std::move(outcomes), report_seed, spec.disbeliever_jitter));
        label.theta.reset();
        break;
    }
    pop.labels.push_back(std::move(label));
  }
  return pop;
}

}  // namespace trustdyn
