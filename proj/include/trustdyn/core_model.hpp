#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace trustdyn {

/// Clamp applied to reported trust before taking logs. Shared repo-wide.
inline constexpr double kTrustEpsilon = 1e-3;

/// Robot task outcome on a single trial.
enum class Outcome : std::uint8_t { failure = 0, success = 1 };

/// Per-agent trust dynamics parameters.
///
/// alpha0/beta0 are the initial positive/negative experience masses; ws and wf
/// are the masses added on each robot success and failure respectively.
struct ThetaParams {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double ws = 1.0;
  double wf = 1.0;

  /// Initial masses must be positive; gains may be zero (a degenerate but
  /// well-defined model). Throws std::invalid_argument otherwise.
  void validate() const;

  friend bool operator==(const ThetaParams&, const ThetaParams&) = default;
};

/// Parameters of the Beta distribution over the current trust.
struct BetaState {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;

  friend bool operator==(const BetaState&, const BetaState&) = default;
};

BetaState init_state(const ThetaParams& theta);

/// One step of the experience update: a success adds ws to alpha, a failure
/// adds wf to beta.
BetaState update_state(const BetaState& state, Outcome outcome, const ThetaParams& theta);

/// Expected trust, alpha / (alpha + beta).
double predict_trust(const BetaState& state);

/// States after each outcome, starting from init_state(theta). Element i is the
/// state after outcomes[0..i]. Throws on empty input.
std::vector<BetaState> state_trajectory(const ThetaParams& theta, std::span<const Outcome> outcomes);

/// Predicted trust after each outcome. Throws std::invalid_argument on empty
/// input.
std::vector<double> trust_trajectory(const ThetaParams& theta, std::span<const Outcome> outcomes);

/// Difference between the trust rise caused by a success and the trust drop
/// caused by a failure, both taken from `state`. Negative means a failure moves
/// trust more than a success does.
double asymmetry_gap(const BetaState& state, const ThetaParams& theta);

/// Exact test of the region in which a failure changes trust more than a
/// success: alpha/beta > (ws*D + ws*wf) / (wf*D + ws*wf), D = alpha + beta.
bool failure_dominates(const BetaState& state, const ThetaParams& theta);

/// Limit of the predicted trust under a robot of constant reliability.
/// Throws std::domain_error if reliability is outside [0, 1] or ws + wf == 0.
double asymptotic_trust(const ThetaParams& theta, double reliability);

/// Clamp a trust report into [kTrustEpsilon, 1 - kTrustEpsilon].
double clamp_trust(double t);

/// Log of the Beta(alpha, beta) density at t, evaluated in log space. t is
/// clamped first so the result is always finite.
double trust_log_density(double t, const BetaState& state);

/// log Gamma, safe to call concurrently.
double log_gamma(double x);

/// Random engine used throughout. All draws flow from explicit seeds.
using Rng = std::mt19937_64;

/// Draw from Beta(alpha, beta) via two Gamma variates.
double sample_trust(const BetaState& state, Rng& rng);

}  // namespace trustdyn
