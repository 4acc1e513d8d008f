#include "trustdyn/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustdyn {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

// log of a Gamma(shape, 1) variate. For shape < 1 uses
// Gamma(a) = Gamma(a + 1) * U^(1/a) so tiny shapes never underflow to 0.
double log_gamma_variate(double shape, Rng& rng) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = g(rng);
  double v = u(rng);
  while (v <= 0.0) v = u(rng);
  return std::log(x) + std::log(v) / shape;
}

}  // namespace

void ThetaParams::validate() const {
  if (!finite_positive(alpha0) || !finite_positive(beta0))
    throw std::invalid_argument("ThetaParams: alpha0 and beta0 must be finite and > 0");
  if (!std::isfinite(ws) || !std::isfinite(wf) || ws < 0.0 || wf < 0.0)
    throw std::invalid_argument("ThetaParams: ws and wf must be finite and >= 0");
}

void BetaState::validate() const {
  if (!finite_positive(alpha) || !finite_positive(beta))
    throw std::invalid_argument("BetaState: alpha and beta must be finite and > 0");
}

BetaState init_state(const ThetaParams& theta) { return {theta.alpha0, theta.beta0}; }

BetaState update_state(const BetaState& state, Outcome outcome, const ThetaParams& theta) {
  if (outcome == Outcome::success) return {state.alpha + theta.ws, state.beta};
  return {state.alpha, state.beta + theta.wf};
}

double predict_trust(const BetaState& state) { return state.alpha / (state.alpha + state.beta); }

std::vector<BetaState> state_trajectory(const ThetaParams& theta, std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("state_trajectory: empty outcome sequence");
  std::vector<BetaState> out;
  out.reserve(outcomes.size());
  BetaState s = init_state(theta);
  for (Outcome o : outcomes) {
    s = update_state(s, o, theta);
    out.push_back(s);
  }
  return out;
}

std::vector<double> trust_trajectory(const ThetaParams& theta, std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("trust_trajectory: empty outcome sequence");
  std::vector<double> out;
  out.reserve(outcomes.size());
  BetaState s = init_state(theta);
  for (Outcome o : outcomes) {
    s = update_state(s, o, theta);
    out.push_back(predict_trust(s));
  }
  return out;
}

double asymmetry_gap(const BetaState& state, const ThetaParams& theta) {
  const double d = state.alpha + state.beta;
  return (theta.ws * state.beta / (d + theta.ws) - theta.wf * state.alpha / (d + theta.wf)) / d;
}

bool failure_dominates(const BetaState& state, const ThetaParams& theta) {
  const double d = state.alpha + state.beta;
  const double cross = theta.ws * theta.wf;
  // alpha/beta > (ws*D + ws*wf)/(wf*D + ws*wf), cleared of denominators (all positive).
  return state.alpha * (theta.wf * d + cross) > state.beta * (theta.ws * d + cross);
}

double asymptotic_trust(const ThetaParams& theta, double reliability) {
  if (!(reliability >= 0.0 && reliability <= 1.0))
    throw std::domain_error("asymptotic_trust: reliability must lie in [0, 1]");
  if (!(theta.ws + theta.wf > 0.0)) throw std::domain_error("asymptotic_trust: ws + wf must be > 0");
  const double gain = reliability * theta.ws;
  const double loss = (1.0 - reliability) * theta.wf;
  if (gain == 0.0) return 0.0;
  return gain / (gain + loss);
}

double clamp_trust(double t) { return std::clamp(t, kTrustEpsilon, 1.0 - kTrustEpsilon); }

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double trust_log_density(double t, const BetaState& state) {
  const double x = clamp_trust(t);
  const double a = state.alpha;
  const double b = state.beta;
  return log_gamma(a + b) - log_gamma(a) - log_gamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double sample_trust(const BetaState& state, Rng& rng) {
  const double lx = log_gamma_variate(state.alpha, rng);
  const double ly = log_gamma_variate(state.beta, rng);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  return 1.0 / (1.0 + std::exp(ly - lx));
}

}  // namespace trustdyn
