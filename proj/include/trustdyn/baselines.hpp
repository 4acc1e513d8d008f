#pragma once

#include <vector>

#include "trustdyn/inference.hpp"
#include "trustdyn/schedule.hpp"
#include "trustdyn/search.hpp"

namespace trustdyn {

/// First-order autoregression on trust with current and lagged performance:
///   t_i = a1 * t_{i-1} + b0 * p_i + b1 * p_{i-1} + c
struct ArmavModel {
  double a1 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double c = 0.0;
  /// Trust assumed before the first trial.
  double initial_trust = 0.5;
};

/// Ridge penalty used when the least-squares design matrix is rank deficient.
inline constexpr double kArmavRidge = 1e-6;

/// OLS fit of the one-step difference equation on a dense training record.
/// Needs at least 5 consecutive reported trials.
ArmavModel fit_armav(const AgentRecord& training);

/// Run the difference equation from `t0`, feeding back its own predictions.
/// Emitted values are clamped to [0, 1].
std::vector<double> armav_rollout(const ArmavModel& model, double t0, const std::vector<Outcome>& outcomes);

/// One-step predictions for every trial. The previous trust is the report at
/// trial i-1 when that trial is scheduled, else the previous prediction.
/// Only reports at scheduled trials are read.
std::vector<double> predict_armav(const ArmavModel& model, const AgentRecord& record,
                                  const ReportSchedule& schedule);

/// Scalar linear-Gaussian state-space model of trust:
///   x_i = transition * x_{i-1} + (p_i ? gain_success : gain_failure) + N(0, process_var)
///   y_i = x_i + N(0, observation_var)
struct OptimoModel {
  double transition = 1.0;
  double gain_success = 0.0;
  double gain_failure = 0.0;
  double process_var = 1e-3;
  double observation_var = 1e-2;
  double initial_mean = 0.5;
  double initial_var = 0.1;

  /// Throws std::invalid_argument if a variance is not positive or a field is non-finite.
  void validate() const;
};

struct OptimoTrace {
  /// Predicted mean and variance for each trial, before that trial's report.
  std::vector<double> prior_mean;
  std::vector<double> prior_var;
  /// After the measurement update (equal to the prior when no report is used).
  std::vector<double> posterior_mean;
  std::vector<double> posterior_var;
  /// Gaussian log-likelihood of the reports that were used.
  double log_likelihood = 0.0;
};

/// Kalman filter over the record. Measurement updates happen only at trials in
/// `schedule` that carry a report.
OptimoTrace optimo_filter(const OptimoModel& model, const AgentRecord& record, const ReportSchedule& schedule);

/// Fit by maximizing the filtering likelihood of a dense training record with
/// the multi-start simplex search. Needs at least 5 reported trials.
OptimoModel fit_optimo(const AgentRecord& training, const SearchConfig& config);

/// Predicted trust for every trial (prior mean before the trial's report),
/// clamped to [0, 1].
std::vector<double> predict_optimo(const OptimoModel& model, const AgentRecord& record,
                                   const ReportSchedule& schedule);

}  // namespace trustdyn
