#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustdyn/core_model.hpp"
#include "trustdyn/search.hpp"

namespace trustdyn {

/// One agent's robot outcomes and sparse trust reports.
struct AgentRecord {
  std::string agent_id;
  std::vector<Outcome> outcomes;
  /// Trial index (1-based) -> reported trust in [0, 1].
  std::map<std::size_t, double> reports;

  std::size_t n_trials() const { return outcomes.size(); }

  /// Throws std::invalid_argument if outcomes are empty, a report index falls
  /// outside [1, n] or a report value is outside [0, 1].
  void validate() const;

  /// True when every trial 1..n carries a report.
  bool dense() const;

  /// Copy keeping only reports at trials strictly before `trial`.
  AgentRecord reports_before(std::size_t trial) const;

  /// Copy keeping only reports whose trial index appears in `trials`.
  AgentRecord restricted_to(std::span<const std::size_t> trials) const;

  /// Copy keeping the first `n` trials and their reports.
  AgentRecord prefix(std::size_t n) const;
};

/// Bounds on every theta component during fitting.
inline constexpr double kThetaLower = 1e-3;
inline constexpr double kThetaUpper = 1e3;

/// True when all four components lie in [kThetaLower, kThetaUpper].
bool in_search_box(const ThetaParams& theta);

/// Log-space search coordinates <-> parameters.
std::array<double, 4> to_log(const ThetaParams& theta);
ThetaParams from_log(std::span<const double> x);

/// Gamma(shape, rate) marginal.
struct GammaMarginal {
  double shape = 1.0;
  double rate = 1.0;

  double log_density(double x) const;
  double mean() const { return shape / rate; }
  double median() const;
  /// (shape - 1) / rate when shape > 1, otherwise the median.
  double mode() const;

  friend bool operator==(const GammaMarginal&, const GammaMarginal&) = default;
};

/// Maximum-likelihood Gamma fit. The shape is capped so that the variance of
/// log X (trigamma(shape)) never drops below `log_variance_floor`.
/// Throws std::invalid_argument on fewer than 2 samples or non-positive values.
GammaMarginal fit_gamma_mle(std::span<const double> samples, double log_variance_floor = 1e-4);

/// Population prior: independent Gamma marginals over the theta components.
struct PriorModel {
  GammaMarginal alpha0;
  GammaMarginal beta0;
  GammaMarginal ws;
  GammaMarginal wf;

  /// Componentwise marginal modes, clamped into the search box.
  ThetaParams mode() const;
  ThetaParams mean() const;

  friend bool operator==(const PriorModel&, const PriorModel&) = default;
};

inline constexpr std::array<std::string_view, 4> kThetaComponentNames{"alpha0", "beta0", "ws", "wf"};

double prior_log_density(const PriorModel& prior, const ThetaParams& theta);

struct FitResult {
  ThetaParams theta;
  double objective = 0.0;
  int n_restarts_used = 0;
  bool converged = false;
  /// Trials whose reports entered the fit.
  std::vector<std::size_t> report_trials;
};

/// Sum of Beta log-densities of the reports along the theta trajectory.
/// Throws std::invalid_argument for a record without reports or theta outside
/// the search box.
double mle_objective(const ThetaParams& theta, const AgentRecord& record);

/// mle_objective + prior_log_density; with no reports this is the prior alone.
double map_objective(const ThetaParams& theta, const AgentRecord& record, const PriorModel& prior);

/// Per-agent maximum likelihood fit. Needs at least 4 reports.
FitResult fit_theta_mle(const AgentRecord& record, const SearchConfig& config);

/// Posterior-mode fit. With no reports returns the prior mode.
FitResult fit_theta_map(const AgentRecord& record, const PriorModel& prior, const SearchConfig& config);

/// Refit after a new report: fit_theta_map warm-started from current.theta in
/// addition to the standard starts. Throws std::invalid_argument when the record
/// holds no report beyond those in current.report_trials.
FitResult refit_on_report(const FitResult& current, const AgentRecord& record_with_new_report,
                          const PriorModel& prior, const SearchConfig& config);

/// Fit one Gamma marginal per component to per-agent parameter estimates.
PriorModel prior_from_thetas(std::span<const ThetaParams> thetas);

struct PriorLearningResult {
  PriorModel prior;
  /// One entry per input record; agents whose fit failed are absent.
  std::map<std::string, FitResult> fits;
  std::vector<std::string> skipped;
};

/// Fit every record by MLE and the prior to the resulting parameters. Failing
/// agents are skipped with a warning; fewer than 2 surviving fits is an error.
PriorLearningResult learn_prior_detailed(std::span<const AgentRecord> old_records, const SearchConfig& config);

PriorModel learn_prior(std::span<const AgentRecord> old_records, const SearchConfig& config);

}  // namespace trustdyn
