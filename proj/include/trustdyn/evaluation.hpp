#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustdyn/baselines.hpp"
#include "trustdyn/inference.hpp"
#include "trustdyn/schedule.hpp"
#include "trustdyn/search.hpp"

namespace trustdyn {

enum class ModelTag { proposed, armav, optimo };

std::string_view to_string(ModelTag tag);
/// Throws std::invalid_argument for an unknown tag.
ModelTag model_tag_from_string(std::string_view name);

/// Root mean squared error over trials l+1..n (1-based).
/// Throws std::invalid_argument on length mismatch or n <= l.
double rmse_agent(std::span<const double> truth, std::span<const double> predicted, std::size_t l);

/// Per-trial output of the proposed model under a report schedule.
struct ProposedTrace {
  std::vector<double> predicted;
  std::vector<BetaState> states;
  /// Parameters in force at each trial.
  std::vector<ThetaParams> thetas;
  int refits = 0;
};

/// Run the proposed model online: before trial m it holds the MAP fit on the
/// scheduled reports at trials < m, refitting whenever a new one arrives, and
/// predicts the mean of the state after outcomes 1..m.
ProposedTrace predict_proposed(const AgentRecord& record, const PriorModel& prior, const ReportSchedule& schedule,
                               const SearchConfig& search);

struct AgentEval {
  std::vector<double> predictions;
  double rmse = 0.0;
};

/// Simulate the protocol on one agent and score trials l+1..n against the full
/// report sequence. The record must carry a report at every trial; its length
/// must equal config.total_trials. `prior` is used only by the proposed model.
AgentEval run_agent_eval(const AgentRecord& record, const PriorModel& prior, const EvalConfig& config,
                         ModelTag tag, const SearchConfig& search);

struct RmseReport {
  std::string model_tag;
  /// Agents whose evaluation failed are absent here and listed in `failed`.
  std::map<std::string, double> per_agent;
  std::vector<std::string> failed;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single agent.
  double sd = 0.0;
  /// sd / sqrt(n).
  double se = 0.0;
};

/// Fill mean/sd/se from per_agent, reducing in agent_id order.
void finalize_report(RmseReport& report);

/// MLE fits of every agent's full history. A fit depends only on the agent's own
/// record, so the prior for any held-out agent is the Gamma fit to the other
/// entries; one cache serves every fold, model and sweep point.
struct PopulationFits {
  std::map<std::string, std::optional<ThetaParams>> thetas;

  /// Prior learned from every agent except `held_out`. Throws std::runtime_error
  /// if fewer than 2 other agents were fitted.
  PriorModel prior_excluding(const std::string& held_out) const;
};

PopulationFits fit_population(std::span<const AgentRecord> dataset, const SearchConfig& search);

/// Leave-one-out evaluation. Throws std::invalid_argument on fewer than 3
/// agents and std::runtime_error when no agent could be evaluated.
RmseReport leave_one_out(std::span<const AgentRecord> dataset, const EvalConfig& config, ModelTag tag,
                         const SearchConfig& search);
RmseReport leave_one_out(std::span<const AgentRecord> dataset, const PopulationFits& fits, const EvalConfig& config,
                         ModelTag tag, const SearchConfig& search);

struct PairedDifference {
  std::string baseline;
  /// Per-agent rmse(proposed) - rmse(baseline), over agents scored by both.
  std::map<std::string, double> per_agent;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

struct Comparison {
  std::vector<RmseReport> reports;
  /// Empty unless the proposed model is among the tags.
  std::vector<PairedDifference> differences;
};

/// Leave-one-out for each tag plus paired differences against the proposed model.
/// Throws std::invalid_argument on fewer than 2 tags.
Comparison compare_models(std::span<const AgentRecord> dataset, const EvalConfig& config,
                          std::span<const ModelTag> tags, const SearchConfig& search);

struct SweepRow {
  std::string param_name;
  std::size_t param_value = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  std::size_t n_agents = 0;
};

/// Proposed-model leave-one-out at fixed l for each report gap q.
std::vector<SweepRow> sweep_report_gap(std::span<const AgentRecord> dataset, std::size_t training_len,
                                       std::span<const std::size_t> gaps, const SearchConfig& search);
std::vector<SweepRow> sweep_report_gap(std::span<const AgentRecord> dataset, const PopulationFits& fits,
                                       std::size_t training_len, std::span<const std::size_t> gaps,
                                       const SearchConfig& search);

/// Proposed-model leave-one-out at fixed q for each training duration l.
std::vector<SweepRow> sweep_training_duration(std::span<const AgentRecord> dataset, std::size_t report_gap,
                                              std::span<const std::size_t> durations, const SearchConfig& search);
std::vector<SweepRow> sweep_training_duration(std::span<const AgentRecord> dataset, const PopulationFits& fits,
                                              std::size_t report_gap, std::span<const std::size_t> durations,
                                              const SearchConfig& search);

}  // namespace trustdyn
