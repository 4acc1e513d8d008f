#include "trustdyn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace trustdyn {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

// Values arrive in agent_id order, so the reduction is deterministic.
Moments moments(const std::map<std::string, double>& values) {
  Moments m;
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const auto& [_, v] : values) sum += v;
  m.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const auto& [_, v] : values) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / (n - 1.0));
    m.se = m.sd / std::sqrt(n);
  }
  return m;
}

std::size_t common_length(std::span<const AgentRecord> dataset) {
  if (dataset.empty()) throw std::invalid_argument("dataset is empty");
  const std::size_t n = dataset.front().n_trials();
  for (const AgentRecord& r : dataset)
    if (r.n_trials() != n) throw std::invalid_argument("all agents must have the same number of trials");
  return n;
}

std::vector<double> dense_truth(const AgentRecord& record) {
  if (!record.dense())
    throw std::invalid_argument("agent '" + record.agent_id + "': scoring requires a report at every trial");
  std::vector<double> truth;
  truth.reserve(record.n_trials());
  for (const auto& [_, v] : record.reports) truth.push_back(v);
  return truth;
}

}  // namespace

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::proposed:
      return "proposed";
    case ModelTag::armav:
      return "armav";
    case ModelTag::optimo:
      return "optimo";
  }
  return "unknown";
}

ModelTag model_tag_from_string(std::string_view name) {
  if (name == "proposed") return ModelTag::proposed;
  if (name == "armav") return ModelTag::armav;
  if (name == "optimo") return ModelTag::optimo;
  throw std::invalid_argument("unknown model tag '" + std::string(name) + "'");
}

double rmse_agent(std::span<const double> truth, std::span<const double> predicted, std::size_t l) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("rmse_agent: length mismatch");
  if (truth.size() <= l) throw std::invalid_argument("rmse_agent: need more trials than the training length");
  double ss = 0.0;
  for (std::size_t i = l; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(truth.size() - l));
}

ProposedTrace predict_proposed(const AgentRecord& record, const PriorModel& prior, const ReportSchedule& schedule,
                               const SearchConfig& search) {
  record.validate();
  const std::size_t n = record.n_trials();
  ProposedTrace tr;
  tr.predicted.reserve(n);
  tr.states.reserve(n);
  tr.thetas.reserve(n);

  // Only scheduled reports are ever visible to the model.
  const AgentRecord visible = record.restricted_to(schedule.trials);
  FitResult fit = fit_theta_map(visible.reports_before(1), prior, search);
  double successes = 0.0, failures = 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    if (m > 1 && visible.reports.contains(m - 1)) {
      fit = refit_on_report(fit, visible.reports_before(m), prior, search);
      ++tr.refits;
    }
    if (record.outcomes[m - 1] == Outcome::success)
      successes += 1.0;
    else
      failures += 1.0;
    const ThetaParams& th = fit.theta;
    const BetaState s{th.alpha0 + successes * th.ws, th.beta0 + failures * th.wf};
    tr.states.push_back(s);
    tr.thetas.push_back(th);
    tr.predicted.push_back(predict_trust(s));
  }
  return tr;
}

AgentEval run_agent_eval(const AgentRecord& record, const PriorModel& prior, const EvalConfig& config,
                         ModelTag tag, const SearchConfig& search) {
  config.validate();
  record.validate();
  if (record.n_trials() != config.total_trials)
    throw std::invalid_argument("agent '" + record.agent_id + "': trial count differs from the evaluation config");
  const std::vector<double> truth = dense_truth(record);
  const ReportSchedule schedule = build_schedule(config);

  AgentEval out;
  switch (tag) {
    case ModelTag::proposed:
      out.predictions = predict_proposed(record, prior, schedule, search).predicted;
      break;
    case ModelTag::armav:
      out.predictions = predict_armav(fit_armav(record.prefix(config.training_len)), record, schedule);
      break;
    case ModelTag::optimo:
      out.predictions = predict_optimo(fit_optimo(record.prefix(config.training_len), search), record, schedule);
      break;
  }
  out.rmse = rmse_agent(truth, out.predictions, config.training_len);
  return out;
}

void finalize_report(RmseReport& report) {
  const Moments m = moments(report.per_agent);
  report.mean = m.mean;
  report.sd = m.sd;
  report.se = m.se;
}

PriorModel PopulationFits::prior_excluding(const std::string& held_out) const {
  std::vector<ThetaParams> others;
  for (const auto& [id, theta] : thetas)
    if (id != held_out && theta) others.push_back(*theta);
  if (others.size() < 2) throw std::runtime_error("fewer than 2 fitted agents available for the prior");
  return prior_from_thetas(others);
}

PopulationFits fit_population(std::span<const AgentRecord> dataset, const SearchConfig& search) {
  PopulationFits fits;
  for (const AgentRecord& r : dataset) {
    if (fits.thetas.contains(r.agent_id)) throw std::invalid_argument("duplicate agent_id '" + r.agent_id + "'");
    try {
      fits.thetas.emplace(r.agent_id, fit_theta_mle(r, search).theta);
    } catch (const std::exception& e) {
      std::cerr << "warning: MLE fit failed for agent '" << r.agent_id << "': " << e.what() << '\n';
      fits.thetas.emplace(r.agent_id, std::nullopt);
    }
  }
  return fits;
}

RmseReport leave_one_out(std::span<const AgentRecord> dataset, const EvalConfig& config, ModelTag tag,
                         const SearchConfig& search) {
  if (dataset.size() < 3) throw std::invalid_argument("leave_one_out: need at least 3 agents");
  PopulationFits fits;
  if (tag == ModelTag::proposed) fits = fit_population(dataset, search);
  return leave_one_out(dataset, fits, config, tag, search);
}

RmseReport leave_one_out(std::span<const AgentRecord> dataset, const PopulationFits& fits, const EvalConfig& config,
                         ModelTag tag, const SearchConfig& search) {
  if (dataset.size() < 3) throw std::invalid_argument("leave_one_out: need at least 3 agents");
  config.validate();
  RmseReport report;
  report.model_tag = std::string(to_string(tag));
  for (const AgentRecord& r : dataset) {
    try {
      const PriorModel prior = tag == ModelTag::proposed ? fits.prior_excluding(r.agent_id) : PriorModel{};
      report.per_agent[r.agent_id] = run_agent_eval(r, prior, config, tag, search).rmse;
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << "warning: " << to_string(tag) << " evaluation failed for agent '" << r.agent_id
                << "': " << e.what() << '\n';
      report.failed.push_back(r.agent_id);
    }
  }
  if (report.per_agent.empty()) throw std::runtime_error("leave_one_out: no agent could be evaluated");
  std::sort(report.failed.begin(), report.failed.end());
  finalize_report(report);
  return report;
}

Comparison compare_models(std::span<const AgentRecord> dataset, const EvalConfig& config,
                          std::span<const ModelTag> tags, const SearchConfig& search) {
  if (tags.size() < 2) throw std::invalid_argument("compare_models: need at least 2 model tags");
  if (dataset.size() < 3) throw std::invalid_argument("compare_models: need at least 3 agents");
  const bool has_proposed = std::find(tags.begin(), tags.end(), ModelTag::proposed) != tags.end();
  PopulationFits fits;
  if (has_proposed) fits = fit_population(dataset, search);

  Comparison out;
  for (ModelTag t : tags) out.reports.push_back(leave_one_out(dataset, fits, config, t, search));
  if (!has_proposed) return out;

  const auto proposed_it = std::find_if(out.reports.begin(), out.reports.end(),
                                        [](const RmseReport& r) { return r.model_tag == "proposed"; });
  for (const RmseReport& r : out.reports) {
    if (r.model_tag == "proposed") continue;
    PairedDifference d;
    d.baseline = r.model_tag;
    for (const auto& [id, v] : proposed_it->per_agent)
      if (auto it = r.per_agent.find(id); it != r.per_agent.end()) d.per_agent[id] = v - it->second;
    const Moments m = moments(d.per_agent);
    d.mean = m.mean;
    d.sd = m.sd;
    d.se = m.se;
    out.differences.push_back(std::move(d));
  }
  return out;
}

std::vector<SweepRow> sweep_report_gap(std::span<const AgentRecord> dataset, std::size_t training_len,
                                       std::span<const std::size_t> gaps, const SearchConfig& search) {
  if (gaps.empty()) throw std::invalid_argument("sweep_report_gap: no gaps given");
  if (dataset.size() < 3) throw std::invalid_argument("sweep_report_gap: need at least 3 agents");
  return sweep_report_gap(dataset, fit_population(dataset, search), training_len, gaps, search);
}

std::vector<SweepRow> sweep_report_gap(std::span<const AgentRecord> dataset, const PopulationFits& fits,
                                       std::size_t training_len, std::span<const std::size_t> gaps,
                                       const SearchConfig& search) {
  if (gaps.empty()) throw std::invalid_argument("sweep_report_gap: no gaps given");
  const std::size_t n = common_length(dataset);
  std::vector<std::size_t> sorted(gaps.begin(), gaps.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  for (std::size_t q : sorted) {
    const EvalConfig cfg{training_len, q, n};
    cfg.validate();
    const RmseReport r = leave_one_out(dataset, fits, cfg, ModelTag::proposed, search);
    rows.push_back({"report_gap", q, r.mean, r.sd, r.se, r.per_agent.size()});
  }
  return rows;
}

std::vector<SweepRow> sweep_training_duration(std::span<const AgentRecord> dataset, std::size_t report_gap,
                                              std::span<const std::size_t> durations, const SearchConfig& search) {
  if (durations.empty()) throw std::invalid_argument("sweep_training_duration: no durations given");
  if (dataset.size() < 3) throw std::invalid_argument("sweep_training_duration: need at least 3 agents");
  const std::size_t n = common_length(dataset);
  for (std::size_t l : durations)
    if (l < 1 || l >= n) throw std::invalid_argument("sweep_training_duration: durations must lie in [1, n)");
  return sweep_training_duration(dataset, fit_population(dataset, search), report_gap, durations, search);
}

std::vector<SweepRow> sweep_training_duration(std::span<const AgentRecord> dataset, const PopulationFits& fits,
                                              std::size_t report_gap, std::span<const std::size_t> durations,
                                              const SearchConfig& search) {
  if (durations.empty()) throw std::invalid_argument("sweep_training_duration: no durations given");
  const std::size_t n = common_length(dataset);
  std::vector<std::size_t> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  for (std::size_t l : sorted) {
    const EvalConfig cfg{l, report_gap, n};
    cfg.validate();
    const RmseReport r = leave_one_out(dataset, fits, cfg, ModelTag::proposed, search);
    rows.push_back({"training_len", l, r.mean, r.sd, r.se, r.per_agent.size()});
  }
  return rows;
}

}  // namespace trustdyn
