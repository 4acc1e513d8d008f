#include "trustdyn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace trustdyn {

namespace {

double as_double(Outcome o) { return o == Outcome::success ? 1.0 : 0.0; }

// Length of the run of reported trials starting at trial 1.
std::size_t dense_prefix_len(const AgentRecord& r) {
  std::size_t len = 0;
  while (len < r.n_trials() && r.reports.contains(len + 1)) ++len;
  return len;
}

ReportSchedule all_trials(std::size_t n) {
  ReportSchedule s;
  for (std::size_t i = 1; i <= n; ++i) s.trials.push_back(i);
  return s;
}

// Search coordinates for the Optimo fit.
enum OptimoParam { kTransition, kGainS, kGainF, kLogQ, kLogR, kInitMean, kLogP0, kOptimoDim };

OptimoModel optimo_from(std::span<const double> x) {
  return {x[kTransition], x[kGainS], x[kGainF], std::exp(x[kLogQ]), std::exp(x[kLogR]), x[kInitMean],
          std::exp(x[kLogP0])};
}

}  // namespace

ArmavModel fit_armav(const AgentRecord& training) {
  training.validate();
  const std::size_t len = dense_prefix_len(training);
  if (len < 5) throw std::invalid_argument("fit_armav: need at least 5 consecutive reported trials");

  const Eigen::Index rows = static_cast<Eigen::Index>(len - 1);
  Eigen::MatrixXd x(rows, 4);
  Eigen::VectorXd y(rows);
  for (std::size_t i = 2; i <= len; ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i - 2);
    x(r, 0) = training.reports.at(i - 1);
    x(r, 1) = as_double(training.outcomes[i - 1]);
    x(r, 2) = as_double(training.outcomes[i - 2]);
    x(r, 3) = 1.0;
    y(r) = training.reports.at(i);
  }

  Eigen::Vector4d coef;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == 4) {
    coef = qr.solve(y);
  } else {
    const Eigen::Matrix4d gram = x.transpose() * x + kArmavRidge * Eigen::Matrix4d::Identity();
    coef = gram.ldlt().solve(x.transpose() * y);
  }
  return {coef(0), coef(1), coef(2), coef(3), 0.5};
}

std::vector<double> armav_rollout(const ArmavModel& model, double t0, const std::vector<Outcome>& outcomes) {
  AgentRecord r{"", outcomes, {}};
  ArmavModel m = model;
  m.initial_trust = t0;
  return predict_armav(m, r, ReportSchedule{});
}

std::vector<double> predict_armav(const ArmavModel& model, const AgentRecord& record,
                                  const ReportSchedule& schedule) {
  std::vector<double> out;
  out.reserve(record.n_trials());
  double prev_trust = model.initial_trust;
  double prev_outcome = 0.0;
  for (std::size_t i = 1; i <= record.n_trials(); ++i) {
    if (i > 1 && schedule.contains(i - 1)) {
      if (auto it = record.reports.find(i - 1); it != record.reports.end()) prev_trust = it->second;
    }
    const double p = as_double(record.outcomes[i - 1]);
    const double raw = model.a1 * prev_trust + model.b0 * p + model.b1 * prev_outcome + model.c;
    const double pred = std::clamp(raw, 0.0, 1.0);
    out.push_back(pred);
    prev_trust = pred;
    prev_outcome = p;
  }
  return out;
}

void OptimoModel::validate() const {
  for (double v : {transition, gain_success, gain_failure, initial_mean})
    if (!std::isfinite(v)) throw std::invalid_argument("OptimoModel: non-finite parameter");
  for (double v : {process_var, observation_var, initial_var})
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("OptimoModel: variances must be positive");
}

OptimoTrace optimo_filter(const OptimoModel& model, const AgentRecord& record, const ReportSchedule& schedule) {
  const std::size_t n = record.n_trials();
  OptimoTrace tr;
  tr.prior_mean.reserve(n);
  tr.prior_var.reserve(n);
  tr.posterior_mean.reserve(n);
  tr.posterior_var.reserve(n);
  double mean = model.initial_mean;
  double var = model.initial_var;
  for (std::size_t i = 1; i <= n; ++i) {
    const bool success = record.outcomes[i - 1] == Outcome::success;
    mean = model.transition * mean + (success ? model.gain_success : model.gain_failure);
    var = model.transition * model.transition * var + model.process_var;
    tr.prior_mean.push_back(mean);
    tr.prior_var.push_back(var);
    if (schedule.contains(i)) {
      if (auto it = record.reports.find(i); it != record.reports.end()) {
        const double innovation = it->second - mean;
        const double s = var + model.observation_var;
        const double gain = var / s;
        tr.log_likelihood += -0.5 * (std::log(2.0 * std::numbers::pi * s) + innovation * innovation / s);
        mean += gain * innovation;
        var *= (1.0 - gain);
      }
    }
    tr.posterior_mean.push_back(mean);
    tr.posterior_var.push_back(var);
  }
  return tr;
}

OptimoModel fit_optimo(const AgentRecord& training, const SearchConfig& config) {
  training.validate();
  const std::size_t len = dense_prefix_len(training);
  if (len < 5) throw std::invalid_argument("fit_optimo: need at least 5 reported trials");
  const AgentRecord data = training.prefix(len);
  const ReportSchedule schedule = all_trials(len);

  const Box box{{-1.0, -1.0, -1.0, std::log(1e-8), std::log(1e-8), 0.0, std::log(1e-6)},
                {1.5, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0}};
  const Objective f = [&](std::span<const double> x) {
    return optimo_filter(optimo_from(x), data, schedule).log_likelihood;
  };
  const std::vector<std::vector<double>> anchors{
      {1.0, 0.0, 0.0, std::log(1e-3), std::log(1e-2), data.reports.at(1), std::log(1e-2)},
      {0.0, data.reports.at(1), data.reports.at(1), std::log(1e-3), std::log(1e-2), data.reports.at(1),
       std::log(1e-2)},
  };
  SearchConfig cfg = config;
  // Keep the floor grid at roughly the size used for the 4-parameter fits.
  int per_axis = config.grid_points;
  while (per_axis > 1 && std::pow(static_cast<double>(per_axis), static_cast<double>(kOptimoDim)) > 4096.0) --per_axis;
  cfg.grid_points = per_axis;
  const SearchResult r = multi_start_maximize(f, box, anchors, cfg);
  return optimo_from(r.x);
}

std::vector<double> predict_optimo(const OptimoModel& model, const AgentRecord& record,
                                   const ReportSchedule& schedule) {
  std::vector<double> out = optimo_filter(model, record, schedule).prior_mean;
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace trustdyn
