#include "trustdyn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace trustdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Report data reduced to what the likelihood needs: success/failure counts up
// to the reported trial and the logs of the clamped report.
struct ReportTerm {
  double successes;
  double failures;
  double log_t;
  double log_1mt;
};

std::vector<ReportTerm> report_terms(const AgentRecord& record) {
  std::vector<ReportTerm> terms;
  terms.reserve(record.reports.size());
  double s = 0.0, f = 0.0;
  std::size_t trial = 0;
  for (const auto& [idx, value] : record.reports) {
    while (trial < idx) {
      if (record.outcomes[trial] == Outcome::success)
        s += 1.0;
      else
        f += 1.0;
      ++trial;
    }
    const double t = clamp_trust(value);
    terms.push_back({s, f, std::log(t), std::log1p(-t)});
  }
  return terms;
}

double log_likelihood(const ThetaParams& theta, std::span<const ReportTerm> terms) {
  double sum = 0.0;
  for (const ReportTerm& r : terms) {
    const double a = theta.alpha0 + r.successes * theta.ws;
    const double b = theta.beta0 + r.failures * theta.wf;
    sum += log_gamma(a + b) - log_gamma(a) - log_gamma(b) + (a - 1.0) * r.log_t + (b - 1.0) * r.log_1mt;
  }
  return sum;
}

Box log_box() {
  const double lo = std::log(kThetaLower);
  const double hi = std::log(kThetaUpper);
  return Box{{lo, lo, lo, lo}, {hi, hi, hi, hi}};
}

std::vector<double> as_vector(const ThetaParams& theta) {
  const auto a = to_log(theta);
  return {a.begin(), a.end()};
}

FitResult to_fit_result(const SearchResult& r, const AgentRecord& record) {
  FitResult out;
  out.theta = from_log(r.x);
  out.objective = r.value;
  out.n_restarts_used = r.restarts_used;
  out.converged = r.converged;
  for (const auto& [idx, _] : record.reports) out.report_trials.push_back(idx);
  return out;
}

FitResult fit_map_with_anchors(const AgentRecord& record, const PriorModel& prior, const SearchConfig& config,
                               std::vector<std::vector<double>> anchors) {
  record.validate();
  if (record.reports.empty()) {
    FitResult out;
    out.theta = prior.mode();
    out.objective = prior_log_density(prior, out.theta);
    out.converged = true;
    return out;
  }
  const auto terms = report_terms(record);
  const Objective f = [&](std::span<const double> x) {
    const ThetaParams th = from_log(x);
    return log_likelihood(th, terms) + prior_log_density(prior, th);
  };
  anchors.push_back(as_vector(prior.mode()));
  anchors.push_back(as_vector(prior.mean()));
  SearchConfig cfg = config;
  // Warm starts come on top of the standard restart set.
  cfg.restarts = config.restarts + static_cast<int>(anchors.size()) - 2;
  return to_fit_result(multi_start_maximize(f, log_box(), anchors, cfg), record);
}

}  // namespace

void AgentRecord::validate() const {
  if (outcomes.empty()) throw std::invalid_argument("AgentRecord '" + agent_id + "': no outcomes");
  for (const auto& [idx, value] : reports) {
    if (idx < 1 || idx > outcomes.size())
      throw std::invalid_argument("AgentRecord '" + agent_id + "': report index out of range");
    if (!(value >= 0.0 && value <= 1.0))
      throw std::invalid_argument("AgentRecord '" + agent_id + "': report outside [0, 1]");
  }
}

bool AgentRecord::dense() const { return !outcomes.empty() && reports.size() == outcomes.size(); }

AgentRecord AgentRecord::reports_before(std::size_t trial) const {
  AgentRecord out{agent_id, outcomes, {}};
  out.reports.insert(reports.begin(), reports.lower_bound(trial));
  return out;
}

AgentRecord AgentRecord::restricted_to(std::span<const std::size_t> trials) const {
  AgentRecord out{agent_id, outcomes, {}};
  for (std::size_t t : trials) {
    if (auto it = reports.find(t); it != reports.end()) out.reports.insert(*it);
  }
  return out;
}

AgentRecord AgentRecord::prefix(std::size_t n) const {
  n = std::min(n, outcomes.size());
  AgentRecord out{agent_id, {outcomes.begin(), outcomes.begin() + static_cast<std::ptrdiff_t>(n)}, {}};
  out.reports.insert(reports.begin(), reports.upper_bound(n));
  return out;
}

bool in_search_box(const ThetaParams& theta) {
  // exp(log(x)) may miss the bounds by an ulp or two.
  constexpr double lo = kThetaLower * (1.0 - 1e-12);
  constexpr double hi = kThetaUpper * (1.0 + 1e-12);
  for (double v : {theta.alpha0, theta.beta0, theta.ws, theta.wf})
    if (!(v >= lo && v <= hi)) return false;
  return true;
}

std::array<double, 4> to_log(const ThetaParams& theta) {
  return {std::log(theta.alpha0), std::log(theta.beta0), std::log(theta.ws), std::log(theta.wf)};
}

ThetaParams from_log(std::span<const double> x) {
  return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3])};
}

double GammaMarginal::log_density(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double GammaMarginal::median() const { return boost::math::gamma_p_inv(shape, 0.5) / rate; }

double GammaMarginal::mode() const { return shape > 1.0 ? (shape - 1.0) / rate : median(); }

GammaMarginal fit_gamma_mle(std::span<const double> samples, double log_variance_floor) {
  if (samples.size() < 2) throw std::invalid_argument("fit_gamma_mle: need at least 2 samples");
  double sum = 0.0, sum_log = 0.0;
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("fit_gamma_mle: samples must be positive");
    sum += x;
    sum_log += std::log(x);
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;

  // Largest shape allowed by the floor: trigamma(shape) >= floor.
  double lo = 1e-8, hi = 1.0;
  while (boost::math::trigamma(hi) > log_variance_floor) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (boost::math::trigamma(mid) > log_variance_floor ? lo : hi) = mid;
  }
  const double shape_cap = lo;

  const double s = std::log(mean) - sum_log / n;
  double shape = shape_cap;
  if (s > 0.0) {
    // Minka's starting point, then Newton on log(a) - digamma(a) = s.
    double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int i = 0; i < 100; ++i) {
      const double g = std::log(a) - boost::math::digamma(a) - s;
      const double dg = 1.0 / a - boost::math::trigamma(a);
      double next = a - g / dg;
      if (!(next > 0.0)) next = 0.5 * a;
      const bool done = std::abs(next - a) <= 1e-12 * a;
      a = next;
      if (done) break;
    }
    shape = std::min(a, shape_cap);
  }
  return {shape, shape / mean};
}

ThetaParams PriorModel::mode() const {
  auto c = [](double v) { return std::clamp(v, kThetaLower, kThetaUpper); };
  return {c(alpha0.mode()), c(beta0.mode()), c(ws.mode()), c(wf.mode())};
}

ThetaParams PriorModel::mean() const {
  auto c = [](double v) { return std::clamp(v, kThetaLower, kThetaUpper); };
  return {c(alpha0.mean()), c(beta0.mean()), c(ws.mean()), c(wf.mean())};
}

double prior_log_density(const PriorModel& prior, const ThetaParams& theta) {
  return prior.alpha0.log_density(theta.alpha0) + prior.beta0.log_density(theta.beta0) +
         prior.ws.log_density(theta.ws) + prior.wf.log_density(theta.wf);
}

double mle_objective(const ThetaParams& theta, const AgentRecord& record) {
  record.validate();
  if (record.reports.empty()) throw std::invalid_argument("mle_objective: record has no reports");
  if (!in_search_box(theta)) throw std::invalid_argument("mle_objective: theta outside the search box");
  return log_likelihood(theta, report_terms(record));
}

double map_objective(const ThetaParams& theta, const AgentRecord& record, const PriorModel& prior) {
  if (!in_search_box(theta)) throw std::invalid_argument("map_objective: theta outside the search box");
  record.validate();
  return log_likelihood(theta, report_terms(record)) + prior_log_density(prior, theta);
}

FitResult fit_theta_mle(const AgentRecord& record, const SearchConfig& config) {
  record.validate();
  if (record.reports.size() < 4)
    throw std::invalid_argument("fit_theta_mle: need at least 4 reports for 4 free parameters");
  const auto terms = report_terms(record);
  const Objective f = [&](std::span<const double> x) { return log_likelihood(from_log(x), terms); };
  const std::vector<std::vector<double>> anchors{{0.0, 0.0, 0.0, 0.0}};
  return to_fit_result(multi_start_maximize(f, log_box(), anchors, config), record);
}

FitResult fit_theta_map(const AgentRecord& record, const PriorModel& prior, const SearchConfig& config) {
  return fit_map_with_anchors(record, prior, config, {});
}

FitResult refit_on_report(const FitResult& current, const AgentRecord& record_with_new_report,
                          const PriorModel& prior, const SearchConfig& config) {
  const bool has_new = std::any_of(record_with_new_report.reports.begin(), record_with_new_report.reports.end(),
                                   [&](const auto& kv) {
                                     return !std::binary_search(current.report_trials.begin(),
                                                                current.report_trials.end(), kv.first);
                                   });
  if (!has_new) throw std::invalid_argument("refit_on_report: record holds no new report");
  return fit_map_with_anchors(record_with_new_report, prior, config, {as_vector(current.theta)});
}

PriorModel prior_from_thetas(std::span<const ThetaParams> thetas) {
  std::array<std::vector<double>, 4> cols;
  for (const ThetaParams& t : thetas) {
    cols[0].push_back(t.alpha0);
    cols[1].push_back(t.beta0);
    cols[2].push_back(t.ws);
    cols[3].push_back(t.wf);
  }
  return {fit_gamma_mle(cols[0]), fit_gamma_mle(cols[1]), fit_gamma_mle(cols[2]), fit_gamma_mle(cols[3])};
}

PriorLearningResult learn_prior_detailed(std::span<const AgentRecord> old_records, const SearchConfig& config) {
  if (old_records.empty()) throw std::invalid_argument("learn_prior: no records");
  PriorLearningResult out;
  std::vector<ThetaParams> thetas;
  for (const AgentRecord& r : old_records) {
    try {
      FitResult fit = fit_theta_mle(r, config);
      thetas.push_back(fit.theta);
      out.fits.emplace(r.agent_id, std::move(fit));
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping agent '" << r.agent_id << "' in prior learning: " << e.what() << '\n';
      out.skipped.push_back(r.agent_id);
    }
  }
  if (thetas.size() < 2) throw std::runtime_error("learn_prior: fewer than 2 agents could be fitted");
  out.prior = prior_from_thetas(thetas);
  return out;
}

PriorModel learn_prior(std::span<const AgentRecord> old_records, const SearchConfig& config) {
  return learn_prior_detailed(old_records, config).prior;
}

}  // namespace trustdyn
