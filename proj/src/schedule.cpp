#include "trustdyn/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace trustdyn {

void EvalConfig::validate() const {
  if (training_len < 1 || training_len >= total_trials)
    throw std::invalid_argument("EvalConfig: need 1 <= training_len < total_trials");
  if (report_gap < 1) throw std::invalid_argument("EvalConfig: report_gap must be >= 1");
}

bool ReportSchedule::contains(std::size_t trial) const {
  return std::binary_search(trials.begin(), trials.end(), trial);
}

ReportSchedule build_schedule(const EvalConfig& config) {
  config.validate();
  ReportSchedule s;
  for (std::size_t i = 1; i <= config.training_len; ++i) s.trials.push_back(i);
  for (std::size_t i = config.training_len + config.report_gap; i <= config.total_trials; i += config.report_gap)
    s.trials.push_back(i);
  return s;
}

}  // namespace trustdyn
