#pragma once

#include <cstddef>
#include <vector>

namespace trustdyn {

/// Evaluation protocol: a training session of `training_len` trials with a
/// report after every trial, then a report every `report_gap` trials.
struct EvalConfig {
  std::size_t training_len = 10;
  std::size_t report_gap = 10;
  std::size_t total_trials = 100;

  /// Throws std::invalid_argument unless 1 <= l < n and q >= 1.
  void validate() const;
};

/// Ascending trial indices (1-based) at which trust is reported.
struct ReportSchedule {
  std::vector<std::size_t> trials;

  bool contains(std::size_t trial) const;
};

/// {1..l} together with {l + q, l + 2q, ...} up to n.
ReportSchedule build_schedule(const EvalConfig& config);

}  // namespace trustdyn
