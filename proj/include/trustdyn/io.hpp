#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "trustdyn/clustering.hpp"
#include "trustdyn/datagen.hpp"
#include "trustdyn/evaluation.hpp"
#include "trustdyn/inference.hpp"

#include <json.hpp>

namespace trustdyn {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a whole field. Throws std::invalid_argument.
double parse_double(const std::string& s);

/// Dataset CSV: header `agent_id,trial,performance,trust`, one row per trial,
/// agents in ascending agent_id order, trust empty when unreported.
void write_dataset_csv(std::ostream& out, std::vector<AgentRecord> records);
/// Throws std::runtime_error with a line number on malformed input. Records are
/// returned in ascending agent_id order.
std::vector<AgentRecord> read_dataset_csv(std::istream& in);

/// Labels sidecar: `agent_id,archetype,alpha0,beta0,ws,wf`.
void write_labels_csv(std::ostream& out, std::vector<AgentLabel> labels);
std::vector<AgentLabel> read_labels_csv(std::istream& in);

nlohmann::json prior_to_json(const PriorModel& prior);
/// Throws std::runtime_error on a missing component or an unsupported family.
PriorModel prior_from_json(const nlohmann::json& j);

void write_comparison_csv(std::ostream& per_agent, std::ostream& summary, const Comparison& comparison);
void write_differences_csv(std::ostream& out, const Comparison& comparison);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ClusterRow {
  std::string agent_id;
  FeatureVector features;
  int cluster = 0;
  /// Empty when no archetype labelling was made.
  std::string archetype;
};
void write_clusters_csv(std::ostream& out, const std::vector<ClusterRow>& rows);
void write_elbow_csv(std::ostream& out, const std::vector<std::pair<int, double>>& curve);

/// Per-trial analogue of a predicted trust curve.
void write_trajectory_csv(std::ostream& out, const AgentRecord& record, const ReportSchedule& schedule,
                          const ProposedTrace& trace);

/// Per-agent RMSE table as written by write_comparison_csv; returns the rows of
/// `model`. Throws std::runtime_error when none are found.
std::map<std::string, double> read_per_agent_rmse(std::istream& in, const std::string& model);

/// Read a whole file / write a whole file (binary, LF preserved).
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& contents);

}  // namespace trustdyn
