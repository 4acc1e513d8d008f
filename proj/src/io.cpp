#include "trustdyn/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace trustdyn {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!next_line(in, line) || line != header)
    throw std::runtime_error("expected CSV header '" + header + "'");
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\n\r") != std::string::npos)
    throw std::invalid_argument("agent_id must be non-empty and contain no ',' or line breaks");
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void write_dataset_csv(std::ostream& out, std::vector<AgentRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.agent_id < b.agent_id; });
  out << "agent_id,trial,performance,trust\n";
  for (const AgentRecord& r : records) {
    check_id(r.agent_id);
    r.validate();
    for (std::size_t i = 1; i <= r.n_trials(); ++i) {
      out << r.agent_id << ',' << i << ',' << (r.outcomes[i - 1] == Outcome::success ? 1 : 0) << ',';
      if (auto it = r.reports.find(i); it != r.reports.end()) out << format_double(it->second);
      out << '\n';
    }
  }
}

std::vector<AgentRecord> read_dataset_csv(std::istream& in) {
  expect_header(in, "agent_id,trial,performance,trust");
  std::map<std::string, AgentRecord> by_id;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) fail_at(line_no, "expected 4 fields");
    if (f[0].empty()) fail_at(line_no, "empty agent_id");
    AgentRecord& rec = by_id[f[0]];
    rec.agent_id = f[0];
    std::size_t trial = 0;
    try {
      trial = parse_size(f[1]);
    } catch (const std::exception& e) {
      fail_at(line_no, e.what());
    }
    if (trial != rec.outcomes.size() + 1) fail_at(line_no, "trials must be consecutive from 1 within an agent");
    if (f[2] == "1")
      rec.outcomes.push_back(Outcome::success);
    else if (f[2] == "0")
      rec.outcomes.push_back(Outcome::failure);
    else
      fail_at(line_no, "performance must be 0 or 1");
    if (!f[3].empty()) {
      double t = 0.0;
      try {
        t = parse_double(f[3]);
      } catch (const std::exception& e) {
        fail_at(line_no, e.what());
      }
      if (!(t >= 0.0 && t <= 1.0)) fail_at(line_no, "trust must lie in [0, 1]");
      rec.reports.emplace(trial, t);
    }
  }
  std::vector<AgentRecord> out;
  out.reserve(by_id.size());
  for (auto& [_, r] : by_id) out.push_back(std::move(r));
  return out;
}

void write_labels_csv(std::ostream& out, std::vector<AgentLabel> labels) {
  std::sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) { return a.agent_id < b.agent_id; });
  out << "agent_id,archetype,alpha0,beta0,ws,wf\n";
  for (const AgentLabel& l : labels) {
    check_id(l.agent_id);
    out << l.agent_id << ',' << to_string(l.archetype);
    if (l.theta) {
      out << ',' << format_double(l.theta->alpha0) << ',' << format_double(l.theta->beta0) << ','
          << format_double(l.theta->ws) << ',' << format_double(l.theta->wf);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

std::vector<AgentLabel> read_labels_csv(std::istream& in) {
  expect_header(in, "agent_id,archetype,alpha0,beta0,ws,wf");
  std::vector<AgentLabel> out;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) fail_at(line_no, "expected 6 fields");
    AgentLabel l;
    l.agent_id = f[0];
    try {
      l.archetype = archetype_from_string(f[1]);
      if (!f[2].empty())
        l.theta = ThetaParams{parse_double(f[2]), parse_double(f[3]), parse_double(f[4]), parse_double(f[5])};
    } catch (const std::exception& e) {
      fail_at(line_no, e.what());
    }
    out.push_back(std::move(l));
  }
  return out;
}

nlohmann::json prior_to_json(const PriorModel& prior) {
  nlohmann::json j;
  auto entry = [](const GammaMarginal& m) {
    return nlohmann::json{{"family", "gamma"}, {"shape", m.shape}, {"rate", m.rate}};
  };
  j["alpha0"] = entry(prior.alpha0);
  j["beta0"] = entry(prior.beta0);
  j["ws"] = entry(prior.ws);
  j["wf"] = entry(prior.wf);
  return j;
}

PriorModel prior_from_json(const nlohmann::json& j) {
  auto entry = [&](const char* name) {
    if (!j.is_object() || !j.contains(name)) throw std::runtime_error(std::string("prior: missing component ") + name);
    const auto& e = j.at(name);
    if (!e.contains("family") || e.at("family") != "gamma")
      throw std::runtime_error(std::string("prior: component ") + name + " must have family \"gamma\"");
    GammaMarginal m{e.at("shape").get<double>(), e.at("rate").get<double>()};
    if (!(m.shape > 0.0) || !(m.rate > 0.0))
      throw std::runtime_error(std::string("prior: component ") + name + " needs positive shape and rate");
    return m;
  };
  return {entry("alpha0"), entry("beta0"), entry("ws"), entry("wf")};
}

void write_comparison_csv(std::ostream& per_agent, std::ostream& summary, const Comparison& comparison) {
  per_agent << "model,agent_id,rmse\n";
  summary << "model,mean,sd,se\n";
  for (const RmseReport& r : comparison.reports) {
    for (const auto& [id, v] : r.per_agent) per_agent << r.model_tag << ',' << id << ',' << format_double(v) << '\n';
    summary << r.model_tag << ',' << format_double(r.mean) << ',' << format_double(r.sd) << ','
            << format_double(r.se) << '\n';
  }
}

void write_differences_csv(std::ostream& out, const Comparison& comparison) {
  out << "baseline,mean_diff,sd,se,n\n";
  for (const PairedDifference& d : comparison.differences)
    out << d.baseline << ',' << format_double(d.mean) << ',' << format_double(d.sd) << ',' << format_double(d.se)
        << ',' << d.per_agent.size() << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "param_name,param_value,mean,sd,se\n";
  for (const SweepRow& r : rows)
    out << r.param_name << ',' << r.param_value << ',' << format_double(r.mean) << ',' << format_double(r.sd) << ','
        << format_double(r.se) << '\n';
}

void write_clusters_csv(std::ostream& out, const std::vector<ClusterRow>& rows) {
  std::vector<const ClusterRow*> sorted;
  for (const ClusterRow& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->agent_id < b->agent_id; });
  out << "agent_id,rmse,avg_log_trust,cluster,archetype\n";
  for (const ClusterRow* r : sorted)
    out << r->agent_id << ',' << format_double(r->features.rmse) << ',' << format_double(r->features.avg_log_trust)
        << ',' << r->cluster << ',' << r->archetype << '\n';
}

void write_elbow_csv(std::ostream& out, const std::vector<std::pair<int, double>>& curve) {
  out << "k,variance\n";
  for (const auto& [k, v] : curve) out << k << ',' << format_double(v) << '\n';
}

void write_trajectory_csv(std::ostream& out, const AgentRecord& record, const ReportSchedule& schedule,
                          const ProposedTrace& trace) {
  out << "trial,outcome,scheduled_report,predicted_trust,alpha,beta\n";
  for (std::size_t i = 1; i <= record.n_trials(); ++i) {
    out << i << ',' << (record.outcomes[i - 1] == Outcome::success ? 1 : 0) << ',';
    if (schedule.contains(i)) {
      if (auto it = record.reports.find(i); it != record.reports.end()) out << format_double(it->second);
    }
    out << ',' << format_double(trace.predicted[i - 1]) << ',' << format_double(trace.states[i - 1].alpha) << ','
        << format_double(trace.states[i - 1].beta) << '\n';
  }
}

std::map<std::string, double> read_per_agent_rmse(std::istream& in, const std::string& model) {
  expect_header(in, "model,agent_id,rmse");
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 3) fail_at(line_no, "expected 3 fields");
    if (f[0] != model) continue;
    try {
      out[f[1]] = parse_double(f[2]);
    } catch (const std::exception& e) {
      fail_at(line_no, e.what());
    }
  }
  if (out.empty()) throw std::runtime_error("no per-agent RMSE rows for model '" + model + "'");
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
}

}  // namespace trustdyn
