#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "trustdyn/io.hpp"

using namespace trustdyn;

namespace {

std::vector<AgentRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return read_dataset_csv(in);
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = i % 2 ? u(rng) : std::ldexp(u(rng), -40);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_THROW(parse_double("0.5x"), std::invalid_argument);
}

TEST(DatasetCsv, RoundTripWithSparseReports) {
  std::vector<AgentRecord> recs{
      {"b", {Outcome::success, Outcome::failure, Outcome::success}, {{1, 0.25}, {3, 1.0 / 3.0}}},
      {"a", {Outcome::failure}, {{1, 0.0}}},
  };
  std::ostringstream out;
  write_dataset_csv(out, recs);
  EXPECT_EQ(out.str(),
            "agent_id,trial,performance,trust\n"
            "a,1,0,0\n"
            "b,1,1,0.25\n"
            "b,2,0,\n"
            "b,3,1,0.3333333333333333\n");
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].agent_id, "a");
  EXPECT_EQ(back[1].outcomes, recs[0].outcomes);
  EXPECT_EQ(back[1].reports, recs[0].reports);
}

TEST(DatasetCsv, AcceptsCrLfAndInterleavedAgents) {
  const auto recs = parse("agent_id,trial,performance,trust\r\nx,1,1,0.5\r\ny,1,0,0.2\r\nx,2,0,\r\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].n_trials(), 2u);
  EXPECT_EQ(recs[0].reports.size(), 1u);
}

TEST(DatasetCsv, RejectsMalformedInput) {
  const std::string h = "agent_id,trial,performance,trust\n";
  EXPECT_THROW(parse("id,trial,perf,trust\n"), std::runtime_error);
  EXPECT_THROW(parse(h + "a,2,1,0.5\n"), std::runtime_error);
  EXPECT_THROW(parse(h + "a,1,2,0.5\n"), std::runtime_error);
  EXPECT_THROW(parse(h + "a,1,1,1.5\n"), std::runtime_error);
  EXPECT_THROW(parse(h + "a,1,1,abc\n"), std::runtime_error);
  EXPECT_THROW(parse(h + "a,1,1\n"), std::runtime_error);
  EXPECT_THROW(parse(h + ",1,1,0.5\n"), std::runtime_error);
  try {
    parse(h + "a,1,1,0.5\na,1,1,0.5\n");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::ostringstream out;
  EXPECT_THROW(write_dataset_csv(out, {{"a,b", {Outcome::success}, {}}}), std::invalid_argument);
}

TEST(LabelsCsv, RoundTrip) {
  const std::vector<AgentLabel> labels{{"a", Archetype::bayesian, ThetaParams{1.5, 2, 20, 0.125}},
                                       {"b", Archetype::disbeliever, std::nullopt}};
  std::ostringstream out;
  write_labels_csv(out, labels);
  EXPECT_EQ(out.str(), "agent_id,archetype,alpha0,beta0,ws,wf\na,bayesian,1.5,2,20,0.125\nb,disbeliever,,,,\n");
  std::istringstream in(out.str());
  const auto back = read_labels_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].theta, labels[0].theta);
  EXPECT_FALSE(back[1].theta.has_value());
  std::istringstream bad("agent_id,archetype,alpha0,beta0,ws,wf\na,skeptic,,,,\n");
  EXPECT_THROW(read_labels_csv(bad), std::runtime_error);
}

TEST(PriorJson, RoundTripAndValidation) {
  const PriorModel p{{4, 1}, {4, 2}, {4, 0.2}, {4.5, 0.09}};
  const auto j = prior_to_json(p);
  EXPECT_EQ(j.at("ws").at("family"), "gamma");
  EXPECT_EQ(prior_from_json(nlohmann::json::parse(j.dump())), p);
  auto missing = j;
  missing.erase("wf");
  EXPECT_THROW(prior_from_json(missing), std::runtime_error);
  auto family = j;
  family["alpha0"]["family"] = "lognormal";
  EXPECT_THROW(prior_from_json(family), std::runtime_error);
  auto negative = j;
  negative["beta0"]["rate"] = -1.0;
  EXPECT_THROW(prior_from_json(negative), std::runtime_error);
}

TEST(ComparisonCsv, WritesAndReadsBack) {
  Comparison c;
  c.reports.push_back({"proposed", {{"a", 0.01}, {"b", 0.02}}, {}, 0.015, 0.1, 0.2});
  c.reports.push_back({"armav", {{"a", 0.1}, {"b", 0.3}}, {}, 0.2, 0.1, 0.2});
  c.differences.push_back({"armav", {{"a", -0.09}, {"b", -0.28}}, -0.185, 0.1, 0.07});
  std::ostringstream per, sum, diff;
  write_comparison_csv(per, sum, c);
  write_differences_csv(diff, c);
  EXPECT_EQ(sum.str(), "model,mean,sd,se\nproposed,0.015,0.1,0.2\narmav,0.2,0.1,0.2\n");
  EXPECT_EQ(diff.str(), "baseline,mean_diff,sd,se,n\narmav,-0.185,0.1,0.07,2\n");
  std::istringstream in(per.str());
  EXPECT_EQ(read_per_agent_rmse(in, "armav"), (std::map<std::string, double>{{"a", 0.1}, {"b", 0.3}}));
  std::istringstream in2(per.str());
  EXPECT_THROW(read_per_agent_rmse(in2, "optimo"), std::runtime_error);
}

TEST(OtherTables, Formats) {
  std::ostringstream sweep, clusters, elbow;
  write_sweep_csv(sweep, {{"report_gap", 5, 0.02, 0.01, 0.005, 39}});
  EXPECT_EQ(sweep.str(), "param_name,param_value,mean,sd,se\nreport_gap,5,0.02,0.01,0.005\n");
  write_clusters_csv(clusters, {{"b", {0.1, -2}, 1, "oscillator"}, {"a", {0.5, -0.25}, 0, ""}});
  EXPECT_EQ(clusters.str(), "agent_id,rmse,avg_log_trust,cluster,archetype\na,0.5,-0.25,0,\nb,0.1,-2,1,oscillator\n");
  write_elbow_csv(elbow, {{1, 10.5}, {2, 3.0}});
  EXPECT_EQ(elbow.str(), "k,variance\n1,10.5\n2,3\n");
}

TEST(TrajectoryCsv, ShowsOnlyScheduledReports) {
  const AgentRecord r{"a", {Outcome::success, Outcome::failure}, {{1, 0.5}, {2, 0.75}}};
  ProposedTrace tr;
  tr.predicted = {0.6, 0.5};
  tr.states = {{3, 2}, {3, 3}};
  std::ostringstream out;
  write_trajectory_csv(out, r, ReportSchedule{{1}}, tr);
  EXPECT_EQ(out.str(), "trial,outcome,scheduled_report,predicted_trust,alpha,beta\n1,1,0.5,0.6,3,2\n2,0,,0.5,3,3\n");
}
