// Command-line front end: simulate data, fit priors, predict, evaluate, sweep
// and cluster. Exit codes: 0 success, 1 runtime or fit failure, 2 usage error.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustdyn/clustering.hpp"
#include "trustdyn/datagen.hpp"
#include "trustdyn/evaluation.hpp"
#include "trustdyn/inference.hpp"
#include "trustdyn/io.hpp"

namespace fs = std::filesystem;
using namespace trustdyn;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<AgentRecord> load_dataset(const fs::path& p) {
  std::istringstream in(read_file(p));
  return read_dataset_csv(in);
}

void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

// Written under a [command] section so the file can be passed back via --config.
// The output directory is left out: it names where results go, not how they
// are computed, and keeping it would make otherwise identical runs differ.
void record_config(const CLI::App& cmd, const fs::path& dir) {
  std::istringstream in(cmd.config_to_str(true, false));
  std::string text = "[" + cmd.get_name() + "]\n", line;
  while (std::getline(in, line))
    if (!line.starts_with("out=")) text += line + "\n";
  write_file(dir / (cmd.get_name() + "_config.ini"), text);
}

SearchConfig search_config(std::uint64_t seed) {
  SearchConfig s;
  s.seed = seed;
  return s;
}

std::vector<ModelTag> parse_models(const std::vector<std::string>& names) {
  if (names.empty()) throw UsageError("--models: at least one model is required");
  std::vector<ModelTag> tags;
  for (const std::string& n : names) {
    try {
      tags.push_back(model_tag_from_string(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return tags;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  int agents = 39;
  int trials = 100;
  double reliability = 0.8;
  std::uint64_t seed = 0;
  std::vector<double> mix{1.0, 0.0, 0.0};
  double amplitude = 0.25;
  int period = 12;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* cmd = app.add_subcommand("simulate", "Generate a synthetic population (dataset.csv + labels.csv)");
  cmd->add_option("--agents", a.agents, "Number of agents")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--trials", a.trials, "Trials per agent")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--reliability", a.reliability, "Robot success probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", a.seed, "Top-level seed")->capture_default_str();
  cmd->add_option("--mix", a.mix, "Proportions bayesian,oscillator,disbeliever")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  cmd->add_option("--amplitude", a.amplitude, "Oscillator amplitude")->capture_default_str()->check(CLI::Range(0.0, 0.5));
  cmd->add_option("--period", a.period, "Oscillator period in trials")->capture_default_str()->check(CLI::Range(2, 1000000));
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_simulate(const CLI::App& cmd, const SimulateArgs& a) {
  PopulationSpec spec;
  spec.n_agents = a.agents;
  spec.n_trials = a.trials;
  spec.reliability = a.reliability;
  spec.seed = a.seed;
  spec.mix = {a.mix[0], a.mix[1], a.mix[2]};
  spec.oscillator_amplitude = a.amplitude;
  spec.oscillator_period = a.period;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const GeneratedPopulation pop = generate_population(spec);
  const fs::path dir(a.out);
  prepare_out(dir);
  std::ostringstream data, labels;
  write_dataset_csv(data, pop.records);
  write_labels_csv(labels, pop.labels);
  write_file(dir / "dataset.csv", data.str());
  write_file(dir / "labels.csv", labels.str());
  record_config(cmd, dir);
  std::cerr << "wrote " << pop.records.size() << " agents x " << a.trials << " trials to " << dir.string() << '\n';
  return 0;
}

// --- fit-prior --------------------------------------------------------------

struct FitPriorArgs {
  std::string data;
  std::uint64_t seed = 0;
  std::string out;
};

void add_fit_prior(CLI::App& app, FitPriorArgs& a) {
  auto* cmd = app.add_subcommand("fit-prior", "Fit per-agent parameters and the population prior (prior.json)");
  cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "Search seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_fit_prior(const CLI::App& cmd, const FitPriorArgs& a) {
  const auto records = load_dataset(a.data);
  if (records.size() < 2) throw std::runtime_error("fit-prior: need at least 2 agents");
  const PriorLearningResult res = learn_prior_detailed(records, search_config(a.seed));
  for (const auto& [id, fit] : res.fits)
    std::cerr << id << ": objective " << format_double(fit.objective) << " theta (" << format_double(fit.theta.alpha0)
              << ", " << format_double(fit.theta.beta0) << ", " << format_double(fit.theta.ws) << ", "
              << format_double(fit.theta.wf) << ")\n";
  const fs::path dir(a.out);
  prepare_out(dir);
  write_file(dir / "prior.json", prior_to_json(res.prior).dump(2) + "\n");
  record_config(cmd, dir);
  return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string data;
  std::string agent;
  std::string prior;
  std::size_t l = 10;
  std::size_t q = 10;
  std::uint64_t seed = 0;
  std::string out;
};

void add_predict(CLI::App& app, PredictArgs& a) {
  auto* cmd = app.add_subcommand("predict", "Predict one agent's trust trajectory (trajectory.csv)");
  cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--agent", a.agent, "Agent id")->required();
  cmd->add_option("--prior", a.prior, "Prior JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--l", a.l, "Training length")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--q", a.q, "Report gap")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Search seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_predict(const CLI::App& cmd, const PredictArgs& a) {
  const auto records = load_dataset(a.data);
  const auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.agent_id == a.agent; });
  if (it == records.end()) throw UsageError("predict: no agent '" + a.agent + "' in dataset");
  const PriorModel prior = prior_from_json(nlohmann::json::parse(read_file(a.prior)));
  const EvalConfig cfg{a.l, a.q, it->n_trials()};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ReportSchedule schedule = build_schedule(cfg);
  const ProposedTrace trace = predict_proposed(*it, prior, schedule, search_config(a.seed));
  const fs::path dir(a.out);
  prepare_out(dir);
  std::ostringstream out;
  write_trajectory_csv(out, *it, schedule, trace);
  write_file(dir / "trajectory.csv", out.str());
  record_config(cmd, dir);
  return 0;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string data;
  std::size_t l = 10;
  std::size_t q = 10;
  std::vector<std::string> models{"proposed", "armav", "optimo"};
  std::uint64_t seed = 0;
  std::string out;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand("evaluate", "Leave-one-out comparison of models (per_agent.csv, summary.csv)");
  cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--l", a.l, "Training length")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--q", a.q, "Report gap")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--models", a.models, "Comma-separated model tags: proposed, armav, optimo")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Search seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_evaluate(const CLI::App& cmd, const EvaluateArgs& a) {
  const std::vector<ModelTag> tags = parse_models(a.models);
  const auto records = load_dataset(a.data);
  if (records.empty()) throw std::runtime_error("evaluate: empty dataset");
  const EvalConfig cfg{a.l, a.q, records.front().n_trials()};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SearchConfig search = search_config(a.seed);
  Comparison cmp;
  if (tags.size() == 1)
    cmp.reports.push_back(leave_one_out(records, cfg, tags.front(), search));
  else
    cmp = compare_models(records, cfg, tags, search);

  const fs::path dir(a.out);
  prepare_out(dir);
  std::ostringstream per_agent, summary;
  write_comparison_csv(per_agent, summary, cmp);
  write_file(dir / "per_agent.csv", per_agent.str());
  write_file(dir / "summary.csv", summary.str());
  if (!cmp.differences.empty()) {
    std::ostringstream diffs;
    write_differences_csv(diffs, cmp);
    write_file(dir / "differences.csv", diffs.str());
  }
  record_config(cmd, dir);

  std::cout << std::left << std::setw(10) << "model" << std::right << std::setw(10) << "mean" << std::setw(10) << "sd"
            << std::setw(10) << "se" << std::setw(8) << "agents" << '\n';
  std::cout << std::fixed << std::setprecision(4);
  for (const RmseReport& r : cmp.reports)
    std::cout << std::left << std::setw(10) << r.model_tag << std::right << std::setw(10) << r.mean << std::setw(10)
              << r.sd << std::setw(10) << r.se << std::setw(8) << r.per_agent.size() << '\n';
  for (const PairedDifference& d : cmp.differences)
    std::cout << "proposed - " << d.baseline << ": mean " << d.mean << " (sd " << d.sd << ", se " << d.se << ")\n";
  return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string data;
  std::size_t l = 10;
  std::size_t q = 10;
  std::vector<std::size_t> gaps;
  std::vector<std::size_t> durations;
  std::uint64_t seed = 0;
  std::string out;
  CLI::Option* gaps_opt = nullptr;
  CLI::Option* durations_opt = nullptr;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* cmd = app.add_subcommand("sweep", "Sweep the report gap or the training duration (sweep.csv)");
  cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--l", a.l, "Training length for a gap sweep")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--q", a.q, "Report gap for a duration sweep")->capture_default_str()->check(CLI::PositiveNumber);
  a.gaps_opt = cmd->add_option("--gaps", a.gaps, "Comma-separated report gaps")->delimiter(',')->check(CLI::PositiveNumber);
  a.durations_opt =
      cmd->add_option("--durations", a.durations, "Comma-separated training lengths")->delimiter(',')->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Search seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_sweep(const CLI::App& cmd, const SweepArgs& a) {
  const bool by_gap = a.gaps_opt->count() > 0;
  const bool by_len = a.durations_opt->count() > 0;
  if (by_gap == by_len) throw UsageError("sweep: give exactly one of --gaps or --durations");
  if ((by_gap && a.gaps.empty()) || (by_len && a.durations.empty())) throw UsageError("sweep: empty list");
  const auto records = load_dataset(a.data);
  if (records.empty()) throw std::runtime_error("sweep: empty dataset");
  const std::size_t n = records.front().n_trials();
  for (std::size_t l : by_len ? a.durations : std::vector<std::size_t>{a.l})
    if (l >= n) throw UsageError("sweep: training length must be smaller than the trial count");

  const SearchConfig search = search_config(a.seed);
  const std::vector<SweepRow> rows = by_gap ? sweep_report_gap(records, a.l, a.gaps, search)
                                            : sweep_training_duration(records, a.q, a.durations, search);
  const fs::path dir(a.out);
  prepare_out(dir);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  write_file(dir / "sweep.csv", out.str());
  record_config(cmd, dir);
  std::cout << std::fixed << std::setprecision(4);
  for (const SweepRow& r : rows)
    std::cout << r.param_name << '=' << r.param_value << "  mean " << r.mean << "  sd " << r.sd << "  se " << r.se << '\n';
  return 0;
}

// --- cluster ----------------------------------------------------------------

struct ClusterArgs {
  std::string data;
  std::string rmse;
  std::string model = "proposed";
  std::string labels;
  int k = 0;
  int k_min = 1;
  int k_max = 6;
  std::uint64_t seed = 0;
  std::string out;
};

void add_cluster(CLI::App& app, ClusterArgs& a) {
  auto* cmd = app.add_subcommand("cluster", "Cluster agents by RMSE and average log trust (clusters.csv, elbow.csv)");
  cmd->add_option("--data", a.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--rmse", a.rmse, "per_agent.csv written by evaluate")->required()->check(CLI::ExistingFile);
  cmd->add_option("--model", a.model, "Model whose RMSE is used")->capture_default_str();
  cmd->add_option("--labels", a.labels, "Optional labels.csv to report archetype purity")->check(CLI::ExistingFile);
  cmd->add_option("--k", a.k, "Fixed number of clusters (skips the elbow scan)")->check(CLI::PositiveNumber);
  cmd->add_option("--k-min", a.k_min, "Smallest k in the elbow scan")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--k-max", a.k_max, "Largest k in the elbow scan")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "k-means seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_cluster(const CLI::App& cmd, const ClusterArgs& a) {
  const auto records = load_dataset(a.data);
  if (records.size() < 2) throw std::runtime_error("cluster: need at least 2 agents");
  std::istringstream rmse_in(read_file(a.rmse));
  const auto rmse = read_per_agent_rmse(rmse_in, a.model);

  std::vector<FeatureVector> features;
  std::vector<std::string> ids;
  for (const AgentRecord& r : records) {
    const auto it = rmse.find(r.agent_id);
    if (it == rmse.end()) {
      std::cerr << "warning: no RMSE for agent '" << r.agent_id << "', excluded from clustering\n";
      continue;
    }
    features.push_back(compute_features(r, it->second));
    ids.push_back(r.agent_id);
  }
  if (features.size() < 2) throw std::runtime_error("cluster: need at least 2 agents with features");
  const ZScoreResult z = zscore_normalize(features);
  const std::vector<Point> pts = to_points(z.normalized);

  const fs::path dir(a.out);
  prepare_out(dir);
  ClusterResult result;
  if (a.k > 0) {
    if (static_cast<std::size_t>(a.k) > pts.size()) throw UsageError("cluster: --k exceeds the number of agents");
    result = kmeans(pts, a.k, a.seed);
  } else {
    const int k_max = std::min<int>(a.k_max, static_cast<int>(pts.size()));
    if (a.k_min > k_max) throw UsageError("cluster: empty k range");
    ElbowResult elbow = elbow_select(pts, a.k_min, k_max, a.seed);
    std::ostringstream e;
    write_elbow_csv(e, elbow.curve);
    write_file(dir / "elbow.csv", e.str());
    std::cout << "elbow selected k = " << elbow.selected_k
              << (elbow.no_curvature ? " (no curvature)" : elbow.low_confidence ? " (low confidence)" : "") << '\n';
    result = elbow.results.at(elbow.selected_k);
  }

  std::vector<std::string> names(static_cast<std::size_t>(result.k));
  std::optional<ArchetypeLabels> labels;
  if (result.k == 3) {
    labels = label_archetypes(cluster_means(features, result.assignments, 3));
    for (std::size_t c = 0; c < 3; ++c) names[c] = std::string(to_string(labels->by_cluster[c]));
    if (labels->tie) std::cerr << "warning: clusters tied on average log trust\n";
  }
  std::vector<ClusterRow> rows;
  for (std::size_t i = 0; i < ids.size(); ++i)
    rows.push_back({ids[i], features[i], result.assignments[i], names[static_cast<std::size_t>(result.assignments[i])]});
  std::ostringstream c;
  write_clusters_csv(c, rows);
  write_file(dir / "clusters.csv", c.str());
  record_config(cmd, dir);

  if (labels && !a.labels.empty()) {
    std::istringstream lin(read_file(a.labels));
    std::map<std::string, Archetype> truth_by_id;
    for (const AgentLabel& l : read_labels_csv(lin)) truth_by_id[l.agent_id] = l.archetype;
    std::vector<Archetype> truth;
    for (const std::string& id : ids) {
      const auto it = truth_by_id.find(id);
      if (it == truth_by_id.end()) throw std::runtime_error("cluster: no label for agent '" + id + "'");
      truth.push_back(it->second);
    }
    std::cout << "archetype purity " << std::fixed << std::setprecision(4)
              << label_purity(result.assignments, *labels, truth) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized Bayesian trust prediction: simulation, fitting, evaluation and clustering"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);

  SimulateArgs sim;
  FitPriorArgs fitp;
  PredictArgs pred;
  EvaluateArgs eval;
  SweepArgs sweep;
  ClusterArgs clus;
  add_simulate(app, sim);
  add_fit_prior(app, fitp);
  add_predict(app, pred);
  add_evaluate(app, eval);
  add_sweep(app, sweep);
  add_cluster(app, clus);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    const std::string& name = cmd->get_name();
    if (name == "simulate") return run_simulate(*cmd, sim);
    if (name == "fit-prior") return run_fit_prior(*cmd, fitp);
    if (name == "predict") return run_predict(*cmd, pred);
    if (name == "evaluate") return run_evaluate(*cmd, eval);
    if (name == "sweep") return run_sweep(*cmd, sweep);
    if (name == "cluster") return run_cluster(*cmd, clus);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
