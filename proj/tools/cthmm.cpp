// Command-line front end: fit, assign, forecast, grid, simulate, report.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cthmm/error.hpp"
#include "cthmm/evaluation.hpp"
#include "cthmm/io.hpp"
#include "cthmm/mixture.hpp"
#include "cthmm/synthesis.hpp"

namespace {

using namespace cthmm;

struct Options {
  std::string config;
  std::string data;
  std::string model;
  std::string out;
  std::string truth;
  std::optional<std::uint64_t> seed;
  std::vector<int> subtypes;
  std::vector<int> states;
  std::optional<double> train_fraction;
  std::optional<double> prefix_fraction;
  std::vector<std::string> features;
  bool left_to_right = false;
  bool terminal_intervention = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--subtypes", o.subtypes, "subtype count(s) M")->delimiter(',');
  cmd->add_option("--states", o.states, "hidden state count(s) K")->delimiter(',');
  cmd->add_option("--train-fraction", o.train_fraction, "share of patients used for training");
  cmd->add_option("--prefix-fraction", o.prefix_fraction, "share of timepoints used as prefix");
  cmd->add_option("--features", o.features, "features scored when forecasting")->delimiter(',');
  cmd->add_flag("--left-to-right", o.left_to_right, "only allow k -> k+1 transitions");
  cmd->add_flag("--terminal-intervention", o.terminal_intervention,
                "tie the intervention flag to the final state");
}

RunConfig resolve(const Options& o) {
  RunConfig config = o.config.empty() ? default_config() : load_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (!o.subtypes.empty()) config.subtypes = o.subtypes;
  if (!o.states.empty()) config.states = o.states;
  if (o.train_fraction) config.train_fraction = *o.train_fraction;
  if (o.prefix_fraction) config.prefix_fraction = *o.prefix_fraction;
  if (!o.features.empty()) config.score_features = o.features;
  if (o.left_to_right) config.mixture.em.mask = MaskKind::Chain;
  if (o.terminal_intervention) config.terminal_intervention = true;
  auto fraction_ok = [](double f) { return f > 0.0 && f < 1.0; };
  if (!fraction_ok(config.train_fraction) || !fraction_ok(config.prefix_fraction)) {
    throw Error(ErrorKind::InvalidArgument, "fractions must lie in (0, 1)");
  }
  config.score_indices();
  config.em();
  return config;
}

MixtureConfig mixture_config(const RunConfig& config) {
  MixtureConfig mc = config.mixture;
  mc.em = config.em();
  return mc;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::InvalidArgument, std::string("missing required ") + flag);
}

int single(const std::vector<int>& values, const char* what) {
  if (values.size() != 1) {
    throw Error(ErrorKind::InvalidArgument, std::string("expected a single value for ") + what);
  }
  return values.front();
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void run_fit(const Options& o) {
  require(o.data, "--data");
  require(o.out, "--out");
  const RunConfig config = resolve(o);
  const auto cohort = load_cohort(o.data, config.binning);
  const MixtureFit fit = fit_mixture(cohort, single(config.subtypes, "--subtypes"),
                                     single(config.states, "--states"), config.binning,
                                     mixture_config(config));
  save_model(fit.model, o.out, config.mixture.em.bounds);

  auto& out = std::cout;
  out << "alternations," << fit.diagnostics.alternations << '\n';
  out << "converged," << (fit.diagnostics.converged ? 1 : 0) << '\n';
  out << "empty_repairs," << fit.diagnostics.empty_repairs << '\n';
  out << "objective";
  for (double v : fit.model.objective_trace) out << ',' << format_double(v);
  out << '\n';
  out << "subtype,patients,iterations,converged,log_likelihood\n";
  for (int m = 0; m < fit.model.size(); ++m) {
    const auto& d = fit.diagnostics.subtype_fits[static_cast<std::size_t>(m)];
    out << m << ',' << std::count(fit.model.assignments.begin(), fit.model.assignments.end(), m)
        << ',' << d.iterations << ',' << (d.converged ? 1 : 0) << ','
        << format_double(d.log_likelihood_trace.back()) << '\n';
  }
  if (!o.truth.empty()) {
    const auto labels = load_truth_labels(o.truth);
    std::vector<int> truth;
    for (const auto& traj : cohort) {
      const auto it = labels.find(traj.id);
      if (it == labels.end()) throw Error(ErrorKind::ParseError, "truth file lacks patient '" + traj.id + "'");
      truth.push_back(it->second);
    }
    out << "label_accuracy," << format_double(permutation_accuracy(truth, fit.model.assignments)) << '\n';
  }
}

void run_assign(const Options& o) {
  require(o.data, "--data");
  require(o.model, "--model");
  const RunConfig config = resolve(o);
  const MixtureModel mixture = load_model(o.model);
  const auto cohort = load_cohort(o.data, mixture.binning.size() ? mixture.binning : config.binning);
  Sink sink(o.out);
  auto& out = sink.stream();
  out << "patient_id,subtype";
  for (int m = 0; m < mixture.size(); ++m) out << ",score_" << m;
  out << '\n';
  for (const auto& traj : cohort) {
    const auto result = assign_subtype(mixture, traj);
    out << traj.id << ',' << result.subtype;
    for (double s : result.scores) out << ',' << format_double(s);
    out << '\n';
  }
}

std::vector<int> score_indices_for(const RunConfig& config, const MixtureModel& mixture) {
  RunConfig copy = config;
  if (mixture.binning.size()) copy.binning = mixture.binning;
  return copy.score_indices();
}

void write_forecast(std::ostream& out, const ForecastReport& report) {
  out << "subtypes," << report.subtypes << '\n';
  out << "states," << report.states << '\n';
  out << "prefix_fraction," << format_double(report.prefix_fraction) << '\n';
  out << "seed," << report.seed << '\n';
  out << "mean_cross_entropy," << format_double(report.mean) << '\n';
  out << "standard_error," << format_double(report.standard_error) << '\n';
  out << "scored_patients," << report.patients.size() << '\n';
  out << "excluded_patients," << report.excluded_patients << '\n';
  out << "scored_observations," << report.scored_observations << '\n';
  out << "skipped_missing," << report.skipped_missing << '\n';
  out << "patient_id,subtype,cross_entropy,scored,skipped_missing\n";
  for (const auto& p : report.patients) {
    out << p.id << ',' << p.subtype << ',' << format_double(p.cross_entropy) << ',' << p.scored
        << ',' << p.skipped_missing << '\n';
  }
}

void run_forecast(const Options& o) {
  require(o.data, "--data");
  require(o.model, "--model");
  const RunConfig config = resolve(o);
  const MixtureModel mixture = load_model(o.model);
  const auto cohort = load_cohort(o.data, mixture.binning.size() ? mixture.binning : config.binning);
  const auto features = score_indices_for(config, mixture);
  ForecastReport report = forecast_cohort(mixture, cohort, config.prefix_fraction, features);
  report.seed = config.seed;
  Sink sink(o.out);
  write_forecast(sink.stream(), report);
}

void run_grid(const Options& o) {
  require(o.data, "--data");
  const RunConfig config = resolve(o);
  const auto cohort = load_cohort(o.data, config.binning);
  GridConfig grid;
  grid.mixture = mixture_config(config);
  grid.train_fraction = config.train_fraction;
  grid.prefix_fraction = config.prefix_fraction;
  grid.seed = config.seed;
  grid.score_features = config.score_indices();
  const GridReport report = grid_evaluate(cohort, config.binning, config.subtypes, config.states, grid);

  Sink sink(o.out);
  auto& out = sink.stream();
  out << "subtypes,states,mean_cross_entropy,standard_error,test_patients,excluded_patients,"
         "scored_observations,skipped_missing\n";
  for (std::size_t r = 0; r < report.subtype_values.size(); ++r) {
    for (std::size_t c = 0; c < report.state_values.size(); ++c) {
      const auto& cell = report.cell(r, c);
      out << report.subtype_values[r] << ',' << report.state_values[c] << ','
          << format_double(cell.mean) << ',' << format_double(cell.standard_error) << ','
          << cell.patients.size() << ',' << cell.excluded_patients << ','
          << cell.scored_observations << ',' << cell.skipped_missing << '\n';
    }
  }
  std::cerr << render_table(report);
}

void run_simulate(const Options& o) {
  require(o.out, "--out");
  const RunConfig config = resolve(o);
  MixtureModel truth = o.model.empty()
                           ? example_mixture(single(config.subtypes, "--subtypes"),
                                             single(config.states, "--states"), config.binning,
                                             config.mixture.em.mask, config.seed)
                           : load_model(o.model);
  if (truth.binning.size() == 0) truth.binning = config.binning;
  if (config.terminal_intervention && o.model.empty()) {
    const auto em = config.em();
    for (auto& model : truth.subtypes) apply_terminal_intervention(model.emissions, *em.terminal_intervention);
  }
  const SyntheticCohort cohort =
      sample_cohort(truth, config.patients, config.times, config.missing_rate, config.seed);
  save_cohort(o.out, cohort.trajectories, truth.binning);
  save_truth(o.out + ".truth.csv", cohort);
  save_model(truth, o.out + ".model", config.mixture.em.bounds);
  std::cout << "patients," << cohort.trajectories.size() << '\n';
  std::cout << "cohort," << o.out << '\n';
  std::cout << "truth," << o.out << ".truth.csv\n";
  std::cout << "generator," << o.out << ".model\n";
}

void run_report(const Options& o) {
  require(o.model, "--model");
  const RunConfig config = resolve(o);
  const MixtureModel mixture = load_model(o.model);
  const BinningScheme& binning = mixture.binning.size() ? mixture.binning : config.binning;
  Sink sink(o.out);
  auto& out = sink.stream();
  out << "subtype,step,state,expected_duration";
  for (const auto& f : binning.features()) out << ',' << f.name;
  out << '\n';
  for (int m = 0; m < mixture.size(); ++m) {
    const auto steps = progression_trajectory(mixture.subtypes[static_cast<std::size_t>(m)], binning, 0);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      out << m << ',' << i << ',' << s.state << ','
          << (std::isinf(s.expected_duration) ? std::string("inf") : format_double(s.expected_duration));
      for (double v : s.expected_values) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subtyping of irregular categorical time series with CT-HMM mixtures"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "fit a mixture model to a cohort");
  add_common(fit, o);
  fit->add_option("--data", o.data, "cohort CSV");
  fit->add_option("--out", o.out, "model file to write");
  fit->add_option("--truth", o.truth, "ground-truth sidecar for label accuracy");

  auto* assign = app.add_subcommand("assign", "assign patients to subtypes");
  add_common(assign, o);
  assign->add_option("--data", o.data, "cohort CSV");
  assign->add_option("--model", o.model, "model file");
  assign->add_option("--out", o.out, "output CSV (default stdout)");

  auto* forecast = app.add_subcommand("forecast", "prefix-conditioned forecasting cross-entropy");
  add_common(forecast, o);
  forecast->add_option("--data", o.data, "cohort CSV");
  forecast->add_option("--model", o.model, "model file");
  forecast->add_option("--out", o.out, "output CSV (default stdout)");

  auto* grid = app.add_subcommand("grid", "forecast error over a grid of subtype/state counts");
  add_common(grid, o);
  grid->add_option("--data", o.data, "cohort CSV");
  grid->add_option("--out", o.out, "output CSV (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "sample a synthetic cohort");
  add_common(simulate, o);
  simulate->add_option("--model", o.model, "generating model (default: built-in example)");
  simulate->add_option("--out", o.out, "cohort CSV to write");

  auto* report = app.add_subcommand("report", "per-subtype progression trajectories");
  add_common(report, o);
  report->add_option("--model", o.model, "model file");
  report->add_option("--out", o.out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) run_fit(o);
    if (*assign) run_assign(o);
    if (*forecast) run_forecast(o);
    if (*grid) run_grid(o);
    if (*simulate) run_simulate(o);
    if (*report) run_report(o);
  } catch (const Error& e) {
    std::cerr << "error: " << error_name(e.kind()) << ": " << e.detail() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
