#include "cthmm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "cthmm/error.hpp"
#include "cthmm/random.hpp"

namespace cthmm {

namespace {

// ceil(fraction * n), robust to products like 0.7 * 20 landing a hair above
// an integer.
std::size_t ceil_share(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

void check_fraction(double fraction, const char* what) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must lie in (0, 1)");
  }
}

}  // namespace

CohortSplit split_cohort(std::size_t patients, double train_fraction, std::uint64_t seed) {
  check_fraction(train_fraction, "train fraction");
  if (patients == 0) throw Error(ErrorKind::EmptyCohort, "cannot split an empty cohort");
  std::vector<std::size_t> order(patients);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, 3);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t cut = std::min(patients, ceil_share(train_fraction, patients));
  return {std::vector<std::size_t>(order.begin(), order.begin() + static_cast<long>(cut)),
          std::vector<std::size_t>(order.begin() + static_cast<long>(cut), order.end())};
}

PrefixSplit prefix_split(const Trajectory& traj, double prefix_fraction) {
  check_fraction(prefix_fraction, "prefix fraction");
  const std::size_t n = traj.size();
  const std::size_t keep = std::clamp<std::size_t>(ceil_share(prefix_fraction, n), 1, n);
  PrefixSplit out;
  out.prefix.id = traj.id;
  out.held_out.id = traj.id;
  out.prefix.times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(keep));
  out.prefix.observations.assign(traj.observations.begin(),
                                 traj.observations.begin() + static_cast<long>(keep));
  out.held_out.times.assign(traj.times.begin() + static_cast<long>(keep), traj.times.end());
  out.held_out.observations.assign(traj.observations.begin() + static_cast<long>(keep),
                                   traj.observations.end());
  return out;
}

PatientForecast forecast_cross_entropy(const MixtureModel& mixture, const Trajectory& traj,
                                       double prefix_fraction, std::span<const int> features) {
  const PrefixSplit split = prefix_split(traj, prefix_fraction);
  if (split.held_out.times.empty()) {
    throw Error(ErrorKind::NoHeldOutObservations, "trajectory '" + traj.id + "' is too short");
  }
  const int subtype = assign_subtype(mixture, split.prefix).subtype;
  const auto& model = mixture.subtypes[static_cast<std::size_t>(subtype)];
  const auto predicted = predictive_bin_distributions(model, split.prefix, split.held_out.times);

  std::vector<int> scored_features(features.begin(), features.end());
  if (scored_features.empty()) {
    scored_features.resize(static_cast<std::size_t>(model.emissions.features()));
    std::iota(scored_features.begin(), scored_features.end(), 0);
  }

  PatientForecast out;
  out.id = traj.id;
  out.subtype = subtype;
  double total = 0.0;
  for (std::size_t i = 0; i < split.held_out.times.size(); ++i) {
    const auto& obs = split.held_out.observations[i];
    for (int d : scored_features) {
      if (d < 0 || d >= model.emissions.features()) {
        throw Error(ErrorKind::UnknownFeature, "scored feature index out of range");
      }
      const int bin = obs[static_cast<std::size_t>(d)];
      if (bin == kMissing) {
        ++out.skipped_missing;
        continue;
      }
      total -= std::log(predicted[i][static_cast<std::size_t>(d)][static_cast<std::size_t>(bin)]);
      ++out.scored;
    }
  }
  if (out.scored == 0) {
    throw Error(ErrorKind::NoHeldOutObservations,
                "trajectory '" + traj.id + "' has no observed held-out values");
  }
  out.cross_entropy = total / static_cast<double>(out.scored);
  return out;
}

void summarize(ForecastReport& report) {
  const auto n = static_cast<double>(report.patients.size());
  report.mean = 0.0;
  report.standard_error = 0.0;
  report.scored_observations = 0;
  report.skipped_missing = 0;
  if (report.patients.empty()) return;
  for (const auto& p : report.patients) {
    report.mean += p.cross_entropy;
    report.scored_observations += p.scored;
    report.skipped_missing += p.skipped_missing;
  }
  report.mean /= n;
  if (report.patients.size() > 1) {
    double ss = 0.0;
    for (const auto& p : report.patients) ss += (p.cross_entropy - report.mean) * (p.cross_entropy - report.mean);
    report.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
}

ForecastReport forecast_cohort(const MixtureModel& mixture, std::span<const Trajectory> cohort,
                               double prefix_fraction, std::span<const int> features) {
  ForecastReport report;
  report.subtypes = mixture.size();
  report.states = mixture.states();
  report.prefix_fraction = prefix_fraction;
  for (const auto& traj : cohort) {
    try {
      report.patients.push_back(forecast_cross_entropy(mixture, traj, prefix_fraction, features));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoHeldOutObservations) throw;
      ++report.excluded_patients;
    }
  }
  summarize(report);
  return report;
}

GridReport grid_evaluate(std::span<const Trajectory> cohort, const BinningScheme& binning,
                         const std::vector<int>& subtype_values,
                         const std::vector<int>& state_values, const GridConfig& config) {
  if (subtype_values.empty() || state_values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "grid needs at least one subtype and state value");
  }
  GridReport report;
  report.subtype_values = subtype_values;
  report.state_values = state_values;
  report.split = split_cohort(cohort.size(), config.train_fraction, config.seed);

  std::vector<Trajectory> train;
  std::vector<Trajectory> test;
  for (std::size_t i : report.split.train) train.push_back(cohort[i]);
  for (std::size_t i : report.split.test) test.push_back(cohort[i]);

  for (int m : subtype_values) {
    for (int k : state_values) {
      MixtureConfig cell_config = config.mixture;
      cell_config.em.seed = config.seed;
      const MixtureFit fit = fit_mixture(train, m, k, binning, cell_config);
      ForecastReport cell = forecast_cohort(fit.model, test, config.prefix_fraction, config.score_features);
      cell.seed = config.seed;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

double permutation_accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::DimensionMismatch, "label vectors differ in length");
  }
  if (truth.empty()) return 1.0;
  int labels = 0;
  for (int t : truth) labels = std::max(labels, t + 1);
  for (int p : predicted) labels = std::max(labels, p + 1);
  if (labels > 9) throw Error(ErrorKind::InvalidArgument, "too many labels for exhaustive matching");
  std::vector<int> perm(static_cast<std::size_t>(labels));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (perm[static_cast<std::size_t>(predicted[i])] == truth[i]) ++hits;
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

std::string render_table(const GridReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::setw(10) << "subtypes";
  for (int k : report.state_values) os << " | " << std::setw(17) << ("K=" + std::to_string(k));
  os << '\n';
  for (std::size_t r = 0; r < report.subtype_values.size(); ++r) {
    os << std::setw(10) << ("M=" + std::to_string(report.subtype_values[r]));
    for (std::size_t c = 0; c < report.state_values.size(); ++c) {
      const auto& cell = report.cell(r, c);
      std::ostringstream entry;
      entry << std::fixed << std::setprecision(4) << cell.mean << " +- " << cell.standard_error;
      os << " | " << std::setw(17) << entry.str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace cthmm
