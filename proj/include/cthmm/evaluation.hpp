#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cthmm/inference.hpp"
#include "cthmm/mixture.hpp"

namespace cthmm {

struct CohortSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n); the first ceil(fraction * n) go to training.
/// Throws EmptyCohort for n == 0 and InvalidArgument unless 0 < fraction < 1.
CohortSplit split_cohort(std::size_t patients, double train_fraction, std::uint64_t seed);

struct PrefixSplit {
  Trajectory prefix;    // first ceil(fraction * n) timepoints
  Trajectory held_out;  // the rest, possibly empty
};

PrefixSplit prefix_split(const Trajectory& traj, double prefix_fraction);

struct PatientForecast {
  std::string id;
  int subtype = 0;
  double cross_entropy = 0.0;  // mean -ln p over scored held-out observations
  std::size_t scored = 0;
  std::size_t skipped_missing = 0;
};

/// Assigns a subtype from the prefix and scores the held-out observations of
/// the selected features (all features when `features` is empty). Throws
/// NoHeldOutObservations when nothing remains to score.
PatientForecast forecast_cross_entropy(const MixtureModel& mixture, const Trajectory& traj,
                                       double prefix_fraction,
                                       std::span<const int> features = {});

struct ForecastReport {
  int subtypes = 0;
  int states = 0;
  double prefix_fraction = 0.7;
  std::uint64_t seed = 0;
  std::vector<PatientForecast> patients;
  double mean = 0.0;
  double standard_error = 0.0;  // sample stdev / sqrt(#scored patients)
  std::size_t scored_observations = 0;
  std::size_t skipped_missing = 0;
  std::size_t excluded_patients = 0;  // nothing held out to score
};

/// Per-patient mean first, then the mean over patients.
ForecastReport forecast_cohort(const MixtureModel& mixture, std::span<const Trajectory> cohort,
                               double prefix_fraction, std::span<const int> features = {});

/// Recomputes mean and standard error from the stored per-patient scores.
void summarize(ForecastReport& report);

struct GridConfig {
  MixtureConfig mixture;
  double train_fraction = 0.8;
  double prefix_fraction = 0.7;
  std::uint64_t seed = 0;
  std::vector<int> score_features;  // empty = every feature
};

struct GridReport {
  std::vector<int> subtype_values;
  std::vector<int> state_values;
  std::vector<ForecastReport> cells;  // row-major: subtypes x states
  CohortSplit split;

  const ForecastReport& cell(std::size_t subtype_row, std::size_t state_col) const {
    return cells[subtype_row * state_values.size() + state_col];
  }
};

/// One shared train/test split; fit_mixture and forecast_cohort per (M, K).
GridReport grid_evaluate(std::span<const Trajectory> cohort, const BinningScheme& binning,
                         const std::vector<int>& subtype_values,
                         const std::vector<int>& state_values, const GridConfig& config);

/// Fraction of matching labels under the best relabeling of `predicted`
/// (brute force over permutations; meant for a handful of subtypes).
double permutation_accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Text table, one row per subtype count and one column per state count.
std::string render_table(const GridReport& report);

}  // namespace cthmm
