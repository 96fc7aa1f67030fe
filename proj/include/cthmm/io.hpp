#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cthmm/emissions.hpp"
#include "cthmm/inference.hpp"
#include "cthmm/learning.hpp"
#include "cthmm/mixture.hpp"
#include "cthmm/synthesis.hpp"

namespace cthmm {

/// Every knob of a run, mirrored one-to-one by the JSON config file.
struct RunConfig {
  std::string time_unit = "hours";
  BinningScheme binning;
  std::optional<std::string> intervention_feature;
  bool terminal_intervention = false;
  double intervention_epsilon = 1e-3;
  std::vector<std::string> score_features;  // empty = all non-intervention features
  std::vector<int> subtypes{1};
  std::vector<int> states{1};
  MixtureConfig mixture;
  double train_fraction = 0.8;
  double prefix_fraction = 0.7;
  std::uint64_t seed = 0;
  // simulate
  std::size_t patients = 400;
  TimeProcess times;
  double missing_rate = 0.2;

  /// EmConfig with the seed, mask and intervention settings folded in.
  EmConfig em() const;
  /// Feature indices scored by forecasting.
  std::vector<int> score_indices() const;
};

/// Heart rate on [40, 150] and systolic blood pressure on [40, 200], five
/// bins each, plus a binary intervention flag.
RunConfig default_config();

/// Throws ParseError for malformed JSON or unknown keys and InvalidArgument
/// for values that break RunConfig invariants.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Long-format CSV: patient_id,time,<one column per configured feature>.
/// Empty fields are missing; out-of-range values become missing.
std::vector<Trajectory> read_cohort(std::istream& in, const BinningScheme& binning);
std::vector<Trajectory> load_cohort(const std::string& path, const BinningScheme& binning);

/// Inverse of read_cohort: each bin is written as its center (binary 0/1
/// features as 0 and 1), so re-reading reproduces the same bins.
void write_cohort(std::ostream& out, const std::vector<Trajectory>& cohort,
                  const BinningScheme& binning);
void save_cohort(const std::string& path, const std::vector<Trajectory>& cohort,
                 const BinningScheme& binning);

/// Sidecar with true labels and hidden states: patient_id,subtype,time,state
void save_truth(const std::string& path, const SyntheticCohort& cohort);
/// patient_id -> true subtype
std::map<std::string, int> load_truth_labels(const std::string& path);

inline constexpr int kModelFormatVersion = 1;

/// Versioned plain-text model file; doubles use shortest round-trip form.
void write_model(std::ostream& out, const MixtureModel& mixture, RateBounds bounds = {});
void save_model(const MixtureModel& mixture, const std::string& path, RateBounds bounds = {});

/// Throws VersionMismatch for other format versions and InvariantViolation
/// for anything malformed or inconsistent.
MixtureModel read_model(std::istream& in);
MixtureModel load_model(const std::string& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace cthmm
