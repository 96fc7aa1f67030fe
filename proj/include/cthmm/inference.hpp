#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cthmm/ctmc.hpp"
#include "cthmm/emissions.hpp"

namespace cthmm {

/// One patient's irregularly timed observations.
struct Trajectory {
  std::string id;
  std::vector<double> times;  // strictly increasing
  std::vector<ObservationVector> observations;

  std::size_t size() const { return times.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Throws InvalidArgument for empty, unsorted or ragged trajectories.
void validate_trajectory(const Trajectory& traj);

/// Initial distribution, generator and emission table of one subtype.
struct SubtypeModel {
  Eigen::VectorXd initial;
  GeneratorMatrix generator;
  EmissionTable emissions;

  int states() const { return static_cast<int>(initial.size()); }

  friend bool operator==(const SubtypeModel& a, const SubtypeModel& b) {
    return same_entries(a.initial, b.initial) && a.generator == b.generator && a.emissions == b.emissions;
  }
};

/// Throws InvariantViolation when pi, Q or w break their invariants or
/// the three disagree on K.
void validate_model(const SubtypeModel& model, double tolerance = 1e-12);

struct PosteriorSummary {
  double log_likelihood = 0.0;
  Eigen::MatrixXd gamma;            // n x K
  std::vector<Eigen::MatrixXd> xi;  // n-1 slices of K x K
  Eigen::VectorXd log_scaling;      // per-step log normalizers
};

/// Scaled forward-backward. Transition matrices are computed per gap.
PosteriorSummary forward_backward(const SubtypeModel& model, const Trajectory& traj);

/// Same, with caller-supplied transition matrices (one per consecutive pair).
PosteriorSummary forward_backward(const SubtypeModel& model, const Trajectory& traj,
                                  std::span<const Eigen::MatrixXd> transitions);

double trajectory_log_likelihood(const SubtypeModel& model, const Trajectory& traj);

/// P(Z_{t_n} | Y_{1:n}) and log P(Y_{1:n}) from the forward pass alone.
struct FilteredState {
  Eigen::VectorXd distribution;
  double log_likelihood = 0.0;
};

FilteredState filter(const SubtypeModel& model, const Trajectory& traj);

/// Per feature, a probability vector over that feature's bins.
using BinDistributions = std::vector<std::vector<double>>;

/// Predictive bin distributions at each of `future_times` given the prefix.
/// Throws NonCausalQuery if a query precedes the end of the prefix.
std::vector<BinDistributions> predictive_bin_distributions(const SubtypeModel& model,
                                                           const Trajectory& prefix,
                                                           std::span<const double> future_times);

struct ProgressionStep {
  int state = 0;
  double expected_duration = 0.0;  // +inf for the absorbing state
  std::vector<double> expected_values;
};

/// States start..K-1 of a left-to-right model with their mean sojourn and
/// expected feature values. Throws StructureNotChain otherwise.
std::vector<ProgressionStep> progression_trajectory(const SubtypeModel& model,
                                                    const BinningScheme& scheme, int start_state);

}  // namespace cthmm
