#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cthmm/emissions.hpp"
#include "cthmm/inference.hpp"
#include "cthmm/learning.hpp"

namespace cthmm {

/// M subtype models sharing K and the feature layout, a subtype prior and
/// the hard assignments of the training cohort.
struct MixtureModel {
  std::vector<SubtypeModel> subtypes;
  Eigen::VectorXd prior;
  std::vector<int> assignments;
  std::vector<double> objective_trace;
  BinningScheme binning;

  int size() const { return static_cast<int>(subtypes.size()); }
  int states() const { return subtypes.empty() ? 0 : subtypes.front().states(); }

  friend bool operator==(const MixtureModel& a, const MixtureModel& b) {
    return a.subtypes == b.subtypes && same_entries(a.prior, b.prior) &&
           a.assignments == b.assignments && a.objective_trace == b.objective_trace &&
           a.binning == b.binning;
  }
};

/// Throws InvariantViolation if any component or the prior is invalid, or
/// the subtypes disagree on K / feature layout.
void validate_mixture(const MixtureModel& mixture, double tolerance = 1e-12);

struct MixtureConfig {
  EmConfig em;
  int max_alternations = 50;
  bool reestimate_prior = false;
};

struct SubtypeScores {
  int subtype = 0;
  std::vector<double> scores;  // log P(m) + log P(Y | m)
};

/// argmax over subtypes of the joint log score; ties go to the lowest index.
SubtypeScores assign_subtype(const MixtureModel& mixture, const Trajectory& traj);

/// Softmax of the joint log scores.
std::vector<double> assignment_posteriors(const MixtureModel& mixture, const Trajectory& traj);

struct MixtureDiagnostics {
  int alternations = 0;
  bool converged = false;
  int empty_repairs = 0;
  std::vector<FitDiagnostics> subtype_fits;  // from the last Step 2
};

struct MixtureFit {
  MixtureModel model;
  MixtureDiagnostics diagnostics;
};

/// Starting partition: seeded k-means++ / Lloyd on each patient's
/// normalized per-feature bin histogram.
std::vector<int> initial_partition(std::span<const Trajectory> trajectories, int subtypes,
                                   const std::vector<int>& bins_per_feature, std::uint64_t seed);

/// Hard-EM subtyping. Alternates assignment of every patient to its best
/// subtype with per-subtype EM refits until no assignment changes or
/// `max_alternations` is reached. Throws TooFewPatients when N < M.
MixtureFit fit_mixture(std::span<const Trajectory> trajectories, int subtypes, int states,
                       const BinningScheme& binning, const MixtureConfig& config);

}  // namespace cthmm
