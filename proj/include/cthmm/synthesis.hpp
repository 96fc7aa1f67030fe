#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cthmm/ctmc.hpp"
#include "cthmm/inference.hpp"
#include "cthmm/learning.hpp"
#include "cthmm/mixture.hpp"
#include "cthmm/random.hpp"

namespace cthmm {

/// Piecewise-constant CTMC path on [0, horizon]: states[i] holds from
/// jump_times[i] until the next jump (jump_times[0] == 0).
struct StatePath {
  std::vector<double> jump_times;
  std::vector<int> states;
  double horizon = 0.0;

  int state_at(double t) const;
};

/// Gillespie simulation started from `initial_state`.
StatePath sample_path_from(const GeneratorMatrix& q, int initial_state, double horizon, Rng& rng);

/// Gillespie simulation with the initial state drawn from `initial`.
StatePath sample_hidden_path(const GeneratorMatrix& q, const Eigen::VectorXd& initial,
                             double horizon, Rng& rng);
StatePath sample_hidden_path(const GeneratorMatrix& q, const Eigen::VectorXd& initial,
                             double horizon, std::uint64_t seed);

struct SampledTrajectory {
  Trajectory trajectory;
  std::vector<int> hidden;  // state at each observation time
};

/// Hidden path over [first, last] observation time, one categorical draw
/// per feature per time, each independently masked with `missing_rate`.
SampledTrajectory sample_trajectory(const SubtypeModel& model, std::span<const double> obs_times,
                                    double missing_rate, Rng& rng);

struct TimeProcess {
  int min_observations = 5;
  int max_observations = 40;
  double mean_gap = 1.0;  // exponential inter-observation gaps
};

struct SyntheticCohort {
  std::vector<Trajectory> trajectories;
  std::vector<int> labels;
  std::vector<std::vector<int>> hidden_states;
  std::uint64_t seed = 0;
  TimeProcess times;
  double missing_rate = 0.0;
};

/// Patient i draws from its own stream make_rng(seed, ., i), so the cohort
/// does not depend on thread count.
SyntheticCohort sample_cohort(const MixtureModel& mixture, std::size_t patients,
                              const TimeProcess& times, double missing_rate, std::uint64_t seed);

/// A mixture with distinguishable subtypes for demos and end-to-end runs:
/// state k of subtype m puts 70% of each feature's mass on one bin that
/// shifts with k and m. Rates are drawn from U[0.2, 1].
MixtureModel example_mixture(int subtypes, int states, const BinningScheme& binning, MaskKind mask,
                             std::uint64_t seed);

}  // namespace cthmm
