#pragma once

#include <Eigen/Dense>

#include "cthmm/learning.hpp"

namespace cthmm::detail {

/// Adds one trajectory's posteriors to `stats`.
void accumulate_trajectory(SufficientStats& stats, const Trajectory& traj,
                           const PosteriorSummary& posterior, std::optional<double> gap_quantum);

/// Rate update from aggregated expected jumps N(a,b) and sojourns R(a).
GeneratorUpdate finish_generator(const Eigen::MatrixXd& jumps, const Eigen::VectorXd& sojourn,
                                 const GeneratorMatrix& previous, RateBounds bounds);

void check_compatible(const SubtypeModel& model, std::span<const Trajectory> trajectories);

}  // namespace cthmm::detail
