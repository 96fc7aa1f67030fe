// Serial reference kernels. Slow and direct on purpose: the tests compare the
// OpenMP paths in learning.cpp against these.

#include "cthmm/error.hpp"
#include "cthmm/learning.hpp"
#include "learning_detail.hpp"

namespace cthmm::reference {

SufficientStats e_step(const SubtypeModel& model, std::span<const Trajectory> trajectories,
                       std::optional<double> gap_quantum) {
  detail::check_compatible(model, trajectories);
  SufficientStats stats(model.states(), model.emissions.bin_counts());
  for (const auto& traj : trajectories)
    detail::accumulate_trajectory(stats, traj, forward_backward(model, traj), gap_quantum);
  return stats;
}

GeneratorUpdate m_step_generator(const SufficientStats& stats, const GeneratorMatrix& previous,
                                 RateBounds bounds, double endpoint_floor) {
  const int k = previous.size();
  if (stats.states() != k) {
    throw Error(ErrorKind::DimensionMismatch, "statistics and generator disagree on K");
  }
  Eigen::MatrixXd jumps = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd sojourn = Eigen::VectorXd::Zero(k);
  for (const auto& [gap, counts] : stats.transition_counts) {
    const EndConditionedStats ecs = end_conditioned_stats(previous, gap, endpoint_floor);
    for (int c = 0; c < k; ++c) {
      for (int d = 0; d < k; ++d) {
        const double weight = counts(c, d);
        if (weight == 0.0) continue;
        for (int a = 0; a < k; ++a) {
          sojourn(a) += weight * ecs.sojourn(c, d, a);
          for (int b = 0; b < k; ++b)
            if (b != a) jumps(a, b) += weight * ecs.transitions(c, d, a, b);
        }
      }
    }
  }
  return detail::finish_generator(jumps, sojourn, previous, bounds);
}

}  // namespace cthmm::reference
