#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cthmm/ctmc.hpp"
#include "cthmm/emissions.hpp"
#include "cthmm/inference.hpp"
#include "cthmm/random.hpp"

namespace cthmm {

enum class MaskKind { Full, Chain };

StructureMask make_mask(MaskKind kind, int states);

/// Pins a binary feature (bin 1 = "present") to the final hidden state:
/// probability 1-epsilon there and epsilon in every other state.
struct InterventionConstraint {
  int feature = 0;
  double epsilon = 1e-3;
};

struct EmConfig {
  int max_iterations = 200;
  double tolerance = 1e-6;  // on |delta ll| / (|ll| + 1)
  double smoothing = 1e-3;  // Laplace pseudo-count per bin
  RateBounds bounds;
  MaskKind mask = MaskKind::Full;
  std::uint64_t seed = 0;
  int restarts = 5;
  std::optional<double> gap_quantum;  // round gaps to this grid when keying C(dt)
  double endpoint_floor = kEndpointFloor;
  std::optional<InterventionConstraint> terminal_intervention;
};

/// Throws InvalidArgument for non-positive tolerance, zero iterations etc.
void validate_config(const EmConfig& config);

/// Key under which a gap's pairwise posteriors are accumulated.
double gap_key(double gap, std::optional<double> quantum);

/// Expected-count statistics of one E-step. Additive over disjoint sets of
/// trajectories.
struct SufficientStats {
  SufficientStats(int states, std::vector<int> bins_per_feature);

  int states() const { return static_cast<int>(initial_counts.size()); }

  /// C_ab(dt): posterior counts of consecutive (a, b) pairs per gap key.
  std::map<double, Eigen::MatrixXd> transition_counts;
  Eigen::VectorXd initial_counts;  // sum_n gamma_{n,t_1}
  BinTensor emission_counts;       // sum gamma * 1[observed in bin j]
  std::size_t trajectories = 0;
  std::size_t timepoints = 0;
  double log_likelihood = 0.0;

  SufficientStats& operator+=(const SufficientStats& other);
};

/// Forward-backward over every trajectory, OpenMP-parallel over fixed
/// chunks so the reduction order (and so the result) does not depend on the
/// thread count. Throws DimensionMismatch for incompatible trajectories.
SufficientStats e_step(const SubtypeModel& model, std::span<const Trajectory> trajectories,
                       std::optional<double> gap_quantum = std::nullopt);

/// w = (counts + eps) / (row total + J eps).
EmissionTable m_step_emissions(const SufficientStats& stats, double smoothing);

/// pi = initial posterior counts, normalized.
Eigen::VectorXd m_step_initial(const SufficientStats& stats);

struct GeneratorUpdate {
  GeneratorMatrix generator;
  int degenerate_states = 0;  // rows kept from the previous generator
};

/// Closed-form rate update from end-conditioned expectations under
/// `previous` weighted by C(dt). Rows whose expected sojourn is below 1e-10
/// are carried over unchanged.
GeneratorUpdate m_step_generator(const SufficientStats& stats, const GeneratorMatrix& previous,
                                 RateBounds bounds = {}, double endpoint_floor = kEndpointFloor);

/// Overwrite the intervention feature's rows so only the final state emits it.
void apply_terminal_intervention(EmissionTable& w, const InterventionConstraint& constraint);

struct FitDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;  // one entry per evaluated model
  std::vector<double> restart_scores;
  int best_restart = 0;
  int degenerate_updates = 0;
};

struct FitResult {
  SubtypeModel model;
  FitDiagnostics diagnostics;
};

/// Seeded starting point: pi ~ Dirichlet(1), masked rates ~ U[0.01, 1],
/// w = global bin frequencies with +-20% multiplicative noise.
SubtypeModel initial_model(std::span<const Trajectory> trajectories, int states,
                           const std::vector<int>& bins_per_feature, const EmConfig& config,
                           Rng& rng);

/// EM from a given model until the relative improvement drops below the
/// tolerance or max_iterations M-steps have run.
FitResult refine_disease_model(std::span<const Trajectory> trajectories, SubtypeModel start,
                               const EmConfig& config);

/// Best of `config.restarts` seeded EM runs.
FitResult fit_disease_model(std::span<const Trajectory> trajectories, int states,
                            const std::vector<int>& bins_per_feature, const EmConfig& config);

/// Straightforward serial versions of the parallel kernels, kept for tests
/// and benchmarks.
namespace reference {

/// One forward_backward call per trajectory with per-gap transition
/// matrices, accumulated in input order.
SufficientStats e_step(const SubtypeModel& model, std::span<const Trajectory> trajectories,
                       std::optional<double> gap_quantum = std::nullopt);

/// Builds the update from the full end_conditioned_stats tensors, one
/// augmented exponential per integrand.
GeneratorUpdate m_step_generator(const SufficientStats& stats, const GeneratorMatrix& previous,
                                 RateBounds bounds = {}, double endpoint_floor = kEndpointFloor);

}  // namespace reference

}  // namespace cthmm
