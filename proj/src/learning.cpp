#include "cthmm/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cthmm/error.hpp"
#include "learning_detail.hpp"
#include "parallel.hpp"

namespace cthmm {

namespace {

// Trajectories per E-step work item. Fixed so the reduction order does not
// depend on how many threads run.
constexpr std::size_t kChunk = 32;

constexpr double kDegenerateSojourn = 1e-10;

}  // namespace

StructureMask make_mask(MaskKind kind, int states) {
  return kind == MaskKind::Chain ? chain_mask(states) : full_mask(states);
}

void validate_config(const EmConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (config.max_iterations < 1) fail("max_iterations must be at least 1");
  if (!(config.tolerance > 0.0)) fail("tolerance must be positive");
  if (!(config.smoothing >= 0.0)) fail("smoothing must be non-negative");
  if (config.restarts < 1) fail("restarts must be at least 1");
  if (!(config.bounds.q_min > 0.0) || !(config.bounds.q_min <= config.bounds.q_max)) {
    fail("rate bounds must satisfy 0 < q_min <= q_max");
  }
  if (config.gap_quantum && !(*config.gap_quantum > 0.0)) fail("gap quantum must be positive");
  if (config.terminal_intervention) {
    const double eps = config.terminal_intervention->epsilon;
    if (!(eps > 0.0 && eps < 0.5)) fail("intervention epsilon must lie in (0, 0.5)");
  }
}

double gap_key(double gap, std::optional<double> quantum) {
  if (!quantum) return gap;
  return std::max(*quantum, std::round(gap / *quantum) * *quantum);
}

SufficientStats::SufficientStats(int states, std::vector<int> bins_per_feature)
    : initial_counts(Eigen::VectorXd::Zero(states)),
      emission_counts(states, std::move(bins_per_feature)) {}

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
  if (other.states() != states()) {
    throw Error(ErrorKind::DimensionMismatch, "sufficient statistics have different state counts");
  }
  for (const auto& [key, counts] : other.transition_counts) {
    auto [it, inserted] = transition_counts.try_emplace(key, counts);
    if (!inserted) it->second += counts;
  }
  initial_counts += other.initial_counts;
  emission_counts += other.emission_counts;
  trajectories += other.trajectories;
  timepoints += other.timepoints;
  log_likelihood += other.log_likelihood;
  return *this;
}

namespace detail {

void check_compatible(const SubtypeModel& model, std::span<const Trajectory> trajectories) {
  for (const auto& traj : trajectories) {
    validate_trajectory(traj);
    for (const auto& obs : traj.observations) check_observation(model.emissions, obs);
  }
}

void accumulate_trajectory(SufficientStats& stats, const Trajectory& traj,
                           const PosteriorSummary& posterior, std::optional<double> gap_quantum) {
  const int k = stats.states();
  stats.trajectories += 1;
  stats.timepoints += traj.size();
  stats.log_likelihood += posterior.log_likelihood;
  if (!std::isfinite(posterior.log_likelihood)) return;

  stats.initial_counts += posterior.gamma.row(0).transpose();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& obs = traj.observations[i];
    for (int d = 0; d < stats.emission_counts.features(); ++d) {
      const int bin = obs[static_cast<std::size_t>(d)];
      if (bin == kMissing) continue;
      for (int s = 0; s < k; ++s)
        stats.emission_counts(s, d, bin) += posterior.gamma(static_cast<Eigen::Index>(i), s);
    }
  }
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double key = gap_key(traj.times[i] - traj.times[i - 1], gap_quantum);
    const auto& xi = posterior.xi[i - 1];
    auto [it, inserted] = stats.transition_counts.try_emplace(key, xi);
    if (!inserted) it->second += xi;
  }
}

GeneratorUpdate finish_generator(const Eigen::MatrixXd& jumps, const Eigen::VectorXd& sojourn,
                                 const GeneratorMatrix& previous, RateBounds bounds) {
  const int k = previous.size();
  const auto& mask = previous.mask();
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(k, k);
  int degenerate = 0;
  for (int a = 0; a < k; ++a) {
    bool has_exit = false;
    for (int b = 0; b < k; ++b) has_exit = has_exit || (b != a && mask(a, b));
    if (!has_exit) continue;
    if (!(sojourn(a) >= kDegenerateSojourn)) {
      ++degenerate;
      for (int b = 0; b < k; ++b)
        if (b != a) raw(a, b) = previous(a, b);
      continue;
    }
    for (int b = 0; b < k; ++b) {
      if (b == a || !mask(a, b)) continue;
      raw(a, b) = std::clamp(jumps(a, b) / sojourn(a), bounds.q_min, bounds.q_max);
    }
  }
  return {GeneratorMatrix::validate(raw, mask, bounds), degenerate};
}

}  // namespace detail

SufficientStats e_step(const SubtypeModel& model, std::span<const Trajectory> trajectories,
                       std::optional<double> gap_quantum) {
  detail::check_compatible(model, trajectories);
  const int k = model.states();
  const auto& bins = model.emissions.bin_counts();

  std::vector<double> gaps;
  for (const auto& traj : trajectories)
    for (std::size_t i = 1; i < traj.size(); ++i) gaps.push_back(traj.times[i] - traj.times[i - 1]);
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());

  std::vector<Eigen::MatrixXd> probs(gaps.size());
  detail::parallel_for(gaps.size(), [&](std::size_t i) {
    probs[i] = transition_matrix(model.generator, gaps[i]).probs;
  });

  const std::size_t chunks = (trajectories.size() + kChunk - 1) / kChunk;
  std::vector<SufficientStats> partial(chunks, SufficientStats(k, bins));
  detail::parallel_for(chunks, [&](std::size_t c) {
    std::vector<Eigen::MatrixXd> steps;
    const std::size_t end = std::min(trajectories.size(), (c + 1) * kChunk);
    for (std::size_t n = c * kChunk; n < end; ++n) {
      const auto& traj = trajectories[n];
      steps.clear();
      for (std::size_t i = 1; i < traj.size(); ++i) {
        const double gap = traj.times[i] - traj.times[i - 1];
        const auto at = std::lower_bound(gaps.begin(), gaps.end(), gap) - gaps.begin();
        steps.push_back(probs[static_cast<std::size_t>(at)]);
      }
      detail::accumulate_trajectory(partial[c], traj, forward_backward(model, traj, steps),
                                    gap_quantum);
    }
  });

  SufficientStats total(k, bins);
  for (const auto& part : partial) total += part;
  return total;
}

EmissionTable m_step_emissions(const SufficientStats& stats, double smoothing) {
  const auto& counts = stats.emission_counts;
  EmissionTable w(counts.states(), counts.bin_counts());
  for (int k = 0; k < counts.states(); ++k) {
    for (int d = 0; d < counts.features(); ++d) {
      const int bins = counts.bins(d);
      double total = 0.0;
      for (double c : counts.row(k, d)) total += c;
      const double denom = total + bins * smoothing;
      for (int j = 0; j < bins; ++j)
        w(k, d, j) = denom > 0.0 ? (counts(k, d, j) + smoothing) / denom : 1.0 / bins;
    }
  }
  return w;
}

Eigen::VectorXd m_step_initial(const SufficientStats& stats) {
  const double total = stats.initial_counts.sum();
  if (!(total > 0.0)) {
    return Eigen::VectorXd::Constant(stats.states(), 1.0 / stats.states());
  }
  return stats.initial_counts / total;
}

GeneratorUpdate m_step_generator(const SufficientStats& stats, const GeneratorMatrix& previous,
                                 RateBounds bounds, double endpoint_floor) {
  const int k = previous.size();
  if (stats.states() != k) {
    throw Error(ErrorKind::DimensionMismatch, "statistics and generator disagree on K");
  }
  std::vector<std::pair<double, const Eigen::MatrixXd*>> keys;
  keys.reserve(stats.transition_counts.size());
  for (const auto& [gap, counts] : stats.transition_counts) keys.emplace_back(gap, &counts);

  std::vector<WeightedPathStats> parts(keys.size());
  detail::parallel_for(keys.size(), [&](std::size_t i) {
    parts[i] = weighted_path_stats(previous, keys[i].first, *keys[i].second, endpoint_floor);
  });

  Eigen::MatrixXd jumps = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd sojourn = Eigen::VectorXd::Zero(k);
  for (const auto& part : parts) {
    jumps += part.transitions;
    sojourn += part.sojourn;
  }
  return detail::finish_generator(jumps, sojourn, previous, bounds);
}

void apply_terminal_intervention(EmissionTable& w, const InterventionConstraint& constraint) {
  const int d = constraint.feature;
  if (d < 0 || d >= w.features() || w.bins(d) != 2) {
    throw Error(ErrorKind::InvalidArgument, "intervention feature must be a binary feature");
  }
  const int last = w.states() - 1;
  for (int k = 0; k < w.states(); ++k) {
    const double present = k == last ? 1.0 - constraint.epsilon : constraint.epsilon;
    w(k, d, 1) = present;
    w(k, d, 0) = 1.0 - present;
  }
}

SubtypeModel initial_model(std::span<const Trajectory> trajectories, int states,
                           const std::vector<int>& bins_per_feature, const EmConfig& config,
                           Rng& rng) {
  if (states < 1) throw Error(ErrorKind::InvalidArgument, "need at least one hidden state");

  BinTensor global(1, bins_per_feature);
  for (const auto& traj : trajectories)
    for (const auto& obs : traj.observations)
      for (std::size_t d = 0; d < obs.size() && d < bins_per_feature.size(); ++d)
        if (obs[d] != kMissing) global(0, static_cast<int>(d), obs[d]) += 1.0;

  std::exponential_distribution<double> unit_exp(1.0);
  Eigen::VectorXd pi(states);
  for (int k = 0; k < states; ++k) pi(k) = unit_exp(rng);
  pi /= pi.sum();

  std::uniform_real_distribution<double> rate(0.01, 1.0);
  const StructureMask mask = make_mask(config.mask, states);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(states, states);
  for (int a = 0; a < states; ++a)
    for (int b = 0; b < states; ++b)
      if (mask(a, b)) raw(a, b) = rate(rng);

  std::uniform_real_distribution<double> noise(0.8, 1.2);
  EmissionTable w(states, bins_per_feature);
  for (int k = 0; k < states; ++k) {
    for (int d = 0; d < w.features(); ++d) {
      double sum = 0.0;
      for (int j = 0; j < w.bins(d); ++j) {
        w(k, d, j) = (global(0, d, j) + config.smoothing) * noise(rng);
        sum += w(k, d, j);
      }
      for (int j = 0; j < w.bins(d); ++j) w(k, d, j) = sum > 0.0 ? w(k, d, j) / sum : 1.0 / w.bins(d);
    }
  }
  if (config.terminal_intervention) apply_terminal_intervention(w, *config.terminal_intervention);

  return {std::move(pi), GeneratorMatrix::validate(raw, mask, config.bounds), std::move(w)};
}

FitResult refine_disease_model(std::span<const Trajectory> trajectories, SubtypeModel start,
                               const EmConfig& config) {
  validate_config(config);
  if (trajectories.empty()) throw Error(ErrorKind::EmptyCohort, "no trajectories to fit");
  validate_model(start, 1e-10);

  FitResult result{std::move(start), {}};
  auto& diag = result.diagnostics;
  SufficientStats stats = e_step(result.model, trajectories, config.gap_quantum);
  double ll = stats.log_likelihood;
  diag.log_likelihood_trace.push_back(ll);

  for (int it = 0; it < config.max_iterations; ++it) {
    EmissionTable w = m_step_emissions(stats, config.smoothing);
    if (config.terminal_intervention) apply_terminal_intervention(w, *config.terminal_intervention);
    auto update =
        m_step_generator(stats, result.model.generator, config.bounds, config.endpoint_floor);
    diag.degenerate_updates += update.degenerate_states;
    SubtypeModel next{m_step_initial(stats), std::move(update.generator), std::move(w)};
    validate_model(next, 1e-10);

    stats = e_step(next, trajectories, config.gap_quantum);
    result.model = std::move(next);
    diag.iterations = it + 1;
    const double next_ll = stats.log_likelihood;
    diag.log_likelihood_trace.push_back(next_ll);
    if (!std::isfinite(next_ll)) {
      throw Error(ErrorKind::DegenerateOccupancy, "log-likelihood became non-finite during EM");
    }
    // A single state has no latent structure: one M-step is the optimum.
    if (result.model.states() == 1 ||
        std::abs(next_ll - ll) / (std::abs(next_ll) + 1.0) < config.tolerance) {
      diag.converged = true;
      break;
    }
    ll = next_ll;
  }
  return result;
}

FitResult fit_disease_model(std::span<const Trajectory> trajectories, int states,
                            const std::vector<int>& bins_per_feature, const EmConfig& config) {
  validate_config(config);
  if (trajectories.empty()) throw Error(ErrorKind::EmptyCohort, "no trajectories to fit");
  if (states < 1) throw Error(ErrorKind::InvalidArgument, "need at least one hidden state");

  const int restarts = states == 1 ? 1 : config.restarts;
  std::optional<FitResult> best;
  std::vector<double> scores;
  int best_index = 0;
  std::exception_ptr last_error;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(config.seed, 1, static_cast<std::uint64_t>(r));
    try {
      SubtypeModel start = initial_model(trajectories, states, bins_per_feature, config, rng);
      FitResult fit = refine_disease_model(trajectories, std::move(start), config);
      const double score = fit.diagnostics.log_likelihood_trace.back();
      scores.push_back(score);
      if (!best || score > best->diagnostics.log_likelihood_trace.back()) {
        best = std::move(fit);
        best_index = r;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateOccupancy && e.kind() != ErrorKind::ExpmInaccuracy) throw;
      scores.push_back(-std::numeric_limits<double>::infinity());
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);
  best->diagnostics.restart_scores = std::move(scores);
  best->diagnostics.best_restart = best_index;
  return std::move(*best);
}

}  // namespace cthmm
