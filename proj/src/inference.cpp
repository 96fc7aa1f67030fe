#include "cthmm/inference.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cthmm/error.hpp"

namespace cthmm {

void validate_trajectory(const Trajectory& traj) {
  if (traj.times.empty()) {
    throw Error(ErrorKind::InvalidArgument, "trajectory '" + traj.id + "' has no timepoints");
  }
  if (traj.times.size() != traj.observations.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "trajectory '" + traj.id + "' has mismatched times and observations");
  }
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (!std::isfinite(traj.times[i]) || (i > 0 && !(traj.times[i] > traj.times[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument,
                  "trajectory '" + traj.id + "' timestamps are not strictly increasing");
    }
  }
}

void validate_model(const SubtypeModel& model, double tolerance) {
  const int k = model.states();
  if (k < 1 || model.generator.size() != k || model.emissions.states() != k) {
    throw Error(ErrorKind::InvariantViolation, "initial, generator and emission sizes disagree");
  }
  double sum = 0.0;
  for (int a = 0; a < k; ++a) {
    if (!(model.initial(a) >= 0.0) || !std::isfinite(model.initial(a))) {
      throw Error(ErrorKind::InvariantViolation, "initial distribution has a negative entry");
    }
    sum += model.initial(a);
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "initial distribution sums to " << sum;
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  validate_emissions(model.emissions, tolerance);
}

namespace {

// Emission factors rescaled by their maximum; returns the log of that maximum.
double scaled_emissions(const EmissionTable& w, const ObservationVector& obs,
                        Eigen::VectorXd& out) {
  const int k = w.states();
  out.resize(k);
  double peak = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < k; ++s) {
    out(s) = emission_log_likelihood(w, s, obs);
    peak = std::max(peak, out(s));
  }
  if (!std::isfinite(peak)) {
    out.setZero();
    return peak;
  }
  for (int s = 0; s < k; ++s) out(s) = std::exp(out(s) - peak);
  return peak;
}

std::vector<Eigen::MatrixXd> gap_transitions(const SubtypeModel& model, const Trajectory& traj) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(traj.size() > 0 ? traj.size() - 1 : 0);
  for (std::size_t i = 1; i < traj.size(); ++i)
    out.push_back(transition_matrix(model.generator, traj.times[i] - traj.times[i - 1]).probs);
  return out;
}

void check_dimensions(const SubtypeModel& model, const Trajectory& traj) {
  validate_trajectory(traj);
  for (const auto& obs : traj.observations) check_observation(model.emissions, obs);
}

}  // namespace

PosteriorSummary forward_backward(const SubtypeModel& model, const Trajectory& traj) {
  check_dimensions(model, traj);
  const auto transitions = gap_transitions(model, traj);
  return forward_backward(model, traj, transitions);
}

PosteriorSummary forward_backward(const SubtypeModel& model, const Trajectory& traj,
                                  std::span<const Eigen::MatrixXd> transitions) {
  const auto n = static_cast<Eigen::Index>(traj.size());
  const int k = model.states();
  if (transitions.size() + 1 != traj.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one transition matrix per gap");
  }

  PosteriorSummary out;
  out.gamma = Eigen::MatrixXd::Zero(n, k);
  out.log_scaling = Eigen::VectorXd::Zero(n);
  out.xi.assign(static_cast<std::size_t>(n - 1), Eigen::MatrixXd::Zero(k, k));

  Eigen::MatrixXd alpha(n, k);
  Eigen::MatrixXd emit(n, k);
  Eigen::VectorXd scale(n);
  Eigen::VectorXd e;
  double ll = 0.0;

  for (Eigen::Index i = 0; i < n; ++i) {
    const double log_peak = scaled_emissions(model.emissions, traj.observations[i], e);
    emit.row(i) = e.transpose();
    Eigen::RowVectorXd prior = i == 0 ? Eigen::RowVectorXd(model.initial.transpose())
                                      : Eigen::RowVectorXd(alpha.row(i - 1) * transitions[i - 1]);
    alpha.row(i) = prior.cwiseProduct(e.transpose());
    scale(i) = alpha.row(i).sum();
    if (!(scale(i) > 0.0) || !std::isfinite(log_peak)) {
      out.log_likelihood = -std::numeric_limits<double>::infinity();
      return out;
    }
    alpha.row(i) /= scale(i);
    out.log_scaling(i) = std::log(scale(i)) + log_peak;
    ll += out.log_scaling(i);
  }
  out.log_likelihood = ll;

  Eigen::RowVectorXd beta = Eigen::RowVectorXd::Ones(k);
  out.gamma.row(n - 1) = alpha.row(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const Eigen::MatrixXd& p = transitions[i];
    const Eigen::RowVectorXd weighted = emit.row(i + 1).cwiseProduct(beta) / scale(i + 1);
    Eigen::MatrixXd& xi = out.xi[static_cast<std::size_t>(i)];
    xi = alpha.row(i).transpose().asDiagonal() * p * weighted.asDiagonal();
    xi /= xi.sum();
    beta = (p * weighted.transpose()).transpose();
    Eigen::RowVectorXd g = alpha.row(i).cwiseProduct(beta);
    out.gamma.row(i) = g / g.sum();
  }
  return out;
}

double trajectory_log_likelihood(const SubtypeModel& model, const Trajectory& traj) {
  return filter(model, traj).log_likelihood;
}

FilteredState filter(const SubtypeModel& model, const Trajectory& traj) {
  check_dimensions(model, traj);
  FilteredState out{model.initial, 0.0};
  Eigen::VectorXd e;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i > 0) {
      const auto p = transition_matrix(model.generator, traj.times[i] - traj.times[i - 1]);
      out.distribution = (out.distribution.transpose() * p.probs).transpose();
    }
    const double log_peak = scaled_emissions(model.emissions, traj.observations[i], e);
    out.distribution = out.distribution.cwiseProduct(e);
    const double c = out.distribution.sum();
    if (!(c > 0.0) || !std::isfinite(log_peak)) {
      out.log_likelihood = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.distribution /= c;
    out.log_likelihood += std::log(c) + log_peak;
  }
  return out;
}

std::vector<BinDistributions> predictive_bin_distributions(const SubtypeModel& model,
                                                           const Trajectory& prefix,
                                                           std::span<const double> future_times) {
  const double end = prefix.times.empty() ? 0.0 : prefix.times.back();
  for (std::size_t i = 0; i < future_times.size(); ++i) {
    if (future_times[i] < end) {
      std::ostringstream os;
      os << "query time " << future_times[i] << " precedes prefix end " << end;
      throw Error(ErrorKind::NonCausalQuery, os.str());
    }
    if (i > 0 && !(future_times[i] > future_times[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "query times must be strictly increasing");
    }
  }

  const FilteredState state = filter(model, prefix);
  const auto& w = model.emissions;
  Eigen::VectorXd dist = state.distribution;
  if (!std::isfinite(state.log_likelihood)) dist = model.initial;

  std::vector<BinDistributions> out;
  out.reserve(future_times.size());
  double previous = end;
  for (double t : future_times) {
    if (t > previous) {
      dist = (dist.transpose() * transition_matrix(model.generator, t - previous).probs).transpose();
    }
    previous = t;
    BinDistributions per_feature(static_cast<std::size_t>(w.features()));
    for (int d = 0; d < w.features(); ++d) {
      auto& probs = per_feature[static_cast<std::size_t>(d)];
      probs.assign(static_cast<std::size_t>(w.bins(d)), 0.0);
      for (int s = 0; s < w.states(); ++s)
        for (int j = 0; j < w.bins(d); ++j) probs[static_cast<std::size_t>(j)] += dist(s) * w(s, d, j);
    }
    out.push_back(std::move(per_feature));
  }
  return out;
}

std::vector<ProgressionStep> progression_trajectory(const SubtypeModel& model,
                                                    const BinningScheme& scheme, int start_state) {
  if (!is_chain_mask(model.generator.mask())) {
    throw Error(ErrorKind::StructureNotChain, "progression needs a left-to-right structure");
  }
  const int k = model.states();
  if (start_state < 0 || start_state >= k) {
    throw Error(ErrorKind::InvalidArgument, "start state out of range");
  }
  if (static_cast<int>(scheme.size()) != model.emissions.features()) {
    throw Error(ErrorKind::DimensionMismatch, "binning scheme does not match emission table");
  }
  const auto durations = sojourn_expectation(model.generator);
  std::vector<ProgressionStep> out;
  for (int s = start_state; s < k; ++s) {
    ProgressionStep step;
    step.state = s;
    step.expected_duration = durations[static_cast<std::size_t>(s)];
    for (int d = 0; d < model.emissions.features(); ++d)
      step.expected_values.push_back(expected_feature_value(model.emissions, s, d, scheme));
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace cthmm
