#include "cthmm/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "cthmm/error.hpp"
#include "parallel.hpp"

namespace cthmm {

int StatePath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto idx = it == jump_times.begin() ? 0 : (it - jump_times.begin()) - 1;
  return states[static_cast<std::size_t>(idx)];
}

namespace {

int draw_index(std::span<const double> weights, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0.0;
  for (double w : weights) total += w;
  double u = unit(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return static_cast<int>(i);
    u -= weights[i];
  }
  // Round-off: fall back to the last index with positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return static_cast<int>(i);
  return 0;
}

}  // namespace

StatePath sample_path_from(const GeneratorMatrix& q, int initial_state, double horizon, Rng& rng) {
  if (!(horizon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be non-negative");
  StatePath path;
  path.horizon = horizon;
  path.jump_times.push_back(0.0);
  path.states.push_back(initial_state);
  const int k = q.size();
  std::vector<double> jump(static_cast<std::size_t>(k));
  double t = 0.0;
  int state = initial_state;
  while (true) {
    const double exit = -q(state, state);
    if (!(exit > 0.0)) break;
    t += std::exponential_distribution<double>(exit)(rng);
    if (t >= horizon) break;
    for (int b = 0; b < k; ++b) jump[static_cast<std::size_t>(b)] = b == state ? 0.0 : q(state, b);
    state = draw_index(jump, rng);
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

StatePath sample_hidden_path(const GeneratorMatrix& q, const Eigen::VectorXd& initial,
                             double horizon, Rng& rng) {
  const int start = draw_index(std::span<const double>(initial.data(), static_cast<std::size_t>(initial.size())), rng);
  return sample_path_from(q, start, horizon, rng);
}

StatePath sample_hidden_path(const GeneratorMatrix& q, const Eigen::VectorXd& initial,
                             double horizon, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_hidden_path(q, initial, horizon, rng);
}

SampledTrajectory sample_trajectory(const SubtypeModel& model, std::span<const double> obs_times,
                                    double missing_rate, Rng& rng) {
  if (obs_times.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one observation time");
  for (std::size_t i = 1; i < obs_times.size(); ++i)
    if (!(obs_times[i] > obs_times[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "observation times must be strictly increasing");

  const double start = obs_times.front();
  const StatePath path =
      sample_hidden_path(model.generator, model.initial, obs_times.back() - start, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& w = model.emissions;

  SampledTrajectory out;
  out.trajectory.times.assign(obs_times.begin(), obs_times.end());
  for (double t : obs_times) {
    const int state = path.state_at(t - start);
    out.hidden.push_back(state);
    ObservationVector obs(static_cast<std::size_t>(w.features()), kMissing);
    for (int d = 0; d < w.features(); ++d) {
      const int bin = draw_index(w.row(state, d), rng);
      if (unit(rng) >= missing_rate) obs[static_cast<std::size_t>(d)] = bin;
    }
    out.trajectory.observations.push_back(std::move(obs));
  }
  return out;
}

SyntheticCohort sample_cohort(const MixtureModel& mixture, std::size_t patients,
                              const TimeProcess& times, double missing_rate, std::uint64_t seed) {
  if (patients == 0) throw Error(ErrorKind::InvalidArgument, "cohort needs at least one patient");
  if (times.min_observations < 1 || times.max_observations < times.min_observations ||
      !(times.mean_gap > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid observation-time process");
  }
  SyntheticCohort cohort;
  cohort.seed = seed;
  cohort.times = times;
  cohort.missing_rate = missing_rate;
  cohort.trajectories.resize(patients);
  cohort.labels.resize(patients);
  cohort.hidden_states.resize(patients);

  const std::span<const double> prior(mixture.prior.data(), static_cast<std::size_t>(mixture.prior.size()));
  detail::parallel_for(patients, [&](std::size_t i) {
    Rng rng = make_rng(seed, 4, i);
    const int label = draw_index(prior, rng);
    const int count =
        std::uniform_int_distribution<int>(times.min_observations, times.max_observations)(rng);
    std::exponential_distribution<double> gap(1.0 / times.mean_gap);
    std::vector<double> obs_times;
    double t = 0.0;
    for (int j = 0; j < count; ++j) {
      if (j > 0) {
        double step = 0.0;
        while (!(step > 0.0)) step = gap(rng);
        t += step;
      }
      obs_times.push_back(t);
    }
    SampledTrajectory sampled =
        sample_trajectory(mixture.subtypes[static_cast<std::size_t>(label)], obs_times, missing_rate, rng);
    sampled.trajectory.id = "p" + std::to_string(i);
    cohort.trajectories[i] = std::move(sampled.trajectory);
    cohort.labels[i] = label;
    cohort.hidden_states[i] = std::move(sampled.hidden);
  });
  return cohort;
}

MixtureModel example_mixture(int subtypes, int states, const BinningScheme& binning, MaskKind mask,
                             std::uint64_t seed) {
  if (subtypes < 1 || states < 1 || binning.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "example mixture needs subtypes, states and features");
  }
  Rng rng = make_rng(seed, 5);
  std::uniform_real_distribution<double> rate(0.2, 1.0);
  const StructureMask structure = make_mask(mask, states);
  const auto bins = binning.bin_counts();

  MixtureModel mixture;
  mixture.binning = binning;
  mixture.prior = Eigen::VectorXd::Constant(subtypes, 1.0 / subtypes);
  for (int m = 0; m < subtypes; ++m) {
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(states, states);
    for (int a = 0; a < states; ++a)
      for (int b = 0; b < states; ++b)
        if (structure(a, b)) raw(a, b) = rate(rng);
    Eigen::VectorXd initial = Eigen::VectorXd::Zero(states);
    if (mask == MaskKind::Chain) {
      initial(0) = 1.0;
    } else {
      initial.setConstant(1.0 / states);
    }
    EmissionTable w(states, bins);
    for (int k = 0; k < states; ++k) {
      for (int d = 0; d < w.features(); ++d) {
        const int j_count = w.bins(d);
        const int span = std::max(1, states - 1);
        const int peak = (k * (j_count - 1) / span + m) % j_count;
        for (int j = 0; j < j_count; ++j) w(k, d, j) = j == peak ? 0.7 : 0.3 / (j_count - 1);
      }
    }
    mixture.subtypes.push_back({std::move(initial), GeneratorMatrix::validate(raw, structure), std::move(w)});
  }
  return mixture;
}

}  // namespace cthmm
