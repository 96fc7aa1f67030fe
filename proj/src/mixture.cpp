#include "cthmm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cthmm/error.hpp"
#include "parallel.hpp"

namespace cthmm {

void validate_mixture(const MixtureModel& mixture, double tolerance) {
  if (mixture.subtypes.empty()) {
    throw Error(ErrorKind::InvariantViolation, "mixture has no subtypes");
  }
  if (mixture.prior.size() != mixture.size()) {
    throw Error(ErrorKind::InvariantViolation, "subtype prior length differs from subtype count");
  }
  double sum = 0.0;
  for (int m = 0; m < mixture.size(); ++m) {
    if (!(mixture.prior(m) >= 0.0) || !std::isfinite(mixture.prior(m))) {
      throw Error(ErrorKind::InvariantViolation, "subtype prior has a negative entry");
    }
    sum += mixture.prior(m);
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw Error(ErrorKind::InvariantViolation, "subtype prior does not sum to 1");
  }
  const auto& first = mixture.subtypes.front();
  for (const auto& model : mixture.subtypes) {
    validate_model(model, tolerance);
    if (model.states() != first.states() ||
        model.emissions.bin_counts() != first.emissions.bin_counts()) {
      throw Error(ErrorKind::InvariantViolation, "subtypes disagree on states or feature layout");
    }
  }
  if (mixture.binning.size() != 0 && mixture.binning.bin_counts() != first.emissions.bin_counts()) {
    throw Error(ErrorKind::InvariantViolation, "binning scheme does not match emission layout");
  }
  for (int a : mixture.assignments) {
    if (a < 0 || a >= mixture.size()) {
      throw Error(ErrorKind::InvariantViolation, "training assignment out of range");
    }
  }
}

SubtypeScores assign_subtype(const MixtureModel& mixture, const Trajectory& traj) {
  SubtypeScores out;
  out.scores.reserve(mixture.subtypes.size());
  for (int m = 0; m < mixture.size(); ++m) {
    out.scores.push_back(std::log(mixture.prior(m)) +
                         trajectory_log_likelihood(mixture.subtypes[static_cast<std::size_t>(m)], traj));
  }
  for (int m = 1; m < mixture.size(); ++m)
    if (out.scores[static_cast<std::size_t>(m)] > out.scores[static_cast<std::size_t>(out.subtype)])
      out.subtype = m;
  return out;
}

std::vector<double> assignment_posteriors(const MixtureModel& mixture, const Trajectory& traj) {
  const auto scores = assign_subtype(mixture, traj).scores;
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size(), 1.0 / static_cast<double>(scores.size()));
  if (!std::isfinite(peak)) return out;
  double total = 0.0;
  for (std::size_t m = 0; m < scores.size(); ++m) {
    out[m] = std::exp(scores[m] - peak);
    total += out[m];
  }
  for (double& p : out) p /= total;
  return out;
}

namespace {

std::vector<double> histogram_features(const Trajectory& traj, const std::vector<int>& bins) {
  const int width = std::accumulate(bins.begin(), bins.end(), 0);
  std::vector<double> out(static_cast<std::size_t>(width), 0.0);
  std::size_t offset = 0;
  for (std::size_t d = 0; d < bins.size(); ++d) {
    const auto j_count = static_cast<std::size_t>(bins[d]);
    double seen = 0.0;
    for (const auto& obs : traj.observations) {
      if (obs[d] == kMissing) continue;
      out[offset + static_cast<std::size_t>(obs[d])] += 1.0;
      seen += 1.0;
    }
    for (std::size_t j = 0; j < j_count; ++j)
      out[offset + j] = seen > 0.0 ? out[offset + j] / seen : 1.0 / static_cast<double>(j_count);
    offset += j_count;
  }
  return out;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

std::vector<Trajectory> members(std::span<const Trajectory> trajectories,
                                const std::vector<int>& assignments, int subtype) {
  std::vector<Trajectory> out;
  for (std::size_t n = 0; n < trajectories.size(); ++n)
    if (assignments[n] == subtype) out.push_back(trajectories[n]);
  return out;
}

EmConfig subtype_config(const EmConfig& base, int subtype) {
  EmConfig config = base;
  config.seed = base.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(subtype));
  return config;
}

}  // namespace

std::vector<int> initial_partition(std::span<const Trajectory> trajectories, int subtypes,
                                   const std::vector<int>& bins_per_feature, std::uint64_t seed) {
  const std::size_t n = trajectories.size();
  std::vector<int> labels(n, 0);
  if (subtypes <= 1 || n == 0) return labels;

  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& traj : trajectories) points.push_back(histogram_features(traj, bins_per_feature));

  Rng rng = make_rng(seed, 2);
  std::vector<std::vector<double>> centers;
  centers.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < subtypes) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], centers.back()));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      while (pick + 1 < n && u >= nearest[pick]) u -= nearest[pick++];
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    centers.push_back(points[pick]);
  }

  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points[i], centers[0]);
      for (int m = 1; m < subtypes; ++m) {
        const double d = squared_distance(points[i], centers[static_cast<std::size_t>(m)]);
        if (d < best_d) {
          best_d = d;
          best = m;
        }
      }
      if (labels[i] != best) changed = true;
      labels[i] = best;
    }
    // Keep every cluster populated: move the point farthest from its center.
    for (int m = 0; m < subtypes; ++m) {
      if (std::find(labels.begin(), labels.end(), m) != labels.end()) continue;
      std::vector<std::size_t> sizes(static_cast<std::size_t>(subtypes), 0);
      for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(labels[i])] < 2) continue;
        const double d = squared_distance(points[i], centers[static_cast<std::size_t>(labels[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < n) {
        labels[far] = m;
        changed = true;
      }
    }
    if (!changed) break;
    for (int m = 0; m < subtypes; ++m) {
      std::vector<double> mean(points[0].size(), 0.0);
      double count = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != m) continue;
        for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += points[i][f];
        count += 1.0;
      }
      if (count > 0.0) {
        for (double& v : mean) v /= count;
        centers[static_cast<std::size_t>(m)] = std::move(mean);
      }
    }
  }
  return labels;
}

MixtureFit fit_mixture(std::span<const Trajectory> trajectories, int subtypes, int states,
                       const BinningScheme& binning, const MixtureConfig& config) {
  if (subtypes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one subtype");
  if (trajectories.size() < static_cast<std::size_t>(subtypes)) {
    std::ostringstream os;
    os << trajectories.size() << " patients cannot fill " << subtypes << " subtypes";
    throw Error(ErrorKind::TooFewPatients, os.str());
  }
  if (config.max_alternations < 1) {
    throw Error(ErrorKind::InvalidArgument, "max_alternations must be at least 1");
  }
  validate_config(config.em);
  const auto bins = binning.bin_counts();
  const std::size_t n = trajectories.size();
  const auto m_count = static_cast<std::size_t>(subtypes);

  MixtureFit fit;
  MixtureModel& model = fit.model;
  MixtureDiagnostics& diag = fit.diagnostics;
  model.binning = binning;
  model.prior = Eigen::VectorXd::Constant(subtypes, 1.0 / subtypes);
  model.assignments = initial_partition(trajectories, subtypes, bins, config.em.seed);
  diag.subtype_fits.resize(m_count);

  auto log_prior = [&](int m) { return std::log(model.prior(m)); };
  auto step2 = [&](bool fresh) {
    double objective = 0.0;
    for (int m = 0; m < subtypes; ++m) {
      const auto subset = members(trajectories, model.assignments, m);
      const auto idx = static_cast<std::size_t>(m);
      const EmConfig em = subtype_config(config.em, m);
      FitResult result = fresh ? fit_disease_model(subset, states, bins, em)
                               : refine_disease_model(subset, model.subtypes[idx], em);
      objective += result.diagnostics.log_likelihood_trace.back() +
                   static_cast<double>(subset.size()) * log_prior(m);
      if (fresh) {
        model.subtypes.push_back(std::move(result.model));
      } else {
        model.subtypes[idx] = std::move(result.model);
      }
      diag.subtype_fits[idx] = std::move(result.diagnostics);
    }
    model.objective_trace.push_back(objective);
  };

  step2(true);
  std::vector<SubtypeScores> scored(n);
  for (int alt = 1;; ++alt) {
    diag.alternations = alt;
    detail::parallel_for(n, [&](std::size_t i) { scored[i] = assign_subtype(model, trajectories[i]); });

    std::vector<int> next(n);
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = scored[i].subtype;
      objective += scored[i].scores[static_cast<std::size_t>(next[i])];
    }
    model.objective_trace.push_back(objective);

    // Re-seed emptied subtypes with the worst-explained patients.
    bool repaired = false;
    for (int m = 0; m < subtypes; ++m) {
      if (std::find(next.begin(), next.end(), m) != next.end()) continue;
      repaired = true;
      ++diag.empty_repairs;
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].scores[static_cast<std::size_t>(next[a])] <
               scored[b].scores[static_cast<std::size_t>(next[b])];
      });
      const std::size_t quota = (n + 10 * m_count - 1) / (10 * m_count);
      std::vector<std::size_t> sizes(m_count, 0);
      for (int l : next) ++sizes[static_cast<std::size_t>(l)];
      std::size_t moved = 0;
      for (std::size_t i : order) {
        if (moved == quota) break;
        auto& from = sizes[static_cast<std::size_t>(next[i])];
        if (from < 2) continue;
        --from;
        next[i] = m;
        ++moved;
      }
    }

    const bool stable = next == model.assignments;
    model.assignments = std::move(next);
    if ((stable && !repaired) || alt >= config.max_alternations) {
      diag.converged = stable && !repaired;
      break;
    }
    if (config.reestimate_prior) {
      for (int m = 0; m < subtypes; ++m)
        model.prior(m) = static_cast<double>(std::count(model.assignments.begin(),
                                                        model.assignments.end(), m)) /
                         static_cast<double>(n);
    }
    step2(false);
  }
  return fit;
}

}  // namespace cthmm
