#pragma once

// Independent reference computations used by the tests: truncated Taylor
// series, exhaustive enumeration of hidden sequences, and Gillespie Monte
// Carlo. None of them share code with the library's kernels beyond the
// model types.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cthmm/ctmc.hpp"
#include "cthmm/emissions.hpp"
#include "cthmm/inference.hpp"
#include "cthmm/mixture.hpp"
#include "cthmm/random.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd taylor_expm(const MatrixXd& a, int terms = 60) {
  MatrixXd sum = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd term = sum;
  for (int n = 1; n <= terms; ++n) {
    term = term * a / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

inline double emission_prob(const cthmm::EmissionTable& w, int k, const cthmm::ObservationVector& obs) {
  double p = 1.0;
  for (int d = 0; d < w.features(); ++d) {
    const int j = obs[static_cast<std::size_t>(d)];
    if (j != cthmm::kMissing) p *= w(k, d, j);
  }
  return p;
}

struct Enumerated {
  double log_likelihood = 0.0;
  MatrixXd gamma;
  std::vector<MatrixXd> xi;
};

// Sums the joint probability of every one of the K^n hidden sequences.
inline Enumerated enumerate(const cthmm::SubtypeModel& model, const cthmm::Trajectory& traj) {
  const int k = model.states();
  const int n = static_cast<int>(traj.size());
  std::vector<MatrixXd> p;
  for (int t = 0; t + 1 < n; ++t) {
    p.push_back(taylor_expm(model.generator.rates() * (traj.times[t + 1] - traj.times[t])));
  }
  Enumerated out;
  out.gamma = MatrixXd::Zero(n, k);
  out.xi.assign(static_cast<std::size_t>(std::max(n - 1, 0)), MatrixXd::Zero(k, k));
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  while (true) {
    double joint = model.initial(z[0]) * emission_prob(model.emissions, z[0], traj.observations[0]);
    for (int t = 1; t < n; ++t) {
      joint *= p[t - 1](z[t - 1], z[t]) * emission_prob(model.emissions, z[t], traj.observations[t]);
    }
    total += joint;
    for (int t = 0; t < n; ++t) out.gamma(t, z[t]) += joint;
    for (int t = 0; t + 1 < n; ++t) out.xi[t](z[t], z[t + 1]) += joint;
    int pos = 0;
    while (pos < n && ++z[pos] == k) z[pos++] = 0;
    if (pos == n) break;
  }
  out.log_likelihood = std::log(total);
  out.gamma /= total;
  for (auto& x : out.xi) x /= total;
  return out;
}

// Predictive bin distribution of `feature` at `query` given the whole
// trajectory `prefix`, by enumeration of the prefix's hidden sequences.
inline std::vector<double> enumerate_predictive(const cthmm::SubtypeModel& model,
                                                const cthmm::Trajectory& prefix, double query,
                                                int feature) {
  const Enumerated e = enumerate(model, prefix);
  const int n = static_cast<int>(prefix.size());
  const VectorXd last = e.gamma.row(n - 1).transpose();
  const MatrixXd p = taylor_expm(model.generator.rates() * (query - prefix.times.back()));
  const VectorXd ahead = p.transpose() * last;
  std::vector<double> out(static_cast<std::size_t>(model.emissions.bins(feature)), 0.0);
  for (int k = 0; k < model.states(); ++k) {
    for (int j = 0; j < model.emissions.bins(feature); ++j) out[j] += ahead(k) * model.emissions(k, feature, j);
  }
  return out;
}

struct MonteCarloStats {
  // Indexed [a][b] then [c*K+d] for jumps and [c] for sojourn.
  std::vector<std::vector<std::vector<double>>> jump_mean, jump_se, stay_mean, stay_se;
  std::vector<std::vector<long>> paths;
};

// Gillespie paths started in each state a, grouped by end state b; sample
// means of N_cd and R_c with their standard errors.
inline MonteCarloStats gillespie_end_conditioned(const MatrixXd& q, double dt, long paths_per_start,
                                                 std::uint64_t seed) {
  const int k = static_cast<int>(q.rows());
  const std::size_t kk = static_cast<std::size_t>(k);
  std::vector<std::vector<std::vector<double>>> js(kk, std::vector<std::vector<double>>(kk, std::vector<double>(kk * kk)));
  auto jss = js, ss = std::vector<std::vector<std::vector<double>>>(kk, std::vector<std::vector<double>>(kk, std::vector<double>(kk)));
  auto sss = ss;
  std::vector<std::vector<long>> count(kk, std::vector<long>(kk, 0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> jumps(kk * kk), stay(kk);
  for (int a = 0; a < k; ++a) {
    for (long r = 0; r < paths_per_start; ++r) {
      std::fill(jumps.begin(), jumps.end(), 0.0);
      std::fill(stay.begin(), stay.end(), 0.0);
      int s = a;
      double t = 0.0;
      while (true) {
        const double exit = -q(s, s);
        const double hold = exit > 0.0 ? -std::log(1.0 - unif(rng)) / exit : INFINITY;
        if (t + hold >= dt) {
          stay[s] += dt - t;
          break;
        }
        stay[s] += hold;
        t += hold;
        double u = unif(rng) * exit;
        int next = s;
        for (int d = 0; d < k; ++d) {
          if (d == s) continue;
          next = d;
          u -= q(s, d);
          if (u < 0.0) break;
        }
        jumps[s * kk + next] += 1.0;
        s = next;
      }
      ++count[a][s];
      for (std::size_t i = 0; i < kk * kk; ++i) {
        js[a][s][i] += jumps[i];
        jss[a][s][i] += jumps[i] * jumps[i];
      }
      for (std::size_t c = 0; c < kk; ++c) {
        ss[a][s][c] += stay[c];
        sss[a][s][c] += stay[c] * stay[c];
      }
    }
  }
  MonteCarloStats out;
  out.paths = count;
  out.jump_mean = out.jump_se = js;
  out.stay_mean = out.stay_se = ss;
  auto finish = [](double sum, double sq, long n, double& mean, double& se) {
    mean = n > 0 ? sum / n : 0.0;
    const double var = n > 1 ? (sq - n * mean * mean) / (n - 1) : 0.0;
    se = n > 0 ? std::sqrt(std::max(var, 0.0) / n) : 0.0;
  };
  for (std::size_t a = 0; a < kk; ++a) {
    for (std::size_t b = 0; b < kk; ++b) {
      for (std::size_t i = 0; i < kk * kk; ++i)
        finish(js[a][b][i], jss[a][b][i], count[a][b], out.jump_mean[a][b][i], out.jump_se[a][b][i]);
      for (std::size_t c = 0; c < kk; ++c)
        finish(ss[a][b][c], sss[a][b][c], count[a][b], out.stay_mean[a][b][c], out.stay_se[a][b][c]);
    }
  }
  return out;
}

// Random fixtures.

inline cthmm::GeneratorMatrix random_generator(int k, cthmm::Rng& rng, double lo = 0.1, double hi = 1.5,
                                               bool chain = false) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXd raw = MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) raw(a, b) = u(rng);
  return cthmm::GeneratorMatrix::validate(raw, chain ? cthmm::chain_mask(k) : cthmm::full_mask(k));
}

inline VectorXd random_simplex(int n, cthmm::Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = e(rng) + 1e-3;
  return v / v.sum();
}

inline cthmm::SubtypeModel random_model(int k, const std::vector<int>& bins, cthmm::Rng& rng) {
  cthmm::EmissionTable w(k, bins);
  for (int s = 0; s < k; ++s) {
    for (int d = 0; d < static_cast<int>(bins.size()); ++d) {
      const VectorXd p = random_simplex(bins[d], rng);
      for (int j = 0; j < bins[d]; ++j) w(s, d, j) = p(j);
    }
  }
  return {random_simplex(k, rng), random_generator(k, rng), w};
}

inline cthmm::Trajectory random_trajectory(int n, const std::vector<int>& bins, cthmm::Rng& rng,
                                           double missing = 0.25) {
  std::exponential_distribution<double> gap(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cthmm::Trajectory traj;
  traj.id = "r";
  double t = u(rng);
  for (int i = 0; i < n; ++i) {
    traj.times.push_back(t);
    t += 0.05 + gap(rng);
    cthmm::ObservationVector obs;
    for (int b : bins) {
      obs.push_back(u(rng) < missing ? cthmm::kMissing
                                     : std::uniform_int_distribution<int>(0, b - 1)(rng));
    }
    traj.observations.push_back(obs);
  }
  return traj;
}

}  // namespace oracle

namespace oracle {

// Random valid MixtureModel with a matching binning scheme.
inline cthmm::MixtureModel random_mixture(cthmm::Rng& rng) {
  std::uniform_int_distribution<int> pick(1, 4);
  const int m = pick(rng), k = pick(rng), d = pick(rng);
  std::vector<cthmm::FeatureBinning> features;
  std::vector<int> bins;
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < d; ++i) {
    const double lo = u(rng);
    features.push_back({"f" + std::to_string(i), lo, lo + 1.0 + std::abs(u(rng)), 1 + pick(rng)});
    bins.push_back(features.back().bins);
  }
  cthmm::MixtureModel mix;
  mix.binning = cthmm::BinningScheme(features);
  const bool chain = pick(rng) % 2 == 0;
  for (int s = 0; s < m; ++s) {
    auto model = random_model(k, bins, rng);
    if (chain) model.generator = random_generator(k, rng, 1e-3, 50.0, true);
    mix.subtypes.push_back(std::move(model));
  }
  mix.prior = random_simplex(m, rng);
  std::uniform_int_distribution<int> label(0, m - 1);
  const int n = pick(rng) * 3;
  for (int i = 0; i < n; ++i) mix.assignments.push_back(label(rng));
  for (int i = 0; i < pick(rng); ++i) mix.objective_trace.push_back(-std::abs(u(rng)) * 1e3);
  return mix;
}

}  // namespace oracle
