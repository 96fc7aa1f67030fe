#include <doctest.h>

#include <cmath>

#include "cthmm/synthesis.hpp"
#include "oracles.hpp"

using namespace cthmm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("zero generator keeps the initial state") {
  const auto q = GeneratorMatrix::validate(MatrixXd::Zero(3, 3), full_mask(3));
  Rng rng = make_rng(50);
  const auto path = sample_path_from(q, 1, 100.0, rng);
  CHECK(path.states == std::vector<int>{1});
  CHECK(path.state_at(99.0) == 1);
}

TEST_CASE("holding times have the exponential mean") {
  MatrixXd raw = MatrixXd::Zero(2, 2);
  raw(0, 1) = 1.0;
  raw(1, 0) = 1.0;
  const auto q = GeneratorMatrix::validate(raw, full_mask(2));
  double sum = 0.0, sq = 0.0;
  long n = 0;
  for (int p = 0; p < 10000; ++p) {
    Rng rng = make_rng(51, 0, static_cast<std::uint64_t>(p));
    const auto path = sample_path_from(q, 0, 1e4, rng);
    // One sample per path: the first sojourn, which starts in state 0.
    const double h = path.jump_times.at(1);
    sum += h;
    sq += h * h;
    ++n;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("left-to-right paths never move backwards") {
  Rng rng = make_rng(52);
  const auto q = oracle::random_generator(4, rng, 0.2, 1.0, true);
  for (int p = 0; p < 200; ++p) {
    const auto path = sample_hidden_path(q, VectorXd::Unit(4, 0), 20.0, rng);
    for (std::size_t i = 1; i < path.states.size(); ++i) CHECK(path.states[i] == path.states[i - 1] + 1);
  }
}

TEST_CASE("trajectory sampling") {
  Rng rng = make_rng(53);
  const std::vector<double> times{0.0, 0.5, 1.7, 3.0};
  SUBCASE("full masking keeps hidden states") {
    const auto model = oracle::random_model(3, {4, 2}, rng);
    const auto s = sample_trajectory(model, times, 1.0, rng);
    CHECK(s.hidden.size() == 4);
    for (const auto& o : s.trajectory.observations)
      for (int b : o) CHECK(b == kMissing);
  }
  SUBCASE("point-mass emissions are constant") {
    EmissionTable w(1, {4}, 0.0);
    w(0, 0, 3) = 1.0;
    const SubtypeModel model{VectorXd::Ones(1), GeneratorMatrix::validate(MatrixXd::Zero(1, 1), full_mask(1)), w};
    const auto s = sample_trajectory(model, times, 0.0, rng);
    for (const auto& o : s.trajectory.observations) CHECK(o[0] == 3);
  }
  SUBCASE("bin frequencies match the emission table") {
    EmissionTable w(1, {3}, 0.0);
    w(0, 0, 0) = 0.2;
    w(0, 0, 1) = 0.5;
    w(0, 0, 2) = 0.3;
    const SubtypeModel model{VectorXd::Ones(1), GeneratorMatrix::validate(MatrixXd::Zero(1, 1), full_mask(1)), w};
    std::vector<double> many(20000);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
    const auto s = sample_trajectory(model, many, 0.0, rng);
    std::vector<double> freq(3, 0.0);
    for (const auto& o : s.trajectory.observations) freq[o[0]] += 1.0;
    for (int j = 0; j < 3; ++j) {
      const double p = w(0, 0, j), n = static_cast<double>(many.size());
      CHECK(std::abs(freq[j] / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
    }
  }
}

TEST_CASE("cohort sampling") {
  const BinningScheme binning({{"x", 0.0, 1.0, 5}});
  auto truth = example_mixture(2, 2, binning, MaskKind::Full, 1);
  SUBCASE("degenerate prior") {
    truth.prior << 1.0, 0.0;
    const auto c = sample_cohort(truth, 1, {}, 0.0, 2);
    CHECK(c.labels == std::vector<int>{0});
  }
  SUBCASE("label counts follow the prior") {
    const auto c = sample_cohort(truth, 10000, {2, 3, 1.0}, 0.0, 3);
    const double ones = static_cast<double>(std::count(c.labels.begin(), c.labels.end(), 1));
    CHECK(std::abs(ones - 5000.0) < 3.0 * std::sqrt(10000 * 0.25));
  }
  SUBCASE("deterministic under a seed and respects the time process") {
    const TimeProcess tp{4, 9, 2.0};
    const auto a = sample_cohort(truth, 50, tp, 0.3, 4);
    const auto b = sample_cohort(truth, 50, tp, 0.3, 4);
    CHECK(a.trajectories == b.trajectories);
    CHECK(a.labels == b.labels);
    for (const auto& t : a.trajectories) {
      CHECK(t.size() >= 4);
      CHECK(t.size() <= 9);
      for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
    }
  }
}
