#include <doctest.h>

#include <cmath>

#include "cthmm/error.hpp"
#include "cthmm/evaluation.hpp"
#include "cthmm/synthesis.hpp"
#include "oracles.hpp"

using namespace cthmm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Trajectory of_length(std::size_t n) {
  Trajectory t;
  t.id = "t";
  for (std::size_t i = 0; i < n; ++i) {
    t.times.push_back(static_cast<double>(i));
    t.observations.push_back({static_cast<int>(i % 5)});
  }
  return t;
}

MixtureModel wrap(SubtypeModel model, BinningScheme binning) {
  MixtureModel m;
  m.subtypes.push_back(std::move(model));
  m.prior = VectorXd::Ones(1);
  m.binning = std::move(binning);
  return m;
}

}  // namespace

TEST_CASE("cohort split sizes and determinism") {
  const auto s = split_cohort(10, 0.8, 1);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  const auto one = split_cohort(1, 0.5, 1);
  CHECK(one.train.size() == 1);
  CHECK(one.test.empty());
  CHECK(split_cohort(37, 0.8, 5).train == split_cohort(37, 0.8, 5).train);
  CHECK(split_cohort(37, 0.8, 5).train.size() == 30);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);
  CHECK_THROWS_AS(split_cohort(0, 0.8, 1), Error);
  CHECK_THROWS_AS(split_cohort(5, 1.0, 1), Error);
}

TEST_CASE("prefix split sizes") {
  auto check = [](std::size_t n, std::size_t prefix) {
    const auto s = prefix_split(of_length(n), 0.7);
    CHECK(s.prefix.size() == prefix);
    CHECK(s.held_out.size() == n - prefix);
  };
  check(10, 7);
  check(1, 1);
  check(3, 3);
  check(20, 14);
  check(7, 5);
}

TEST_CASE("uniform predictor scores ln J") {
  const BinningScheme binning({{"x", 0.0, 1.0, 5}});
  SubtypeModel model{VectorXd::Constant(2, 0.5),
                     GeneratorMatrix::validate(MatrixXd::Constant(2, 2, 0.4), full_mask(2)),
                     EmissionTable(2, {5}, 0.2)};
  const auto f = forecast_cross_entropy(wrap(model, binning), of_length(10), 0.7);
  CHECK(f.scored == 3);
  CHECK(f.cross_entropy == doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("point-mass predictor on the true bin scores zero") {
  const BinningScheme binning({{"x", 0.0, 1.0, 5}});
  EmissionTable w(1, {5}, 0.0);
  w(0, 0, 2) = 1.0;
  const SubtypeModel model{VectorXd::Ones(1), GeneratorMatrix::validate(MatrixXd::Zero(1, 1), full_mask(1)), w};
  Trajectory t = of_length(10);
  for (auto& o : t.observations) o[0] = 2;
  CHECK(forecast_cross_entropy(wrap(model, binning), t, 0.7).cross_entropy == 0.0);
}

TEST_CASE("cross-entropy matches the enumerated predictive distribution") {
  Rng rng = make_rng(40);
  const BinningScheme binning({{"x", 0.0, 1.0, 3}, {"y", 0.0, 1.0, 2}});
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = oracle::random_model(2, {3, 2}, rng);
    auto traj = oracle::random_trajectory(6, {3, 2}, rng, 0.0);
    traj.observations[5][1] = kMissing;
    const auto f = forecast_cross_entropy(wrap(model, binning), traj, 0.7);
    const auto split = prefix_split(traj, 0.7);
    double total = 0.0;
    int scored = 0;
    for (std::size_t i = 0; i < split.held_out.size(); ++i) {
      for (int d = 0; d < 2; ++d) {
        const int bin = split.held_out.observations[i][d];
        if (bin == kMissing) continue;
        total -= std::log(oracle::enumerate_predictive(model, split.prefix, split.held_out.times[i], d)[bin]);
        ++scored;
      }
    }
    CHECK(f.scored == static_cast<std::size_t>(scored));
    CHECK(f.skipped_missing == 1);
    CHECK(f.cross_entropy == doctest::Approx(total / scored).epsilon(1e-10));

    const std::vector<int> only_x{0};
    CHECK(forecast_cross_entropy(wrap(model, binning), traj, 0.7, only_x).scored == 1);
  }
}

TEST_CASE("patients with nothing to score are excluded") {
  const BinningScheme binning({{"x", 0.0, 1.0, 5}});
  const SubtypeModel model{VectorXd::Ones(1), GeneratorMatrix::validate(MatrixXd::Zero(1, 1), full_mask(1)),
                           EmissionTable(1, {5}, 0.2)};
  const auto mixture = wrap(model, binning);
  CHECK_THROWS_AS(forecast_cross_entropy(mixture, of_length(3), 0.7), Error);
  const std::vector<Trajectory> cohort{of_length(3), of_length(10), of_length(20)};
  const auto report = forecast_cohort(mixture, cohort, 0.7);
  CHECK(report.excluded_patients == 1);
  CHECK(report.patients.size() == 2);
  CHECK(report.mean == doctest::Approx(std::log(5.0)));
  CHECK(report.standard_error == doctest::Approx(0.0).scale(1e-15));
}

TEST_CASE("singleton grid equals a direct fit and forecast") {
  const BinningScheme binning({{"x", 0.0, 1.0, 4}});
  const auto truth = example_mixture(1, 2, binning, MaskKind::Full, 3);
  const auto cohort = sample_cohort(truth, 40, {}, 0.1, 3).trajectories;
  GridConfig config;
  config.seed = 12;
  config.mixture.em.restarts = 1;
  const auto grid = grid_evaluate(cohort, binning, {1}, {2}, config);
  REQUIRE(grid.cells.size() == 1);

  std::vector<Trajectory> train, test;
  for (auto i : grid.split.train) train.push_back(cohort[i]);
  for (auto i : grid.split.test) test.push_back(cohort[i]);
  MixtureConfig mc = config.mixture;
  mc.em.seed = 12;
  const auto fit = fit_mixture(train, 1, 2, binning, mc);
  const auto direct = forecast_cohort(fit.model, test, 0.7);
  CHECK(grid.cell(0, 0).mean == direct.mean);
  CHECK(grid.cell(0, 0).standard_error == direct.standard_error);
  CHECK(render_table(grid).find("M=1") != std::string::npos);
}

TEST_CASE("label accuracy under relabeling") {
  const std::vector<int> truth{0, 0, 1, 1, 2};
  const std::vector<int> pred{2, 2, 0, 0, 0};
  CHECK(permutation_accuracy(truth, pred) == doctest::Approx(0.8));
}
