#include <doctest.h>

#include <cmath>
#include <limits>

#include "cthmm/ctmc.hpp"
#include "cthmm/error.hpp"
#include "oracles.hpp"

using namespace cthmm;
using Eigen::MatrixXd;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("validate builds a zero generator from zero rates") {
  for (const auto& mask : {full_mask(3), chain_mask(3)}) {
    const auto q = GeneratorMatrix::validate(MatrixXd::Zero(3, 3), mask);
    CHECK(q.rates().isZero(0.0));
  }
}

TEST_CASE("validate forces rows to sum to zero") {
  MatrixXd raw = MatrixXd::Zero(2, 2);
  raw(0, 1) = 0.5;
  const auto q = GeneratorMatrix::validate(raw, full_mask(2));
  CHECK(q(0, 0) == -0.5);
  CHECK(q(1, 1) == 0.0);
}

TEST_CASE("validate rejects bad input") {
  MatrixXd raw = MatrixXd::Constant(3, 3, 0.2);
  raw(1, 2) = -0.1;
  CHECK(kind_of([&] { GeneratorMatrix::validate(raw, full_mask(3)); }) == ErrorKind::NegativeOffDiagonal);
  CHECK(kind_of([&] { GeneratorMatrix::validate(MatrixXd::Zero(2, 3), full_mask(2)); }) ==
        ErrorKind::NonSquareInput);
  MatrixXd nan = MatrixXd::Zero(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { GeneratorMatrix::validate(nan, full_mask(2)); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("validate applies the mask and the rate bounds") {
  MatrixXd raw = MatrixXd::Constant(3, 3, 5e3);
  raw(0, 1) = 1e-9;
  const auto q = GeneratorMatrix::validate(raw, chain_mask(3));
  CHECK(q(0, 1) == 1e-6);
  CHECK(q(1, 2) == 1e3);
  CHECK(q(0, 2) == 0.0);
  CHECK(q(2, 0) == 0.0);
  CHECK(q.rates().row(2).isZero(0.0));
  CHECK(is_chain_mask(q.mask()));
  CHECK_FALSE(is_chain_mask(full_mask(3)));
}

TEST_CASE("transition matrix basics") {
  Rng rng = make_rng(1);
  const auto q = oracle::random_generator(3, rng);
  CHECK(transition_matrix(q, 0.0).probs.isIdentity(0.0));

  MatrixXd raw = MatrixXd::Zero(2, 2);
  raw(0, 1) = 1.0;
  const auto p = transition_matrix(GeneratorMatrix::validate(raw, full_mask(2)), std::log(2.0)).probs;
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p(1, 0) == 0.0);
  CHECK(p(1, 1) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(kind_of([&] { transition_matrix(q, -1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("expm matches a 60-term Taylor series") {
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = oracle::random_generator(3, rng);
    const MatrixXd p = transition_matrix(q, 0.7).probs;
    const MatrixXd ref = oracle::taylor_expm(q.rates() * 0.7);
    CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("expm on general matrices across Pade degrees") {
  Rng rng = make_rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double scale : {1e-3, 0.05, 0.5, 1.5, 3.0, 6.0}) {
    MatrixXd a(4, 4);
    for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = g(rng);
    a *= scale / a.cwiseAbs().colwise().sum().maxCoeff();
    const MatrixXd ref = oracle::taylor_expm(a, 80);
    CHECK((expm(a) - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.norm()));
  }
  // Large norm exercises the squaring phase: exp(-s) exactly for a scalar.
  MatrixXd big(1, 1);
  big(0, 0) = -40.0;
  CHECK(expm(big)(0, 0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
}

TEST_CASE("Chapman-Kolmogorov and stochastic rows") {
  Rng rng = make_rng(4);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = oracle::random_generator(1 + trial % 4, rng);
    const double d1 = u(rng), d2 = u(rng);
    const MatrixXd p1 = transition_matrix(q, d1).probs, p2 = transition_matrix(q, d2).probs;
    const MatrixXd p12 = transition_matrix(q, d1 + d2).probs;
    CHECK((p1 * p2 - p12).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((p12.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(p12.minCoeff() >= 0.0);
  }
}

TEST_CASE("end-conditioned statistics: sojourns partition the interval") {
  Rng rng = make_rng(5);
  for (int k = 1; k <= 3; ++k) {
    const auto q = oracle::random_generator(k, rng);
    for (double dt : {0.5, 1.0, 2.0}) {
      const auto s = end_conditioned_stats(q, dt);
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          double total = 0.0;
          for (int c = 0; c < k; ++c) total += s.sojourn(a, b, c);
          CHECK(total == doctest::Approx(dt).epsilon(1e-12));
        }
      }
    }
  }
  CHECK(kind_of([&] { end_conditioned_stats(oracle::random_generator(2, rng), 0.0); }) ==
        ErrorKind::NonPositiveInterval);
}

TEST_CASE("end-conditioned statistics for a 2-state chain match the closed form") {
  // 0 -> 1 at rate r, 1 absorbing. Given Z(0)=0, Z(dt)=1 the jump time is
  // exponential truncated to [0, dt]; its mean is the expected sojourn in 0.
  const double r = 0.8, dt = 1.7;
  MatrixXd raw = MatrixXd::Zero(2, 2);
  raw(0, 1) = r;
  const auto s = end_conditioned_stats(GeneratorMatrix::validate(raw, chain_mask(2)), dt);
  const double mean_jump = 1.0 / r - dt * std::exp(-r * dt) / (1.0 - std::exp(-r * dt));
  CHECK(s.sojourn(0, 1, 0) == doctest::Approx(mean_jump).epsilon(1e-12));
  CHECK(s.transitions(0, 1, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.sojourn(0, 0, 0) == doctest::Approx(dt).epsilon(1e-12));
  CHECK(s.transitions(0, 0, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  // Unreachable endpoint pair is floored to zero.
  CHECK(s.sojourn(1, 0, 0) == 0.0);
  CHECK(s.transitions(1, 0, 0, 1) == 0.0);
}

TEST_CASE("end-conditioned statistics on a cyclic 3-state chain match Gillespie") {
  MatrixXd raw = MatrixXd::Zero(3, 3);
  raw(0, 1) = 1.0;
  raw(1, 2) = 0.7;
  raw(2, 0) = 0.5;
  const auto q = GeneratorMatrix::validate(raw, full_mask(3));
  const auto s = end_conditioned_stats(q, 1.0);
  const auto mc = oracle::gillespie_end_conditioned(q.rates(), 1.0, 100000, 99);
  int outside = 0, compared = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (mc.paths[a][b] < 100) continue;
      for (int c = 0; c < 3; ++c) {
        const double se = mc.stay_se[a][b][c];
        if (se > 0.0) {
          ++compared;
          if (std::abs(s.sojourn(a, b, c) - mc.stay_mean[a][b][c]) > 3.0 * se) ++outside;
        }
        for (int d = 0; d < 3; ++d) {
          const double jse = mc.jump_se[a][b][c * 3 + d];
          if (jse > 0.0) {
            ++compared;
            if (std::abs(s.transitions(a, b, c, d) - mc.jump_mean[a][b][c * 3 + d]) > 3.0 * jse) ++outside;
          }
        }
      }
    }
  }
  CHECK(compared > 40);
  // A 3-sigma band admits roughly 0.3% chance excursions per entry.
  CHECK(outside <= 1);
}

TEST_CASE("weighted path statistics agree with per-integrand expectations") {
  Rng rng = make_rng(6);
  for (int k = 1; k <= 4; ++k) {
    const auto q = oracle::random_generator(k, rng, 0.05, 2.0, k % 2 == 0);
    MatrixXd counts = MatrixXd::Random(k, k).cwiseAbs() * 5.0;
    if (k == 4) counts = counts.triangularView<Eigen::Upper>();  // chain: no backward pairs
    for (double dt : {0.3, 1.0, 4.0}) {
      const auto s = end_conditioned_stats(q, dt);
      const auto w = weighted_path_stats(q, dt, counts);
      for (int c = 0; c < k; ++c) {
        double stay = 0.0;
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) stay += counts(a, b) * s.sojourn(a, b, c);
        CHECK(w.sojourn(c) == doctest::Approx(stay).epsilon(1e-10));
        for (int d = 0; d < k; ++d) {
          if (d == c) continue;
          double jumps = 0.0;
          for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) jumps += counts(a, b) * s.transitions(a, b, c, d);
          CHECK(w.transitions(c, d) == doctest::Approx(jumps).epsilon(1e-10).scale(1e-12));
        }
      }
    }
  }
}

TEST_CASE("sojourn expectation") {
  MatrixXd raw = MatrixXd::Zero(2, 2);
  raw(0, 1) = 2.0;
  const auto s = sojourn_expectation(GeneratorMatrix::validate(raw, full_mask(2)));
  CHECK(s[0] == 0.5);
  CHECK(std::isinf(s[1]));
  raw(0, 1) = 0.5;
  CHECK(sojourn_expectation(GeneratorMatrix::validate(raw, full_mask(2)))[0] == 2.0);
}
