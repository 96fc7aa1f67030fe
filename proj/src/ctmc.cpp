#include "cthmm/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cthmm/error.hpp"

namespace cthmm {

StructureMask full_mask(int states) {
  StructureMask mask = StructureMask::Constant(states, states, true);
  for (int k = 0; k < states; ++k) mask(k, k) = false;
  return mask;
}

StructureMask chain_mask(int states) {
  StructureMask mask = StructureMask::Constant(states, states, false);
  for (int k = 0; k + 1 < states; ++k) mask(k, k + 1) = true;
  return mask;
}

bool is_chain_mask(const StructureMask& mask) {
  if (mask.rows() != mask.cols()) return false;
  for (Eigen::Index a = 0; a < mask.rows(); ++a)
    for (Eigen::Index b = 0; b < mask.cols(); ++b)
      if (a != b && mask(a, b) && b != a + 1) return false;
  return true;
}

GeneratorMatrix GeneratorMatrix::validate(const Eigen::MatrixXd& raw, const StructureMask& mask,
                                          RateBounds bounds) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    std::ostringstream os;
    os << "generator must be square and non-empty, got " << raw.rows() << "x" << raw.cols();
    throw Error(ErrorKind::NonSquareInput, os.str());
  }
  if (mask.rows() != raw.rows() || mask.cols() != raw.cols()) {
    throw Error(ErrorKind::NonSquareInput, "structure mask shape differs from rate matrix");
  }
  const Eigen::Index k = raw.rows();
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(k, k);
  StructureMask clean = mask;
  for (Eigen::Index a = 0; a < k; ++a) {
    clean(a, a) = false;
    double exit = 0.0;
    for (Eigen::Index b = 0; b < k; ++b) {
      if (a == b) continue;
      const double r = raw(a, b);
      if (!std::isfinite(r)) {
        std::ostringstream os;
        os << "rate (" << a << "," << b << ") is not finite";
        throw Error(ErrorKind::InvariantViolation, os.str());
      }
      if (r < 0.0) {
        std::ostringstream os;
        os << "rate (" << a << "," << b << ") = " << r << " is negative";
        throw Error(ErrorKind::NegativeOffDiagonal, os.str());
      }
      if (!mask(a, b) || r == 0.0) continue;
      rates(a, b) = std::clamp(r, bounds.q_min, bounds.q_max);
      exit += rates(a, b);
    }
    rates(a, a) = exit > 0.0 ? -exit : 0.0;  // no -0 for absorbing rows
  }
  return GeneratorMatrix(std::move(rates), std::move(clean));
}

namespace {

using Eigen::MatrixXd;

// Higham (2005) thresholds on ||A||_1 for each Pade degree.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

void pade3(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {120.0, 60.0, 12.0, 1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

void pade5(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade7(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                          25200.0,    1512.0,    56.0,      1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade9(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                          2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd a8 = a6 * a2;
  u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade13(const MatrixXd& a, MatrixXd& u, MatrixXd& v) {
  constexpr double b[] = {64764752532480000.0,
                          32382376266240000.0,
                          7771770303897600.0,
                          1187353796428800.0,
                          129060195264000.0,
                          10559470521600.0,
                          670442572800.0,
                          33522128640.0,
                          1323241920.0,
                          40840800.0,
                          960960.0,
                          16380.0,
                          182.0,
                          1.0};
  const MatrixXd id = MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const MatrixXd inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

double norm1(const MatrixXd& a) {
  return a.cols() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

// Upper-right block of expm(dt * [[top, coupling], [0, top]]).
MatrixXd van_loan_block(const MatrixXd& top, const MatrixXd& coupling, double dt) {
  const Eigen::Index k = top.rows();
  MatrixXd aug = MatrixXd::Zero(2 * k, 2 * k);
  aug.topLeftCorner(k, k) = top * dt;
  aug.bottomRightCorner(k, k) = top * dt;
  aug.topRightCorner(k, k) = coupling * dt;
  return expm(aug).topRightCorner(k, k);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double norm = norm1(a);
  MatrixXd u, v;
  int squarings = 0;
  if (norm <= kTheta3) {
    pade3(a, u, v);
  } else if (norm <= kTheta5) {
    pade5(a, u, v);
  } else if (norm <= kTheta7) {
    pade7(a, u, v);
  } else if (norm <= kTheta9) {
    pade9(a, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

TransitionMatrix transition_matrix(const GeneratorMatrix& q, double dt) {
  if (!(dt >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "transition interval must be non-negative");
  }
  const int k = q.size();
  if (dt == 0.0) return {MatrixXd::Identity(k, k), 0.0};

  MatrixXd p = expm(q.rates() * dt);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) p(a, b) = std::max(p(a, b), 0.0);
    const double sum = p.row(a).sum();
    const double drift = std::abs(sum - 1.0);
    if (drift > 1e-8) {
      std::ostringstream os;
      os << "row " << a << " of expm(" << dt << " Q) sums to " << sum;
      throw Error(ErrorKind::ExpmInaccuracy, os.str());
    }
    if (drift > 1e-12) p.row(a) /= sum;
  }
  return {std::move(p), dt};
}

EndConditionedStats::EndConditionedStats(int states, double interval)
    : k_(states),
      interval_(interval),
      transitions_(static_cast<std::size_t>(states) * states * states * states, 0.0),
      sojourn_(static_cast<std::size_t>(states) * states * states, 0.0) {}

EndConditionedStats end_conditioned_stats(const GeneratorMatrix& q, double dt,
                                          double endpoint_floor) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::NonPositiveInterval, "end-conditioned statistics need dt > 0");
  }
  const int k = q.size();
  const MatrixXd p = transition_matrix(q, dt).probs;
  EndConditionedStats stats(k, dt);

  auto accumulate = [&](const MatrixXd& integral, double scale, auto&& store) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (p(a, b) >= endpoint_floor) store(a, b, std::max(0.0, scale * integral(a, b) / p(a, b)));
  };

  for (int c = 0; c < k; ++c) {
    MatrixXd unit = MatrixXd::Zero(k, k);
    unit(c, c) = 1.0;
    accumulate(van_loan_block(q.rates(), unit, dt), 1.0,
               [&](int a, int b, double value) { stats.sojourn(a, b, c) = value; });
    for (int d = 0; d < k; ++d) {
      if (d == c || q(c, d) == 0.0) continue;
      unit.setZero();
      unit(c, d) = 1.0;
      accumulate(van_loan_block(q.rates(), unit, dt), q(c, d),
                 [&](int a, int b, double value) { stats.transitions(a, b, c, d) = value; });
    }
  }
  return stats;
}

WeightedPathStats weighted_path_stats(const GeneratorMatrix& q, double dt,
                                      const Eigen::MatrixXd& counts, double endpoint_floor) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::NonPositiveInterval, "end-conditioned statistics need dt > 0");
  }
  const int k = q.size();
  if (counts.rows() != k || counts.cols() != k) {
    throw Error(ErrorKind::DimensionMismatch, "endpoint count matrix does not match generator");
  }
  WeightedPathStats out{MatrixXd::Zero(k, k), Eigen::VectorXd::Zero(k)};

  const MatrixXd p = transition_matrix(q, dt).probs;
  MatrixXd weights = MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (p(a, b) >= endpoint_floor) weights(a, b) = counts(a, b) / p(a, b);
  const double scale = weights.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;

  // sum_ab W_ab [e^{sQ}]_ac [e^{(dt-s)Q}]_db integrates to the (c,d) entry of
  // the Van Loan block built on Q^T with W as the coupling.
  const MatrixXd integral = van_loan_block(q.rates().transpose(), weights / scale, dt) * scale;
  for (int c = 0; c < k; ++c) {
    out.sojourn(c) = std::max(0.0, integral(c, c));
    for (int d = 0; d < k; ++d)
      if (d != c && q(c, d) != 0.0) out.transitions(c, d) = std::max(0.0, q(c, d) * integral(c, d));
  }
  return out;
}

std::vector<double> sojourn_expectation(const GeneratorMatrix& q) {
  std::vector<double> out(static_cast<std::size_t>(q.size()));
  for (int k = 0; k < q.size(); ++k) {
    const double exit = -q(k, k);
    out[static_cast<std::size_t>(k)] =
        exit > 0.0 ? 1.0 / exit : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace cthmm
