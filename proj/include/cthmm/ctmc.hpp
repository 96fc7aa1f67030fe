#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cthmm {

using StructureMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Exact elementwise equality that is false (rather than asserting) on
/// shape mismatch.
template <class A, class B>
bool same_entries(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

/// Bounds applied to every nonzero off-diagonal rate (per time unit).
struct RateBounds {
  double q_min = 1e-6;
  double q_max = 1e3;
};

/// Conditioning denominators P_ab(dt) below this are treated as unreachable.
inline constexpr double kEndpointFloor = 1e-12;

/// Every off-diagonal transition allowed.
StructureMask full_mask(int states);
/// Left-to-right chain: only k -> k+1, final state absorbing.
StructureMask chain_mask(int states);
/// True when the mask allows nothing but superdiagonal moves.
bool is_chain_mask(const StructureMask& mask);

/// Rate matrix of a time-homogeneous continuous-time Markov chain.
///
/// Off-diagonals are non-negative, masked-out entries are exactly zero,
/// nonzero rates lie in [q_min, q_max] and each diagonal entry is the
/// negated sum of its row's off-diagonals.
class GeneratorMatrix {
 public:
  /// Builds a generator from raw rates. The diagonal of `raw` and of `mask`
  /// are ignored. Throws NonSquareInput or NegativeOffDiagonal.
  static GeneratorMatrix validate(const Eigen::MatrixXd& raw, const StructureMask& mask,
                                  RateBounds bounds = {});

  int size() const { return static_cast<int>(rates_.rows()); }
  const Eigen::MatrixXd& rates() const { return rates_; }
  const StructureMask& mask() const { return mask_; }
  double operator()(int from, int to) const { return rates_(from, to); }

  friend bool operator==(const GeneratorMatrix& a, const GeneratorMatrix& b) {
    return same_entries(a.rates_, b.rates_) && same_entries(a.mask_, b.mask_);
  }

 private:
  GeneratorMatrix(Eigen::MatrixXd rates, StructureMask mask)
      : rates_(std::move(rates)), mask_(std::move(mask)) {}

  Eigen::MatrixXd rates_;
  StructureMask mask_;
};

/// Matrix exponential by scaling and squaring with Pade approximants
/// (degrees 3..13, chosen from the 1-norm).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

struct TransitionMatrix {
  Eigen::MatrixXd probs;
  double interval = 0.0;
};

/// P(dt) = expm(dt * Q). Rows are renormalized when their sums drift by
/// more than 1e-12; a drift beyond 1e-8 throws ExpmInaccuracy.
TransitionMatrix transition_matrix(const GeneratorMatrix& q, double dt);

/// Expected transition counts and sojourn times on [0, dt] conditioned on
/// both endpoints of the path.
class EndConditionedStats {
 public:
  EndConditionedStats(int states, double interval);

  int size() const { return k_; }
  double interval() const { return interval_; }

  /// E[N_{from,to}(dt) | Z(0)=a, Z(dt)=b]
  double transitions(int a, int b, int from, int to) const {
    return transitions_[((static_cast<std::size_t>(a) * k_ + b) * k_ + from) * k_ + to];
  }
  double& transitions(int a, int b, int from, int to) {
    return transitions_[((static_cast<std::size_t>(a) * k_ + b) * k_ + from) * k_ + to];
  }
  /// E[R_state(dt) | Z(0)=a, Z(dt)=b]
  double sojourn(int a, int b, int state) const {
    return sojourn_[(static_cast<std::size_t>(a) * k_ + b) * k_ + state];
  }
  double& sojourn(int a, int b, int state) {
    return sojourn_[(static_cast<std::size_t>(a) * k_ + b) * k_ + state];
  }

 private:
  int k_;
  double interval_;
  std::vector<double> transitions_;
  std::vector<double> sojourn_;
};

/// One augmented 2Kx2K exponential per integrand (sojourn in c, or jump
/// c -> d). Throws NonPositiveInterval for dt <= 0.
EndConditionedStats end_conditioned_stats(const GeneratorMatrix& q, double dt,
                                          double endpoint_floor = kEndpointFloor);

/// Endpoint-weighted sums of the end-conditioned expectations:
///   transitions(c,d) = sum_ab counts(a,b) E[N_cd | a,b]
///   sojourn(c)       = sum_ab counts(a,b) E[R_c | a,b]
struct WeightedPathStats {
  Eigen::MatrixXd transitions;
  Eigen::VectorXd sojourn;
};

/// Same quantities as summing end_conditioned_stats against `counts`, but
/// with a single augmented exponential for all integrands at once.
WeightedPathStats weighted_path_stats(const GeneratorMatrix& q, double dt,
                                      const Eigen::MatrixXd& counts,
                                      double endpoint_floor = kEndpointFloor);

/// Mean holding time 1/|Q_kk|; +infinity for absorbing states.
std::vector<double> sojourn_expectation(const GeneratorMatrix& q);

}  // namespace cthmm
