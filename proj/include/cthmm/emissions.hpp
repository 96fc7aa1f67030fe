#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cthmm {

/// Marker stored in an observation slot when the feature was not observed.
inline constexpr int kMissing = -1;

/// One bin index (or kMissing) per feature.
using ObservationVector = std::vector<int>;

/// Equal-width discretization of one real-valued feature.
struct FeatureBinning {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  int bins = 2;

  double width() const { return (upper - lower) / bins; }
  double edge(int j) const { return j == bins ? upper : lower + j * width(); }
  double center(int j) const { return 0.5 * (edge(j) + edge(j + 1)); }
  /// A 0/1 indicator: two bins on [0, 1].
  bool is_binary() const { return lower == 0.0 && upper == 1.0 && bins == 2; }
  /// Value a bin stands for: j itself for indicators, the center otherwise.
  double representative(int j) const { return is_binary() ? j : center(j); }

  /// Out-of-range (or non-finite) values map to nullopt. The upper bound
  /// belongs to the last bin.
  std::optional<int> discretize(double value) const;
};

class BinningScheme {
 public:
  BinningScheme() = default;
  /// Throws InvalidArgument unless lower < upper and bins >= 2 for every
  /// feature and names are unique.
  explicit BinningScheme(std::vector<FeatureBinning> features);

  std::size_t size() const { return features_.size(); }
  const FeatureBinning& operator[](std::size_t d) const { return features_[d]; }
  const std::vector<FeatureBinning>& features() const { return features_; }
  std::vector<int> bin_counts() const;

  /// Throws UnknownFeature if `name` is not configured.
  std::size_t index_of(const std::string& name) const;

  /// Bin index, or kMissing for outliers. Throws UnknownFeature.
  int discretize(double value, std::size_t feature) const;

  friend bool operator==(const BinningScheme&, const BinningScheme&) = default;

 private:
  std::vector<FeatureBinning> features_;
};

inline bool operator==(const FeatureBinning& a, const FeatureBinning& b) {
  return a.name == b.name && a.lower == b.lower && a.upper == b.upper && a.bins == b.bins;
}

/// Ragged K x D x J_d tensor of per-state, per-feature bin values.
/// Holds emission probabilities w[k][d][j] or their expected counts.
class BinTensor {
 public:
  BinTensor() = default;
  BinTensor(int states, std::vector<int> bins_per_feature, double fill = 0.0);

  int states() const { return states_; }
  int features() const { return static_cast<int>(bins_.size()); }
  int bins(int d) const { return bins_[static_cast<std::size_t>(d)]; }
  const std::vector<int>& bin_counts() const { return bins_; }

  double& operator()(int k, int d, int j) { return values_[index(k, d, j)]; }
  double operator()(int k, int d, int j) const { return values_[index(k, d, j)]; }

  std::span<double> row(int k, int d) {
    return {values_.data() + index(k, d, 0), static_cast<std::size_t>(bins(d))};
  }
  std::span<const double> row(int k, int d) const {
    return {values_.data() + index(k, d, 0), static_cast<std::size_t>(bins(d))};
  }

  std::span<const double> raw() const { return values_; }

  BinTensor& operator+=(const BinTensor& other);

  friend bool operator==(const BinTensor&, const BinTensor&) = default;

 private:
  std::size_t index(int k, int d, int j) const {
    return static_cast<std::size_t>(k) * stride_ + offsets_[static_cast<std::size_t>(d)] +
           static_cast<std::size_t>(j);
  }

  int states_ = 0;
  std::vector<int> bins_;
  std::vector<std::size_t> offsets_;
  std::size_t stride_ = 0;
  std::vector<double> values_;
};

using EmissionTable = BinTensor;

/// Throws InvariantViolation unless every w[k][d][.] is a probability
/// vector (entries >= 0, sum within `tolerance` of 1).
void validate_emissions(const EmissionTable& w, double tolerance = 1e-12);

/// Throws DimensionMismatch if `obs` does not fit the table's feature layout.
void check_observation(const EmissionTable& w, const ObservationVector& obs);

/// sum over observed features of log w[k][d][bin]; 0 when all are missing.
double emission_log_likelihood(const EmissionTable& w, int state, const ObservationVector& obs);

/// Product form of the above, used inside the forward recursion.
double emission_probability(const EmissionTable& w, int state, const ObservationVector& obs);

/// sum_j w[k][d][j] * representative_j (so P(present) for an indicator)
double expected_feature_value(const EmissionTable& w, int state, int feature,
                              const BinningScheme& scheme);

}  // namespace cthmm
