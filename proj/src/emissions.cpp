#include "cthmm/emissions.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cthmm/error.hpp"

namespace cthmm {

std::optional<int> FeatureBinning::discretize(double value) const {
  if (!std::isfinite(value) || value < lower || value > upper) return std::nullopt;
  if (value == upper) return bins - 1;
  const int j = static_cast<int>(std::floor((value - lower) / width()));
  return std::min(j, bins - 1);
}

BinningScheme::BinningScheme(std::vector<FeatureBinning> features)
    : features_(std::move(features)) {
  std::set<std::string> names;
  for (const auto& f : features_) {
    if (!(f.lower < f.upper) || f.bins < 2) {
      std::ostringstream os;
      os << "feature '" << f.name << "' needs lower < upper and at least 2 bins";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    if (!names.insert(f.name).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate feature name '" + f.name + "'");
    }
  }
}

std::vector<int> BinningScheme::bin_counts() const {
  std::vector<int> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.bins);
  return out;
}

std::size_t BinningScheme::index_of(const std::string& name) const {
  for (std::size_t d = 0; d < features_.size(); ++d)
    if (features_[d].name == name) return d;
  throw Error(ErrorKind::UnknownFeature, "no binning configured for feature '" + name + "'");
}

int BinningScheme::discretize(double value, std::size_t feature) const {
  if (feature >= features_.size()) {
    std::ostringstream os;
    os << "feature index " << feature << " outside scheme of " << features_.size();
    throw Error(ErrorKind::UnknownFeature, os.str());
  }
  return features_[feature].discretize(value).value_or(kMissing);
}

BinTensor::BinTensor(int states, std::vector<int> bins_per_feature, double fill)
    : states_(states), bins_(std::move(bins_per_feature)) {
  offsets_.reserve(bins_.size());
  for (int j : bins_) {
    offsets_.push_back(stride_);
    stride_ += static_cast<std::size_t>(j);
  }
  values_.assign(static_cast<std::size_t>(states_) * stride_, fill);
}

BinTensor& BinTensor::operator+=(const BinTensor& other) {
  if (other.states_ != states_ || other.bins_ != bins_) {
    throw Error(ErrorKind::DimensionMismatch, "bin tensors have different layouts");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

void validate_emissions(const EmissionTable& w, double tolerance) {
  for (int k = 0; k < w.states(); ++k) {
    for (int d = 0; d < w.features(); ++d) {
      double sum = 0.0;
      for (double p : w.row(k, d)) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          std::ostringstream os;
          os << "emission entry for state " << k << " feature " << d << " is " << p;
          throw Error(ErrorKind::InvariantViolation, os.str());
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "emission row for state " << k << " feature " << d << " sums to " << sum;
        throw Error(ErrorKind::InvariantViolation, os.str());
      }
    }
  }
}

void check_observation(const EmissionTable& w, const ObservationVector& obs) {
  if (static_cast<int>(obs.size()) != w.features()) {
    std::ostringstream os;
    os << "observation has " << obs.size() << " features, model has " << w.features();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  for (int d = 0; d < w.features(); ++d) {
    const int bin = obs[static_cast<std::size_t>(d)];
    if (bin != kMissing && (bin < 0 || bin >= w.bins(d))) {
      std::ostringstream os;
      os << "bin " << bin << " out of range for feature " << d;
      throw Error(ErrorKind::DimensionMismatch, os.str());
    }
  }
}

double emission_log_likelihood(const EmissionTable& w, int state, const ObservationVector& obs) {
  double ll = 0.0;
  for (int d = 0; d < w.features(); ++d) {
    const int bin = obs[static_cast<std::size_t>(d)];
    if (bin != kMissing) ll += std::log(w(state, d, bin));
  }
  return ll;
}

double emission_probability(const EmissionTable& w, int state, const ObservationVector& obs) {
  double p = 1.0;
  for (int d = 0; d < w.features(); ++d) {
    const int bin = obs[static_cast<std::size_t>(d)];
    if (bin != kMissing) p *= w(state, d, bin);
  }
  return p;
}

double expected_feature_value(const EmissionTable& w, int state, int feature,
                              const BinningScheme& scheme) {
  const auto& binning = scheme[static_cast<std::size_t>(feature)];
  double value = 0.0;
  for (int j = 0; j < w.bins(feature); ++j) value += w(state, feature, j) * binning.representative(j);
  return value;
}

}  // namespace cthmm
