#include "hjive/weight_vector.hpp"

#include <cmath>
#include <string>

namespace hjive {

WeightVector::WeightVector(Vector values) : values_(std::move(values)) {
  require(values_.size() >= 1, "weight vector must be nonempty");
  require(values_.allFinite(), "weight vector has non-finite entries");
  require(values_.minCoeff() >= 0.0, "weights must be nonnegative");
  const double sum = values_.sum();
  if (std::abs(sum - 1.0) > kSumTolerance)
    raise(ErrorKind::InvalidInput, "weights must sum to one (got " + std::to_string(sum) + ")");
}

WeightVector::WeightVector(std::span<const double> values)
    : WeightVector(Vector(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())))) {}

WeightVector WeightVector::uniform(Index views) {
  require(views >= 1, "uniform weights need at least one view");
  return WeightVector(Vector::Constant(views, 1.0 / static_cast<double>(views)));
}

WeightVector WeightVector::normalized(Vector values) {
  require(values.size() >= 1 && values.allFinite(), "cannot normalise an empty or non-finite vector");
  require(values.minCoeff() >= 0.0, "cannot normalise negative weights");
  const double sum = values.sum();
  require(sum > 0.0, "cannot normalise an all-zero vector");
  values /= sum;
  return WeightVector(std::move(values));
}

}  // namespace hjive
