#pragma once

#include <span>
#include <vector>

#include "hjive/linalg.hpp"

namespace hjive {

/// A point on the probability simplex: nonnegative entries summing to one
/// (within 1e-12).
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  WeightVector() = default;
  explicit WeightVector(Vector values);
  explicit WeightVector(std::span<const double> values);

  static WeightVector uniform(Index views);
  /// Rescales a nonnegative, not-all-zero vector onto the simplex.
  static WeightVector normalized(Vector values);

  const Vector& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  double operator[](Index k) const { return values_(k); }

  std::vector<double> to_std() const { return {values_.data(), values_.data() + values_.size()}; }

 private:
  Vector values_;
};

inline double l1_distance(const WeightVector& a, const WeightVector& b) {
  return (a.values() - b.values()).lpNorm<1>();
}

}  // namespace hjive
