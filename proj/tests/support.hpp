#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "hjive/linalg.hpp"
#include "hjive/model.hpp"
#include "hjive/random.hpp"

namespace hjive::testing {

/// ‖P1 − P2‖ from a full dense eigendecomposition of the n×n difference.
inline double dense_projector_distance(const Matrix& a, const Matrix& b) {
  const Matrix diff = a * a.transpose() - b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(diff);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

inline Matrix random_symmetric(Rng& rng, Index n) {
  const Matrix g = gaussian_matrix(rng, n, n);
  return (g + g.transpose()) / 2.0;
}

inline SynthesisSpec homogeneous_spec(Index n, Index d, Index r, Index rk, Index K, double theta,
                                      double sigma, LoadingScheme scheme = LoadingScheme::Random,
                                      double gamma = 1.0, double s = 1.0) {
  SynthesisSpec spec;
  spec.n = n;
  spec.d = d;
  spec.ranks.joint = r;
  spec.ranks.individual.assign(static_cast<std::size_t>(K), rk);
  spec.theta = theta;
  spec.scheme = scheme;
  spec.gamma = gamma;
  spec.s_k.assign(static_cast<std::size_t>(K), s);
  spec.sigma_k.assign(static_cast<std::size_t>(K), sigma);
  return spec;
}

inline JiveGroundTruth make_truth(std::uint64_t seed, const SynthesisSpec& spec) {
  Rng rng(seed);
  return make_ground_truth(rng, spec);
}

/// e_i in R^n as a one-column basis.
inline OrthonormalBasis unit_basis(Index n, Index i) {
  Matrix e = Matrix::Zero(n, 1);
  e(i, 0) = 1.0;
  return OrthonormalBasis(e);
}

/// K rank-1 individual bases: the first K−1 equal to e_1, the last e_2.
inline std::vector<OrthonormalBasis> aligned_plus_one(Index n, Index K) {
  std::vector<OrthonormalBasis> out(static_cast<std::size_t>(K - 1), unit_basis(n, 0));
  out.push_back(unit_basis(n, 1));
  return out;
}

}  // namespace hjive::testing
