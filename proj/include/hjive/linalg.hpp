#pragma once

// Dense matrix primitives shared by every estimator in the library.
//
// Everything here is a free function templated on the Eigen expression type,
// so callers can pass blocks, maps or products without materialising copies.
// Results are returned as plain dense matrices of the input's scalar type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hjive/errors.hpp"

namespace hjive {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;

/// 1e-10 for double.
template <typename Scalar>
Scalar orthonormality_tolerance() {
  return Scalar(100) * Eigen::NumTraits<Scalar>::dummy_precision();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* where) {
  if (!a.allFinite()) raise(ErrorKind::InvalidInput, std::string(where) + ": non-finite entry");
}

namespace detail {

inline std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace detail

/// max |BᵀB − I|
template <typename Derived>
typename Derived::Scalar orthonormality_defect(const Eigen::MatrixBase<Derived>& b) {
  using Scalar = typename Derived::Scalar;
  if (b.cols() == 0) return Scalar(0);
  DenseMatrix<Scalar> gram = b.transpose() * b;
  gram.diagonal().array() -= Scalar(1);
  return gram.cwiseAbs().maxCoeff();
}

/// An n×q matrix with orthonormal columns. The invariant is checked on
/// construction; q = 0 is allowed (an empty individual component).
template <typename Scalar>
class BasicOrthonormalBasis {
 public:
  using MatrixType = DenseMatrix<Scalar>;

  BasicOrthonormalBasis() = default;

  explicit BasicOrthonormalBasis(MatrixType columns) : columns_(std::move(columns)) {
    require(columns_.rows() >= 1, "orthonormal basis needs ambient dimension >= 1");
    require(columns_.cols() <= columns_.rows(), "orthonormal basis has more columns than rows");
    require_finite(columns_, "orthonormal basis");
    const Scalar defect = orthonormality_defect(columns_);
    if (!(defect < orthonormality_tolerance<Scalar>()))
      raise(ErrorKind::InvalidInput,
            "columns are not orthonormal (defect " + detail::short_double(double(defect)) + ")");
  }

  const MatrixType& matrix() const noexcept { return columns_; }
  Index ambient_dim() const noexcept { return columns_.rows(); }
  Index rank() const noexcept { return columns_.cols(); }

  MatrixType projector() const { return columns_ * columns_.transpose(); }

  BasicOrthonormalBasis leading(Index q) const {
    require(q >= 0 && q <= rank(), "leading(): requested more columns than available");
    return BasicOrthonormalBasis(Trusted{}, columns_.leftCols(q));
  }

  BasicOrthonormalBasis trailing(Index q) const {
    require(q >= 0 && q <= rank(), "trailing(): requested more columns than available");
    return BasicOrthonormalBasis(Trusted{}, columns_.rightCols(q));
  }

 private:
  struct Trusted {};
  BasicOrthonormalBasis(Trusted, MatrixType columns) : columns_(std::move(columns)) {}

  MatrixType columns_;
};

using OrthonormalBasis = BasicOrthonormalBasis<double>;

/// [a b] as one basis; fails unless the two spans are orthogonal.
template <typename Scalar>
BasicOrthonormalBasis<Scalar> hstack(const BasicOrthonormalBasis<Scalar>& a,
                                     const BasicOrthonormalBasis<Scalar>& b) {
  require(a.ambient_dim() == b.ambient_dim(), "hstack: ambient dimension mismatch");
  DenseMatrix<Scalar> joined(a.ambient_dim(), a.rank() + b.rank());
  joined << a.matrix(), b.matrix();
  return BasicOrthonormalBasis<Scalar>(std::move(joined));
}

template <typename Scalar>
struct BasicThinSvd {
  BasicOrthonormalBasis<Scalar> left;
  DenseVector<Scalar> singvals;  // descending
  BasicOrthonormalBasis<Scalar> right;
};

using ThinSvd = BasicThinSvd<double>;

template <typename Derived>
BasicThinSvd<typename Derived::Scalar> thin_svd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require(a.rows() >= 1 && a.cols() >= 1, "thin_svd: empty matrix");
  require_finite(a, "thin_svd");
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {BasicOrthonormalBasis<Scalar>(svd.matrixU()), svd.singularValues(),
          BasicOrthonormalBasis<Scalar>(svd.matrixV())};
}

template <typename Derived>
DenseVector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return DenseVector<Scalar>();
  require_finite(a, "singular_values");
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a);
  return svd.singularValues();
}

template <typename Scalar>
struct BasicSpectrumSlice {
  DenseVector<Scalar> values;  // nonincreasing
  BasicOrthonormalBasis<Scalar> vectors;
  /// λ_r − λ_{r+1}; +inf when r equals the dimension.
  Scalar gap = std::numeric_limits<Scalar>::infinity();
  bool degenerate_gap = false;
};

using SpectrumSlice = BasicSpectrumSlice<double>;

inline constexpr double kDegenerateGap = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-10;

namespace detail {

template <typename Derived>
DenseMatrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& s,
                                                  const char* where) {
  using Scalar = typename Derived::Scalar;
  require(s.rows() == s.cols() && s.rows() >= 1, std::string(where) + ": matrix must be square");
  require_finite(s, where);
  const Scalar scale = std::max(Scalar(1), s.cwiseAbs().maxCoeff());
  const Scalar asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(kSymmetryTolerance) * scale)
    raise(ErrorKind::InvalidInput, std::string(where) + ": matrix is not symmetric");
  return (s + s.transpose()) / Scalar(2);
}

}  // namespace detail

/// All eigenvalues of a symmetric matrix, descending.
template <typename Derived>
DenseVector<typename Derived::Scalar> sym_eigenvalues(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(detail::symmetrized(s, "sym_eigenvalues"),
                                                         Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

/// The r largest eigenpairs of a symmetric matrix. Inputs are symmetrised
/// before decomposition; a tie λ_r = λ_{r+1} sets `degenerate_gap` and returns
/// some orthonormal basis of a valid invariant subspace.
template <typename Derived>
BasicSpectrumSlice<typename Derived::Scalar> top_r_eigvecs_sym(const Eigen::MatrixBase<Derived>& s,
                                                               Index r) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> sym = detail::symmetrized(s, "top_r_eigvecs_sym");
  const Index n = sym.rows();
  require(r >= 1 && r <= n, "top_r_eigvecs_sym: r must lie in [1, n]");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(sym);
  // ascending order from Eigen
  BasicSpectrumSlice<Scalar> out;
  out.values = eig.eigenvalues().tail(r).reverse();
  out.vectors = BasicOrthonormalBasis<Scalar>(eig.eigenvectors().rightCols(r).rowwise().reverse());
  if (r < n) {
    out.gap = eig.eigenvalues()(n - r) - eig.eigenvalues()(n - r - 1);
    out.degenerate_gap = out.gap < Scalar(kDegenerateGap);
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return Scalar(0);
  return singular_values(a).maxCoeff();
}

/// ‖P₁ − P₂‖ in operator norm. The difference lives inside span([u₁ u₂]), so
/// the spectrum is computed on that (at most q₁+q₂ dimensional) subspace.
template <typename Scalar>
Scalar projector_distance(const BasicOrthonormalBasis<Scalar>& u1,
                          const BasicOrthonormalBasis<Scalar>& u2) {
  require(u1.ambient_dim() == u2.ambient_dim(), "projector_distance: ambient dimension mismatch");
  const Index n = u1.ambient_dim();
  const Index m = std::min(n, u1.rank() + u2.rank());
  if (m == 0) return Scalar(0);
  DenseMatrix<Scalar> joined(n, u1.rank() + u2.rank());
  joined << u1.matrix(), u2.matrix();
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(joined);
  const DenseMatrix<Scalar> q = qr.householderQ() * DenseMatrix<Scalar>::Identity(n, m);
  const DenseMatrix<Scalar> a = q.transpose() * u1.matrix();
  const DenseMatrix<Scalar> b = q.transpose() * u2.matrix();
  const DenseMatrix<Scalar> diff = a * a.transpose() - b * b.transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(diff, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Scalar = double, typename Urbg>
DenseMatrix<Scalar> gaussian_matrix(Urbg& rng, Index rows, Index cols) {
  std::normal_distribution<Scalar> normal;
  DenseMatrix<Scalar> g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

/// Haar-uniform draw from the Stiefel manifold O_{n,q}: QR of a Gaussian
/// matrix with column j rescaled by sign(R_jj).
template <typename Scalar = double, typename Urbg>
BasicOrthonormalBasis<Scalar> haar_orthonormal(Urbg& rng, Index n, Index q) {
  require(n >= 1, "haar_orthonormal: n must be positive");
  require(q >= 0 && q <= n, "haar_orthonormal: q must not exceed n");
  if (q == 0) return BasicOrthonormalBasis<Scalar>(DenseMatrix<Scalar>(n, 0));
  DenseMatrix<Scalar> g = gaussian_matrix<Scalar>(rng, n, q);
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(g);
  DenseMatrix<Scalar> q_thin = qr.householderQ() * DenseMatrix<Scalar>::Identity(n, q);
  for (Index j = 0; j < q; ++j)
    if (qr.matrixQR()(j, j) < Scalar(0)) q_thin.col(j) *= Scalar(-1);
  return BasicOrthonormalBasis<Scalar>(std::move(q_thin));
}

/// n×(n−q) basis of the orthogonal complement of span(b).
template <typename Scalar>
BasicOrthonormalBasis<Scalar> complement_basis(const BasicOrthonormalBasis<Scalar>& b) {
  const Index n = b.ambient_dim();
  const Index q = b.rank();
  require(q < n, "complement_basis: basis already spans the ambient space");
  if (q == 0) return BasicOrthonormalBasis<Scalar>(DenseMatrix<Scalar>::Identity(n, n));
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(b.matrix());
  DenseMatrix<Scalar> full = qr.householderQ();
  return BasicOrthonormalBasis<Scalar>(full.rightCols(n - q));
}

/// Haar-uniform q-frame orthogonal to the union of the constraint spans.
template <typename Scalar = double, typename Urbg>
BasicOrthonormalBasis<Scalar> sample_in_complement(
    Urbg& rng, std::span<const BasicOrthonormalBasis<Scalar>> constraints, Index q) {
  Index total = 0;
  Index n = -1;
  for (const auto& c : constraints) {
    if (n < 0) n = c.ambient_dim();
    require(c.ambient_dim() == n, "sample_in_complement: constraint dimensions differ");
    total += c.rank();
  }
  require(n >= 1, "sample_in_complement: at least one constraint is needed to fix the dimension");
  if (total == 0) return haar_orthonormal<Scalar>(rng, n, q);

  DenseMatrix<Scalar> stacked(n, total);
  Index col = 0;
  for (const auto& c : constraints) {
    stacked.middleCols(col, c.rank()) = c.matrix();
    col += c.rank();
  }
  Eigen::ColPivHouseholderQR<DenseMatrix<Scalar>> qr(stacked);
  qr.setThreshold(orthonormality_tolerance<Scalar>());
  const Index used = qr.rank();
  require(used + q <= n, "sample_in_complement: not enough room left in the complement");
  DenseMatrix<Scalar> full = qr.householderQ();
  const DenseMatrix<Scalar> free_space = full.rightCols(n - used);
  const auto inner = haar_orthonormal<Scalar>(rng, n - used, q);
  return BasicOrthonormalBasis<Scalar>(free_space * inner.matrix());
}

template <typename Scalar = double, typename Urbg>
BasicOrthonormalBasis<Scalar> sample_in_complement(
    Urbg& rng, const std::vector<BasicOrthonormalBasis<Scalar>>& constraints, Index q) {
  return sample_in_complement<Scalar>(rng, std::span<const BasicOrthonormalBasis<Scalar>>(constraints), q);
}

namespace detail {

template <typename Derived>
DenseMatrix<typename Derived::Scalar> inverse_sqrt_gram(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(gram);
  // smallest singular value of a must exceed 1e-10
  if (!(eig.eigenvalues().minCoeff() > Scalar(1e-20)))
    raise(ErrorKind::RankDeficient, "principal_angle_delta: loading matrix is rank deficient");
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace detail

/// ‖(VᵀV)^{-1/2} VᵀW (WᵀW)^{-1/2}‖: cosine of the smallest principal angle
/// between the column spaces of v and w. Empty inputs give 0.
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar principal_angle_delta(const Eigen::MatrixBase<DerivedV>& v,
                                                const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedV::Scalar;
  require(v.rows() == w.rows(), "principal_angle_delta: row dimension mismatch");
  require_finite(v, "principal_angle_delta");
  require_finite(w, "principal_angle_delta");
  if (v.cols() == 0 || w.cols() == 0) return Scalar(0);
  const DenseMatrix<Scalar> cross =
      detail::inverse_sqrt_gram(v) * (v.transpose() * w) * detail::inverse_sqrt_gram(w);
  return std::min(Scalar(1), operator_norm(cross));
}

}  // namespace hjive
