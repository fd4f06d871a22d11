#pragma once

// Two-stage spectral estimation of the joint subspace.
//
// Stage 1 keeps the top r + r_k left singular vectors Ũ_k of every view.
// Stage 2 takes the top r eigenvectors of Σ w_k Ũ_k Ũ_kᵀ. Equal weights give
// AJIVE; data-driven weights (see weighting.hpp) give HeteroJIVE.

#include <optional>
#include <vector>

#include "hjive/linalg.hpp"
#include "hjive/model.hpp"
#include "hjive/weight_vector.hpp"

namespace hjive {

/// Plug-in noise and signal-strength estimates for every view.
struct PluginDiagnostics {
  Vector sigma_hat;
  Vector lambda_min_hat;
  Vector snr_hat;
  Vector eps_hat;
  Vector kappa_hat;
};

struct StageOneResult {
  std::vector<OrthonormalBasis> bases;  // n × (r + r_k)
  std::vector<Vector> singvals;         // all singular values of A_k
  std::vector<bool> degenerate_gap;

  Index views() const noexcept { return static_cast<Index>(bases.size()); }
};

StageOneResult stage1_extract(const MultiViewData& data, const RankSpec& ranks);

struct Aggregation {
  OrthonormalBasis basis;
  Vector top_eigenvalues;  // λ_1..λ_{r+1} (fewer when r = n)
  double gap = 0.0;        // λ_r − λ_{r+1}
};

/// Throws DegenerateAggregation when λ_r − λ_{r+1} < 1e-12.
Aggregation aggregate_weighted(const StageOneResult& stage1, const WeightVector& weights, Index r);

struct Components {
  std::vector<OrthonormalBasis> u_k_hat;
  std::vector<Matrix> v_k_hat;  // A_kᵀ Û
  std::vector<Matrix> w_k_hat;  // A_kᵀ Û_k
};

/// Û_k = top r_k left singular vectors of (I − ÛÛᵀ) A_k; loadings by
/// back-projection.
Components extract_components(const MultiViewData& data, const OrthonormalBasis& u_hat,
                              const RankSpec& ranks);

struct JiveFit {
  OrthonormalBasis u_hat;
  std::vector<OrthonormalBasis> u_k_hat;
  std::vector<Matrix> v_k_hat;
  std::vector<Matrix> w_k_hat;
  WeightVector weights;
  double spectral_gap = 0.0;
  std::vector<bool> stage1_degenerate;
  /// Absent when some view has too few degrees of freedom for σ̂_k.
  std::optional<PluginDiagnostics> diagnostics;

  /// Û V̂_kᵀ + Û_k Ŵ_kᵀ
  Matrix low_rank_view(Index k) const;
};

JiveFit heterojive(const MultiViewData& data, const RankSpec& ranks, const WeightVector& weights);

/// heterojive with w_k = 1/K.
JiveFit ajive(const MultiViewData& data, const RankSpec& ranks);

struct StackResult {
  OrthonormalBasis basis;
  double gap = 0.0;
  bool degenerate_gap = false;
};

/// Top r eigenvectors of the pooled covariance Σ w_k A_k A_kᵀ (equal weights
/// by default).
StackResult stack_svd(const MultiViewData& data, Index r,
                      const std::optional<WeightVector>& weights = std::nullopt);

/// Ordinary PCA of one view: its top r left singular vectors.
OrthonormalBasis single_view_svd(const MultiViewData& data, Index k, Index r);

}  // namespace hjive
