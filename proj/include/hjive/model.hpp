#pragma once

// Ground truth and synthetic views for the JIVE model
//
//   A_k = s_k (U V_kᵀ + γ U_k W_kᵀ) + E_k,   E_k ~ N(0, σ_k²) entrywise,
//
// with Uᵀ U_k = 0 for every view.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hjive/linalg.hpp"
#include "hjive/random.hpp"
#include "hjive/weight_vector.hpp"

namespace hjive {

/// Joint rank r and per-view individual ranks r_k (K = r_k.size()).
struct RankSpec {
  Index joint = 1;
  std::vector<Index> individual;

  Index views() const noexcept { return static_cast<Index>(individual.size()); }
  Index total(Index k) const { return joint + individual.at(static_cast<std::size_t>(k)); }
  void validate() const;
};

struct MultiViewData {
  std::vector<Matrix> views;
  std::vector<int> labels;  // optional, one per row

  Index n() const { return views.empty() ? 0 : views.front().rows(); }
  Index views_count() const noexcept { return static_cast<Index>(views.size()); }
  Index width(Index k) const { return views.at(static_cast<std::size_t>(k)).cols(); }
  void validate() const;
};

enum class LoadingScheme { Random, Shared, SharedOrthogonal, RandomOrthogonal };

std::string_view to_string(LoadingScheme scheme) noexcept;
LoadingScheme parse_loading_scheme(std::string_view name);

struct JiveGroundTruth {
  OrthonormalBasis u;
  std::vector<OrthonormalBasis> u_k;
  std::vector<Matrix> v_k;  // d_k × r
  std::vector<Matrix> w_k;  // d_k × r_k
  std::vector<double> sigma_k;
  std::vector<double> s_k;
  double gamma = 1.0;
  double theta_target = 0.5;

  Index n() const { return u.ambient_dim(); }
  Index views() const noexcept { return static_cast<Index>(u_k.size()); }
  RankSpec ranks() const;
  void validate() const;

  /// Noiseless view s_k (U V_kᵀ + γ U_k W_kᵀ).
  Matrix signal(Index k) const;
  /// [U U_k]
  OrthonormalBasis ubar(Index k) const;
};

struct Subspaces {
  OrthonormalBasis u;
  std::vector<OrthonormalBasis> u_k;
};

/// U Haar in O_{n,r}; Z in the complement of U; Z_k in the complement of
/// [U Z]; U_k = √(1−θ) Z + √θ Z_k. All individual ranks must be equal.
Subspaces generate_subspaces(Rng& rng, Index n, const RankSpec& ranks, double theta);

/// Each U_k drawn independently and Haar-uniformly from span(U)^⊥; θ plays no
/// role and individual ranks may differ.
Subspaces generate_independent_subspaces(Rng& rng, Index n, const RankSpec& ranks);

struct Loadings {
  std::vector<Matrix> v_k;
  std::vector<Matrix> w_k;
};

Loadings generate_loadings(Rng& rng, LoadingScheme scheme, Index d, const RankSpec& ranks);

/// Deterministic given the stream state. One base seed is drawn from `rng`
/// and each view's noise stream is derived from (base, k), so views do not
/// depend on the order they are generated in.
MultiViewData synthesize_views(Rng& rng, const JiveGroundTruth& truth);

enum class SubspaceConstruction { Mixed, IndependentComplement };

/// Everything needed to build one synthetic instance.
struct SynthesisSpec {
  Index n = 20;
  Index d = 20;
  RankSpec ranks;
  double theta = 0.5;
  SubspaceConstruction construction = SubspaceConstruction::Mixed;
  LoadingScheme scheme = LoadingScheme::Random;
  std::vector<double> s_k;
  double gamma = 1.0;
  std::vector<double> sigma_k;
};

JiveGroundTruth make_ground_truth(Rng& rng, const SynthesisSpec& spec);

/// 1 − ‖Σ w_k U_k U_kᵀ‖ for the true individual subspaces.
double realized_theta(const JiveGroundTruth& truth, const WeightVector& weights);

/// (r + r_k)-th singular value of the noiseless view.
double lambda_min(const JiveGroundTruth& truth, Index k);

/// Leakage between joint and individual loadings of view k.
double loading_delta(const JiveGroundTruth& truth, Index k);

}  // namespace hjive
