#pragma once

// Weight selection for the aggregation step.
//
// Per-view cost at weights w:
//
//   c_k(w) = ε_k⁴ θ(w)⁻² + n⁻¹ ε_k² [tr M_k(w) + r̄_k ‖M_k(w)‖]
//
// where θ(w) = 1 − ‖Σ w_k U_k U_kᵀ‖, U_⊥ Λ U_⊥ᵀ is the rank n − r part of
// I − Σ w_k Ū_k Ū_kᵀ and M_k = Ū_{k⊥}ᵀ U_⊥ Λ⁻² U_⊥ᵀ Ū_{k⊥}. The oracle
// objective is J(w) = Σ w_k² c_k(w); the reweighting map sets w_k ∝ 1/c_k(w).
// The data-driven scheme plugs AJIVE estimates into the same machinery.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjive/estimators.hpp"
#include "hjive/linalg.hpp"
#include "hjive/model.hpp"
#include "hjive/weight_vector.hpp"

namespace hjive {

/// Below this misalignment the joint subspace is treated as unidentifiable.
inline constexpr double kThetaFloor = 1e-6;
/// Plug-in SNR cap; keeps ε̂_k > 0 on noiseless inputs.
inline constexpr double kSnrCap = 1e8;

/// √n / snr + √(n d_k) / snr²
double epsilon_k(Index n, Index d_k, double snr);

/// Geometry the costs are evaluated on: the joint basis and the per-view
/// individual bases, with Ū_k = [U U_k] and its complement cached.
class DiagnosticMaps {
 public:
  DiagnosticMaps(OrthonormalBasis joint, std::vector<OrthonormalBasis> individual);

  static DiagnosticMaps from_truth(const JiveGroundTruth& truth);
  static DiagnosticMaps from_fit(const JiveFit& fit);

  Index n() const noexcept { return joint_.ambient_dim(); }
  Index r() const noexcept { return joint_.rank(); }
  Index views() const noexcept { return static_cast<Index>(ubar_.size()); }
  Index rbar(Index k) const { return ubar(k).rank(); }

  const OrthonormalBasis& joint() const noexcept { return joint_; }
  std::span<const OrthonormalBasis> individual() const noexcept { return individual_; }
  const OrthonormalBasis& individual(Index k) const { return individual_.at(static_cast<std::size_t>(k)); }
  const OrthonormalBasis& ubar(Index k) const { return ubar_.at(static_cast<std::size_t>(k)); }
  const OrthonormalBasis& ubar_complement(Index k) const {
    return complement_.at(static_cast<std::size_t>(k));
  }

 private:
  OrthonormalBasis joint_;
  std::vector<OrthonormalBasis> individual_;
  std::vector<OrthonormalBasis> ubar_;
  std::vector<OrthonormalBasis> complement_;
};

/// 1 − ‖Σ w_k U_k U_kᵀ‖, in [0, 1].
double theta_of_w(std::span<const OrthonormalBasis> individual, const WeightVector& w);
double theta_of_w(const DiagnosticMaps& maps, const WeightVector& w);

/// Eigendecomposition of H(w) = I − Σ w_k Ū_k Ū_kᵀ restricted to its top
/// n − r eigenpairs. Shared by every view's M_k at the same weights.
struct WeightedGeometry {
  double theta = 0.0;
  Matrix u_perp;   // n × (n − r)
  Vector lambda;   // n − r values, descending, clamped at kThetaFloor
  bool clamped = false;
};

/// Throws ThetaTooSmall when θ(w) ≤ kThetaFloor.
WeightedGeometry weighted_geometry(const DiagnosticMaps& maps, const WeightVector& w);

struct MkStats {
  double trace = 0.0;
  double opnorm = 0.0;
  double theta = 0.0;
  bool clamped = false;
};

MkStats mk_stats(const DiagnosticMaps& maps, const WeightVector& w, Index k);
MkStats mk_stats(const DiagnosticMaps& maps, const WeightedGeometry& geometry, Index k);

Vector cost_vector(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w);
double objective_J(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w);

/// w_k = c_k⁻¹ / Σ_j c_j⁻¹. Zero-cost views share all the mass equally.
WeightVector reweight_step(const Vector& costs);

struct IterationOptions {
  Index t_max = 20;
  double tol = 1e-8;
};

enum class TraceStatus { Converged, MaxIterations, Aborted };

struct WeightTrace {
  std::vector<WeightVector> iterates;  // w⁰, w¹, ...
  std::vector<Vector> costs;           // costs[t] = c(wᵗ), used to form wᵗ⁺¹
  std::vector<double> steps;           // ‖wᵗ⁺¹ − wᵗ‖₁
  bool converged = false;
  Index iterations_used = 0;
  TraceStatus status = TraceStatus::MaxIterations;
  std::string abort_reason;

  const WeightVector& final() const { return iterates.back(); }
};

/// Fixed-point iteration wᵗ⁺¹ = T(wᵗ) with costs recomputed at every iterate.
/// A ThetaTooSmall at a later iterate stops the loop and returns the partial
/// trace with status Aborted.
WeightTrace oracle_iterate(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w0,
                           const IterationOptions& options = {});

struct Stationarity {
  double proj_grad_inf = 0.0;
  double bound = 0.0;  // L(θ₀), θ₀ = θ(w)/2
};

/// Central differences of J along the tangent directions e_k − e_K, projected
/// onto the zero-sum plane. Default step 1e-5 (1 + ‖w‖∞).
Stationarity stationarity_check(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w,
                                std::optional<double> step = std::nullopt);

/// L(θ₀) = 4 θ₀⁻³ max_k {ε_k⁴ + 3 n⁻¹ ε_k² r̄_k}
double stationarity_bound(const Vector& eps, const DiagnosticMaps& maps, double theta0);

/// True when n d_k > (r + r_k)(n + d_k − r − r_k) for every view.
bool noise_estimable(const MultiViewData& data, const RankSpec& ranks);

/// σ̂_k, λ̂_{k,min}, SNR̂_k, ε̂_k, κ̂_k from the low-rank reconstruction in `fit`.
PluginDiagnostics estimate_plugin_diagnostics(const MultiViewData& data, const RankSpec& ranks,
                                              const JiveFit& fit);

struct PluginFit {
  PluginDiagnostics diagnostics;
  DiagnosticMaps maps;
  JiveFit initial;  // the equal-weight fit the plug-ins come from
};

PluginFit plugin_fit(const MultiViewData& data, const RankSpec& ranks);

struct DataDrivenOptions {
  IterationOptions iteration;
  /// Re-fit the geometry at every iterate instead of fixing it at the AJIVE fit.
  bool refresh_each_iter = false;
};

struct DataDrivenWeights {
  WeightVector weights;
  WeightTrace trace;
  PluginFit plugin;
};

DataDrivenWeights data_driven_weights(const MultiViewData& data, const RankSpec& ranks,
                                      const DataDrivenOptions& options = {});

/// ε_k from the true SNR_k = λ_{k,min} / σ_k (0 for noiseless views).
Vector oracle_epsilon(const JiveGroundTruth& truth);

/// Oracle weights from the true geometry, starting at uniform.
WeightTrace oracle_weights(const JiveGroundTruth& truth, const IterationOptions& options = {});

}  // namespace hjive
