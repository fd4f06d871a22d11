#include "hjive/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjive/io.hpp"

namespace hjive {

double epsilon_k(Index n, Index d_k, double snr) {
  require(n >= 1 && d_k >= 1, "epsilon_k: dimensions must be positive");
  if (!(snr > 0.0)) raise(ErrorKind::InvalidInput, "epsilon_k: SNR must be positive");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d_k);
  return std::sqrt(nn) / snr + std::sqrt(nn * dd) / (snr * snr);
}

DiagnosticMaps::DiagnosticMaps(OrthonormalBasis joint, std::vector<OrthonormalBasis> individual)
    : joint_(std::move(joint)), individual_(std::move(individual)) {
  require(!individual_.empty(), "diagnostic maps need at least one view");
  require(joint_.rank() >= 1, "diagnostic maps need a nonempty joint basis");
  for (const auto& uk : individual_) {
    ubar_.push_back(hstack(joint_, uk));
    const OrthonormalBasis& ub = ubar_.back();
    complement_.push_back(ub.rank() < ub.ambient_dim() ? complement_basis(ub)
                                                       : OrthonormalBasis(Matrix(ub.ambient_dim(), 0)));
  }
}

DiagnosticMaps DiagnosticMaps::from_truth(const JiveGroundTruth& truth) {
  return DiagnosticMaps(truth.u, truth.u_k);
}

DiagnosticMaps DiagnosticMaps::from_fit(const JiveFit& fit) {
  return DiagnosticMaps(fit.u_hat, fit.u_k_hat);
}

double theta_of_w(std::span<const OrthonormalBasis> individual, const WeightVector& w) {
  require(!individual.empty(), "theta_of_w: no individual bases");
  require(static_cast<Index>(individual.size()) == w.size(),
          "theta_of_w: weight vector length does not match the view count");
  const Index n = individual.front().ambient_dim();
  Matrix pooled = Matrix::Zero(n, n);
  bool any = false;
  for (std::size_t k = 0; k < individual.size(); ++k) {
    const Matrix& b = individual[k].matrix();
    require(b.rows() == n, "theta_of_w: bases disagree on the ambient dimension");
    if (b.cols() == 0 || w[static_cast<Index>(k)] == 0.0) continue;
    pooled.noalias() += w[static_cast<Index>(k)] * b * b.transpose();
    any = true;
  }
  if (!any) return 1.0;
  const double top = sym_eigenvalues(pooled)(0);
  return std::clamp(1.0 - top, 0.0, 1.0);
}

double theta_of_w(const DiagnosticMaps& maps, const WeightVector& w) {
  return theta_of_w(maps.individual(), w);
}

WeightedGeometry weighted_geometry(const DiagnosticMaps& maps, const WeightVector& w) {
  require(w.size() == maps.views(), "weight vector length does not match the view count");
  WeightedGeometry out;
  out.theta = theta_of_w(maps, w);
  if (!(out.theta > kThetaFloor))
    raise(ErrorKind::ThetaTooSmall,
          "misalignment theta(w) = " + io::format_double(out.theta) + " is below the floor");

  const Index n = maps.n();
  const Index keep = n - maps.r();
  Matrix h = Matrix::Identity(n, n);
  for (Index k = 0; k < maps.views(); ++k) {
    const Matrix& b = maps.ubar(k).matrix();
    if (w[k] != 0.0) h.noalias() -= w[k] * b * b.transpose();
  }
  if (keep == 0) {
    out.u_perp = Matrix(n, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig((h + h.transpose()) / 2.0);
  out.u_perp = eig.eigenvectors().rightCols(keep).rowwise().reverse();
  out.lambda = eig.eigenvalues().tail(keep).reverse();
  for (Index i = 0; i < keep; ++i) {
    if (out.lambda(i) < kThetaFloor) {
      out.lambda(i) = kThetaFloor;
      out.clamped = true;
    }
  }
  return out;
}

MkStats mk_stats(const DiagnosticMaps& maps, const WeightedGeometry& geometry, Index k) {
  require(k >= 0 && k < maps.views(), "mk_stats: view index out of range");
  MkStats out;
  out.theta = geometry.theta;
  out.clamped = geometry.clamped;
  const Matrix& comp = maps.ubar_complement(k).matrix();
  if (comp.cols() == 0 || geometry.u_perp.cols() == 0) return out;
  // M_k = BᵀB with B = Λ⁻¹ U_⊥ᵀ Ū_{k⊥}
  const Matrix b = geometry.lambda.cwiseInverse().asDiagonal() * (geometry.u_perp.transpose() * comp);
  out.trace = b.squaredNorm();
  const double top = operator_norm(b);
  out.opnorm = top * top;
  return out;
}

MkStats mk_stats(const DiagnosticMaps& maps, const WeightVector& w, Index k) {
  return mk_stats(maps, weighted_geometry(maps, w), k);
}

Vector cost_vector(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w) {
  require(eps.size() == maps.views(), "cost_vector: need one epsilon per view");
  require(eps.allFinite() && (eps.array() >= 0.0).all(), "cost_vector: epsilons must be finite and >= 0");
  const WeightedGeometry geometry = weighted_geometry(maps, w);
  const double inv_n = 1.0 / static_cast<double>(maps.n());
  const double inv_theta2 = 1.0 / (geometry.theta * geometry.theta);
  Vector costs(maps.views());
  for (Index k = 0; k < maps.views(); ++k) {
    const MkStats m = mk_stats(maps, geometry, k);
    const double e2 = eps(k) * eps(k);
    costs(k) = e2 * e2 * inv_theta2 +
               inv_n * e2 * (m.trace + static_cast<double>(maps.rbar(k)) * m.opnorm);
  }
  return costs;
}

double objective_J(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w) {
  const Vector costs = cost_vector(eps, maps, w);
  return (w.values().array().square() * costs.array()).sum();
}

WeightVector reweight_step(const Vector& costs) {
  require(costs.size() >= 1, "reweight_step: empty cost vector");
  require(costs.allFinite(), "reweight_step: costs must be finite");
  require((costs.array() >= 0.0).all(), "reweight_step: costs must be nonnegative");
  const Index K = costs.size();
  Vector out(K);
  if ((costs.array() == 0.0).any()) {
    out = (costs.array() == 0.0).cast<double>();
  } else {
    // dividing by the smallest cost keeps the inverses in range
    const double smallest = costs.minCoeff();
    out = (smallest / costs.array()).matrix();
  }
  return WeightVector::normalized(std::move(out));
}

WeightTrace oracle_iterate(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w0,
                           const IterationOptions& options) {
  require(options.t_max >= 1, "oracle_iterate: t_max must be at least 1");
  require(options.tol > 0.0, "oracle_iterate: tolerance must be positive");
  WeightTrace trace;
  trace.iterates.push_back(w0);
  for (Index t = 0; t < options.t_max; ++t) {
    Vector costs;
    try {
      costs = cost_vector(eps, maps, trace.iterates.back());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ThetaTooSmall || t == 0) throw;
      trace.status = TraceStatus::Aborted;
      trace.abort_reason = e.what();
      return trace;
    }
    WeightVector next = reweight_step(costs);
    const double step = l1_distance(next, trace.iterates.back());
    trace.costs.push_back(std::move(costs));
    trace.steps.push_back(step);
    trace.iterates.push_back(std::move(next));
    trace.iterations_used = t + 1;
    if (step < options.tol) {
      trace.converged = true;
      trace.status = TraceStatus::Converged;
      break;
    }
  }
  return trace;
}

double stationarity_bound(const Vector& eps, const DiagnosticMaps& maps, double theta0) {
  require(theta0 > 0.0, "stationarity_bound: theta0 must be positive");
  const double inv_n = 1.0 / static_cast<double>(maps.n());
  double worst = 0.0;
  for (Index k = 0; k < maps.views(); ++k) {
    const double e2 = eps(k) * eps(k);
    worst = std::max(worst, e2 * e2 + 3.0 * inv_n * e2 * static_cast<double>(maps.rbar(k)));
  }
  return 4.0 * worst / (theta0 * theta0 * theta0);
}

Stationarity stationarity_check(const Vector& eps, const DiagnosticMaps& maps, const WeightVector& w,
                                std::optional<double> step) {
  require(w.size() == maps.views(), "stationarity_check: weight vector length mismatch");
  const double h = step.value_or(1e-5 * (1.0 + w.values().lpNorm<Eigen::Infinity>()));
  require(h > 0.0, "stationarity_check: step must be positive");
  if (!(w.values().minCoeff() > h))
    raise(ErrorKind::BoundaryPoint, "stationarity_check: weights must exceed the step on every view");
  const double theta = theta_of_w(maps, w);
  if (!(theta > 2.0 * kThetaFloor))
    raise(ErrorKind::ThetaTooSmall, "stationarity_check: theta(w) too small for finite differences");

  const Index K = w.size();
  Vector directional = Vector::Zero(K);
  for (Index k = 0; k + 1 < K; ++k) {
    Vector plus = w.values();
    Vector minus = w.values();
    plus(k) += h;
    plus(K - 1) -= h;
    minus(k) -= h;
    minus(K - 1) += h;
    const double jp = objective_J(eps, maps, WeightVector(plus));
    const double jm = objective_J(eps, maps, WeightVector(minus));
    directional(k) = (jp - jm) / (2.0 * h);
  }
  Stationarity out;
  out.proj_grad_inf = (directional.array() - directional.mean()).abs().maxCoeff();
  out.bound = stationarity_bound(eps, maps, theta / 2.0);
  return out;
}

bool noise_estimable(const MultiViewData& data, const RankSpec& ranks) {
  if (ranks.views() != data.views_count()) return false;
  const double n = static_cast<double>(data.n());
  for (Index k = 0; k < data.views_count(); ++k) {
    const double d = static_cast<double>(data.width(k));
    const double rbar = static_cast<double>(ranks.total(k));
    if (!(n * d - rbar * (n + d - rbar) > 0.0)) return false;
  }
  return true;
}

PluginDiagnostics estimate_plugin_diagnostics(const MultiViewData& data, const RankSpec& ranks,
                                              const JiveFit& fit) {
  require(noise_estimable(data, ranks),
          "ranks leave no degrees of freedom for noise estimation (n d_k <= r̄_k (n + d_k - r̄_k))");
  const Index K = data.views_count();
  const Index n = data.n();
  PluginDiagnostics out;
  out.sigma_hat.resize(K);
  out.lambda_min_hat.resize(K);
  out.snr_hat.resize(K);
  out.eps_hat.resize(K);
  out.kappa_hat.resize(K);
  for (Index k = 0; k < K; ++k) {
    const Matrix& a = data.views[static_cast<std::size_t>(k)];
    const Index d = a.cols();
    const Index rbar = ranks.total(k);
    const Matrix fitted = fit.low_rank_view(k);
    const double dof = static_cast<double>(n) * static_cast<double>(d) -
                       static_cast<double>(rbar) * static_cast<double>(n + d - rbar);
    const double sigma = (a - fitted).norm() / std::sqrt(dof);
    const Vector sv = singular_values(fitted);
    const double lam = sv(rbar - 1);
    if (!(lam > 0.0))
      raise(ErrorKind::DegenerateInput,
            "view " + std::to_string(k + 1) + " has a rank-deficient low-rank reconstruction");
    const double snr = sigma > 0.0 ? std::min(lam / sigma, kSnrCap) : kSnrCap;
    out.sigma_hat(k) = sigma;
    out.lambda_min_hat(k) = lam;
    out.snr_hat(k) = snr;
    out.eps_hat(k) = epsilon_k(n, d, snr);
    out.kappa_hat(k) = sv(0) / lam;
  }
  return out;
}

PluginFit plugin_fit(const MultiViewData& data, const RankSpec& ranks) {
  data.validate();
  require(noise_estimable(data, ranks),
          "ranks leave no degrees of freedom for noise estimation (n d_k <= r̄_k (n + d_k - r̄_k))");
  JiveFit initial = ajive(data, ranks);
  PluginDiagnostics diagnostics =
      initial.diagnostics ? *initial.diagnostics : estimate_plugin_diagnostics(data, ranks, initial);
  DiagnosticMaps maps = DiagnosticMaps::from_fit(initial);
  return {std::move(diagnostics), std::move(maps), std::move(initial)};
}

namespace {

WeightTrace refreshing_iterate(const MultiViewData& data, const RankSpec& ranks, const Vector& eps,
                               const DiagnosticMaps& initial_maps, const IterationOptions& options) {
  WeightTrace trace;
  trace.iterates.push_back(WeightVector::uniform(data.views_count()));
  DiagnosticMaps maps = initial_maps;
  for (Index t = 0; t < options.t_max; ++t) {
    Vector costs;
    try {
      costs = cost_vector(eps, maps, trace.iterates.back());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ThetaTooSmall || t == 0) throw;
      trace.status = TraceStatus::Aborted;
      trace.abort_reason = e.what();
      return trace;
    }
    WeightVector next = reweight_step(costs);
    const double step = l1_distance(next, trace.iterates.back());
    trace.costs.push_back(std::move(costs));
    trace.steps.push_back(step);
    trace.iterates.push_back(next);
    trace.iterations_used = t + 1;
    if (step < options.tol) {
      trace.converged = true;
      trace.status = TraceStatus::Converged;
      break;
    }
    try {
      maps = DiagnosticMaps::from_fit(heterojive(data, ranks, next));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateAggregation) throw;
      trace.status = TraceStatus::Aborted;
      trace.abort_reason = e.what();
      return trace;
    }
  }
  return trace;
}

}  // namespace

DataDrivenWeights data_driven_weights(const MultiViewData& data, const RankSpec& ranks,
                                      const DataDrivenOptions& options) {
  PluginFit plugin = plugin_fit(data, ranks);
  const Vector& eps = plugin.diagnostics.eps_hat;
  WeightTrace trace =
      options.refresh_each_iter
          ? refreshing_iterate(data, ranks, eps, plugin.maps, options.iteration)
          : oracle_iterate(eps, plugin.maps, WeightVector::uniform(data.views_count()), options.iteration);
  WeightVector weights = trace.final();
  return {std::move(weights), std::move(trace), std::move(plugin)};
}

Vector oracle_epsilon(const JiveGroundTruth& truth) {
  const Index K = truth.views();
  Vector eps(K);
  for (Index k = 0; k < K; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double sigma = truth.sigma_k[i];
    if (sigma == 0.0) {
      eps(k) = 0.0;
      continue;
    }
    eps(k) = epsilon_k(truth.n(), truth.v_k[i].rows(), lambda_min(truth, k) / sigma);
  }
  return eps;
}

WeightTrace oracle_weights(const JiveGroundTruth& truth, const IterationOptions& options) {
  return oracle_iterate(oracle_epsilon(truth), DiagnosticMaps::from_truth(truth),
                        WeightVector::uniform(truth.views()), options);
}

}  // namespace hjive
