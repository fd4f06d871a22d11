#include "hjive/estimators.hpp"

#include <string>

#include "hjive/io.hpp"
#include "hjive/weighting.hpp"

namespace hjive {

namespace {

void check_ranks(const MultiViewData& data, const RankSpec& ranks) {
  data.validate();
  ranks.validate();
  require(ranks.views() == data.views_count(),
          "rank spec lists " + std::to_string(ranks.views()) + " views but data has " +
              std::to_string(data.views_count()));
  for (Index k = 0; k < data.views_count(); ++k)
    require(ranks.total(k) <= std::min(data.n(), data.width(k)),
            "r + r_k exceeds min(n, d_k) for view " + std::to_string(k + 1));
}

}  // namespace

StageOneResult stage1_extract(const MultiViewData& data, const RankSpec& ranks) {
  check_ranks(data, ranks);
  StageOneResult out;
  for (Index k = 0; k < data.views_count(); ++k) {
    const ThinSvd svd = thin_svd(data.views[static_cast<std::size_t>(k)]);
    const Index rbar = ranks.total(k);
    out.bases.push_back(svd.left.leading(rbar));
    const bool tie = rbar < svd.singvals.size() &&
                     svd.singvals(rbar - 1) - svd.singvals(rbar) < kDegenerateGap;
    out.degenerate_gap.push_back(tie);
    out.singvals.push_back(svd.singvals);
  }
  return out;
}

Aggregation aggregate_weighted(const StageOneResult& stage1, const WeightVector& weights, Index r) {
  require(stage1.views() >= 1, "aggregation needs at least one view");
  require(weights.size() == stage1.views(), "weight vector length does not match the view count");
  const Index n = stage1.bases.front().ambient_dim();
  require(r >= 1 && r <= n, "joint rank must lie in [1, n]");

  Matrix pooled = Matrix::Zero(n, n);
  for (Index k = 0; k < stage1.views(); ++k) {
    const Matrix& b = stage1.bases[static_cast<std::size_t>(k)].matrix();
    require(b.rows() == n, "stage-one bases disagree on the ambient dimension");
    if (weights[k] > 0.0) pooled.noalias() += weights[k] * b * b.transpose();
  }

  const Index keep = std::min(n, r + 1);
  SpectrumSlice top = top_r_eigvecs_sym(pooled, keep);
  Aggregation out;
  out.top_eigenvalues = top.values;
  out.gap = r < n ? top.values(r - 1) - top.values(r) : top.values(r - 1);
  if (r < n && out.gap < kDegenerateGap)
    raise(ErrorKind::DegenerateAggregation,
          "aggregated projector has a tie at the joint rank (gap " + io::format_double(out.gap) + ")");
  out.basis = top.vectors.leading(r);
  return out;
}

Components extract_components(const MultiViewData& data, const OrthonormalBasis& u_hat,
                              const RankSpec& ranks) {
  check_ranks(data, ranks);
  require(u_hat.ambient_dim() == data.n(), "joint basis has the wrong ambient dimension");
  require(u_hat.rank() == ranks.joint, "joint basis rank does not match the rank spec");

  const Matrix& u = u_hat.matrix();
  Components out;
  for (Index k = 0; k < data.views_count(); ++k) {
    const Matrix& a = data.views[static_cast<std::size_t>(k)];
    const Index rk = ranks.individual[static_cast<std::size_t>(k)];
    OrthonormalBasis uk(Matrix(data.n(), 0));
    if (rk > 0) {
      Matrix residual = a - u * (u.transpose() * a);
      Matrix left = thin_svd(residual).left.matrix().leftCols(rk);
      // Re-project to remove round-off leakage into span(Û).
      left -= u * (u.transpose() * left);
      Eigen::HouseholderQR<Matrix> qr(left);
      Matrix q = qr.householderQ() * Matrix::Identity(data.n(), rk);
      uk = OrthonormalBasis(std::move(q));
    }
    out.v_k_hat.push_back(a.transpose() * u);
    out.w_k_hat.push_back(a.transpose() * uk.matrix());
    out.u_k_hat.push_back(std::move(uk));
  }
  return out;
}

Matrix JiveFit::low_rank_view(Index k) const {
  const auto i = static_cast<std::size_t>(k);
  Matrix out = u_hat.matrix() * v_k_hat.at(i).transpose();
  if (u_k_hat[i].rank() > 0) out.noalias() += u_k_hat[i].matrix() * w_k_hat[i].transpose();
  return out;
}

JiveFit heterojive(const MultiViewData& data, const RankSpec& ranks, const WeightVector& weights) {
  const StageOneResult stage1 = stage1_extract(data, ranks);
  Aggregation agg = aggregate_weighted(stage1, weights, ranks.joint);
  Components comps = extract_components(data, agg.basis, ranks);

  JiveFit fit;
  fit.u_hat = std::move(agg.basis);
  fit.u_k_hat = std::move(comps.u_k_hat);
  fit.v_k_hat = std::move(comps.v_k_hat);
  fit.w_k_hat = std::move(comps.w_k_hat);
  fit.weights = weights;
  fit.spectral_gap = agg.gap;
  fit.stage1_degenerate = stage1.degenerate_gap;
  if (noise_estimable(data, ranks)) fit.diagnostics = estimate_plugin_diagnostics(data, ranks, fit);
  return fit;
}

JiveFit ajive(const MultiViewData& data, const RankSpec& ranks) {
  return heterojive(data, ranks, WeightVector::uniform(data.views_count()));
}

StackResult stack_svd(const MultiViewData& data, Index r, const std::optional<WeightVector>& weights) {
  data.validate();
  const Index n = data.n();
  require(r >= 1 && r <= n, "joint rank must lie in [1, n]");
  const WeightVector w = weights.value_or(WeightVector::uniform(data.views_count()));
  require(w.size() == data.views_count(), "weight vector length does not match the view count");

  Matrix pooled = Matrix::Zero(n, n);
  for (Index k = 0; k < data.views_count(); ++k) {
    const Matrix& a = data.views[static_cast<std::size_t>(k)];
    if (w[k] > 0.0) pooled.selfadjointView<Eigen::Lower>().rankUpdate(a, w[k]);
  }
  pooled.triangularView<Eigen::StrictlyUpper>() = pooled.transpose();

  SpectrumSlice top = top_r_eigvecs_sym(pooled, r);
  return {std::move(top.vectors), top.gap, top.degenerate_gap};
}

OrthonormalBasis single_view_svd(const MultiViewData& data, Index k, Index r) {
  data.validate();
  const Matrix& a = data.views.at(static_cast<std::size_t>(k));
  require(r >= 1 && r <= std::min(a.rows(), a.cols()), "rank exceeds the view dimensions");
  return thin_svd(a).left.leading(r);
}

}  // namespace hjive
