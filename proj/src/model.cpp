#include "hjive/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjive/weighting.hpp"

namespace hjive {

void RankSpec::validate() const {
  require(joint >= 1, "joint rank must be at least 1");
  require(!individual.empty(), "rank spec needs at least one view");
  for (Index rk : individual) require(rk >= 0, "individual ranks must be nonnegative");
}

void MultiViewData::validate() const {
  require(!views.empty(), "no views supplied");
  const Index rows = views.front().rows();
  require(rows >= 1, "views must have at least one row");
  for (std::size_t k = 0; k < views.size(); ++k) {
    require(views[k].rows() == rows,
            "view " + std::to_string(k + 1) + " has " + std::to_string(views[k].rows()) +
                " rows, expected " + std::to_string(rows));
    require(views[k].cols() >= 1, "view " + std::to_string(k + 1) + " has no columns");
    require(views[k].allFinite(), "view " + std::to_string(k + 1) + " has non-finite entries");
  }
  require(labels.empty() || static_cast<Index>(labels.size()) == rows,
          "label count does not match the row count");
}

std::string_view to_string(LoadingScheme scheme) noexcept {
  switch (scheme) {
    case LoadingScheme::Random: return "random";
    case LoadingScheme::Shared: return "shared";
    case LoadingScheme::SharedOrthogonal: return "shared_orthogonal";
    case LoadingScheme::RandomOrthogonal: return "random_orthogonal";
  }
  return "random";
}

LoadingScheme parse_loading_scheme(std::string_view name) {
  for (auto s : {LoadingScheme::Random, LoadingScheme::Shared, LoadingScheme::SharedOrthogonal,
                 LoadingScheme::RandomOrthogonal})
    if (to_string(s) == name) return s;
  raise(ErrorKind::InvalidInput, "unknown loading scheme '" + std::string(name) + "'");
}

RankSpec JiveGroundTruth::ranks() const {
  RankSpec out;
  out.joint = u.rank();
  for (const auto& b : u_k) out.individual.push_back(b.rank());
  return out;
}

void JiveGroundTruth::validate() const {
  const auto K = u_k.size();
  require(K >= 1, "ground truth needs at least one view");
  require(v_k.size() == K && w_k.size() == K && sigma_k.size() == K && s_k.size() == K,
          "ground truth per-view lists have inconsistent lengths");
  require(gamma >= 0.0, "gamma must be nonnegative");
  for (std::size_t k = 0; k < K; ++k) {
    require(u_k[k].ambient_dim() == n(), "individual basis has the wrong ambient dimension");
    require(v_k[k].cols() == u.rank(), "joint loading has the wrong rank");
    require(w_k[k].cols() == u_k[k].rank(), "individual loading has the wrong rank");
    require(v_k[k].rows() == w_k[k].rows() && v_k[k].rows() >= 1, "loading widths disagree");
    require(sigma_k[k] >= 0.0 && std::isfinite(sigma_k[k]), "noise levels must be finite and >= 0");
    require(s_k[k] >= 0.0 && std::isfinite(s_k[k]), "signal scales must be finite and >= 0");
    if (u_k[k].rank() > 0) {
      const double cross = (u.matrix().transpose() * u_k[k].matrix()).cwiseAbs().maxCoeff();
      require(cross < orthonormality_tolerance<double>(), "joint and individual subspaces overlap");
    }
  }
}

Matrix JiveGroundTruth::signal(Index k) const {
  const auto i = static_cast<std::size_t>(k);
  Matrix out = u.matrix() * v_k.at(i).transpose();
  if (u_k[i].rank() > 0) out.noalias() += gamma * u_k[i].matrix() * w_k[i].transpose();
  return s_k[i] * out;
}

OrthonormalBasis JiveGroundTruth::ubar(Index k) const {
  return hstack(u, u_k.at(static_cast<std::size_t>(k)));
}

Subspaces generate_subspaces(Rng& rng, Index n, const RankSpec& ranks, double theta) {
  ranks.validate();
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  const Index width = ranks.individual.front();
  for (Index rk : ranks.individual)
    require(rk == width, "the mixed construction needs equal individual ranks");
  require(ranks.joint + 2 * width <= n, "not enough dimensions for U, Z and Z_k");

  Subspaces out;
  out.u = haar_orthonormal(rng, n, ranks.joint);
  const OrthonormalBasis z = sample_in_complement(rng, std::vector{out.u}, width);
  const std::vector<OrthonormalBasis> taken{out.u, z};
  const double a = std::sqrt(1.0 - theta);
  const double b = std::sqrt(theta);
  for (Index k = 0; k < ranks.views(); ++k) {
    const OrthonormalBasis zk = sample_in_complement(rng, taken, width);
    out.u_k.emplace_back(Matrix(a * z.matrix() + b * zk.matrix()));
  }
  return out;
}

Subspaces generate_independent_subspaces(Rng& rng, Index n, const RankSpec& ranks) {
  ranks.validate();
  Subspaces out;
  out.u = haar_orthonormal(rng, n, ranks.joint);
  for (Index k = 0; k < ranks.views(); ++k) {
    require(ranks.total(k) <= n, "individual rank does not fit next to the joint subspace");
    out.u_k.push_back(sample_in_complement(rng, std::vector{out.u}, ranks.individual[k]));
  }
  return out;
}

Loadings generate_loadings(Rng& rng, LoadingScheme scheme, Index d, const RankSpec& ranks) {
  ranks.validate();
  const Index r = ranks.joint;
  const Index K = ranks.views();
  const auto [min_it, max_it] = std::minmax_element(ranks.individual.begin(), ranks.individual.end());
  const bool equal_ranks = *min_it == *max_it;

  Loadings out;
  switch (scheme) {
    case LoadingScheme::Random:
      for (Index k = 0; k < K; ++k) {
        require(d >= std::max(r, ranks.individual[k]), "loading width too small for the ranks");
        out.v_k.push_back(haar_orthonormal(rng, d, r).matrix());
        out.w_k.push_back(haar_orthonormal(rng, d, ranks.individual[k]).matrix());
      }
      break;
    case LoadingScheme::Shared: {
      require(equal_ranks, "shared loadings need equal individual ranks");
      require(d >= std::max(r, *max_it), "loading width too small for the ranks");
      const Matrix v = haar_orthonormal(rng, d, r).matrix();
      const Matrix w = haar_orthonormal(rng, d, *max_it).matrix();
      out.v_k.assign(static_cast<std::size_t>(K), v);
      out.w_k.assign(static_cast<std::size_t>(K), w);
      break;
    }
    case LoadingScheme::SharedOrthogonal: {
      require(equal_ranks, "shared loadings need equal individual ranks");
      require(d >= r + *max_it, "orthogonal loadings need d >= r + r_k");
      const Matrix q = haar_orthonormal(rng, d, d).matrix();
      out.v_k.assign(static_cast<std::size_t>(K), q.leftCols(r));
      out.w_k.assign(static_cast<std::size_t>(K), q.middleCols(r, *max_it));
      break;
    }
    case LoadingScheme::RandomOrthogonal:
      for (Index k = 0; k < K; ++k) {
        require(d >= ranks.total(k), "orthogonal loadings need d >= r + r_k");
        const Matrix q = haar_orthonormal(rng, d, d).matrix();
        out.v_k.push_back(q.leftCols(r));
        out.w_k.push_back(q.middleCols(r, ranks.individual[k]));
      }
      break;
  }
  return out;
}

MultiViewData synthesize_views(Rng& rng, const JiveGroundTruth& truth) {
  truth.validate();
  const std::uint64_t base = rng();
  MultiViewData data;
  data.views.reserve(static_cast<std::size_t>(truth.views()));
  for (Index k = 0; k < truth.views(); ++k) {
    Rng view_rng(derive_seed(base, {static_cast<std::uint64_t>(k)}));
    Matrix view = truth.signal(k);
    const double sigma = truth.sigma_k[static_cast<std::size_t>(k)];
    if (sigma > 0.0) view += sigma * gaussian_matrix(view_rng, view.rows(), view.cols());
    data.views.push_back(std::move(view));
  }
  return data;
}

JiveGroundTruth make_ground_truth(Rng& rng, const SynthesisSpec& spec) {
  spec.ranks.validate();
  const auto K = static_cast<std::size_t>(spec.ranks.views());
  require(spec.s_k.size() == K, "need one signal scale per view");
  require(spec.sigma_k.size() == K, "need one noise level per view");

  Subspaces subspaces = spec.construction == SubspaceConstruction::Mixed
                            ? generate_subspaces(rng, spec.n, spec.ranks, spec.theta)
                            : generate_independent_subspaces(rng, spec.n, spec.ranks);
  Loadings loadings = generate_loadings(rng, spec.scheme, spec.d, spec.ranks);

  JiveGroundTruth truth;
  truth.u = std::move(subspaces.u);
  truth.u_k = std::move(subspaces.u_k);
  truth.v_k = std::move(loadings.v_k);
  truth.w_k = std::move(loadings.w_k);
  truth.sigma_k = spec.sigma_k;
  truth.s_k = spec.s_k;
  truth.gamma = spec.gamma;
  truth.theta_target = spec.theta;
  truth.validate();
  return truth;
}

double realized_theta(const JiveGroundTruth& truth, const WeightVector& weights) {
  return theta_of_w(std::span<const OrthonormalBasis>(truth.u_k), weights);
}

double lambda_min(const JiveGroundTruth& truth, Index k) {
  const Vector sv = singular_values(truth.signal(k));
  const Index rbar = truth.ranks().total(k);
  require(rbar <= sv.size(), "signal rank exceeds the view dimensions");
  return sv(rbar - 1);
}

double loading_delta(const JiveGroundTruth& truth, Index k) {
  const auto i = static_cast<std::size_t>(k);
  return principal_angle_delta(truth.v_k.at(i), truth.w_k.at(i));
}

}  // namespace hjive
