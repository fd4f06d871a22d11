#include <doctest.h>

#include <cmath>

#include "hjive/errors.hpp"
#include "hjive/estimators.hpp"
#include "hjive/model.hpp"
#include "hjive/weighting.hpp"
#include "support.hpp"

using namespace hjive;
using hjive::testing::homogeneous_spec;
using hjive::testing::make_truth;

namespace {

void check_truth_invariants(const JiveGroundTruth& t) {
  CHECK(orthonormality_defect(t.u.matrix()) < 1e-10);
  for (const auto& uk : t.u_k) {
    CHECK(orthonormality_defect(uk.matrix()) < 1e-10);
    if (uk.rank() > 0) CHECK((t.u.matrix().transpose() * uk.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

}  // namespace

TEST_CASE("generate_subspaces at the theta endpoints") {
  RankSpec ranks{2, {3, 3, 3}};
  SUBCASE("theta = 0 makes every individual subspace equal") {
    Rng rng(1);
    const Subspaces s = generate_subspaces(rng, 20, ranks, 0.0);
    for (const auto& uk : s.u_k) CHECK(projector_distance(uk, s.u_k.front()) < 1e-12);
  }
  SUBCASE("theta = 1 draws the frames independently") {
    Rng rng(2);
    const Subspaces s = generate_subspaces(rng, 20, ranks, 1.0);
    // no shared component: pairwise overlaps look like independent draws, not copies
    for (std::size_t i = 0; i < s.u_k.size(); ++i)
      for (std::size_t j = i + 1; j < s.u_k.size(); ++j)
        CHECK(projector_distance(s.u_k[i], s.u_k[j]) > 0.5);
  }
}

TEST_CASE("generate_subspaces keeps the orthogonality invariants") {
  Rng rng(3);
  for (double theta : {0.1, 0.5, 0.9}) {
    const Subspaces s = generate_subspaces(rng, 20, RankSpec{2, {2, 2, 2, 2}}, theta);
    CHECK(orthonormality_defect(s.u.matrix()) < 1e-10);
    for (const auto& uk : s.u_k) {
      CHECK(orthonormality_defect(uk.matrix()) < 1e-10);
      CHECK((s.u.matrix().transpose() * uk.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
    // U_iᵀU_j = (1−θ) I + θ Z_iᵀZ_j, and ‖Z_iᵀZ_j‖ ≤ 1
    const Matrix cross = s.u_k[0].matrix().transpose() * s.u_k[1].matrix();
    CHECK(operator_norm(Matrix(cross - (1 - theta) * Matrix::Identity(2, 2))) <= theta + 1e-12);
  }
}

TEST_CASE("generate_subspaces rejects bad budgets") {
  Rng rng(4);
  CHECK_THROWS_AS(generate_subspaces(rng, 6, RankSpec{2, {3, 3}}, 0.5), Error);
  CHECK_THROWS_AS(generate_subspaces(rng, 20, RankSpec{2, {2, 3}}, 0.5), Error);
  CHECK_THROWS_AS(generate_subspaces(rng, 20, RankSpec{2, {2, 2}}, 1.5), Error);
}

TEST_CASE("independent subspaces live in the complement of U") {
  Rng rng(5);
  const Subspaces s = generate_independent_subspaces(rng, 12, RankSpec{2, {1, 4, 0}});
  CHECK(s.u_k[1].rank() == 4);
  CHECK(s.u_k[2].rank() == 0);
  for (const auto& uk : s.u_k)
    if (uk.rank() > 0) CHECK((s.u.matrix().transpose() * uk.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("loading schemes") {
  const RankSpec ranks{3, {3, 3, 3, 3, 3, 3, 3, 3, 3, 3}};
  SUBCASE("shared orthogonal") {
    Rng rng(6);
    const Loadings l = generate_loadings(rng, LoadingScheme::SharedOrthogonal, 50, ranks);
    for (std::size_t k = 0; k < l.v_k.size(); ++k) {
      CHECK(principal_angle_delta(l.v_k[k], l.w_k[k]) < 1e-12);
      CHECK(l.v_k[k] == l.v_k[0]);
    }
  }
  SUBCASE("shared") {
    Rng rng(7);
    const Loadings l = generate_loadings(rng, LoadingScheme::Shared, 50, ranks);
    for (std::size_t k = 0; k < l.v_k.size(); ++k) {
      CHECK(l.v_k[k] == l.v_k[0]);
      CHECK(l.w_k[k] == l.w_k[0]);
    }
    CHECK(principal_angle_delta(l.v_k[0], l.w_k[0]) > 0.0);
  }
  SUBCASE("random") {
    Rng rng(8);
    const Loadings l = generate_loadings(rng, LoadingScheme::Random, 50, ranks);
    for (std::size_t k = 0; k < l.v_k.size(); ++k) {
      CHECK(orthonormality_defect(l.v_k[k]) < 1e-10);
      CHECK(orthonormality_defect(l.w_k[k]) < 1e-10);
      if (k > 0) CHECK((l.v_k[k] - l.v_k[0]).norm() > 1e-3);
    }
  }
  SUBCASE("random orthogonal") {
    Rng rng(9);
    const Loadings l = generate_loadings(rng, LoadingScheme::RandomOrthogonal, 50, ranks);
    for (std::size_t k = 0; k < l.v_k.size(); ++k) {
      CHECK(principal_angle_delta(l.v_k[k], l.w_k[k]) < 1e-12);
      if (k > 0) CHECK((l.v_k[k] - l.v_k[0]).norm() > 1e-3);
    }
  }
  SUBCASE("width too small") {
    Rng rng(10);
    CHECK_THROWS_AS(generate_loadings(rng, LoadingScheme::SharedOrthogonal, 5, ranks), Error);
    CHECK_THROWS_AS(generate_loadings(rng, LoadingScheme::Random, 2, ranks), Error);
  }
}

TEST_CASE("loading scheme names round-trip") {
  for (auto s : {LoadingScheme::Random, LoadingScheme::Shared, LoadingScheme::SharedOrthogonal,
                 LoadingScheme::RandomOrthogonal})
    CHECK(parse_loading_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_loading_scheme("orthogonal"), Error);
}

TEST_CASE("noiseless views have rank r + r_k") {
  const JiveGroundTruth t = make_truth(11, homogeneous_spec(20, 30, 2, 3, 3, 0.5, 0.0));
  check_truth_invariants(t);
  Rng rng(12);
  const MultiViewData data = synthesize_views(rng, t);
  for (const auto& v : data.views) {
    const Vector sv = singular_values(v);
    CHECK(sv(4) > 1e-6);
    CHECK(sv(5) < 1e-10 * sv(0));
  }
}

TEST_CASE("gamma = 0 keeps every view inside span(U)") {
  const JiveGroundTruth t = make_truth(13, homogeneous_spec(15, 12, 2, 2, 2, 0.5, 0.0,
                                                            LoadingScheme::Random, 0.0));
  Rng rng(14);
  const MultiViewData data = synthesize_views(rng, t);
  for (const auto& v : data.views) {
    const Matrix outside = v - t.u.projector() * v;
    CHECK(outside.norm() < 1e-12);
  }
}

TEST_CASE("synthesize_views follows the signal scales") {
  SynthesisSpec spec = homogeneous_spec(100, 100, 1, 1, 2, 0.5, 0.1, LoadingScheme::Shared, 2.0);
  spec.construction = SubspaceConstruction::IndependentComplement;
  spec.s_k = {1.0, 100.0};
  const JiveGroundTruth t = make_truth(15, spec);
  Rng rng(16);
  const MultiViewData data = synthesize_views(rng, t);
  // ‖UVᵀ + γU_kWᵀ‖_F is the same for both views since U ⟂ U_k
  CHECK(t.signal(1).norm() / t.signal(0).norm() == doctest::Approx(100.0).epsilon(1e-10));
  const double noise_2 = (data.views[1] - t.signal(1)).norm() / std::sqrt(100.0 * 100.0);
  CHECK(noise_2 == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("noise level matches sigma") {
  const JiveGroundTruth t = make_truth(17, homogeneous_spec(60, 80, 1, 1, 1, 0.5, 0.7));
  Rng rng(18);
  const MultiViewData data = synthesize_views(rng, t);
  const Matrix noise = data.views[0] - t.signal(0);
  CHECK(noise.norm() / std::sqrt(60.0 * 80.0) == doctest::Approx(0.7).epsilon(0.03));
}

TEST_CASE("same seed gives bit-identical data") {
  const SynthesisSpec spec = homogeneous_spec(20, 20, 2, 2, 4, 0.5, 0.3);
  Rng a(21), b(21);
  const JiveGroundTruth ta = make_ground_truth(a, spec);
  const JiveGroundTruth tb = make_ground_truth(b, spec);
  const MultiViewData da = synthesize_views(a, ta);
  const MultiViewData db = synthesize_views(b, tb);
  for (std::size_t k = 0; k < da.views.size(); ++k) CHECK(da.views[k] == db.views[k]);
}

TEST_CASE("realized theta under equal weights lies in [0, 1 - 1/K]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index K = 2 + static_cast<Index>(seed % 5);
    const JiveGroundTruth t = make_truth(100 + seed, homogeneous_spec(20, 20, 2, 2, K, 0.05 * seed, 0.0));
    const double theta = realized_theta(t, WeightVector::uniform(K));
    CHECK(theta >= -1e-12);
    CHECK(theta <= 1.0 - 1.0 / K + 1e-12);
  }
}

TEST_CASE("noiseless stage-1 recovers [U U_k]") {
  const JiveGroundTruth t = make_truth(31, homogeneous_spec(20, 30, 2, 2, 3, 0.5, 0.0));
  Rng rng(32);
  const MultiViewData data = synthesize_views(rng, t);
  const StageOneResult s1 = stage1_extract(data, t.ranks());
  for (Index k = 0; k < 3; ++k) CHECK(projector_distance(s1.bases[static_cast<std::size_t>(k)], t.ubar(k)) < 1e-8);
}

TEST_CASE("lambda_min and loading_delta") {
  SynthesisSpec spec = homogeneous_spec(20, 20, 2, 2, 1, 0.5, 0.0, LoadingScheme::SharedOrthogonal, 1.0, 3.0);
  const JiveGroundTruth t = make_truth(41, spec);
  // orthonormal U, U_k and orthogonal loadings: all singular values equal s
  CHECK(lambda_min(t, 0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(loading_delta(t, 0) < 1e-12);
}

TEST_CASE("ground truth validation") {
  JiveGroundTruth t = make_truth(51, homogeneous_spec(10, 10, 1, 1, 2, 0.5, 0.1));
  t.sigma_k.pop_back();
  CHECK_THROWS_AS(t.validate(), Error);

  JiveGroundTruth overlap = make_truth(52, homogeneous_spec(10, 10, 1, 1, 2, 0.5, 0.1));
  overlap.u_k[0] = overlap.u;
  CHECK_THROWS_AS(overlap.validate(), Error);
}

TEST_CASE("MultiViewData validation") {
  MultiViewData d;
  CHECK_THROWS_AS(d.validate(), Error);
  d.views = {Matrix::Ones(3, 2), Matrix::Ones(4, 2)};
  CHECK_THROWS_AS(d.validate(), Error);
}
