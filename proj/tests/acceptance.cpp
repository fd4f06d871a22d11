// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hjive/config.hpp"
#include "hjive/errors.hpp"
#include "hjive/estimators.hpp"
#include "hjive/metrics.hpp"
#include "hjive/model.hpp"
#include "hjive/random.hpp"
#include "hjive/simulate.hpp"
#include "hjive/weighting.hpp"

using namespace hjive;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.se = std::sqrt(ss / (n - 1.0) / n);
  return m;
}

// mean error per (method, K) from a simulation run
std::map<std::pair<std::string, Index>, double> mean_errors(const ExperimentConfig& config) {
  const auto rows = run_simulation(config, 1);
  std::map<std::pair<std::string, Index>, double> out;
  for (const SummaryRow& s : summarize(config, rows)) out[{s.method, s.K}] = s.mean;
  return out;
}

ExperimentConfig homogeneous_grid(LoadingScheme scheme, double gamma, std::uint64_t seed) {
  ExperimentConfig c;
  c.n = 20;
  c.d = 20;
  c.r = 2;
  c.r_k = 2;
  c.K_grid = {25, 49, 100};
  c.scheme = scheme;
  c.s = 1.0;
  c.gamma = gamma;
  c.theta = 0.5;
  c.noise = {0.1, 0.1};
  c.replicates = 100;
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------

Outcome closed_form_theta() {
  const Index n = 12, K = 10;
  std::vector<OrthonormalBasis> ind;
  for (Index k = 0; k < K; ++k) {
    Matrix e = Matrix::Zero(n, 1);
    e(k + 1 == K ? 2 : 1, 0) = 1.0;
    ind.emplace_back(e);
  }
  const double uni = theta_of_w(std::span<const OrthonormalBasis>(ind), WeightVector::uniform(K));
  Vector half = Vector::Zero(K);
  half(0) = 0.5;
  half(K - 1) = 0.5;
  const double two = theta_of_w(std::span<const OrthonormalBasis>(ind), WeightVector(half));
  const bool ok = std::abs(uni - 0.1) <= 1e-10 && std::abs(two - 0.5) <= 1e-10;
  return {ok, "theta(uniform)=" + fmt("%.15g", uni) + " theta(half,0..,half)=" + fmt("%.15g", two)};
}

Outcome noiseless_recovery() {
  Rng rng(derive_seed(stable_hash("noiseless_recovery"), {}));
  int done = 0, attempts = 0;
  double worst = 0.0;
  while (done < 50 && attempts < 500) {
    ++attempts;
    SynthesisSpec spec;
    spec.n = 20;
    spec.d = 30;
    spec.ranks = RankSpec{2, {2, 2, 2}};
    spec.theta = uniform(rng, 0.05, 1.0);
    spec.s_k.assign(3, 1.0);
    spec.sigma_k.assign(3, 0.0);
    const JiveGroundTruth t = make_ground_truth(rng, spec);
    if (!(realized_theta(t, WeightVector::uniform(3)) > 0.05)) continue;
    const MultiViewData data = synthesize_views(rng, t);
    const JiveFit fit = heterojive(data, t.ranks(), WeightVector::uniform(3));
    worst = std::max(worst, subspace_error(fit.u_hat, t.u));
    ++done;
  }
  return {done == 50 && worst < 1e-8,
          std::to_string(done) + " instances, max error " + fmt("%.3g", worst)};
}

Outcome scale_heterogeneity() {
  SynthesisSpec spec;
  spec.n = 100;
  spec.d = 100;
  spec.ranks = RankSpec{1, {1, 1}};
  spec.construction = SubspaceConstruction::IndependentComplement;
  spec.scheme = LoadingScheme::Shared;
  spec.gamma = 2.0;
  spec.s_k = {1.0, 100.0};
  spec.sigma_k = {0.1, 0.1};

  const std::uint64_t master = stable_hash("scale_heterogeneity");
  std::vector<double> w1, e_hetero, e_single, e_ajive;
  for (Index rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(master, {static_cast<std::uint64_t>(rep)}));
    const JiveGroundTruth t = make_ground_truth(rng, spec);
    const MultiViewData data = synthesize_views(rng, t);
    const DataDrivenWeights dd = data_driven_weights(data, t.ranks());
    w1.push_back(dd.weights[0]);
    e_hetero.push_back(subspace_error(heterojive(data, t.ranks(), dd.weights).u_hat, t.u));
    e_ajive.push_back(subspace_error(ajive(data, t.ranks()).u_hat, t.u));
    e_single.push_back(subspace_error(single_view_svd(data, 1, 1), t.u));
  }
  const Moments w = moments(w1), h = moments(e_hetero), s = moments(e_single), a = moments(e_ajive);
  const bool weight_ok = w.mean < 0.1;
  const bool gap1 = s.mean - h.mean > 2.0 * std::hypot(s.se, h.se);
  const bool gap2 = a.mean - s.mean > 2.0 * std::hypot(a.se, s.se);
  return {weight_ok && gap1 && gap2,
          "(a) mean w_1=" + fmt("%.4g", w.mean) + (weight_ok ? " ok" : " FAIL") +
              "; (b) heterojive=" + fmt("%.4g", h.mean) + "±" + fmt("%.2g", h.se) +
              " single-view=" + fmt("%.4g", s.mean) + "±" + fmt("%.2g", s.se) + " ajive=" +
              fmt("%.4g", a.mean) + "±" + fmt("%.2g", a.se) +
              (gap1 && gap2 ? " ok" : " ordering FAIL")};
}

Outcome bias_trend() {
  ExperimentConfig shared = homogeneous_grid(LoadingScheme::Shared, 0.5, stable_hash("bias_shared"));
  shared.methods = {Method::Ajive};
  ExperimentConfig ortho =
      homogeneous_grid(LoadingScheme::RandomOrthogonal, 0.5, stable_hash("bias_random_orthogonal"));
  ortho.methods = {Method::Ajive};

  const auto ms = mean_errors(shared);
  const double ratio = ms.at({"ajive", 100}) / ms.at({"ajive", 25});

  const auto mo = mean_errors(ortho);
  // least squares slope of log error on log K
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index K : ortho.K_grid) {
    const double x = std::log(static_cast<double>(K)), y = std::log(mo.at({"ajive", K}));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double m = static_cast<double>(ortho.K_grid.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

  const bool a = ratio >= 0.7, b = slope >= -0.7 && slope <= -0.3;
  return {a && b, "(a) shared err(100)/err(25)=" + fmt("%.4g", ratio) + (a ? " ok" : " FAIL") +
                      "; (b) random_orthogonal slope=" + fmt("%.4g", slope) + (b ? " ok" : " FAIL")};
}

Outcome stack_inferiority() {
  ExperimentConfig c = homogeneous_grid(LoadingScheme::Random, 1.5, stable_hash("stack_inferiority"));
  c.methods = {Method::Ajive, Method::StackSvd};
  const auto m = mean_errors(c);
  bool ok = true;
  std::string detail;
  for (Index K : c.K_grid) {
    const double a = m.at({"ajive", K}), s = m.at({"stacksvd", K});
    ok = ok && a < s;
    detail += "K=" + std::to_string(K) + " ajive=" + fmt("%.4g", a) + " stacksvd=" + fmt("%.4g", s) + "; ";
  }
  return {ok, detail};
}

Outcome heterogeneous_superiority() {
  bool ok = true;
  std::string detail;
  for (LoadingScheme scheme : {LoadingScheme::Random, LoadingScheme::SharedOrthogonal}) {
    ExperimentConfig c;
    c.n = 40;
    c.d = 50;
    c.r = 3;
    c.r_k = 3;
    c.K_grid = {25, 49, 100};
    c.scheme = scheme;
    c.s = 10.0;
    c.gamma = 2.0;
    c.theta = 0.6;
    c.noise = {0.1, 2.0};
    c.replicates = 100;
    c.seed = stable_hash(std::string("heterogeneous_") + std::string(to_string(scheme)));
    const auto m = mean_errors(c);
    detail += std::string(to_string(scheme)) + ":";
    for (Index K : c.K_grid) {
      const double h = m.at({"heterojive", K}), a = m.at({"ajive", K}), s = m.at({"stacksvd", K});
      ok = ok && h < a && a < s;
      detail += " K=" + std::to_string(K) + " (" + fmt("%.4g", h) + " < " + fmt("%.4g", a) + " < " +
                fmt("%.4g", s) + ")";
    }
    detail += "; ";
  }
  return {ok, detail};
}

// Oracle geometry from the mixed construction with random ε.
struct OracleInstance {
  DiagnosticMaps maps;
  Vector eps;
};

OracleInstance oracle_instance(Rng& rng, Index K) {
  SynthesisSpec spec;
  spec.n = 20;
  spec.d = 20;
  spec.ranks.joint = 2;
  spec.ranks.individual.assign(static_cast<std::size_t>(K), 2);
  spec.theta = uniform(rng, 0.3, 0.9);
  spec.s_k.assign(static_cast<std::size_t>(K), 1.0);
  spec.sigma_k.assign(static_cast<std::size_t>(K), 0.0);
  const JiveGroundTruth t = make_ground_truth(rng, spec);
  Vector eps(K);
  for (Index k = 0; k < K; ++k) eps(k) = uniform(rng, 0.05, 0.5);
  return {DiagnosticMaps::from_truth(t), eps};
}

const IterationOptions kOracleIteration{500, 1e-10};

Outcome fixed_point_stationarity() {
  Rng rng(stable_hash("stationarity"));
  int found = 0, attempts = 0;
  double worst_ratio = 0.0;
  while (found < 20 && attempts < 400) {
    ++attempts;
    const OracleInstance inst = oracle_instance(rng, 3);
    const WeightTrace t = oracle_iterate(inst.eps, inst.maps, WeightVector::uniform(3), kOracleIteration);
    if (!t.converged) continue;
    const WeightVector& w = t.final();
    if (!(w.values().minCoeff() > 1e-3) || !(theta_of_w(inst.maps, w) > 0.1)) continue;
    const Stationarity s = stationarity_check(inst.eps, inst.maps, w);
    worst_ratio = std::max(worst_ratio, s.proj_grad_inf / (2.0 * s.bound));
    ++found;
  }
  return {found == 20 && worst_ratio <= 1.0,
          std::to_string(found) + " interior fixed points, max |grad|/(2L)=" + fmt("%.3g", worst_ratio)};
}

Outcome fixed_point_identity() {
  Rng rng(stable_hash("identity"));
  int converged = 0;
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const Index K = 2 + i % 4;
    const OracleInstance inst = oracle_instance(rng, K);
    const WeightTrace t = oracle_iterate(inst.eps, inst.maps, WeightVector::uniform(K), kOracleIteration);
    if (!t.converged) continue;
    ++converged;
    const Vector c = cost_vector(inst.eps, inst.maps, t.final());
    const Vector wc = t.final().values().cwiseProduct(c);
    worst = std::max(worst, (wc.array() - wc.mean()).abs().maxCoeff() / c.maxCoeff());
  }
  return {converged > 0 && worst < 10.0 * kOracleIteration.tol,
          std::to_string(converged) + "/40 converged, max deviation " + fmt("%.3g", worst)};
}

Outcome oracle_equivalence() {
  Rng rng(stable_hash("oracle_equivalence"));
  double worst_l1 = 0.0;
  std::string pairs;
  for (int i = 0; i < 10; ++i) {
    const OracleInstance inst = oracle_instance(rng, 2);
    const WeightTrace t = oracle_iterate(inst.eps, inst.maps, WeightVector::uniform(2), kOracleIteration);
    double best = std::numeric_limits<double>::infinity(), best_a = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double a = j * 1e-3;
      Vector w(2);
      w << a, 1.0 - a;
      try {
        const double J = objective_J(inst.eps, inst.maps, WeightVector(w));
        if (J < best) best = J, best_a = a;
      } catch (const Error&) {
      }
    }
    const double l1 = 2.0 * std::abs(t.final()[0] - best_a);
    worst_l1 = std::max(worst_l1, l1);
    pairs += " " + fmt("%.3f", t.final()[0]) + "/" + fmt("%.3f", best_a);
  }

  // aggregation against a dense eigendecomposition of the pooled projector
  double worst_dist = 0.0;
  for (int i = 0; i < 10; ++i) {
    SynthesisSpec spec;
    spec.n = 20;
    spec.d = 25;
    spec.ranks = RankSpec{2, {2, 2, 2}};
    spec.theta = 0.5;
    spec.s_k.assign(3, 1.0);
    spec.sigma_k.assign(3, 0.2);
    const JiveGroundTruth truth = make_ground_truth(rng, spec);
    const MultiViewData data = synthesize_views(rng, truth);
    const StageOneResult s1 = stage1_extract(data, truth.ranks());
    Vector wv(3);
    wv << uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0);
    const WeightVector w = WeightVector::normalized(wv);
    const Aggregation agg = aggregate_weighted(s1, w, 2);
    Matrix pooled = Matrix::Zero(20, 20);
    for (Index k = 0; k < 3; ++k) pooled += w[k] * s1.bases[k].matrix() * s1.bases[k].matrix().transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(pooled);
    const Matrix top = eig.eigenvectors().rightCols(2);
    const Matrix diff = agg.basis.matrix() * agg.basis.matrix().transpose() - top * top.transpose();
    worst_dist = std::max(worst_dist, Eigen::SelfAdjointEigenSolver<Matrix>(diff).eigenvalues().cwiseAbs().maxCoeff());
  }
  const bool a = worst_l1 <= 5e-3, b = worst_dist <= 1e-10;
  return {a && b, "iterate/grid w_1:" + pairs + "; max l1=" + fmt("%.4g", worst_l1) + (a ? " ok" : " FAIL") +
                      "; aggregation projector distance " + fmt("%.3g", worst_dist) + (b ? " ok" : " FAIL")};
}

Outcome plugin_consistency() {
  SynthesisSpec spec;
  spec.n = 100;
  spec.d = 100;
  spec.ranks = RankSpec{1, {2, 2, 2}};
  spec.construction = SubspaceConstruction::IndependentComplement;
  spec.scheme = LoadingScheme::RandomOrthogonal;
  spec.gamma = 1.0;
  // orthonormal loadings with γ = 1 make every signal singular value s = 10,
  // so SNR = 10 / 0.5 = 20
  spec.s_k.assign(3, 10.0);
  spec.sigma_k.assign(3, 0.5);
  const std::uint64_t master = stable_hash("plugin_consistency");
  double sigma_sum = 0.0, lambda_sum = 0.0, truth_sum = 0.0;
  int count = 0;
  for (Index rep = 0; rep < 50; ++rep) {
    Rng rng(derive_seed(master, {static_cast<std::uint64_t>(rep)}));
    const JiveGroundTruth t = make_ground_truth(rng, spec);
    const MultiViewData data = synthesize_views(rng, t);
    const PluginDiagnostics d = plugin_fit(data, t.ranks()).diagnostics;
    for (Index k = 0; k < 3; ++k) {
      sigma_sum += d.sigma_hat(k);
      lambda_sum += d.lambda_min_hat(k);
      truth_sum += lambda_min(t, k);
      ++count;
    }
  }
  const double sigma = sigma_sum / count, lam = lambda_sum / count, lam_true = truth_sum / count;
  const bool a = sigma >= 0.45 && sigma <= 0.55;
  const bool b = std::abs(lam - lam_true) <= 0.2 * lam_true;
  return {a && b, "mean sigma_hat=" + fmt("%.4g", sigma) + (a ? " ok" : " FAIL") + "; mean lambda_min_hat=" +
                      fmt("%.4g", lam) + " vs true " + fmt("%.4g", lam_true) + (b ? " ok" : " FAIL")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form theta", 1, closed_form_theta},
      {2, "noiseless exact recovery", 10, noiseless_recovery},
      {3, "two-view scale heterogeneity", 120, scale_heterogeneity},
      {4, "non-diminishing vs vanishing bias", 300, bias_trend},
      {5, "stack-svd inferiority", 300, stack_inferiority},
      {6, "heterogeneous superiority", 600, heterogeneous_superiority},
      {7, "fixed-point stationarity", 60, fixed_point_stationarity},
      {8, "fixed-point identity", 1, fixed_point_identity},
      {9, "oracle equivalence", 60, oracle_equivalence},
      {10, "plug-in consistency", 60, plugin_consistency},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
