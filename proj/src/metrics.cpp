#include "hjive/metrics.hpp"

#include <map>

namespace hjive {

double subspace_error(const OrthonormalBasis& estimate, const OrthonormalBasis& truth) {
  require(estimate.ambient_dim() == truth.ambient_dim(), "subspace_error: ambient dimension mismatch");
  require(estimate.rank() == truth.rank(), "subspace_error: ranks differ");
  return std::min(1.0, projector_distance(estimate, truth));
}

double swiss_score(const LabeledEmbedding& embedding) {
  const Matrix& x = embedding.scores;
  require(x.rows() >= 2 && x.cols() >= 1, "swiss_score: need at least two scored rows");
  require(x.allFinite(), "swiss_score: non-finite scores");
  require(static_cast<Index>(embedding.labels.size()) == x.rows(), "swiss_score: one label per row");

  std::map<int, std::vector<Index>> classes;
  for (Index i = 0; i < x.rows(); ++i) classes[embedding.labels[static_cast<std::size_t>(i)]].push_back(i);
  require(classes.size() >= 2, "swiss_score: need at least two classes");

  const Eigen::RowVectorXd grand = x.colwise().mean();
  const double total = (x.rowwise() - grand).squaredNorm();
  if (!(total > 0.0)) raise(ErrorKind::DegenerateInput, "swiss_score: scores have zero total variance");

  double within = 0.0;
  for (const auto& [label, rows] : classes) {
    Matrix members(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) members.row(static_cast<Index>(i)) = x.row(rows[i]);
    const Eigen::RowVectorXd centre = members.colwise().mean();
    within += (members.rowwise() - centre).squaredNorm();
  }
  return within / total;
}

}  // namespace hjive
