#pragma once

#include <vector>

#include "hjive/linalg.hpp"

namespace hjive {

/// Row-wise scores (one unit per row) with a class label per unit.
struct LabeledEmbedding {
  Matrix scores;
  std::vector<int> labels;
};

/// ‖Û Ûᵀ − U Uᵀ‖ for equal-rank bases; in [0, 1].
double subspace_error(const OrthonormalBasis& estimate, const OrthonormalBasis& truth);

/// Within-class over total sum of squares of the score rows, pooled over
/// coordinates. Lower means tighter, better separated classes.
double swiss_score(const LabeledEmbedding& embedding);

}  // namespace hjive
