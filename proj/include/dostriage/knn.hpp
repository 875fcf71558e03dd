// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dostriage/types.hpp"

namespace dostriage::knn {

/// Memory-store K-NN with exact brute-force search (squared Euclidean).
struct KnnModel {
  Matrix store;
  std::vector<Label> labels;
  std::size_t k = 1;
};

KnnModel knn_fit(const Matrix& x, const std::vector<Label>& y,
                 std::size_t k = 1);

/// Majority label among the k nearest stored rows. Distance ties break toward
/// the lower store index; vote ties break toward DoS.
std::vector<Label> knn_predict(const KnnModel& m, const Matrix& x);

/// F1 score for the positive class; 0 when precision+recall is 0.
double f_measure(const std::vector<Label>& pred,
                 const std::vector<Label>& truth,
                 Label positive = Label::Dos);

}  // namespace dostriage::knn
