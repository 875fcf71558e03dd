// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/knn.hpp"

#include <algorithm>
#include <utility>

#include "dostriage/errors.hpp"

namespace dostriage::knn {

KnnModel knn_fit(const Matrix& x, const std::vector<Label>& y, std::size_t k) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw SizeMismatch("knn_fit: row/label count mismatch");
  }
  if (k < 1 || k > y.size()) {
    throw KTooLarge("knn_fit: k must satisfy 1 <= k <= rows");
  }
  return KnnModel{x, y, k};
}

std::vector<Label> knn_predict(const KnnModel& m, const Matrix& x) {
  if (x.cols() != m.store.cols()) {
    throw DimensionMismatch("knn_predict: column count mismatch");
  }
  const auto n_store = static_cast<std::size_t>(m.store.rows());
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  std::vector<std::pair<double, std::size_t>> dists(n_store);
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    for (std::size_t s = 0; s < n_store; ++s) {
      dists[s] = {(m.store.row(static_cast<Eigen::Index>(s)) - x.row(q))
                      .squaredNorm(),
                  s};
    }
    std::partial_sort(dists.begin(),
                      dists.begin() + static_cast<std::ptrdiff_t>(m.k),
                      dists.end());
    std::size_t dos_votes = 0;
    for (std::size_t i = 0; i < m.k; ++i) {
      if (m.labels[dists[i].second] == Label::Dos) ++dos_votes;
    }
    // Vote ties go to DoS: a triage miss costs more than a false alarm.
    out.push_back(2 * dos_votes >= m.k ? Label::Dos : Label::Normal);
  }
  return out;
}

double f_measure(const std::vector<Label>& pred,
                 const std::vector<Label>& truth, Label positive) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw SizeMismatch("f_measure: label vectors must match and be nonempty");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == positive;
    const bool t = truth[i] == positive;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace dostriage::knn
