// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/triage_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dostriage/errors.hpp"

namespace dostriage::eval {

RollingTopNCurve rolling_topn(const Vector& scores,
                              const std::vector<Label>& truth, Label positive,
                              bool lower_is_priority) {
  const auto n = static_cast<std::size_t>(scores.size());
  if (n == 0) throw EmptyInput("rolling_topn: empty score vector");
  if (n != truth.size()) {
    throw SizeMismatch("rolling_topn: scores/truth length mismatch");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double sa = scores(static_cast<Eigen::Index>(a));
                     const double sb = scores(static_cast<Eigen::Index>(b));
                     return lower_is_priority ? sa < sb : sa > sb;
                   });
  RollingTopNCurve curve;
  curve.n_total = n;
  curve.values.resize(n);
  std::size_t positives_seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[order[i]] == positive) ++positives_seen;
    curve.values[i] =
        static_cast<double>(positives_seen) / static_cast<double>(i + 1);
  }
  curve.n_positive = positives_seen;
  return curve;
}

Top100 top100(const RollingTopNCurve& curve) {
  Top100 t;
  const std::size_t n = std::min<std::size_t>(100, curve.values.size());
  t.values.assign(curve.values.begin(),
                  curve.values.begin() + static_cast<std::ptrdiff_t>(n));
  t.short_curve = curve.values.size() < 100;
  return t;
}

std::pair<std::vector<double>, std::vector<double>> topn_bounds(
    std::size_t n_total, std::size_t n_positive) {
  std::vector<double> upper(n_total), lower(n_total);
  const std::size_t n_negative = n_total - n_positive;
  for (std::size_t i = 0; i < n_total; ++i) {
    const double n = static_cast<double>(i + 1);
    upper[i] = i + 1 <= n_positive
                   ? 1.0
                   : static_cast<double>(n_positive) / n;
    lower[i] = i + 1 <= n_negative
                   ? 0.0
                   : static_cast<double>(i + 1 - n_negative) / n;
  }
  return {std::move(upper), std::move(lower)};
}

CurveBand aggregate_replicates(const std::vector<RollingTopNCurve>& curves) {
  if (curves.empty()) throw EmptyInput("aggregate_replicates: no curves");
  const std::size_t len = curves.front().values.size();
  for (const auto& c : curves) {
    if (c.values.size() != len || c.n_total != curves.front().n_total ||
        c.n_positive != curves.front().n_positive) {
      throw LengthMismatch("aggregate_replicates: inconsistent curves");
    }
  }
  CurveBand band;
  band.replicate_count = curves.size();
  band.mean.assign(len, 0.0);
  band.sigma.assign(len, 0.0);
  const double k = static_cast<double>(curves.size());
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < len; ++i) band.mean[i] += c.values[i] / k;
  }
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < len; ++i) {
      const double d = c.values[i] - band.mean[i];
      band.sigma[i] += d * d / k;
    }
  }
  for (double& s : band.sigma) s = std::sqrt(s);
  auto bounds = topn_bounds(curves.front().n_total, curves.front().n_positive);
  band.upper = std::move(bounds.first);
  band.lower = std::move(bounds.second);
  return band;
}

}  // namespace dostriage::eval
