// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dostriage/types.hpp"

namespace dostriage::eval {

/// Cumulative positive fraction among the N highest-priority rows, N = 1..len.
struct RollingTopNCurve {
  std::vector<double> values;
  std::size_t n_total = 0;
  std::size_t n_positive = 0;
};

struct Top100 {
  std::vector<double> values;  // at most 100
  bool short_curve = false;
};

struct CurveBand {
  std::vector<double> mean;
  std::vector<double> sigma;
  std::vector<double> upper;  // perfect ranking
  std::vector<double> lower;  // all positives last
  std::size_t replicate_count = 0;
};

/// Sort rows by priority (lowest score first when lower_is_priority, the
/// convention of a ranking head trained toward y=0 for DoS; score ties break
/// by original index) and accumulate the positive fraction.
RollingTopNCurve rolling_topn(const Vector& scores,
                              const std::vector<Label>& truth,
                              Label positive = Label::Dos,
                              bool lower_is_priority = true);

Top100 top100(const RollingTopNCurve& curve);

/// Pointwise mean / population sigma over equal-length replicate curves, plus
/// the perfect-ranking and positives-last bound curves.
CurveBand aggregate_replicates(const std::vector<RollingTopNCurve>& curves);

/// Bound curves for n_total rows with n_positive positives.
std::pair<std::vector<double>, std::vector<double>> topn_bounds(
    std::size_t n_total, std::size_t n_positive);

}  // namespace dostriage::eval
