// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "dostriage/types.hpp"

namespace dostriage::coral {

/// Linear map aligning the source covariance with the target's:
/// T = (C_A + lambda I)^(-1/2) (C_B + lambda I)^(1/2) via symmetric PSD roots.
struct CoralTransform {
  Matrix t_matrix;
  RowVector source_mean;
  RowVector target_mean;
  double lambda = 0.0;
  bool align_means = true;
};

/// Fit the whitening/recoloring transform from sample covariances (n-1
/// denominator). Throws TooFewRows, NonFiniteCovariance, DimensionMismatch.
CoralTransform coral_fit(const Matrix& source, const Matrix& target,
                         double lambda = 1e-6, bool align_means = true);

/// Map rows as (x - source_mean) T + (target_mean or source_mean).
Matrix coral_apply(const CoralTransform& t, const Matrix& x);

void save_transform(const CoralTransform& t, const std::string& path);
CoralTransform load_transform(const std::string& path);

}  // namespace dostriage::coral
