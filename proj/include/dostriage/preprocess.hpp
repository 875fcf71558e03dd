// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dostriage/types.hpp"

namespace dostriage::prep {

/// Per-column winsorizing clamp (0.001 / 0.999 quantiles) plus min-max range,
/// fitted on a training split only.
struct ColumnParams {
  double lo_clamp = 0.0;
  double hi_clamp = 0.0;
  double min_val = 0.0;
  double max_val = 0.0;
  bool degenerate = false;
};

struct PreprocessParams {
  std::vector<ColumnParams> columns;
  std::string source_domain;

  int width() const { return static_cast<int>(columns.size()); }
};

/// Fit clamp quantiles (linear interpolation between order statistics) and the
/// post-clamp min/max per column. Throws TooFewRows for fewer than 2 rows.
PreprocessParams fit_preprocessor(const Matrix& train,
                                  const std::string& source_domain = "");

/// Clamp into [lo_clamp, hi_clamp], then map to [0,1] by the fitted range.
/// Degenerate columns map to 0. Throws DimensionMismatch.
Matrix apply_preprocessor(const PreprocessParams& params, const Matrix& x);

/// Linear-interpolation quantile of a column at level p (position p*(n-1)).
double quantile(std::vector<double> values, double p);

void save_params(const PreprocessParams& params, const std::string& path);
PreprocessParams load_params(const std::string& path);

}  // namespace dostriage::prep
