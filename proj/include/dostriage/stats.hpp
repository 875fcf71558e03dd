// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dostriage/types.hpp"

namespace dostriage::stats {

struct KuiperResult {
  double v_statistic = 0.0;  // D+ + D-
  double p_value = 1.0;
  double n_effective = 0.0;  // n1*n2/(n1+n2)
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Two-sample Kuiper test. ECDFs are evaluated right-continuously over the
/// pooled sorted support (no binning); the p-value comes from the asymptotic
/// series with the finite-sample lambda correction.
KuiperResult kuiper_two_sample(const std::vector<double>& a,
                               const std::vector<double>& b);

/// Per-feature Kuiper comparison of two canonical feature matrices.
std::vector<KuiperResult> kuiper_feature_report(const Matrix& ds_a,
                                                const Matrix& ds_b);

/// Congruence measure: sum over columns of the squared gap between the two
/// domains' empirical Pr(column <= c).
double congruence_measure(const Matrix& e_a, const Matrix& e_b, double c);

/// Per-quantile-level congruence values recorded over training iterations.
struct CongruenceTrace {
  std::vector<std::size_t> iterations;
  std::vector<double> quantile_levels;
  // values[t][q]: congruence at iterations[t], level quantile_levels[q]
  std::vector<std::vector<double>> values;

  bool empty() const { return iterations.empty(); }
};

struct DensitySummary {
  std::vector<double> centers;
  std::vector<double> densities;
};

/// Gaussian-kernel density estimate on an even grid over [min, max],
/// Silverman bandwidth with a floor, normalized so the trapezoidal integral
/// over the grid is 1.
DensitySummary density_summary(const std::vector<double>& x,
                               std::size_t bins = 1000);

}  // namespace dostriage::stats
