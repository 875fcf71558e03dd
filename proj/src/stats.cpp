// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dostriage/errors.hpp"

namespace dostriage::stats {
namespace {

// Asymptotic Kuiper tail probability Q(lambda) = 2 sum (4 j^2 l^2 - 1) exp(-2 j^2 l^2).
double kuiper_q(double lambda) {
  if (lambda < 0.4) return 1.0;  // series degenerates; Q is 1 to ~7 digits
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double jl2 = static_cast<double>(j) * static_cast<double>(j) * lambda * lambda;
    double term = (4.0 * jl2 - 1.0) * std::exp(-2.0 * jl2);
    sum += term;
    if (std::abs(term) < 1e-12 * std::max(std::abs(sum), 1e-300)) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KuiperResult kuiper_two_sample(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw EmptyInput("kuiper_two_sample: empty sample");
  for (double v : a) {
    if (!std::isfinite(v)) throw EmptyInput("kuiper_two_sample: non-finite value");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw EmptyInput("kuiper_two_sample: non-finite value");
  }
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double n1 = static_cast<double>(sa.size());
  const double n2 = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d_plus = 0.0, d_minus = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (i < sa.size() && j < sb.size()) {
      v = std::min(sa[i], sb[j]);
    } else if (i < sa.size()) {
      v = sa[i];
    } else {
      v = sb[j];
    }
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    const double fa = static_cast<double>(i) / n1;
    const double fb = static_cast<double>(j) / n2;
    d_plus = std::max(d_plus, fa - fb);
    d_minus = std::max(d_minus, fb - fa);
  }

  KuiperResult r;
  r.n1 = sa.size();
  r.n2 = sb.size();
  r.v_statistic = d_plus + d_minus;
  r.n_effective = n1 * n2 / (n1 + n2);
  const double sqrt_ne = std::sqrt(r.n_effective);
  const double lambda =
      (sqrt_ne + 0.155 + 0.24 / sqrt_ne) * r.v_statistic;
  r.p_value = kuiper_q(lambda);
  return r;
}

std::vector<KuiperResult> kuiper_feature_report(const Matrix& ds_a,
                                                const Matrix& ds_b) {
  if (ds_a.cols() != kFeatureCount || ds_b.cols() != kFeatureCount) {
    throw DimensionMismatch("kuiper_feature_report: expected 7 columns");
  }
  std::vector<KuiperResult> out;
  out.reserve(kFeatureCount);
  for (int f = 0; f < kFeatureCount; ++f) {
    std::vector<double> a(static_cast<std::size_t>(ds_a.rows()));
    std::vector<double> b(static_cast<std::size_t>(ds_b.rows()));
    for (Eigen::Index i = 0; i < ds_a.rows(); ++i) a[static_cast<std::size_t>(i)] = ds_a(i, f);
    for (Eigen::Index i = 0; i < ds_b.rows(); ++i) b[static_cast<std::size_t>(i)] = ds_b(i, f);
    out.push_back(kuiper_two_sample(a, b));
  }
  return out;
}

double congruence_measure(const Matrix& e_a, const Matrix& e_b, double c) {
  if (e_a.rows() == 0 || e_b.rows() == 0) {
    throw EmptyInput("congruence_measure: empty embedding");
  }
  if (e_a.cols() != e_b.cols() || e_a.cols() < 1) {
    throw DimensionMismatch("congruence_measure: column mismatch");
  }
  double sum = 0.0;
  for (Eigen::Index u = 0; u < e_a.cols(); ++u) {
    const double pa =
        static_cast<double>((e_a.col(u).array() <= c).count()) /
        static_cast<double>(e_a.rows());
    const double pb =
        static_cast<double>((e_b.col(u).array() <= c).count()) /
        static_cast<double>(e_b.rows());
    sum += (pa - pb) * (pa - pb);
  }
  return sum;
}

DensitySummary density_summary(const std::vector<double>& x, std::size_t bins) {
  if (x.size() < 2) throw TooFewRows("density_summary: need at least 2 values");
  if (bins < 1) throw EmptyInput("density_summary: bins must be positive");

  const double mn = *std::min_element(x.begin(), x.end());
  const double mx = *std::max_element(x.begin(), x.end());
  const double range = mx - mn;
  const double n = static_cast<double>(x.size());

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  const double sd = std::sqrt(var);

  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) {
    double pos = p * (n - 1.0);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = q(0.75) - q(0.25);

  // Silverman's rule with a floor so near-constant columns survive.
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  double h = 0.9 * spread * std::pow(n, -0.2);
  h = std::max(h, 1e-9 * range);
  if (h <= 0.0) h = 1e-12 * std::max(1.0, std::abs(mx));

  DensitySummary out;
  out.centers.resize(bins);
  out.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out.centers[i] =
        bins == 1 ? 0.5 * (mn + mx)
                  : mn + range * static_cast<double>(i) /
                            static_cast<double>(bins - 1);
  }
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * 3.14159265358979323846));
  for (std::size_t i = 0; i < bins; ++i) {
    double acc = 0.0;
    for (double v : x) {
      const double z = (out.centers[i] - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    out.densities[i] = norm * acc;
  }

  // Renormalize over the grid; the Gaussian kernel leaks mass past [min,max].
  if (bins >= 2 && range > 0.0) {
    const double dx = range / static_cast<double>(bins - 1);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < bins; ++i) {
      integral += 0.5 * (out.densities[i] + out.densities[i + 1]) * dx;
    }
    if (integral > 0.0) {
      for (double& d : out.densities) d /= integral;
    }
  }
  return out;
}

}  // namespace dostriage::stats
