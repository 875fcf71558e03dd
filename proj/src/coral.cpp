// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/coral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dostriage/errors.hpp"

namespace dostriage::coral {
namespace {

Matrix covariance(const Matrix& x, const RowVector& mean) {
  Matrix centered = x.rowwise() - mean;
  return (centered.transpose() * centered) /
         static_cast<double>(x.rows() - 1);
}

// Symmetric PSD power: eigenvalues clamped at zero, lambda added, raised to p.
Matrix sym_power(const Matrix& c, double lambda, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  Vector ev = es.eigenvalues().cwiseMax(0.0).array() + lambda;
  Vector powered = ev.array().pow(p);
  return es.eigenvectors() * powered.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

CoralTransform coral_fit(const Matrix& source, const Matrix& target,
                         double lambda, bool align_means) {
  if (source.cols() != target.cols()) {
    throw DimensionMismatch("coral_fit: column count mismatch");
  }
  const Eigen::Index d = source.cols();
  if (source.rows() < d + 1 || target.rows() < d + 1) {
    throw TooFewRows("coral_fit: need at least d+1 rows per domain");
  }
  CoralTransform t;
  t.lambda = lambda;
  t.align_means = align_means;
  t.source_mean = source.colwise().mean();
  t.target_mean = target.colwise().mean();
  Matrix c_a = covariance(source, t.source_mean);
  Matrix c_b = covariance(target, t.target_mean);
  if (!c_a.allFinite() || !c_b.allFinite()) {
    throw NonFiniteCovariance("coral_fit: covariance has non-finite entries");
  }
  t.t_matrix = sym_power(c_a, lambda, -0.5) * sym_power(c_b, lambda, 0.5);
  if (!t.t_matrix.allFinite()) {
    throw NonFiniteCovariance("coral_fit: transform has non-finite entries");
  }
  return t;
}

Matrix coral_apply(const CoralTransform& t, const Matrix& x) {
  if (x.cols() != t.t_matrix.cols()) {
    throw DimensionMismatch("coral_apply: column count mismatch");
  }
  Matrix out = (x.rowwise() - t.source_mean) * t.t_matrix;
  out.rowwise() += t.align_means ? t.target_mean : t.source_mean;
  return out;
}

void save_transform(const CoralTransform& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  auto emit = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out << buf;
  };
  out << "coral " << t.t_matrix.rows() << " " << (t.align_means ? 1 : 0) << " ";
  emit(t.lambda, '\n');
  for (Eigen::Index i = 0; i < t.t_matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.t_matrix.cols(); ++j) {
      emit(t.t_matrix(i, j), j + 1 == t.t_matrix.cols() ? '\n' : ' ');
    }
  }
  for (Eigen::Index j = 0; j < t.source_mean.cols(); ++j) {
    emit(t.source_mean(j), j + 1 == t.source_mean.cols() ? '\n' : ' ');
  }
  for (Eigen::Index j = 0; j < t.target_mean.cols(); ++j) {
    emit(t.target_mean(j), j + 1 == t.target_mean.cols() ? '\n' : ' ');
  }
}

CoralTransform load_transform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string tag;
  Eigen::Index d = 0;
  int align = 1;
  CoralTransform t;
  in >> tag >> d >> align >> t.lambda;
  if (tag != "coral" || d <= 0) throw IoError("bad transform file: " + path);
  t.align_means = align != 0;
  t.t_matrix.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) in >> t.t_matrix(i, j);
  }
  t.source_mean.resize(d);
  t.target_mean.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) in >> t.source_mean(j);
  for (Eigen::Index j = 0; j < d; ++j) in >> t.target_mean(j);
  if (!in) throw IoError("truncated transform file: " + path);
  return t;
}

}  // namespace dostriage::coral
