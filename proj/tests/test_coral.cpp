// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "dostriage/coral.hpp"
#include "dostriage/errors.hpp"
#include "dostriage/rng.hpp"

using namespace dostriage;
using namespace dostriage::coral;

namespace {

Matrix covariance_of(const Matrix& x) {
  Matrix centered = x.rowwise() - RowVector(x.colwise().mean());
  return (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
}

Matrix random_domain(Rng& rng, Eigen::Index n, double spread) {
  Matrix base(n, kFeatureCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < kFeatureCount; ++j) base(i, j) = rng.normal();
  }
  Matrix mix(kFeatureCount, kFeatureCount);
  for (Eigen::Index i = 0; i < kFeatureCount; ++i) {
    for (Eigen::Index j = 0; j < kFeatureCount; ++j) {
      mix(i, j) = rng.normal() * spread;
    }
  }
  mix += Matrix::Identity(kFeatureCount, kFeatureCount);
  return base * mix;
}

}  // namespace

TEST_CASE("identical covariances give the identity transform") {
  Rng rng(5);
  Matrix src = random_domain(rng, 300, 0.4);
  // Row permutation preserves the covariance exactly.
  Matrix tgt = src.colwise().reverse();
  auto t = coral_fit(src, tgt, 0.0);
  Matrix eye = Matrix::Identity(kFeatureCount, kFeatureCount);
  CHECK((t.t_matrix - eye).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("scalar case: var 4 to var 9 gives t = 1.5") {
  Matrix a(3, 1), b(3, 1);
  a << -2, 0, 2;  // sample variance 4
  b << -3, 0, 3;  // sample variance 9
  auto t = coral_fit(a, b, 0.0);
  CHECK(t.t_matrix(0, 0) == doctest::Approx(1.5).epsilon(1e-12));

  Matrix mapped = coral_apply(t, a);
  CHECK(covariance_of(mapped)(0, 0) == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("fit-apply composition matches the target covariance") {
  Rng rng(29);
  Matrix src = random_domain(rng, 5000, 0.3);
  Matrix tgt = random_domain(rng, 5000, 0.6);
  auto t = coral_fit(src, tgt, 1e-6);
  Matrix mapped = coral_apply(t, src);
  Matrix c_b = covariance_of(tgt);
  double rel = (covariance_of(mapped) - c_b).norm() / c_b.norm();
  CHECK(rel < 1e-3);
  CHECK(mapped.rows() == src.rows());
  // Means aligned by default.
  CHECK((mapped.colwise().mean() - tgt.colwise().mean()).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("objective never worsens the covariance mismatch") {
  Rng rng(31);
  Matrix src = random_domain(rng, 2000, 0.3);
  Matrix tgt = random_domain(rng, 2000, 0.5);
  Matrix c_a = covariance_of(src);
  Matrix c_b = covariance_of(tgt);
  auto t = coral_fit(src, tgt, 0.0);
  double after = (t.t_matrix.transpose() * c_a * t.t_matrix - c_b).norm();
  double before = (c_a - c_b).norm();
  CHECK(after <= before + 1e-9);
}

TEST_CASE("identity transform apply semantics") {
  Rng rng(37);
  Matrix x = random_domain(rng, 50, 0.2);
  CoralTransform t;
  t.t_matrix = Matrix::Identity(kFeatureCount, kFeatureCount);
  t.source_mean = RowVector(x.colwise().mean());
  t.target_mean = t.source_mean.array() + 2.0;
  t.align_means = false;
  CHECK((coral_apply(t, x) - x).cwiseAbs().maxCoeff() < 1e-12);

  t.align_means = true;
  Matrix shifted = coral_apply(t, x);
  CHECK((RowVector(shifted.colwise().mean()) - t.target_mean)
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("errors") {
  Matrix tiny(3, kFeatureCount);
  tiny.setRandom();
  Matrix ok(100, kFeatureCount);
  ok.setRandom();
  CHECK_THROWS_AS(coral_fit(tiny, ok), TooFewRows);
  Matrix narrow(100, 3);
  narrow.setRandom();
  CHECK_THROWS_AS(coral_fit(ok, narrow), DimensionMismatch);

  CoralTransform t;
  t.t_matrix = Matrix::Identity(kFeatureCount, kFeatureCount);
  t.source_mean = RowVector::Zero(kFeatureCount);
  t.target_mean = RowVector::Zero(kFeatureCount);
  CHECK_THROWS_AS(coral_apply(t, narrow), DimensionMismatch);
}

TEST_CASE("transform serialize round-trip") {
  Rng rng(41);
  Matrix src = random_domain(rng, 100, 0.3);
  Matrix tgt = random_domain(rng, 100, 0.5);
  auto t = coral_fit(src, tgt);
  save_transform(t, "coral_test.txt");
  auto u = load_transform("coral_test.txt");
  CHECK((t.t_matrix - u.t_matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.source_mean - u.source_mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.align_means == u.align_means);
  CHECK(t.lambda == u.lambda);
}
