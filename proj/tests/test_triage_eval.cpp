// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "dostriage/errors.hpp"
#include "dostriage/rng.hpp"
#include "dostriage/triage_eval.hpp"

using namespace dostriage;
using namespace dostriage::eval;

namespace {

// Independent oracle: stable sort by (score asc, index asc), then cumulative
// positive fraction.
std::vector<double> brute_curve(const std::vector<double>& scores,
                                const std::vector<Label>& truth) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  std::vector<double> out;
  double hits = 0;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (truth[order[n]] == Label::Dos) hits += 1;
    out.push_back(hits / static_cast<double>(n + 1));
  }
  return out;
}

Vector to_vec(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace

TEST_CASE("hand oracle: alternating labels, increasing scores") {
  std::vector<double> s = {0.1, 0.2, 0.3, 0.4};
  std::vector<Label> y = {Label::Dos, Label::Normal, Label::Dos, Label::Normal};
  auto c = rolling_topn(to_vec(s), y);
  REQUIRE(c.values.size() == 4);
  CHECK(c.values[0] == 1.0);
  CHECK(c.values[1] == 0.5);
  CHECK(c.values[2] == doctest::Approx(2.0 / 3.0));
  CHECK(c.values[3] == 0.5);
  CHECK(c.n_total == 4);
  CHECK(c.n_positive == 2);
}

TEST_CASE("ties break by original index") {
  std::vector<double> s = {0.5, 0.5, 0.5};
  std::vector<Label> y = {Label::Normal, Label::Dos, Label::Dos};
  auto c = rolling_topn(to_vec(s), y);
  CHECK(c.values[0] == 0.0);  // index 0 first despite equal scores
  CHECK(c.values[1] == 0.5);
  CHECK(c.values[2] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("lower_is_priority flag flips the ordering") {
  std::vector<double> s = {0.1, 0.9};
  std::vector<Label> y = {Label::Dos, Label::Normal};
  CHECK(rolling_topn(to_vec(s), y, Label::Dos, true).values[0] == 1.0);
  CHECK(rolling_topn(to_vec(s), y, Label::Dos, false).values[0] == 0.0);
}

TEST_CASE("random instances agree with the brute-force oracle") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + rng.index(300);
    std::vector<double> s(n);
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores to force plenty of ties.
      s[i] = static_cast<double>(rng.index(8)) / 8.0;
      y[i] = rng.coin() ? Label::Dos : Label::Normal;
    }
    auto c = rolling_topn(to_vec(s), y);
    auto oracle = brute_curve(s, y);
    REQUIRE(c.values.size() == oracle.size());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(c.values[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("curve invariant under strictly monotone score transforms") {
  Rng rng(21);
  std::vector<double> s(200);
  std::vector<Label> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    s[i] = rng.normal();
    y[i] = rng.coin() ? Label::Dos : Label::Normal;
  }
  auto base = rolling_topn(to_vec(s), y);
  std::vector<double> t = s;
  for (auto& v : t) v = std::tanh(v) * 10 + 3;
  auto mapped = rolling_topn(to_vec(t), y);
  CHECK(mapped.values == base.values);
}

TEST_CASE("final curve value is the base rate; curve stays within bounds") {
  Rng rng(25);
  std::size_t n = 500, pos = 0;
  std::vector<double> s(n);
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = rng.uniform();
    y[i] = rng.uniform() < 0.3 ? Label::Dos : Label::Normal;
    if (y[i] == Label::Dos) ++pos;
  }
  auto c = rolling_topn(to_vec(s), y);
  CHECK(c.values.back() ==
        doctest::Approx(static_cast<double>(pos) / static_cast<double>(n)));
  auto [upper, lower] = topn_bounds(n, pos);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(c.values[i] <= upper[i] + 1e-12);
    CHECK(c.values[i] >= lower[i] - 1e-12);
  }
}

TEST_CASE("topn_bounds closed forms") {
  auto [upper, lower] = topn_bounds(10, 3);
  // Perfect ranking: 1 while n <= p, then p/n.
  CHECK(upper[0] == 1.0);
  CHECK(upper[2] == 1.0);
  CHECK(upper[3] == doctest::Approx(3.0 / 4.0));
  CHECK(upper[9] == doctest::Approx(0.3));
  // Positives last: 0 until only positives remain.
  CHECK(lower[0] == 0.0);
  CHECK(lower[6] == 0.0);
  CHECK(lower[7] == doctest::Approx(1.0 / 8.0));
  CHECK(lower[9] == doctest::Approx(0.3));
}

TEST_CASE("top100 truncation and short-curve flag") {
  std::vector<double> s(150), s2(40);
  std::vector<Label> y(150, Label::Dos), y2(40, Label::Dos);
  for (std::size_t i = 0; i < 150; ++i) s[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < 40; ++i) s2[i] = static_cast<double>(i);
  auto t = top100(rolling_topn(to_vec(s), y));
  CHECK(t.values.size() == 100);
  CHECK_FALSE(t.short_curve);
  auto t2 = top100(rolling_topn(to_vec(s2), y2));
  CHECK(t2.values.size() == 40);
  CHECK(t2.short_curve);
}

TEST_CASE("aggregate_replicates mean and population sigma") {
  RollingTopNCurve a{{0.0, 0.5}, 2, 1};
  RollingTopNCurve b{{1.0, 0.5}, 2, 1};
  auto band = aggregate_replicates({a, b});
  CHECK(band.replicate_count == 2);
  CHECK(band.mean[0] == 0.5);
  CHECK(band.sigma[0] == doctest::Approx(0.5));  // population sigma
  CHECK(band.sigma[1] == 0.0);
  CHECK(band.upper[0] == 1.0);
  CHECK(band.lower[0] == 0.0);
}

TEST_CASE("errors") {
  Vector s(2);
  s << 1, 2;
  CHECK_THROWS_AS(rolling_topn(s, {Label::Dos}), SizeMismatch);
  CHECK_THROWS_AS(rolling_topn(Vector(0), {}), EmptyInput);
  CHECK_THROWS_AS(aggregate_replicates({}), EmptyInput);
  RollingTopNCurve a{{0.0, 0.5}, 2, 1};
  RollingTopNCurve c{{0.0}, 1, 0};
  CHECK_THROWS_AS(aggregate_replicates({a, c}), LengthMismatch);
}
