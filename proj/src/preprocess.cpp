// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dostriage/errors.hpp"

namespace dostriage::prep {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyInput("quantile: empty column");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PreprocessParams fit_preprocessor(const Matrix& train,
                                  const std::string& source_domain) {
  if (train.rows() < 2) throw TooFewRows("fit_preprocessor: need at least 2 rows");
  PreprocessParams params;
  params.source_domain = source_domain;
  params.columns.resize(static_cast<std::size_t>(train.cols()));
  std::vector<double> col(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      col[static_cast<std::size_t>(i)] = train(i, j);
    }
    ColumnParams& c = params.columns[static_cast<std::size_t>(j)];
    c.lo_clamp = quantile(col, 0.001);
    c.hi_clamp = quantile(col, 0.999);
    double mn = c.hi_clamp, mx = c.lo_clamp;
    for (double v : col) {
      double w = std::clamp(v, c.lo_clamp, c.hi_clamp);
      mn = std::min(mn, w);
      mx = std::max(mx, w);
    }
    c.min_val = mn;
    c.max_val = mx;
    c.degenerate = (c.max_val == c.min_val);
  }
  return params;
}

Matrix apply_preprocessor(const PreprocessParams& params, const Matrix& x) {
  if (x.cols() != params.width()) {
    throw DimensionMismatch("apply_preprocessor: column count mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const ColumnParams& c = params.columns[static_cast<std::size_t>(j)];
    if (c.degenerate) {
      out.col(j).setZero();
      continue;
    }
    const double range = c.max_val - c.min_val;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double v = std::clamp(x(i, j), c.lo_clamp, c.hi_clamp);
      out(i, j) = std::clamp((v - c.min_val) / range, 0.0, 1.0);
    }
  }
  return out;
}

void save_params(const PreprocessParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  char buf[256];
  out << "source_domain = " << params.source_domain << "\n";
  out << "columns = " << params.columns.size() << "\n";
  for (std::size_t j = 0; j < params.columns.size(); ++j) {
    const ColumnParams& c = params.columns[j];
    std::string name = j < kFeatureCount ? feature_names()[j]
                                         : "col" + std::to_string(j);
    std::snprintf(buf, sizeof(buf), "%s = %.17g %.17g %.17g %.17g %d\n",
                  name.c_str(), c.lo_clamp, c.hi_clamp, c.min_val, c.max_val,
                  c.degenerate ? 1 : 0);
    out << buf;
  }
}

PreprocessParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  PreprocessParams params;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::istringstream val(line.substr(eq + 1));
    if (key == "source_domain") {
      val >> params.source_domain;
    } else if (key == "columns") {
      std::size_t n = 0;
      val >> n;
      params.columns.reserve(n);
    } else {
      ColumnParams c;
      int degenerate = 0;
      val >> c.lo_clamp >> c.hi_clamp >> c.min_val >> c.max_val >> degenerate;
      c.degenerate = degenerate != 0;
      params.columns.push_back(c);
    }
  }
  if (params.columns.empty()) throw IoError("no columns in " + path);
  return params;
}

}  // namespace dostriage::prep
