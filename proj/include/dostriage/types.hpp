// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dostriage {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr int kFeatureCount = 7;

inline const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "dur", "spkts", "dpkts", "load", "rate", "sinpkt", "dinpkt"};
  return names;
}

enum class Label { Normal, Dos };

inline const char* label_name(Label l) {
  return l == Label::Dos ? "DoS" : "Normal";
}

struct FlowRecord {
  std::array<double, kFeatureCount> features{};
  Label label = Label::Normal;
  std::string domain;
  std::uint64_t seq = 0;
};

/// Ordered collection of flow records sharing one domain tag.
struct Dataset {
  std::vector<FlowRecord> records;
  std::string domain;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  Matrix features() const {
    Matrix x(static_cast<Eigen::Index>(records.size()), kFeatureCount);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (int j = 0; j < kFeatureCount; ++j) {
        x(i, j) = records[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(j)];
      }
    }
    return x;
  }

  std::vector<Label> labels() const {
    std::vector<Label> y;
    y.reserve(records.size());
    for (const auto& r : records) y.push_back(r.label);
    return y;
  }
};

}  // namespace dostriage
