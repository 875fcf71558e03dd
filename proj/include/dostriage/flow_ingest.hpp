// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "dostriage/types.hpp"

namespace dostriage::ingest {

enum class Schema { UnswNb15, Cicids2017, Canonical };

struct IngestResult {
  Dataset dataset;
  std::size_t parsed_rows = 0;
  std::size_t dropped_rows = 0;  // rows with unparseable / non-finite features
};

/// Parse a flow CSV into the canonical 7-feature representation.
/// Throws MissingColumn, EmptyFile, UnknownLabel, IoError.
IngestResult ingest_csv(const std::string& path, Schema schema);

/// Write a dataset as canonical CSV (9 significant digits, LF endings).
void write_canonical(const Dataset& ds, const std::string& path);

/// Temporal split: first min(n_train, |ds|) records go to train, rest to test.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             std::size_t n_train = 80000);

struct SynthSpec {
  std::size_t n_records = 0;
  double dos_fraction = 0.05;
  std::array<double, kFeatureCount> scale{1, 1, 1, 1, 1, 1, 1};
  std::array<double, kFeatureCount> offset{0, 0, 0, 0, 0, 0, 0};
  double class_separation = 1.0;
  std::uint64_t rng_seed = 0;
  std::string domain = "synth";
};

/// Generate a synthetic two-class flow dataset. Features are lognormal with
/// the DoS class displaced along a fixed direction in log space, then the
/// whole domain is mapped through the affine shift and clipped at zero.
/// Records follow a capture-like timeline: a benign preamble followed by an
/// attack window where DoS and normal flows interleave.
Dataset synth_generate(const SynthSpec& spec);

}  // namespace dostriage::ingest
