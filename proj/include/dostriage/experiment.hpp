// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dostriage/net.hpp"
#include "dostriage/triage_eval.hpp"
#include "dostriage/types.hpp"

namespace dostriage::experiment {

enum class TransferMethod { Naive, Coral, Adversarial };
enum class BaselineMethod { Control, Naive, Coral };

const char* method_name(TransferMethod m);

struct TransferConfig {
  net::TrainConfig train;
  std::size_t replicates = 10;    // accepted replicates required
  std::size_t max_attempts = 60;  // seeds tried before giving up
  std::uint64_t seed_base = 0;
  std::size_t jobs = 1;
  std::size_t n_train = 80000;    // temporal split for preprocessing fits
};

struct ReplicateOutcome {
  std::uint64_t seed = 0;
  net::ReplicateResult rep;
  eval::RollingTopNCurve curve;  // evaluation on the unlabeled domain
};

struct TransferOutcome {
  std::vector<ReplicateOutcome> attempts;  // seed order, minimal prefix
  std::vector<std::size_t> accepted;       // indices into attempts
  eval::CurveBand band;                    // over accepted curves
  bool quota_met = false;
};

/// Run one transfer experiment. Naive trains on the source's preprocessed
/// features and pushes the target through the source-fitted preprocessor (the
/// frozen-pipeline transfer); CORAL and the adversarial method may fit the
/// target's own scaling from its unlabeled features. Target labels are read
/// only for the evaluation curve. Output is independent of cfg.jobs.
TransferOutcome run_transfer(const Dataset& labeled, const Dataset& unlabeled,
                             TransferMethod method, const TransferConfig& cfg);

void write_transfer_outputs(const TransferOutcome& outcome,
                            TransferMethod method, const TransferConfig& cfg,
                            const std::string& out_dir);

struct BaselineOutcome {
  double f_train = 0.0;
  double f_test = 0.0;
  bool has_test = false;
};

/// 1-NN transfer baseline (Control / No Transfer / CORAL protocols).
BaselineOutcome run_baseline(const Dataset& labeled, const Dataset& unlabeled,
                             BaselineMethod method, std::size_t n_train = 80000);

void write_baseline_outputs(const BaselineOutcome& outcome,
                            BaselineMethod method, const std::string& out_dir);

/// Per-feature Kuiper report plus density summaries for two canonical
/// datasets; writes kuiper.csv, density.csv and run.meta under out_dir.
void run_compare(const Dataset& a, const Dataset& b, const std::string& out_dir,
                 std::size_t bins = 1000);

}  // namespace dostriage::experiment
