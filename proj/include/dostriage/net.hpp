// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dostriage/stats.hpp"
#include "dostriage/types.hpp"

namespace dostriage::net {

inline constexpr int kEmbedInputWidth = 11;  // 7 features zero-padded to 11
inline constexpr int kEmbedOutputWidth = 7;

struct Layer {
  Matrix w;  // out x in
  Vector b;
  bool sigmoid = true;
};

/// Shared sigmoid embedding (11 -> 10 -> 9 -> 7 -> 7) plus the ranking head
/// (7 -> 14 sigmoid -> 1 linear). The Siamese discriminator is the parameter-
/// free squared distance of embeddings, so all adversarial pressure lands on
/// the embedding chain.
struct MlpParams {
  std::vector<Layer> embed;
  std::vector<Layer> rank;
};

struct LayerGrads {
  Matrix w;
  Vector b;
};
using StackGrads = std::vector<LayerGrads>;

struct ModelGrads {
  StackGrads embed;
  StackGrads rank;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t iterations = 5000;
  std::size_t rank_batch = 300;
  std::size_t pair_batch = 128;
  double margin = 2.0;
  std::size_t top_k = 150;
  double adv_weight = 1.0;
  std::vector<double> quantile_levels = {0.1, 0.2, 0.3, 0.4, 0.5,
                                         0.6, 0.7, 0.8, 0.9};
  std::uint64_t rng_seed = 0;
  bool strict_denominator = false;  // exclude item i from its own denominator

  struct Health {
    std::size_t cm_window = 500;
    double cm_slope_max = 0.0;
    double loss_spike_ratio = 1.5;
    std::size_t loss_tail_window = 500;
  } health;
};

struct HealthVerdict {
  bool accepted = false;
  std::vector<std::string> reasons;
};

struct StepMetrics {
  double listmle_loss = 0.0;
  double contrastive_loss = 0.0;
};

struct ReplicateResult {
  MlpParams model;
  stats::CongruenceTrace cm_trace;
  std::vector<double> loss_trace;
  HealthVerdict verdict;
};

/// Glorot-uniform weights, zero biases, deterministic per seed.
MlpParams init_model(std::uint64_t rng_seed);

/// Activation cache for one layer stack (acts[0] is the input).
struct ForwardCache {
  std::vector<Matrix> acts;
};

/// Embed rows of 7 features (padded to 11 internally); output is n x 7 in (0,1).
Matrix forward_embed(const MlpParams& m, const Matrix& x,
                     ForwardCache* cache = nullptr);

/// Ranking head over embeddings; one unbounded score per row.
Vector forward_rank(const MlpParams& m, const Matrix& e,
                    ForwardCache* cache = nullptr);

struct ListmleResult {
  double loss = 0.0;
  Vector grad;  // d loss / d scores
};

/// Plackett-Luce negative log-likelihood over the first top_k positions of a
/// score vector already in ground-truth order (best first). Log-sum-exp
/// stabilized; sum convention over positions.
ListmleResult listmle_loss(const Vector& scores, std::size_t top_k,
                           bool strict_denominator = false);

struct ContrastiveResult {
  double loss = 0.0;
  double grad_d = 0.0;  // d loss / d squared-distance
};

/// 0.5 * ((1-Y) d + Y max(0, m - d)).
ContrastiveResult contrastive_loss(double d, int y, double margin);

double siamese_distance(const MlpParams& m, const RowVector& xa,
                        const RowVector& xb);

/// ListMLE pass through L(E(x)): returns loss, accumulates embed + head grads.
double ranking_pass(const MlpParams& m, const Matrix& x, std::size_t top_k,
                    bool strict_denominator, ModelGrads& grads);

/// Contrastive pass through D(E(xa), E(xb)): mean pair loss, embed grads only.
double pair_pass(const MlpParams& m, const Matrix& xa, const Matrix& xb,
                 const std::vector<int>& y, double margin, StackGrads& embed_grads);

/// One combined update: embedding gradient is grad(L_L) - adv_weight*grad(L_D)
/// (ReverseGrad), applied together with the head gradient after both passes.
StepMetrics train_step(MlpParams& m, const Matrix& rank_x, const Matrix& pair_a,
                       const Matrix& pair_b, const std::vector<int>& pair_y,
                       const TrainConfig& cfg);

/// Full adversarial replicate. The unlabeled domain enters as a label-free
/// feature matrix, so its classes cannot leak into training.
ReplicateResult train_replicate(const Matrix& src_x,
                                const std::vector<Label>& src_y,
                                const Matrix& tgt_x, const TrainConfig& cfg);

/// Accept iff every quantile-level congruence trace has nonpositive trend and
/// ends at or below its start, and the ListMLE loss tail is spike-free.
HealthVerdict health_check(const stats::CongruenceTrace& cm,
                           const std::vector<double>& loss,
                           const TrainConfig::Health& cfg);

void save_model(const MlpParams& m, const std::string& path);
MlpParams load_model(const std::string& path);

ModelGrads zero_grads(const MlpParams& m);

}  // namespace dostriage::net
