// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dostriage/errors.hpp"
#include "dostriage/rng.hpp"

namespace dostriage::net {
namespace {

constexpr std::array<int, 5> kEmbedWidths = {11, 10, 9, 7, 7};
constexpr int kRankHidden = 14;

Matrix pad_input(const Matrix& x) {
  if (x.cols() != kFeatureCount) {
    throw DimensionMismatch("forward_embed: expected 7 feature columns");
  }
  Matrix padded = Matrix::Zero(x.rows(), kEmbedInputWidth);
  padded.leftCols(kFeatureCount) = x;
  return padded;
}

Matrix forward_stack(const std::vector<Layer>& layers, Matrix a,
                     ForwardCache* cache) {
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(a);
  }
  for (const Layer& l : layers) {
    Matrix z = (a * l.w.transpose()).rowwise() + l.b.transpose();
    a = l.sigmoid ? Matrix((1.0 + (-z.array()).exp()).inverse()) : std::move(z);
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

// Backprop delta (w.r.t. stack output activations) through a layer stack,
// accumulating weight/bias grads; returns delta w.r.t. the stack input.
Matrix backward_stack(const std::vector<Layer>& layers,
                      const ForwardCache& cache, Matrix delta,
                      StackGrads& grads) {
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Layer& l = layers[li];
    const Matrix& out = cache.acts[li + 1];
    const Matrix& in = cache.acts[li];
    Matrix dz = l.sigmoid
                    ? Matrix(delta.array() * out.array() * (1.0 - out.array()))
                    : std::move(delta);
    grads[li].w += dz.transpose() * in;
    grads[li].b += dz.colwise().sum().transpose();
    delta = dz * l.w;
  }
  return delta;
}

Layer make_layer(int out, int in, bool sigmoid, Rng& rng) {
  Layer l;
  l.sigmoid = sigmoid;
  l.w.resize(out, in);
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  for (Eigen::Index i = 0; i < l.w.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.w.cols(); ++j) {
      l.w(i, j) = rng.uniform(-bound, bound);
    }
  }
  l.b = Vector::Zero(out);
  return l;
}

double slope_of(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

ModelGrads zero_grads(const MlpParams& m) {
  ModelGrads g;
  for (const Layer& l : m.embed) {
    g.embed.push_back({Matrix::Zero(l.w.rows(), l.w.cols()),
                       Vector::Zero(l.b.size())});
  }
  for (const Layer& l : m.rank) {
    g.rank.push_back({Matrix::Zero(l.w.rows(), l.w.cols()),
                      Vector::Zero(l.b.size())});
  }
  return g;
}

MlpParams init_model(std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  MlpParams m;
  for (std::size_t i = 0; i + 1 < kEmbedWidths.size(); ++i) {
    m.embed.push_back(
        make_layer(kEmbedWidths[i + 1], kEmbedWidths[i], true, rng));
  }
  m.rank.push_back(make_layer(kRankHidden, kEmbedOutputWidth, true, rng));
  m.rank.push_back(make_layer(1, kRankHidden, false, rng));
  return m;
}

Matrix forward_embed(const MlpParams& m, const Matrix& x, ForwardCache* cache) {
  Matrix e = forward_stack(m.embed, pad_input(x), cache);
  if (!e.allFinite()) throw NonFiniteActivation("forward_embed: non-finite output");
  return e;
}

Vector forward_rank(const MlpParams& m, const Matrix& e, ForwardCache* cache) {
  if (e.cols() != kEmbedOutputWidth) {
    throw DimensionMismatch("forward_rank: expected 7 embedding columns");
  }
  return forward_stack(m.rank, e, cache).col(0);
}

ListmleResult listmle_loss(const Vector& scores, std::size_t top_k,
                           bool strict_denominator) {
  const auto n = static_cast<std::size_t>(scores.size());
  if (n == 0) throw EmptyInput("listmle_loss: empty score vector");
  if (top_k > n) throw SizeMismatch("listmle_loss: top_k exceeds list length");

  // Suffix log-sum-exp: lse[i] = log sum_{j >= i} exp(s_j).
  std::vector<double> lse(n);
  lse[n - 1] = scores(static_cast<Eigen::Index>(n - 1));
  for (std::size_t i = n - 1; i-- > 0;) {
    const double a = scores(static_cast<Eigen::Index>(i));
    const double b = lse[i + 1];
    const double hi = std::max(a, b);
    lse[i] = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
  }

  ListmleResult r;
  r.grad = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < top_k; ++i) {
    const double si = scores(static_cast<Eigen::Index>(i));
    double denom;
    if (strict_denominator) {
      if (i + 1 >= n) continue;  // empty strict denominator, term undefined
      denom = lse[i + 1];
    } else {
      denom = lse[i];
    }
    r.loss += denom - si;
    r.grad(static_cast<Eigen::Index>(i)) -= 1.0;
    const std::size_t from = strict_denominator ? i + 1 : i;
    for (std::size_t j = from; j < n; ++j) {
      r.grad(static_cast<Eigen::Index>(j)) +=
          std::exp(scores(static_cast<Eigen::Index>(j)) - denom);
    }
  }
  return r;
}

ContrastiveResult contrastiveimpl(double d, int y, double margin) {
  ContrastiveResult r;
  if (y == 0) {
    r.loss = 0.5 * d;
    r.grad_d = 0.5;
  } else if (d < margin) {
    r.loss = 0.5 * (margin - d);
    r.grad_d = -0.5;
  } else {
    r.loss = 0.0;
    r.grad_d = 0.0;
  }
  return r;
}

ContrastiveResult contrastive_loss(double d, int y, double margin) {
  if (d < 0.0) throw NegativeDistance("contrastive_loss: d must be nonnegative");
  if (!(margin > 0.0)) throw InvalidSpec("contrastive_loss: margin must be positive");
  return contrastiveimpl(d, y, margin);
}

double siamese_distance(const MlpParams& m, const RowVector& xa,
                        const RowVector& xb) {
  Matrix ea = forward_embed(m, xa);
  Matrix eb = forward_embed(m, xb);
  return (ea - eb).squaredNorm();
}

double ranking_pass(const MlpParams& m, const Matrix& x, std::size_t top_k,
                    bool strict_denominator, ModelGrads& grads) {
  ForwardCache embed_cache, rank_cache;
  Matrix e = forward_embed(m, x, &embed_cache);
  Vector scores = forward_rank(m, e, &rank_cache);
  ListmleResult lr = listmle_loss(scores, top_k, strict_denominator);
  Matrix delta = lr.grad;  // n x 1, d loss / d score
  Matrix d_embed = backward_stack(m.rank, rank_cache, std::move(delta), grads.rank);
  backward_stack(m.embed, embed_cache, std::move(d_embed), grads.embed);
  return lr.loss;
}

double pair_pass(const MlpParams& m, const Matrix& xa, const Matrix& xb,
                 const std::vector<int>& y, double margin,
                 StackGrads& embed_grads) {
  if (xa.rows() != xb.rows() ||
      static_cast<std::size_t>(xa.rows()) != y.size()) {
    throw SizeMismatch("pair_pass: pair sides and labels must align");
  }
  if (y.empty()) throw EmptyInput("pair_pass: no pairs");
  ForwardCache cache_a, cache_b;
  Matrix ea = forward_embed(m, xa, &cache_a);
  Matrix eb = forward_embed(m, xb, &cache_b);
  Matrix diff = ea - eb;

  const double inv_n = 1.0 / static_cast<double>(y.size());
  double loss = 0.0;
  Matrix delta_a(ea.rows(), ea.cols());
  for (Eigen::Index i = 0; i < ea.rows(); ++i) {
    const double d = diff.row(i).squaredNorm();
    ContrastiveResult cr = contrastiveimpl(d, y[static_cast<std::size_t>(i)], margin);
    loss += cr.loss * inv_n;
    delta_a.row(i) = (cr.grad_d * 2.0 * inv_n) * diff.row(i);
  }
  Matrix delta_b = -delta_a;
  backward_stack(m.embed, cache_a, std::move(delta_a), embed_grads);
  backward_stack(m.embed, cache_b, std::move(delta_b), embed_grads);
  return loss;
}

StepMetrics train_step(MlpParams& m, const Matrix& rank_x, const Matrix& pair_a,
                       const Matrix& pair_b, const std::vector<int>& pair_y,
                       const TrainConfig& cfg) {
  ModelGrads rank_grads = zero_grads(m);
  StepMetrics metrics;
  metrics.listmle_loss =
      ranking_pass(m, rank_x, cfg.top_k, cfg.strict_denominator, rank_grads);

  StackGrads pair_grads;
  for (const Layer& l : m.embed) {
    pair_grads.push_back({Matrix::Zero(l.w.rows(), l.w.cols()),
                          Vector::Zero(l.b.size())});
  }
  metrics.contrastive_loss =
      pair_pass(m, pair_a, pair_b, pair_y, cfg.margin, pair_grads);

  // Single combined descent update after both passes; the discriminator term
  // enters the shared embedding with its sign reversed.
  const double lr = cfg.learning_rate;
  for (std::size_t i = 0; i < m.embed.size(); ++i) {
    m.embed[i].w -=
        lr * (rank_grads.embed[i].w - cfg.adv_weight * pair_grads[i].w);
    m.embed[i].b -=
        lr * (rank_grads.embed[i].b - cfg.adv_weight * pair_grads[i].b);
  }
  for (std::size_t i = 0; i < m.rank.size(); ++i) {
    m.rank[i].w -= lr * rank_grads.rank[i].w;
    m.rank[i].b -= lr * rank_grads.rank[i].b;
  }
  return metrics;
}

ReplicateResult train_replicate(const Matrix& src_x,
                                const std::vector<Label>& src_y,
                                const Matrix& tgt_x, const TrainConfig& cfg) {
  if (static_cast<std::size_t>(src_x.rows()) != src_y.size()) {
    throw SizeMismatch("train_replicate: labeled rows/labels mismatch");
  }
  if (tgt_x.rows() == 0) throw EmptyInput("train_replicate: empty unlabeled domain");

  std::vector<std::size_t> dos_idx, normal_idx;
  for (std::size_t i = 0; i < src_y.size(); ++i) {
    (src_y[i] == Label::Dos ? dos_idx : normal_idx).push_back(i);
  }
  if (dos_idx.empty() || normal_idx.empty()) {
    throw MissingClass("train_replicate: labeled domain needs both classes");
  }

  ReplicateResult result;
  result.model = init_model(cfg.rng_seed);
  result.cm_trace.quantile_levels = cfg.quantile_levels;

  if (cfg.iterations == 0) {
    result.verdict.accepted = false;
    result.verdict.reasons.push_back("no training");
    return result;
  }

  Rng rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);

  const std::size_t nd = cfg.rank_batch / 2;
  const std::size_t nn = cfg.rank_batch - nd;
  Matrix rank_x(static_cast<Eigen::Index>(cfg.rank_batch), kFeatureCount);
  Matrix pair_a(static_cast<Eigen::Index>(cfg.pair_batch), kFeatureCount);
  Matrix pair_b(static_cast<Eigen::Index>(cfg.pair_batch), kFeatureCount);
  std::vector<int> pair_y(cfg.pair_batch);

  auto record_cm = [&](std::size_t iter) {
    Matrix ea = forward_embed(result.model, src_x);
    Matrix eb = forward_embed(result.model, tgt_x);
    std::vector<double> row;
    row.reserve(cfg.quantile_levels.size());
    for (double c : cfg.quantile_levels) {
      row.push_back(stats::congruence_measure(ea, eb, c));
    }
    result.cm_trace.iterations.push_back(iter);
    result.cm_trace.values.push_back(std::move(row));
  };

  record_cm(0);
  const auto n_tgt = static_cast<std::size_t>(tgt_x.rows());
  const auto n_src = static_cast<std::size_t>(src_x.rows());
  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    // 1:1 DoS:Normal ranking batch from the labeled domain in ground-truth
    // order, DoS block first: the list head is the triage-priority end, so
    // ListMLE trains exemplary DoS toward high raw scores.
    for (std::size_t i = 0; i < nd; ++i) {
      rank_x.row(static_cast<Eigen::Index>(i)) = src_x.row(
          static_cast<Eigen::Index>(dos_idx[rng.index(dos_idx.size())]));
    }
    for (std::size_t i = 0; i < nn; ++i) {
      rank_x.row(static_cast<Eigen::Index>(nd + i)) = src_x.row(
          static_cast<Eigen::Index>(normal_idx[rng.index(normal_idx.size())]));
    }
    // Pair batch, alternating same-domain (Y=0) and cross-domain (Y=1).
    for (std::size_t p = 0; p < cfg.pair_batch; ++p) {
      const auto pi = static_cast<Eigen::Index>(p);
      if (p % 2 == 0) {
        pair_y[p] = 0;
        if (rng.coin()) {
          pair_a.row(pi) = src_x.row(static_cast<Eigen::Index>(rng.index(n_src)));
          pair_b.row(pi) = src_x.row(static_cast<Eigen::Index>(rng.index(n_src)));
        } else {
          pair_a.row(pi) = tgt_x.row(static_cast<Eigen::Index>(rng.index(n_tgt)));
          pair_b.row(pi) = tgt_x.row(static_cast<Eigen::Index>(rng.index(n_tgt)));
        }
      } else {
        pair_y[p] = 1;
        pair_a.row(pi) = src_x.row(static_cast<Eigen::Index>(rng.index(n_src)));
        pair_b.row(pi) = tgt_x.row(static_cast<Eigen::Index>(rng.index(n_tgt)));
      }
    }
    StepMetrics sm = train_step(result.model, rank_x, pair_a, pair_b, pair_y, cfg);
    result.loss_trace.push_back(sm.listmle_loss);
    if (iter % cfg.health.cm_window == 0 || iter == cfg.iterations) {
      record_cm(iter);
    }
  }

  result.verdict = health_check(result.cm_trace, result.loss_trace, cfg.health);
  return result;
}

HealthVerdict health_check(const stats::CongruenceTrace& cm,
                           const std::vector<double>& loss,
                           const TrainConfig::Health& cfg) {
  if (cm.empty() || loss.empty()) {
    throw EmptyTrace("health_check: empty trace");
  }
  HealthVerdict v;
  char buf[96];
  for (std::size_t q = 0; q < cm.quantile_levels.size(); ++q) {
    std::vector<double> series;
    series.reserve(cm.values.size());
    for (const auto& row : cm.values) series.push_back(row[q]);
    if (slope_of(series) > cfg.cm_slope_max) {
      std::snprintf(buf, sizeof(buf), "cm_slope(c=%g)", cm.quantile_levels[q]);
      v.reasons.emplace_back(buf);
    }
    if (series.back() > series.front()) {
      std::snprintf(buf, sizeof(buf), "cm_final(c=%g)", cm.quantile_levels[q]);
      v.reasons.emplace_back(buf);
    }
  }
  const std::size_t w = std::min(cfg.loss_tail_window, loss.size());
  std::vector<double> tail(loss.end() - static_cast<std::ptrdiff_t>(w), loss.end());
  const double mx = *std::max_element(tail.begin(), tail.end());
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(w / 2),
                   tail.end());
  const double median = tail[w / 2];
  if (mx > cfg.loss_spike_ratio * median) {
    v.reasons.emplace_back("loss_spike");
  }
  v.accepted = v.reasons.empty();
  return v;
}

void save_model(const MlpParams& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  auto emit_stack = [&](const char* name, const std::vector<Layer>& layers) {
    out << name << " " << layers.size() << "\n";
    for (const Layer& l : layers) {
      out << "layer " << l.w.rows() << " " << l.w.cols() << " "
          << (l.sigmoid ? "sigmoid" : "linear") << "\n";
      for (Eigen::Index j = 0; j < l.b.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g%c", l.b(j),
                      j + 1 == l.b.size() ? '\n' : ' ');
        out << buf;
      }
      for (Eigen::Index i = 0; i < l.w.rows(); ++i) {
        for (Eigen::Index j = 0; j < l.w.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g%c", l.w(i, j),
                        j + 1 == l.w.cols() ? '\n' : ' ');
          out << buf;
        }
      }
    }
  };
  emit_stack("embed", m.embed);
  emit_stack("rank", m.rank);
}

MlpParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  MlpParams m;
  auto read_stack = [&](const char* expect, std::vector<Layer>& layers) {
    std::string tag;
    std::size_t count = 0;
    in >> tag >> count;
    if (tag != expect) throw IoError("bad model file: " + path);
    for (std::size_t k = 0; k < count; ++k) {
      std::string ltag, act;
      Eigen::Index rows = 0, cols = 0;
      in >> ltag >> rows >> cols >> act;
      if (ltag != "layer" || rows <= 0 || cols <= 0) {
        throw IoError("bad layer header: " + path);
      }
      Layer l;
      l.sigmoid = act == "sigmoid";
      l.b.resize(rows);
      for (Eigen::Index j = 0; j < rows; ++j) in >> l.b(j);
      l.w.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) in >> l.w(i, j);
      }
      layers.push_back(std::move(l));
    }
  };
  read_stack("embed", m.embed);
  read_stack("rank", m.rank);
  if (!in) throw IoError("truncated model file: " + path);
  return m;
}

}  // namespace dostriage::net
