// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dostriage/errors.hpp"
#include "dostriage/experiment.hpp"
#include "dostriage/flow_ingest.hpp"

using namespace dostriage;
using namespace dostriage::experiment;

namespace fs = std::filesystem;

namespace {

Dataset make_domain(std::uint64_t seed, std::size_t n, double sep,
                    double scale, double offset, const std::string& name) {
  ingest::SynthSpec spec;
  spec.n_records = n;
  spec.dos_fraction = 0.2;
  spec.class_separation = sep;
  spec.scale.fill(scale);
  spec.offset.fill(offset);
  spec.rng_seed = seed;
  spec.domain = name;
  return ingest::synth_generate(spec);
}

TransferConfig small_config() {
  TransferConfig cfg;
  cfg.train.iterations = 30;
  cfg.train.rank_batch = 20;
  cfg.train.pair_batch = 8;
  cfg.train.top_k = 10;
  cfg.train.health.cm_window = 15;
  cfg.train.health.loss_tail_window = 15;
  cfg.replicates = 2;
  cfg.max_attempts = 4;
  cfg.n_train = 600;
  return cfg;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("baseline control on separable data is near-perfect") {
  Dataset tgt = make_domain(101, 2000, 3.0, 1.0, 0.0, "tgt");
  auto out = run_baseline(tgt, tgt, BaselineMethod::Control, 1200);
  CHECK(out.has_test);
  CHECK(out.f_train == 1.0);  // 1-NN memorizes its own store
  CHECK(out.f_test > 0.8);
}

TEST_CASE("baseline transfer: naive degrades under shift, coral recovers") {
  Dataset src = make_domain(103, 2400, 2.0, 1.0, 0.0, "src");
  Dataset tgt = make_domain(104, 2400, 2.0, 40.0, 500.0, "tgt");
  auto naive = run_baseline(src, tgt, BaselineMethod::Naive, 1200);
  auto coral = run_baseline(src, tgt, BaselineMethod::Coral, 1200);
  CHECK(coral.f_test > naive.f_test);
  CHECK(coral.f_test > 0.6);
}

TEST_CASE("run_transfer naive: structure and band shape") {
  Dataset src = make_domain(107, 900, 1.5, 1.0, 0.0, "src");
  Dataset tgt = make_domain(108, 700, 1.5, 3.0, 10.0, "tgt");
  TransferConfig cfg = small_config();
  auto out = run_transfer(src, tgt, TransferMethod::Naive, cfg);
  CHECK(out.quota_met);
  REQUIRE(out.attempts.size() == 2);  // unfiltered methods run the quota only
  CHECK(out.accepted == std::vector<std::size_t>{0, 1});
  CHECK(out.attempts[0].seed == cfg.seed_base);
  CHECK(out.attempts[1].seed == cfg.seed_base + 1);
  CHECK(out.band.replicate_count == 2);
  CHECK(out.band.mean.size() == tgt.size());
  for (const auto& a : out.attempts) {
    CHECK(a.curve.n_total == tgt.size());
    CHECK(a.curve.n_positive == 140);  // 0.2 of 700
    CHECK(a.rep.loss_trace.size() == cfg.train.iterations);
  }
}

TEST_CASE("run_transfer output is independent of the job count") {
  Dataset src = make_domain(109, 800, 1.5, 1.0, 0.0, "src");
  Dataset tgt = make_domain(110, 500, 1.5, 2.0, 5.0, "tgt");
  TransferConfig cfg = small_config();
  cfg.jobs = 1;
  auto serial = run_transfer(src, tgt, TransferMethod::Adversarial, cfg);
  cfg.jobs = 4;
  auto parallel = run_transfer(src, tgt, TransferMethod::Adversarial, cfg);
  REQUIRE(serial.attempts.size() == parallel.attempts.size());
  CHECK(serial.accepted == parallel.accepted);
  for (std::size_t i = 0; i < serial.attempts.size(); ++i) {
    CHECK(serial.attempts[i].seed == parallel.attempts[i].seed);
    CHECK(serial.attempts[i].rep.loss_trace == parallel.attempts[i].rep.loss_trace);
    CHECK(serial.attempts[i].curve.values == parallel.attempts[i].curve.values);
  }
}

TEST_CASE("run_transfer adversarial: accepted prefix is minimal and consistent") {
  Dataset src = make_domain(111, 800, 1.5, 1.0, 0.0, "src");
  Dataset tgt = make_domain(112, 500, 1.5, 2.0, 5.0, "tgt");
  TransferConfig cfg = small_config();
  cfg.replicates = 1;
  cfg.max_attempts = 6;
  auto out = run_transfer(src, tgt, TransferMethod::Adversarial, cfg);
  // Every attempt before the last must be rejected, otherwise the prefix
  // would not be minimal.
  if (out.quota_met) {
    REQUIRE(!out.attempts.empty());
    for (std::size_t i = 0; i + 1 < out.attempts.size(); ++i) {
      CHECK_FALSE(out.attempts[i].rep.verdict.accepted);
    }
    CHECK(out.attempts.back().rep.verdict.accepted);
    CHECK(out.accepted == std::vector<std::size_t>{out.attempts.size() - 1});
  } else {
    CHECK(out.attempts.size() == cfg.max_attempts);
  }
  for (std::size_t i : out.accepted) {
    CHECK(out.attempts[i].rep.verdict.accepted);
  }
  CHECK_THROWS_AS(
      run_transfer(src, tgt, TransferMethod::Adversarial,
                   [] {
                     TransferConfig c = small_config();
                     c.max_attempts = 1;
                     c.replicates = 2;
                     return c;
                   }()),
      InvalidSpec);
}

TEST_CASE("write_transfer_outputs emits the full artifact set") {
  Dataset src = make_domain(113, 800, 1.5, 1.0, 0.0, "src");
  Dataset tgt = make_domain(114, 400, 1.5, 2.0, 5.0, "tgt");
  TransferConfig cfg = small_config();
  auto out = run_transfer(src, tgt, TransferMethod::Coral, cfg);
  const std::string dir = "xfer_out_test";
  fs::remove_all(dir);
  write_transfer_outputs(out, TransferMethod::Coral, cfg, dir);

  CHECK(fs::exists(fs::path(dir) / "curves_coral.csv"));
  CHECK(fs::exists(fs::path(dir) / "band_coral.csv"));
  CHECK(fs::exists(fs::path(dir) / "run.meta"));
  // One curve row per target record per accepted replicate, plus header.
  CHECK(count_lines(fs::path(dir) / "curves_coral.csv") == 1 + 2 * tgt.size());
  CHECK(count_lines(fs::path(dir) / "band_coral.csv") == 1 + tgt.size());
  for (const auto& a : out.attempts) {
    CHECK(fs::exists(fs::path(dir) / ("cm_trace_" + std::to_string(a.seed) + ".csv")));
    CHECK(fs::exists(fs::path(dir) / ("loss_trace_" + std::to_string(a.seed) + ".csv")));
    CHECK(fs::exists(fs::path(dir) / ("model_" + std::to_string(a.seed) + ".txt")));
  }

  std::ifstream meta(fs::path(dir) / "run.meta");
  std::string text((std::istreambuf_iterator<char>(meta)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("method = coral") != std::string::npos);
  CHECK(text.find("adv_weight = 0") != std::string::npos);
  CHECK(text.find("quota_met = 1") != std::string::npos);
  CHECK(text.find("verdict_0 = ") != std::string::npos);
}

TEST_CASE("run_compare writes kuiper and density reports") {
  Dataset a = make_domain(115, 800, 1.0, 1.0, 0.0, "a");
  Dataset b = make_domain(116, 800, 1.0, 5.0, 100.0, "b");
  const std::string dir = "compare_out_test";
  fs::remove_all(dir);
  run_compare(a, b, dir, 50);
  CHECK(count_lines(fs::path(dir) / "kuiper.csv") == 1 + kFeatureCount);
  // 7 features x 2 sides x 50 bins, plus header.
  CHECK(count_lines(fs::path(dir) / "density.csv") == 1 + 7 * 2 * 50);

  std::ifstream meta(fs::path(dir) / "run.meta");
  std::string text((std::istreambuf_iterator<char>(meta)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("rows_a = 800") != std::string::npos);

  // Strongly shifted domains must reject similarity on every feature.
  std::ifstream kuiper(fs::path(dir) / "kuiper.csv");
  std::string line;
  std::getline(kuiper, line);  // header
  while (std::getline(kuiper, line)) {
    std::stringstream ss(line);
    std::string feature, v, p;
    std::getline(ss, feature, ',');
    std::getline(ss, v, ',');
    std::getline(ss, p, ',');
    CHECK(std::stod(p) < 0.95);
  }
}

TEST_CASE("cli binary smoke: synth, compare, baseline") {
  const fs::path cli = fs::path("..") / "tools" / "dostriage";
  if (!fs::exists(cli)) return;  // only meaningful in the standard build tree
  const std::string base = cli.string();
  fs::remove_all("cli_out_test");
  fs::create_directories("cli_out_test");

  CHECK(std::system((base + " synth --n 500 --dos-fraction 0.2 --seed 1"
                            " --domain a --out cli_out_test/a.csv")
                        .c_str()) == 0);
  CHECK(std::system((base + " synth --n 500 --dos-fraction 0.2 --seed 2"
                            " --scale 3 --offset 20 --domain b"
                            " --out cli_out_test/b.csv")
                        .c_str()) == 0);
  CHECK(fs::exists("cli_out_test/a.csv"));

  CHECK(std::system((base + " compare --a cli_out_test/a.csv"
                            " --b cli_out_test/b.csv --bins 20"
                            " --out cli_out_test/cmp")
                        .c_str()) == 0);
  CHECK(fs::exists("cli_out_test/cmp/kuiper.csv"));

  CHECK(std::system((base + " baseline --method control"
                            " --labeled cli_out_test/a.csv"
                            " --unlabeled cli_out_test/a.csv --n-train 300"
                            " --out cli_out_test/base")
                        .c_str()) == 0);
  CHECK(fs::exists("cli_out_test/base/fmeasure_control.csv"));

  // Runtime failures exit with the dedicated code.
  int rc = std::system((base + " compare --a missing.csv --b missing.csv"
                               " --out cli_out_test/cmp2 2>/dev/null")
                           .c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}
