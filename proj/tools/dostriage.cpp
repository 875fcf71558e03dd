// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver for the DoS triage transfer toolkit.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "dostriage/errors.hpp"
#include "dostriage/experiment.hpp"
#include "dostriage/flow_ingest.hpp"

namespace {

using namespace dostriage;

ingest::Schema parse_schema(const std::string& s) {
  if (s == "unsw") return ingest::Schema::UnswNb15;
  if (s == "cicids") return ingest::Schema::Cicids2017;
  if (s == "canonical") return ingest::Schema::Canonical;
  throw InvalidSpec("unknown schema: " + s);
}

Dataset load_canonical(const std::string& path) {
  return ingest::ingest_csv(path, ingest::Schema::Canonical).dataset;
}

std::array<double, kFeatureCount> broadcast7(const std::vector<double>& v,
                                             const char* what) {
  std::array<double, kFeatureCount> out{};
  if (v.size() == 1) {
    out.fill(v[0]);
  } else if (v.size() == kFeatureCount) {
    std::copy(v.begin(), v.end(), out.begin());
  } else {
    throw InvalidSpec(std::string(what) + " expects 1 or 7 values");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DoS triage domain-transfer toolkit"};
  app.require_subcommand(1);
  app.set_config("--config")->description(
      "flat key = value file; command-line flags override file values");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic flow dataset");
  ingest::SynthSpec spec;
  spec.n_records = 10000;
  std::vector<double> scale = {1.0}, offset = {0.0};
  std::string synth_out;
  synth->add_option("--n", spec.n_records, "number of records");
  synth->add_option("--dos-fraction", spec.dos_fraction, "DoS class fraction");
  synth->add_option("--class-separation", spec.class_separation,
                    "log-space displacement of the DoS class");
  synth->add_option("--scale", scale, "per-feature scale (1 or 7 values)");
  synth->add_option("--offset", offset, "per-feature offset (1 or 7 values)");
  synth->add_option("--seed", spec.rng_seed, "rng seed");
  synth->add_option("--domain", spec.domain, "domain tag");
  synth->add_option("--out", synth_out, "output canonical CSV")->required();

  // ingest
  auto* ing = app.add_subcommand("ingest", "convert a flow CSV to canonical form");
  std::string ing_schema = "canonical", ing_in, ing_out;
  ing->add_option("--schema", ing_schema, "unsw | cicids | canonical");
  ing->add_option("--in", ing_in, "input CSV")->required();
  ing->add_option("--out", ing_out, "output canonical CSV")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "per-feature Kuiper + density report");
  std::string cmp_a, cmp_b, cmp_out;
  std::size_t cmp_bins = 1000;
  cmp->add_option("--a", cmp_a, "canonical CSV, domain A")->required();
  cmp->add_option("--b", cmp_b, "canonical CSV, domain B")->required();
  cmp->add_option("--bins", cmp_bins, "density grid size");
  cmp->add_option("--out", cmp_out, "output directory")->required();

  // baseline
  auto* base = app.add_subcommand("baseline", "1-NN transfer F-measure");
  std::string base_labeled, base_unlabeled, base_method = "control", base_out;
  std::size_t base_n_train = 80000;
  base->add_option("--labeled", base_labeled, "labeled-domain canonical CSV")
      ->required();
  base->add_option("--unlabeled", base_unlabeled, "target-domain canonical CSV")
      ->required();
  base->add_option("--method", base_method, "control | naive | coral");
  base->add_option("--n-train", base_n_train, "temporal train split size");
  base->add_option("--out", base_out, "output directory")->required();

  // transfer
  auto* xfer = app.add_subcommand("transfer", "ranking-model transfer experiment");
  std::string x_labeled, x_unlabeled, x_method = "adversarial", x_out;
  experiment::TransferConfig xcfg;
  xfer->add_option("--labeled", x_labeled, "labeled-domain canonical CSV")
      ->required();
  xfer->add_option("--unlabeled", x_unlabeled, "target-domain canonical CSV")
      ->required();
  xfer->add_option("--method", x_method, "naive | coral | adversarial");
  xfer->add_option("--replicates", xcfg.replicates, "accepted replicates required");
  xfer->add_option("--max-attempts", xcfg.max_attempts, "seeds tried before giving up");
  xfer->add_option("--seed-base", xcfg.seed_base, "first replicate seed");
  xfer->add_option("--jobs", xcfg.jobs, "concurrent replicate tasks");
  xfer->add_option("--n-train", xcfg.n_train, "temporal train split size");
  xfer->add_option("--learning-rate", xcfg.train.learning_rate, "gradient step size");
  xfer->add_option("--iterations", xcfg.train.iterations, "training iterations");
  xfer->add_option("--rank-batch", xcfg.train.rank_batch, "ranking batch size");
  xfer->add_option("--pair-batch", xcfg.train.pair_batch, "Siamese pair batch size");
  xfer->add_option("--top-k", xcfg.train.top_k, "ListMLE truncation");
  xfer->add_option("--margin", xcfg.train.margin, "contrastive margin");
  xfer->add_option("--adv-weight", xcfg.train.adv_weight, "reversal scale");
  xfer->add_option("--cm-window", xcfg.train.health.cm_window,
                   "iterations between congruence recordings");
  xfer->add_flag("--strict-denominator", xcfg.train.strict_denominator,
                 "exclude each item from its own Plackett-Luce denominator");
  xfer->add_option("--out", x_out, "output directory")->required();

  // report
  auto* rep = app.add_subcommand("report", "rebuild band CSV from replicate curves");
  std::string rep_in, rep_method = "adversarial";
  rep->add_option("--in", rep_in, "directory holding curves_<method>.csv")
      ->required();
  rep->add_option("--method", rep_method, "naive | coral | adversarial");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      spec.scale = broadcast7(scale, "--scale");
      spec.offset = broadcast7(offset, "--offset");
      ingest::write_canonical(ingest::synth_generate(spec), synth_out);
    } else if (*ing) {
      auto result = ingest::ingest_csv(ing_in, parse_schema(ing_schema));
      ingest::write_canonical(result.dataset, ing_out);
      std::cerr << "parsed " << result.parsed_rows << " rows, dropped "
                << result.dropped_rows << "\n";
    } else if (*cmp) {
      experiment::run_compare(load_canonical(cmp_a), load_canonical(cmp_b),
                              cmp_out, cmp_bins);
    } else if (*base) {
      experiment::BaselineMethod m;
      if (base_method == "control") m = experiment::BaselineMethod::Control;
      else if (base_method == "naive") m = experiment::BaselineMethod::Naive;
      else if (base_method == "coral") m = experiment::BaselineMethod::Coral;
      else throw InvalidSpec("unknown baseline method: " + base_method);
      auto outcome = experiment::run_baseline(load_canonical(base_labeled),
                                              load_canonical(base_unlabeled), m,
                                              base_n_train);
      experiment::write_baseline_outputs(outcome, m, base_out);
    } else if (*xfer) {
      experiment::TransferMethod m;
      if (x_method == "naive") m = experiment::TransferMethod::Naive;
      else if (x_method == "coral") m = experiment::TransferMethod::Coral;
      else if (x_method == "adversarial") m = experiment::TransferMethod::Adversarial;
      else throw InvalidSpec("unknown transfer method: " + x_method);
      auto outcome = experiment::run_transfer(load_canonical(x_labeled),
                                              load_canonical(x_unlabeled), m, xcfg);
      experiment::write_transfer_outputs(outcome, m, xcfg, x_out);
      if (!outcome.quota_met) {
        std::cerr << "insufficient accepted replicates: "
                  << outcome.accepted.size() << "/" << xcfg.replicates << "\n";
        return 1;
      }
    } else if (*rep) {
      // Re-aggregate per-replicate curves into the band file.
      std::string curves_path = rep_in + "/curves_" + rep_method + ".csv";
      auto ds = std::ifstream(curves_path);
      if (!ds) throw IoError("cannot open " + curves_path);
      std::string line;
      std::getline(ds, line);  // header
      std::vector<eval::RollingTopNCurve> curves;
      std::string last_id;
      std::vector<double> values;
      auto flush = [&] {
        if (values.empty()) return;
        eval::RollingTopNCurve c;
        c.values = values;
        c.n_total = values.size();
        c.n_positive = static_cast<std::size_t>(
            values.back() * static_cast<double>(values.size()) + 0.5);
        curves.push_back(std::move(c));
        values.clear();
      };
      while (std::getline(ds, line)) {
        std::size_t c1 = line.find(','), c2 = line.rfind(',');
        if (c1 == std::string::npos || c2 == c1) continue;
        std::string id = line.substr(c2 + 1);
        if (id != last_id) {
          flush();
          last_id = id;
        }
        values.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
      }
      flush();
      if (curves.empty()) throw EmptyInput("no curves in " + curves_path);
      auto band = eval::aggregate_replicates(curves);
      std::string band_path = rep_in + "/band_" + rep_method + ".csv";
      std::ofstream out(band_path, std::ios::binary);
      if (!out) throw IoError("cannot write " + band_path);
      out << "n,mean,sigma,upper,lower\n";
      char buf[48];
      for (std::size_t n = 0; n < band.mean.size(); ++n) {
        out << (n + 1) << ',';
        std::snprintf(buf, sizeof(buf), "%.9g,", band.mean[n]);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%.9g,", band.sigma[n]);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%.9g,", band.upper[n]);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%.9g\n", band.lower[n]);
        out << buf;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
