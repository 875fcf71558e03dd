// Copyright (c) 2026 dostriage contributors
// SPDX-License-Identifier: Apache-2.0
#include "dostriage/flow_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "dostriage/errors.hpp"
#include "dostriage/rng.hpp"

namespace dostriage::ingest {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Header names are matched after trimming and mapping spaces to underscores,
// which absorbs the stray padding present in the CICIDS2017 release.
std::string normalize_header(const std::string& s) {
  std::string t = trim(s);
  for (char& c : t) {
    if (c == ' ') c = '_';
  }
  return t;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_double(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

// UNSW NB-15 attack categories other than DoS are pooled into normal traffic.
Label unsw_label(const std::string& raw) {
  std::string s = trim(raw);
  if (s == "DoS") return Label::Dos;
  static const std::vector<std::string> pooled = {
      "",        "Normal",        "normal",   "Fuzzers",  "Analysis",
      "Backdoor", "Backdoors",    "Exploits", "Generic",  "Reconnaissance",
      "Shellcode", "Worms"};
  for (const auto& p : pooled) {
    if (s == p) return Label::Normal;
  }
  throw UnknownLabel(s);
}

Label cicids_label(const std::string& raw) {
  std::string s = trim(raw);
  static const std::vector<std::string> dos = {
      "DoS Hulk", "DoS GoldenEye", "DoS slowloris", "DoS Slowhttptest",
      "DDoS",     "DDoS LOIT"};
  static const std::vector<std::string> normal = {
      "BENIGN",       "Bot",          "PortScan",   "FTP-Patator",
      "SSH-Patator",  "Heartbleed",   "Infiltration"};
  for (const auto& d : dos) {
    if (s == d) return Label::Dos;
  }
  for (const auto& n : normal) {
    if (s == n) return Label::Normal;
  }
  // The three web attack labels ship with inconsistent punctuation across
  // mirrors; match on the stable prefix.
  if (s.rfind("Web Attack", 0) == 0) return Label::Normal;
  throw UnknownLabel(s);
}

Label canonical_label(const std::string& raw) {
  std::string s = trim(raw);
  if (s == "DoS") return Label::Dos;
  if (s == "Normal") return Label::Normal;
  throw UnknownLabel(s);
}

struct ColumnMap {
  // column index per canonical feature, plus label (and domain for canonical)
  std::array<std::size_t, kFeatureCount> feature_col{};
  // unit factor applied to the native value to reach the canonical unit
  std::array<double, kFeatureCount> unit_factor{};
  std::size_t label_col = 0;
  std::optional<std::size_t> domain_col;
};

std::size_t require_column(const std::vector<std::string>& header,
                           const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingColumn(name);
}

// CICIDS2017 native column -> canonical feature and unit factor:
//   Flow_Duration        [us]      -> dur    [s]        x 1e-6
//   Total_Fwd_Packets    [count]   -> spkts             x 1
//   Total_Backward_Packets [count] -> dpkts             x 1
//   Flow_Bytes/s         [B/s]     -> load   [bit/s]    x 8
//   Flow_Packets/s       [pkt/s]   -> rate              x 1
//   Fwd_IAT_Mean         [us]      -> sinpkt [ms]       x 1e-3
//   Bwd_IAT_Mean         [us]      -> dinpkt [ms]       x 1e-3
ColumnMap build_map(Schema schema, const std::vector<std::string>& header) {
  ColumnMap m;
  m.unit_factor.fill(1.0);
  switch (schema) {
    case Schema::Canonical:
    case Schema::UnswNb15: {
      for (int f = 0; f < kFeatureCount; ++f) {
        m.feature_col[static_cast<std::size_t>(f)] =
            require_column(header, feature_names()[static_cast<std::size_t>(f)]);
      }
      if (schema == Schema::Canonical) {
        m.label_col = require_column(header, "label");
        m.domain_col = require_column(header, "domain");
      } else {
        m.label_col = require_column(header, "attack_cat");
      }
      break;
    }
    case Schema::Cicids2017: {
      const std::array<std::pair<std::string, double>, kFeatureCount> native = {{
          {"Flow_Duration", 1e-6},
          {"Total_Fwd_Packets", 1.0},
          {"Total_Backward_Packets", 1.0},
          {"Flow_Bytes/s", 8.0},
          {"Flow_Packets/s", 1.0},
          {"Fwd_IAT_Mean", 1e-3},
          {"Bwd_IAT_Mean", 1e-3},
      }};
      for (int f = 0; f < kFeatureCount; ++f) {
        m.feature_col[static_cast<std::size_t>(f)] =
            require_column(header, native[static_cast<std::size_t>(f)].first);
        m.unit_factor[static_cast<std::size_t>(f)] =
            native[static_cast<std::size_t>(f)].second;
      }
      m.label_col = require_column(header, "Label");
      break;
    }
  }
  return m;
}

std::string default_domain(Schema schema) {
  switch (schema) {
    case Schema::UnswNb15:
      return "unsw";
    case Schema::Cicids2017:
      return "cicids";
    case Schema::Canonical:
      return "";
  }
  return "";
}

}  // namespace

IngestResult ingest_csv(const std::string& path, Schema schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile("empty file: " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = normalize_header(h);
  ColumnMap map = build_map(schema, header);

  IngestResult result;
  result.dataset.domain = default_domain(schema);
  std::uint64_t seq = 0;
  bool saw_data_row = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    saw_data_row = true;
    std::vector<std::string> cells = split_csv_line(line);
    std::size_t max_col = map.label_col;
    for (auto c : map.feature_col) max_col = std::max(max_col, c);
    if (map.domain_col) max_col = std::max(max_col, *map.domain_col);
    if (cells.size() <= max_col) {
      ++result.dropped_rows;
      continue;
    }

    FlowRecord rec;
    bool ok = true;
    for (int f = 0; f < kFeatureCount; ++f) {
      auto fi = static_cast<std::size_t>(f);
      auto v = parse_double(cells[map.feature_col[fi]]);
      if (!v) {
        ok = false;
        break;
      }
      rec.features[fi] = *v * map.unit_factor[fi];
    }
    if (!ok) {
      ++result.dropped_rows;
      continue;
    }
    switch (schema) {
      case Schema::UnswNb15:
        rec.label = unsw_label(cells[map.label_col]);
        break;
      case Schema::Cicids2017:
        rec.label = cicids_label(cells[map.label_col]);
        break;
      case Schema::Canonical:
        rec.label = canonical_label(cells[map.label_col]);
        break;
    }
    if (map.domain_col) {
      rec.domain = trim(cells[*map.domain_col]);
      if (result.dataset.records.empty()) result.dataset.domain = rec.domain;
    } else {
      rec.domain = result.dataset.domain;
    }
    rec.seq = seq++;
    result.dataset.records.push_back(std::move(rec));
    ++result.parsed_rows;
  }
  if (!saw_data_row && result.parsed_rows == 0 && result.dropped_rows == 0) {
    throw EmptyFile("no data rows: " + path);
  }
  return result;
}

void write_canonical(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "dur,spkts,dpkts,load,rate,sinpkt,dinpkt,label,domain\n";
  char buf[64];
  for (const auto& r : ds.records) {
    for (int f = 0; f < kFeatureCount; ++f) {
      std::snprintf(buf, sizeof(buf), "%.9g", r.features[static_cast<std::size_t>(f)]);
      out << buf << ',';
    }
    out << label_name(r.label) << ',' << r.domain << '\n';
  }
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             std::size_t n_train) {
  if (ds.empty()) throw EmptyInput("train_test_split: empty dataset");
  std::size_t cut = std::min(n_train, ds.size());
  Dataset train, test;
  train.domain = test.domain = ds.domain;
  train.records.assign(ds.records.begin(),
                       ds.records.begin() + static_cast<std::ptrdiff_t>(cut));
  test.records.assign(ds.records.begin() + static_cast<std::ptrdiff_t>(cut),
                      ds.records.end());
  return {std::move(train), std::move(test)};
}

namespace {

// Log-space base location/spread per feature, loosely shaped like scaled
// flow statistics (duration, packet counts, load, rate, inter-packet times).
constexpr std::array<double, kFeatureCount> kLogMean = {
    -0.5, 2.3, 2.0, 6.0, 3.0, 1.2, 1.5};
constexpr std::array<double, kFeatureCount> kLogSd = {
    0.8, 0.7, 0.7, 1.0, 0.8, 0.6, 0.6};
// Fixed displacement direction for the DoS class (mixed signs: attacks run
// longer and heavier but with tighter inter-packet spacing).
constexpr std::array<double, kFeatureCount> kClassDir = {
    0.55, 0.45, 0.35, 0.5, 0.45, -0.3, -0.35};

}  // namespace

Dataset synth_generate(const SynthSpec& spec) {
  if (spec.n_records == 0) throw InvalidSpec("n_records must be positive");
  if (!(spec.dos_fraction > 0.0 && spec.dos_fraction < 1.0)) {
    throw InvalidSpec("dos_fraction must lie in (0,1)");
  }
  for (double s : spec.scale) {
    if (!(s > 0.0)) throw InvalidSpec("scale entries must be strictly positive");
  }
  if (spec.class_separation < 0.0) {
    throw InvalidSpec("class_separation must be nonnegative");
  }

  const std::size_t n = spec.n_records;
  const auto n_dos = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * spec.dos_fraction));
  const std::size_t n_normal = n - n_dos;

  Rng rng(spec.rng_seed);

  // Capture-like timeline: benign preamble, then an attack window where the
  // DoS burst interleaves with background traffic.
  std::vector<Label> order(n, Label::Normal);
  std::size_t preamble = n_normal / 2;
  std::size_t window = n - preamble;
  std::vector<std::size_t> slots(window);
  for (std::size_t i = 0; i < window; ++i) slots[i] = preamble + i;
  for (std::size_t i = window; i > 1; --i) {
    std::swap(slots[i - 1], slots[rng.index(i)]);
  }
  for (std::size_t i = 0; i < n_dos && i < window; ++i) {
    order[slots[i]] = Label::Dos;
  }

  Dataset ds;
  ds.domain = spec.domain;
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FlowRecord rec;
    rec.label = order[i];
    rec.domain = spec.domain;
    rec.seq = i;
    const double sep = rec.label == Label::Dos ? spec.class_separation : 0.0;
    for (int f = 0; f < kFeatureCount; ++f) {
      auto fi = static_cast<std::size_t>(f);
      double logv = kLogMean[fi] + sep * kClassDir[fi] + kLogSd[fi] * rng.normal();
      double v = spec.scale[fi] * std::exp(logv) + spec.offset[fi];
      rec.features[fi] = std::max(v, 0.0);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace dostriage::ingest
