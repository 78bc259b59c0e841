// Copyright 2026 The Plum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plum/report.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace plum {
namespace {

// Hundredths of a percent, rounded half up, from exact integers.
int64_t RateHundredths(const ConsistencyStats& s) {
  return (s.passed * 20000 + s.total) / (2 * s.total);
}

// Code points, so "—" pads like one column.
size_t DisplayWidth(const std::string& s) {
  size_t len = 0;
  for (unsigned char c : s) len += (c & 0xC0) != 0x80;
  return len;
}

std::string Pad(const std::string& s, size_t width, bool right) {
  size_t len = DisplayWidth(s);
  if (len >= width) return s;
  std::string fill(width - len, ' ');
  return right ? fill + s : s + fill;
}

std::string FormatEdge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string FormatRate(const ConsistencyStats& stats) {
  if (!stats.defined()) return "—";
  int64_t h = RateHundredths(stats);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", static_cast<long long>(h / 100),
                static_cast<long long>(h % 100));
  return buf;
}

std::string ConsistencyTable(const std::vector<ConsistencyRow>& rows) {
  std::vector<std::vector<std::string>> cells = {{"dataset", "total", "passed", "rate%"}};
  for (const auto& r : rows) {
    cells.push_back({r.dataset, std::to_string(r.stats.total), std::to_string(r.stats.passed),
                     FormatRate(r.stats)});
  }
  std::vector<size_t> width(4, 0);
  for (const auto& row : cells) {
    for (size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], DisplayWidth(row[c]));
  }
  std::string out;
  for (const auto& row : cells) {
    for (size_t c = 0; c < 4; ++c) {
      if (c) out += "  ";
      out += Pad(row[c], width[c], c > 0);
    }
    out += "\n";
  }
  return out;
}

Json ConsistencyReport(const std::vector<ConsistencyRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["dataset"] = r.dataset;
    j["total"] = r.stats.total;
    j["passed"] = r.stats.passed;
    j["rate"] = r.stats.defined() ? Json(static_cast<double>(RateHundredths(r.stats)) / 100.0)
                                  : Json(nullptr);
    j["rate_text"] = FormatRate(r.stats);
    out.push_back(j);
  }
  return out;
}

PassRatioHistogram MakeHistogram(const std::vector<std::pair<int64_t, int64_t>>& ratios,
                                 int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  PassRatioHistogram h;
  for (int i = 0; i <= bins; ++i) h.bin_edges.push_back(static_cast<double>(i) / bins);
  h.counts.assign(static_cast<size_t>(bins), 0);
  for (const auto& [p, n] : ratios) {
    if (n <= 0) {
      ++h.undefined;
      continue;
    }
    if (p < 0 || p > n) throw std::invalid_argument("ratio numerator out of range");
    // ceil(p * bins / n) - 1, clamped at 0.
    int64_t idx = (p * bins + n - 1) / n - 1;
    ++h.counts[static_cast<size_t>(std::max<int64_t>(0, idx))];
  }
  return h;
}

PassRatioHistogram MakeHistogram(const std::vector<InstructionGroup>& groups, int bins) {
  std::vector<std::pair<int64_t, int64_t>> ratios;
  ratios.reserve(groups.size());
  for (const auto& g : groups) {
    ratios.emplace_back(static_cast<int64_t>(CountPositives(g)),
                        static_cast<int64_t>(g.candidates.size()));
  }
  return MakeHistogram(ratios, bins);
}

std::string HistogramCsv(const PassRatioHistogram& h) {
  std::string out = "bin_low,bin_high,count\n";
  for (size_t i = 0; i < h.counts.size(); ++i) {
    out += FormatEdge(h.bin_edges[i]) + "," + FormatEdge(h.bin_edges[i + 1]) + "," +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

DatasetSummary SummarizeDatasets(const std::string& dpo_path, const std::string& kto_path) {
  DatasetSummary s;
  std::set<std::string> dpo_ids;
  std::set<std::string> kto_ids;
  auto field = [](const std::string& path, const JsonlRecord& r, const char* name) {
    if (!r.value.contains(name) || !r.value[name].is_string()) {
      throw JsonlError(path, r.line, std::string("missing string field '") + name + "'");
    }
    return r.value[name].get<std::string>();
  };
  if (FileExists(dpo_path)) {
    for (const auto& r : ReadJsonl(dpo_path)) {
      dpo_ids.insert(field(dpo_path, r, "instruction_id"));
      field(dpo_path, r, "prompt");
      field(dpo_path, r, "chosen");
      field(dpo_path, r, "rejected");
      ++s.pairs;
    }
  }
  if (FileExists(kto_path)) {
    for (const auto& r : ReadJsonl(kto_path)) {
      kto_ids.insert(field(kto_path, r, "instruction_id"));
      field(kto_path, r, "prompt");
      field(kto_path, r, "completion");
      std::string label = field(kto_path, r, "label");
      if (label == "desirable") {
        ++s.desirable;
      } else if (label == "undesirable") {
        ++s.undesirable;
      } else {
        throw JsonlError(kto_path, r.line, "unknown label '" + label + "'");
      }
      ++s.kto_records;
    }
  }
  s.dpo_instructions = static_cast<int64_t>(dpo_ids.size());
  s.kto_instructions = static_cast<int64_t>(kto_ids.size());
  dpo_ids.insert(kto_ids.begin(), kto_ids.end());
  s.distinct_instructions = static_cast<int64_t>(dpo_ids.size());
  return s;
}

Json ToJson(const DatasetSummary& s) {
  Json j;
  j["pairs"] = s.pairs;
  j["kto_records"] = s.kto_records;
  j["desirable"] = s.desirable;
  j["undesirable"] = s.undesirable;
  j["dpo_instructions"] = s.dpo_instructions;
  j["kto_instructions"] = s.kto_instructions;
  j["distinct_instructions"] = s.distinct_instructions;
  return j;
}

void WriteStatsDir(const std::string& dir, const std::vector<ConsistencyRow>& rows,
                   const PassRatioHistogram& histogram, const DatasetSummary& summary,
                   const Json& extra) {
  MakeDirs(dir);
  WriteFileAtomic(dir + "/consistency.json", ConsistencyReport(rows).dump(2) + "\n");
  WriteFileAtomic(dir + "/pass_ratio.csv", HistogramCsv(histogram));
  Json j;
  j["datasets"] = ToJson(summary);
  Json hist;
  hist["bin_edges"] = histogram.bin_edges;
  hist["counts"] = histogram.counts;
  hist["undefined"] = histogram.undefined;
  j["pass_ratio_histogram"] = hist;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  WriteFileAtomic(dir + "/summary.json", j.dump(2) + "\n");
}

}  // namespace plum
