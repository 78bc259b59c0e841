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

#ifndef PLUM_REPORT_H_
#define PLUM_REPORT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plum/consistency.h"
#include "plum/preference.h"
#include "plum/util/io.h"

namespace plum {

struct ConsistencyRow {
  std::string dataset;
  ConsistencyStats stats;
};

// Rate rounded half away from zero to two decimals, e.g. "63.76", or "—"
// when the total is zero.
std::string FormatRate(const ConsistencyStats& stats);

std::string ConsistencyTable(const std::vector<ConsistencyRow>& rows);
Json ConsistencyReport(const std::vector<ConsistencyRow>& rows);

struct PassRatioHistogram {
  std::vector<double> bin_edges;  // bins + 1 entries from 0 to 1
  std::vector<int64_t> counts;
  int64_t undefined = 0;  // empty groups, not binned
};

// Uniform right-closed bins; bin i covers (i/b, (i+1)/b] and bin 0 also
// takes 0. Each entry is (positives, sampled).
PassRatioHistogram MakeHistogram(const std::vector<std::pair<int64_t, int64_t>>& ratios,
                                 int bins);
PassRatioHistogram MakeHistogram(const std::vector<InstructionGroup>& groups, int bins);

std::string HistogramCsv(const PassRatioHistogram& h);

struct DatasetSummary {
  int64_t pairs = 0;
  int64_t kto_records = 0;
  int64_t desirable = 0;
  int64_t undesirable = 0;
  int64_t dpo_instructions = 0;
  int64_t kto_instructions = 0;
  int64_t distinct_instructions = 0;
};

// Missing files count as empty. Throws JsonlError with the line number of
// a malformed record.
DatasetSummary SummarizeDatasets(const std::string& dpo_path, const std::string& kto_path);

Json ToJson(const DatasetSummary& s);

// Writes consistency.json, pass_ratio.csv and summary.json into `dir`.
// `extra` is merged into summary.json.
void WriteStatsDir(const std::string& dir, const std::vector<ConsistencyRow>& rows,
                   const PassRatioHistogram& histogram, const DatasetSummary& summary,
                   const Json& extra);

}  // namespace plum

#endif  // PLUM_REPORT_H_
