// Copyright 2026 The QFR Lab Authors. All rights reserved.
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

#ifndef QFR_HARNESS_H_
#define QFR_HARNESS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfr/eval.h"
#include "qfr/game.h"
#include "qfr/solvers.h"

namespace qfr {

struct RunConfig {
  std::string game = "kuhn";  // Built-in name or JSON file path.
  Algorithm algorithm = Algorithm::kQfr;
  FeedbackKind kind = FeedbackKind::kCounterfactual;
  RegFamily reg = RegFamily::kEntropy;
  double eta = 0.01;
  ScheduleMode schedule = ScheduleMode::kUniform;
  double schedule_ratio = 1.0;
  double tau = 0.001;
  double gamma0 = 0.001;
  int64_t iters = 1000;
  int64_t eval_every = 100;
  uint64_t seed = 0;
  int reps = 1;
  int threads = 1;
  std::string out;  // CSV path; empty for none.
  bool uniform_nu = false;
  bool timing = false;  // Fill wall_ms; off keeps the CSV deterministic.
  double explore = 0.6;
  // tau <- tau * anneal_factor every anneal_every iterations; 0 disables.
  int64_t anneal_every = 0;
  double anneal_factor = 1.0;
  // When set, rows carry the Bregman distance of the center to it.
  std::shared_ptr<const BehavioralProfile> reference;

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
};

struct ConvergenceRow {
  uint64_t seed = 0;
  int64_t iter = 0;
  double expl_last = 0.0;
  std::optional<double> expl_avg;
  std::optional<double> reg_gap;  // Empty when the iterate is off the floors.
  std::optional<double> bregman_ref;
  std::optional<double> wall_ms;
};

struct SeedRun {
  uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;
  MultiplierMonitor monitor;
  BehavioralProfile last;     // Final iterate.
  BehavioralProfile average;  // Final average, or the final center.
};

struct ConvergenceRecord {
  std::vector<SeedRun> runs;  // Ordered by seed.
};

SolverParams ParamsFromConfig(const GameTree& tree, const RunConfig& config);
ConstantsParams ConstantsFromConfig(const RunConfig& config);

// One repetition with the given seed.
SeedRun RunSeed(const GameTree& tree, const RunConfig& config, uint64_t seed);

// Seeds config.seed, config.seed + 1, ... on up to config.threads workers.
ConvergenceRecord Run(const GameTree& tree, const RunConfig& config);

// Header plus one line per row, in seed order.
void WriteCsv(std::ostream& os, const ConvergenceRecord& record);
void WriteCsvFile(const std::string& path, const ConvergenceRecord& record);

struct GridSpec {
  std::vector<double> eta;
  std::vector<double> tau;
  std::vector<double> gamma;
  std::vector<RegFamily> reg;

  int64_t num_cells() const {
    return static_cast<int64_t>(eta.size() * tau.size() * gamma.size() *
                                reg.size());
  }
};

// Preset QFR grid: eta, tau and gamma over decades, entropy regularizer.
GridSpec PresetGrid();
// JSON object with "eta", "tau", "gamma", "reg" arrays, or {"preset":
// "paper-grid"}. A bare "paper-grid" string is accepted as well.
GridSpec ParseGridSpec(const std::string& json_text);
GridSpec LoadGridSpec(const std::string& path_or_name);

struct GridCell {
  int64_t index = 0;  // Lexicographic position: eta, tau, gamma, reg.
  double eta = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  RegFamily reg = RegFamily::kEntropy;
  double score = 0.0;  // Mean over seeds of the final expl_last.
  std::vector<double> finals;
  std::string error;  // Non-empty when the cell threw.
};

struct GridResult {
  std::vector<GridCell> ranked;  // Best first; NaN scores last.
  const GridCell& winner() const { return ranked.front(); }
};

GridResult RunGrid(const GameTree& tree, const RunConfig& base,
                   const GridSpec& spec);
void WriteGridTable(std::ostream& os, const GridResult& result);

// Constants and condition report for the config's schedule.
void PrintConstants(std::ostream& os, const GameTree& tree,
                    const RunConfig& config, bool json);

// Profile files: {"infosets": [{"label": L, "probs": [...]}, ...]} in infoset
// order. Labels are checked when present.
BehavioralProfile ParseProfile(const GameTree& tree,
                               const std::string& json_text);
BehavioralProfile LoadProfileFile(const GameTree& tree,
                                  const std::string& path);
std::string SerializeProfile(const GameTree& tree,
                             const BehavioralProfile& profile);

}  // namespace qfr

#endif  // QFR_HARNESS_H_
