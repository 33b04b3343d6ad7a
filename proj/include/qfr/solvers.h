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

#ifndef QFR_SOLVERS_H_
#define QFR_SOLVERS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qfr/game.h"
#include "qfr/regularizers.h"
#include "qfr/strategy.h"
#include "qfr/values.h"

namespace qfr {

enum class Algorithm {
  kQfr,            // Full-information optimistic update.
  kQfrStochastic,  // One sampled trajectory per iteration.
  kQfrLazy,        // Dilated variant with timestamped catch-up.
  kPga,
  kCfr,
  kCfrPlus,
  kOsMccfr,
  kMmd,            // Reconstructed baseline: single prox step.
  kMmdStochastic,
};

const char* AlgorithmName(Algorithm algo);
Algorithm ParseAlgorithm(const std::string& name);

struct SolverParams {
  Algorithm algorithm = Algorithm::kQfr;
  FeedbackKind kind = FeedbackKind::kCounterfactual;
  RegularizerSpec reg;
  double tau = 0.0;
  std::vector<double> eta;  // Per infoset.
  Perturbation perturbation;
  double explore = 0.6;  // Outcome-sampling exploration.
};

// Parameters with uniform eta and gamma_0 perturbation.
SolverParams MakeParams(const GameTree& tree, Algorithm algo,
                        FeedbackKind kind, RegFamily family, double eta,
                        double tau, double gamma0, bool uniform_nu = false);

// Tracks m_s against [M1, M2] (hard) and consecutive changes against
// C_s^- eta_s^anc (soft).
struct MultiplierMonitor {
  bool enabled = false;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> step_bound;  // Per infoset; empty disables soft check.
  std::vector<double> last_m;
  int64_t observations = 0;
  int64_t hard_violations = 0;
  int64_t soft_violations = 0;
  double worst_ratio = 0.0;  // max |dm| / bound seen.

  void Observe(const std::vector<double>& m, bool consecutive);
};

struct SolverState {
  BehavioralProfile current;  // pi^(t)
  BehavioralProfile center;   // Optimistic center.
  std::vector<int64_t> stamp;        // Last processed iteration (lazy).
  std::vector<double> lazy_weight;   // tau0 of the last real update (lazy).
  std::vector<double> regrets;       // Slot layout.
  std::vector<double> average;       // Reach-weighted strategy sums.
  bool has_average = false;
  int64_t t = 1;  // Index of the current iterate.
  MultiplierMonitor monitor;
};

SolverState InitState(const GameTree& tree, const SolverParams& params);

// Normalized average strategy; uniform where nothing was accumulated.
BehavioralProfile AverageProfile(const GameTree& tree,
                                 const SolverState& state);

void QfrFullStep(SolverState& state, const GameTree& tree,
                 const SolverParams& params);
void QfrStochasticStep(SolverState& state, const GameTree& tree,
                       const SolverParams& params, Rng& rng);
void LazyQfrStep(SolverState& state, const GameTree& tree,
                 const SolverParams& params, Rng& rng);
// Reference for LazyQfrStep: every infoset updated every iteration, unvisited
// ones with zero feedback.
void EagerDilatedStep(SolverState& state, const GameTree& tree,
                      const SolverParams& params, Rng& rng);
// Brings every lazy infoset up to date (all catch-up steps applied).
void LazySynchronize(SolverState& state, const GameTree& tree,
                     const SolverParams& params);
void PgaStep(SolverState& state, const GameTree& tree,
             const SolverParams& params);
void CfrStep(SolverState& state, const GameTree& tree);
void CfrPlusStep(SolverState& state, const GameTree& tree);
void OsMccfrStep(SolverState& state, const GameTree& tree, Rng& rng,
                 double explore);
void MmdStep(SolverState& state, const GameTree& tree,
             const SolverParams& params);
void MmdStochasticStep(SolverState& state, const GameTree& tree,
                       const SolverParams& params, Rng& rng);

// Dispatch on params.algorithm.
void Step(SolverState& state, const GameTree& tree, const SolverParams& params,
          Rng& rng);

// Importance-weighted sample of the regret increment for OsMccfrStep, exposed
// for testing: per slot, zero outside visited infosets.
std::vector<double> OsMccfrRegretSample(const GameTree& tree,
                                        const BehavioralProfile& profile,
                                        Rng& rng, double explore);
// sum_{s in S_i} max_a (R(s, a))^+ from the cumulative regrets.
double RegretBound(const GameTree& tree, const SolverState& state, int player);

// --- Learning rates and constants -------------------------------------------

enum class ScheduleMode { kUniform, kDepthScaled };

// Longest chain of ancestor infosets (either player) above each infoset.
std::vector<int> InfosetLevels(const GameTree& tree);
std::vector<double> LrSchedule(const GameTree& tree, ScheduleMode mode,
                               double eta0, double ratio = 1.0);
// eta_s^anc: max eta over infosets on the paths to members of s; 0 if none.
std::vector<double> AncestorEta(const GameTree& tree,
                                const std::vector<double>& eta);

struct ConstantsParams {
  FeedbackKind kind = FeedbackKind::kCounterfactual;
  RegularizerSpec reg;
  double tau = 0.0;
  double gamma0 = 0.0;
  bool outcome_sampling = false;
  int64_t horizon = 100000;  // T in the high-probability constants.
  double delta = 0.05;
};

struct GameConstants {
  double gamma = 0.0;            // Certified sequence-form floor.
  int depth = 0;                 // Max infoset depth.
  double psi_max = 0.0;
  double psi_max_stated = 0.0;   // Euclidean 1/(2 min|A_s|) figure.
  double q_bound = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double min_floor = 0.0;        // min gamma_s nu_{s,a}.
  double min_chance_mass = 0.0;  // min_s sum_{h in s} mu_c(h).
  std::vector<double> c_diff;
  std::vector<double> c_diff_single;  // With coefficient |q| instead of 2|q|.
  std::vector<double> c_minus;
  std::vector<double> c_ratio;
  std::vector<double> c_eta;
  std::vector<double> c_eta_t;
  double c_visit = 0.0;
};

// M1, M2 for one feedback kind.
void MultiplierBounds(const GameTree& tree, FeedbackKind kind, double gamma,
                      double* m1, double* m2);
GameConstants ComputeGameConstants(const GameTree& tree,
                                   const ConstantsParams& params);

struct ConditionReport {
  std::vector<int> a_violations;  // Infosets failing each condition.
  std::vector<int> b_violations;
  std::vector<int> c_violations;
  double worst_a = 0.0;  // Max of lhs / rhs.
  double worst_b = 0.0;
  double worst_c = 0.0;
  bool a_ok() const { return a_violations.empty(); }
  bool b_ok() const { return b_violations.empty(); }
  bool c_ok() const { return c_violations.empty(); }
};

ConditionReport EvaluateConditions(const GameTree& tree,
                                   const std::vector<double>& eta,
                                   const GameConstants& constants,
                                   const ConstantsParams& params);

// Turns on the multiplier monitor with bounds for params.kind.
void EnableMonitor(SolverState& state, const GameTree& tree,
                   const SolverParams& params, const GameConstants& constants);

}  // namespace qfr

#endif  // QFR_SOLVERS_H_
