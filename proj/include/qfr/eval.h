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

#ifndef QFR_EVAL_H_
#define QFR_EVAL_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qfr/game.h"
#include "qfr/regularizers.h"
#include "qfr/solvers.h"
#include "qfr/strategy.h"

namespace qfr {

struct BestResponseResult {
  double value = 0.0;         // In the responder's utility.
  BehavioralProfile policy;   // Input profile with the responder's part replaced.
};

// Exact best response of `player` against the other half of `profile`.
BestResponseResult BestResponse(const GameTree& tree,
                                const BehavioralProfile& profile, int player);

// max over mu1 of mu1^T A mu2 minus min over mu2 of mu1^T A mu2.
double Exploitability(const GameTree& tree, const BehavioralProfile& profile);

// Best response in the regularized and perturbed game: the responder
// maximizes its utility minus tau times its own bidilated regularizer plus tau
// times the opponent's, over the perturbed sets.
BestResponseResult RegularizedResponse(const GameTree& tree,
                                       const BehavioralProfile& profile,
                                       int player, double tau,
                                       const Perturbation& pert,
                                       const RegularizerSpec& spec);

// Duality gap of the regularized and perturbed game. Throws DomainError if the
// profile violates the floors.
double PerturbedRegularizedGap(const GameTree& tree,
                               const BehavioralProfile& profile, double tau,
                               const Perturbation& pert,
                               const RegularizerSpec& spec);

// Throws DomainError unless pi(a|s) >= gamma_s nu_{s,a} - tol everywhere.
void CheckFeasible(const GameTree& tree, const BehavioralProfile& profile,
                   const Perturbation& pert, double tol = 1e-12);

struct ReferenceOptions {
  double eta = 0.1;
  int64_t max_iters = 1000000;
  int64_t check_every = 100;
  std::optional<uint64_t> init_seed;  // Random feasible start when set.
};

class ReferenceError : public std::runtime_error {
 public:
  ReferenceError(const std::string& what, double best_gap)
      : std::runtime_error(what), best_gap_(best_gap) {}
  double best_gap() const { return best_gap_; }

 private:
  double best_gap_;
};

struct ReferenceResult {
  BehavioralProfile profile;
  double gap = 0.0;
  int64_t iterations = 0;
};

// Runs full-information QFR with Q-value feedback until the regularized gap of
// the iterate drops to `tol`.
ReferenceResult ComputeReference(const GameTree& tree, double tau,
                                 const Perturbation& pert,
                                 const RegularizerSpec& spec, double tol,
                                 const ReferenceOptions& options = {});

// Feasible profile drawn at random, for restarts.
BehavioralProfile RandomFeasibleProfile(const GameTree& tree,
                                        const Perturbation& pert, Rng& rng);

// Sum over both players of the tree Bregman divergence D(reference, profile).
double BregmanToReference(const GameTree& tree,
                          const BehavioralProfile& profile,
                          const BehavioralProfile& reference,
                          const RegularizerSpec& spec);

struct EvalReport {
  int64_t iteration = 0;
  double expl_last = 0.0;
  std::optional<double> expl_avg;
  double reg_gap = 0.0;
  std::optional<double> bregman_ref;
  double br_value_p1 = 0.0;  // Against the last iterate.
  double br_value_p2 = 0.0;
};

}  // namespace qfr

#endif  // QFR_EVAL_H_
