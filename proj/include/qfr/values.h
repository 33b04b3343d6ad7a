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

#ifndef QFR_VALUES_H_
#define QFR_VALUES_H_

#include <string>
#include <vector>

#include "qfr/game.h"
#include "qfr/regularizers.h"
#include "qfr/strategy.h"

namespace qfr {

enum class FeedbackKind { kQValue, kTrajectoryQ, kCounterfactual };

const char* FeedbackKindName(FeedbackKind kind);
FeedbackKind ParseFeedbackKind(const std::string& name);

// Per-infoset feedback q(s, .) of one kind, with the multiplier m_s such
// that CF(s, a) = m_s q(s, a).
struct FeedbackBundle {
  FeedbackKind kind = FeedbackKind::kCounterfactual;
  std::vector<double> q;          // Slot layout.
  std::vector<double> m;          // Per infoset.
  std::vector<double> opp_reach;  // mu_{-p}(s) per infoset.
  std::vector<double> own_reach;  // mu_p(sigma(s)) per infoset.
  double tau = 0.0;
  bool augmented = false;
};

// sum_{h in s} mu_c(h) mu_opp(sigma_opp(h)).
double OpponentReach(const GameTree& tree, const BehavioralProfile& profile,
                     int s);
std::vector<double> OpponentReaches(const GameTree& tree,
                                    const std::vector<ReachTriple>& reach);

// One backward pass over node rewards: terminal utility, -tau psi at own
// decision nodes and +tau psi at opponent decision nodes.
FeedbackBundle ComputeFeedback(const GameTree& tree,
                               const BehavioralProfile& profile,
                               FeedbackKind kind, double tau,
                               const RegularizerSpec& spec);

struct TrajectoryStep {
  int node = -1;
  int action = -1;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // Root to the parent of the terminal.
  int terminal = -1;
  double utility_p1 = 0.0;

  double utility(int player) const {
    return player == 1 ? utility_p1 : -utility_p1;
  }
};

Trajectory SampleTrajectory(const GameTree& tree,
                            const BehavioralProfile& profile, Rng& rng);

// Chance outcome drawn from the node's edge probabilities.
int SampleChance(const Node& node, Rng& rng);

struct SampledEntry {
  int infoset = -1;
  int action = -1;
  double value = 0.0;
};

// Sparse trajectory Q-value estimate; one entry per visited decision node,
// in backward order.
struct SampledFeedback {
  std::vector<SampledEntry> entries;
};

SampledFeedback EstimateTrajectoryQ(const GameTree& tree,
                                    const Trajectory& trajectory,
                                    const BehavioralProfile& profile,
                                    double tau, const RegularizerSpec& spec);

}  // namespace qfr

#endif  // QFR_VALUES_H_
