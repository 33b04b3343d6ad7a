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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "qfr/game.h"
#include "qfr/strategy.h"
#include "qfr/values.h"

namespace qfr {
namespace {

double RelErr(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

TEST_CASE("counterfactual values match the path-sum oracle") {
  Rng rng(8);
  for (const GameTree& tree : {BuildKuhn(), BuildLeduc()}) {
    for (double tau : {0.0, 0.05}) {
      for (int trial = 0; trial < 10; ++trial) {
        const BehavioralProfile pi = testing::RandomProfile(tree, rng, 0.05);
        const FeedbackBundle fb = ComputeFeedback(
            tree, pi, FeedbackKind::kCounterfactual, tau, RegularizerSpec{});
        const std::vector<double> oracle = testing::PathSumCounterfactual(
            tree, pi, tau, RegFamily::kEntropy);
        for (int k = 0; k < tree.num_slots(); ++k) {
          CHECK(std::abs(fb.q[k] - oracle[k]) <=
                1e-12 * std::max(1.0, std::abs(oracle[k])));
        }
      }
    }
  }
}

TEST_CASE("every feedback kind satisfies CF = m q") {
  Rng rng(9);
  for (const GameTree& tree : {BuildKuhn(), BuildLeduc()}) {
    for (int trial = 0; trial < 10; ++trial) {
      const BehavioralProfile pi = testing::RandomProfile(tree, rng, 0.05);
      const FeedbackBundle cf = ComputeFeedback(
          tree, pi, FeedbackKind::kCounterfactual, 0.0, RegularizerSpec{});
      for (FeedbackKind kind :
           {FeedbackKind::kQValue, FeedbackKind::kTrajectoryQ}) {
        const FeedbackBundle fb =
            ComputeFeedback(tree, pi, kind, 0.0, RegularizerSpec{});
        for (int s = 0; s < tree.num_infosets(); ++s) {
          const Infoset& info = tree.infoset(s);
          for (int a = 0; a < info.num_actions(); ++a) {
            const int k = info.offset + a;
            if (cf.q[k] == 0.0) {
              CHECK(fb.m[s] * fb.q[k] == 0.0);
            } else {
              CHECK(RelErr(fb.m[s] * fb.q[k], cf.q[k]) <= 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("trajectory Q-value needs positive own reach") {
  const GameTree tree = BuildKuhn();
  BehavioralProfile pi(tree);
  // Player 1 never checks, so the infosets after check-bet are unreachable.
  for (int s : tree.infosets_of(1)) {
    if (tree.infoset(s).parent_sequence.empty()) {
      pi[s][0] = 0.0;
      pi[s][1] = 1.0;
    }
  }
  CHECK_THROWS_AS(ComputeFeedback(tree, pi, FeedbackKind::kTrajectoryQ, 0.0,
                                  RegularizerSpec{}),
                  std::domain_error);
  CHECK_NOTHROW(ComputeFeedback(tree, pi, FeedbackKind::kCounterfactual, 0.0,
                                RegularizerSpec{}));
}

TEST_CASE("trajectory estimator is unbiased on kuhn") {
  const GameTree tree = BuildKuhn();
  const BehavioralProfile pi(tree);
  for (double tau : {0.0, 0.01}) {
    const FeedbackBundle exact = ComputeFeedback(
        tree, pi, FeedbackKind::kTrajectoryQ, tau, RegularizerSpec{});
    const std::vector<double> path = testing::PathSumCounterfactual(
        tree, pi, tau, RegFamily::kEntropy);
    std::vector<double> sum(tree.num_slots(), 0.0), sq(tree.num_slots(), 0.0);
    Rng rng(1234);
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const Trajectory traj = SampleTrajectory(tree, pi, rng);
      const SampledFeedback est =
          EstimateTrajectoryQ(tree, traj, pi, tau, RegularizerSpec{});
      for (const SampledEntry& e : est.entries) {
        const int k = tree.infoset(e.infoset).offset + e.action;
        sum[k] += e.value;
        sq[k] += e.value * e.value;
      }
    }
    for (int s = 0; s < tree.num_infosets(); ++s) {
      const Infoset& info = tree.infoset(s);
      for (int a = 0; a < info.num_actions(); ++a) {
        const int k = info.offset + a;
        // Trajectory Q-value: own reach of the infoset times CF.
        const double want = exact.own_reach[s] * path[k];
        CHECK(exact.q[k] == doctest::Approx(want).epsilon(1e-12));
        const double mean = sum[k] / n;
        const double var = sq[k] / n - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / n);
        CHECK(std::abs(mean - want) <= 4.0 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("chance sampling follows edge probabilities") {
  const GameTree tree = BuildLeduc();
  const Node& root = tree.node(tree.root());
  Rng rng(2);
  std::vector<int> counts(root.actions.size(), 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[SampleChance(root, rng)];
  for (size_t a = 0; a < counts.size(); ++a) {
    const double p = root.actions[a].prob;
    CHECK(std::abs(counts[a] / static_cast<double>(n) - p) <=
          5.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("feedback kind names round trip") {
  for (FeedbackKind k : {FeedbackKind::kQValue, FeedbackKind::kTrajectoryQ,
                         FeedbackKind::kCounterfactual}) {
    CHECK(ParseFeedbackKind(FeedbackKindName(k)) == k);
  }
  CHECK_THROWS_AS(ParseFeedbackKind("bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace qfr
