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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "frozen_oracles.h"
#include "json.hpp"
#include "oracles.h"
#include "qfr/eval.h"
#include "qfr/game.h"
#include "qfr/regularizers.h"
#include "qfr/strategy.h"

namespace qfr {
namespace {

// Responder objective of the regularized game, computed from sequence forms.
double RegularizedObjective(const GameTree& tree,
                            const BehavioralProfile& profile, int player,
                            double tau, const RegularizerSpec& spec) {
  const SequenceFormStrategy mu1 = ToSequenceForm(tree, profile, 1);
  const SequenceFormStrategy mu2 = ToSequenceForm(tree, profile, 2);
  const double u = ExpectedUtility(tree, profile);
  const double own = BidilatedPsi(tree, mu1, mu2, player, spec);
  const double opp = BidilatedPsi(tree, mu1, mu2, 3 - player, spec);
  return (player == 1 ? u : -u) - tau * own + tau * opp;
}

BehavioralProfile Replace(const GameTree& tree, const BehavioralProfile& base,
                          const BehavioralProfile& source, int player) {
  BehavioralProfile out = base;
  for (int s : tree.infosets_of(player)) {
    std::copy(source[s].begin(), source[s].end(), out[s].begin());
  }
  return out;
}

TEST_CASE("best response matches pure-strategy enumeration on kuhn") {
  const GameTree tree = BuildKuhn();
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BehavioralProfile pi = trial == 0
                                     ? InitialProfile(tree, MakePerturbation(tree, 0.0))
                                     : testing::RandomProfile(tree, rng);
    for (int p : {1, 2}) {
      const BestResponseResult br = BestResponse(tree, pi, p);
      CHECK(br.value == doctest::Approx(testing::PureStrategyBestResponse(
                                            tree, pi, p))
                            .epsilon(1e-12));
      const double achieved = testing::TraversalUtility(tree, br.policy);
      CHECK(br.value ==
            doctest::Approx(p == 1 ? achieved : -achieved).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform exploitability matches the linear-program oracle") {
  const GameTree kuhn = BuildKuhn();
  const BehavioralProfile uk = InitialProfile(kuhn, MakePerturbation(kuhn, 0.0));
  CHECK(std::abs(BestResponse(kuhn, uk, 1).value * kuhn.utility_scale() -
                 oracle::Kuhn::kUniformBr1) <= 1e-12);
  CHECK(std::abs(BestResponse(kuhn, uk, 2).value * kuhn.utility_scale() -
                 oracle::Kuhn::kUniformBr2) <= 1e-12);
  CHECK(std::abs(Exploitability(kuhn, uk) * kuhn.utility_scale() -
                 oracle::Kuhn::kUniformExploitability) <= 1e-12);

  const GameTree leduc = BuildLeduc();
  const BehavioralProfile ul =
      InitialProfile(leduc, MakePerturbation(leduc, 0.0));
  CHECK(std::abs(Exploitability(leduc, ul) * leduc.utility_scale() -
                 oracle::Leduc::kUniformExploitability) <= 1e-9);
  CHECK(std::abs(BestResponse(leduc, ul, 1).value * leduc.utility_scale() -
                 oracle::Leduc::kUniformBr1) <= 1e-9);
}

TEST_CASE("matching pennies equilibrium is unexploitable") {
  const GameTree tree = BuildMatchingPennies();
  const BehavioralProfile pi = InitialProfile(tree, MakePerturbation(tree, 0.0));
  CHECK(std::abs(Exploitability(tree, pi)) <= 1e-15);
  BehavioralProfile skew = pi;
  skew[0][0] = 0.7;
  skew[0][1] = 0.3;
  CHECK(Exploitability(tree, skew) > 0.1);
}

TEST_CASE("best response dominates random responder profiles") {
  for (const GameTree& tree : {BuildKuhn(), BuildLeduc()}) {
    Rng rng(2);
    const BehavioralProfile pi = testing::RandomProfile(tree, rng);
    for (int p : {1, 2}) {
      const double best = BestResponse(tree, pi, p).value;
      for (int i = 0; i < 100; ++i) {
        const BehavioralProfile other =
            Replace(tree, pi, testing::RandomProfile(tree, rng), p);
        const double u = ExpectedUtility(tree, other);
        CHECK((p == 1 ? u : -u) <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("exploitability is invariant to action order") {
  const GameTree tree = BuildKuhn();
  nlohmann::json doc = nlohmann::json::parse(SerializeGame(tree));
  for (auto& node : doc["nodes"]) {
    if (node.contains("actions")) {
      std::reverse(node["actions"].begin(), node["actions"].end());
    }
  }
  const GameTree flipped = LoadGame(doc.dump());
  REQUIRE(flipped.num_infosets() == tree.num_infosets());
  Rng rng(4);
  const BehavioralProfile pi = testing::RandomProfile(tree, rng);
  // Carry probabilities over by infoset label and action label.
  BehavioralProfile mapped(flipped);
  for (int t = 0; t < flipped.num_infosets(); ++t) {
    const Infoset& ft = flipped.infoset(t);
    int s = 0;
    while (tree.infoset(s).label != ft.label) ++s;
    const Infoset& is = tree.infoset(s);
    for (int a = 0; a < ft.num_actions(); ++a) {
      const auto it = std::find(is.actions.begin(), is.actions.end(),
                                ft.actions[a]);
      mapped[t][a] = pi[s][it - is.actions.begin()];
    }
  }
  CHECK(Exploitability(flipped, mapped) ==
        doctest::Approx(Exploitability(tree, pi)).epsilon(1e-12));
}

TEST_CASE("unregularized gap equals exploitability") {
  const GameTree tree = BuildKuhn();
  const Perturbation none = MakePerturbation(tree, 0.0);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const BehavioralProfile pi = testing::RandomProfile(tree, rng, 0.01);
    for (RegFamily family : {RegFamily::kEntropy, RegFamily::kEuclidean}) {
      RegularizerSpec spec;
      spec.family = family;
      CHECK(PerturbedRegularizedGap(tree, pi, 0.0, none, spec) ==
            doctest::Approx(Exploitability(tree, pi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("regularized response dominates feasible profiles") {
  for (const GameTree& tree : {BuildKuhn(), BuildLeduc()}) {
    const Perturbation pert = MakePerturbation(tree, 0.1);
    Rng rng(9);
    for (RegFamily family : {RegFamily::kEntropy, RegFamily::kEuclidean}) {
      RegularizerSpec spec;
      spec.family = family;
      const double tau = 0.05;
      const BehavioralProfile pi = RandomFeasibleProfile(tree, pert, rng);
      double gap = 0.0;
      for (int p : {1, 2}) {
        const BestResponseResult br =
            RegularizedResponse(tree, pi, p, tau, pert, spec);
        CHECK_NOTHROW(CheckFeasible(tree, br.policy, pert, 1e-12));
        CHECK(br.value == doctest::Approx(RegularizedObjective(
                                              tree, br.policy, p, tau, spec))
                              .epsilon(1e-10));
        for (int i = 0; i < 30; ++i) {
          const BehavioralProfile other =
              Replace(tree, pi, RandomFeasibleProfile(tree, pert, rng), p);
          CHECK(RegularizedObjective(tree, other, p, tau, spec) <=
                br.value + 1e-12);
        }
        gap += br.value;
      }
      CHECK(gap >= -1e-12);
      CHECK(PerturbedRegularizedGap(tree, pi, tau, pert, spec) ==
            doctest::Approx(gap).epsilon(1e-12));
    }
  }
}

TEST_CASE("gap rejects profiles below the floors") {
  const GameTree tree = BuildKuhn();
  const Perturbation pert = MakePerturbation(tree, 0.2);
  BehavioralProfile pi = InitialProfile(tree, pert);
  pi[0][0] = 1.0;
  pi[0][1] = 0.0;
  CHECK_THROWS_AS(CheckFeasible(tree, pi, pert), DomainError);
  CHECK_THROWS_AS(PerturbedRegularizedGap(tree, pi, 0.01, pert, {}),
                  DomainError);
}

TEST_CASE("reference solver reaches tight gaps") {
  const GameTree pennies = BuildMatchingPennies();
  const ReferenceResult mp = ComputeReference(
      pennies, 0.1, MakePerturbation(pennies, 0.0), {}, 1e-8);
  CHECK(mp.gap <= 1e-8);
  CHECK(mp.profile[0][0] == doctest::Approx(0.5).epsilon(1e-4));

  const GameTree kuhn = BuildKuhn();
  const Perturbation pert = MakePerturbation(kuhn, 0.01);
  const ReferenceResult a = ComputeReference(kuhn, 0.05, pert, {}, 1e-6);
  CHECK(a.gap <= 1e-6);
  CHECK(BregmanToReference(kuhn, a.profile, a.profile, {}) == 0.0);
  // The solution is unique; restarts from random points agree once solved
  // tightly.
  const ReferenceResult tight = ComputeReference(kuhn, 0.05, pert, {}, 1e-11);
  ReferenceOptions options;
  options.init_seed = 17;
  const ReferenceResult b = ComputeReference(kuhn, 0.05, pert, {}, 1e-11,
                                             options);
  for (size_t k = 0; k < tight.profile.data().size(); ++k) {
    CHECK(std::abs(tight.profile.data()[k] - b.profile.data()[k]) <= 1e-4);
  }
  CHECK(BregmanToReference(kuhn, b.profile, tight.profile, {}) <= 1e-8);
}

TEST_CASE("reference solver reports an exhausted budget") {
  const GameTree kuhn = BuildKuhn();
  ReferenceOptions options;
  options.max_iters = 10;
  options.check_every = 5;
  CHECK_THROWS_AS(ComputeReference(kuhn, 0.05, MakePerturbation(kuhn, 0.01),
                                   {}, 1e-12, options),
                  ReferenceError);
  CHECK_THROWS(ComputeReference(kuhn, 0.0, MakePerturbation(kuhn, 0.01), {},
                                1e-6));
}

}  // namespace
}  // namespace qfr
