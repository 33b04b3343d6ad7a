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
#include "oracles.h"
#include "qfr/eval.h"
#include "qfr/game.h"
#include "qfr/solvers.h"
#include "qfr/strategy.h"

namespace qfr {
namespace {

void RunSteps(SolverState& state, const GameTree& tree,
              const SolverParams& params, Rng& rng, int steps) {
  for (int i = 0; i < steps; ++i) Step(state, tree, params, rng);
}

TEST_CASE("lazy and eager dilated updates produce identical iterates") {
  const GameTree tree = BuildKuhn();
  for (RegFamily family : {RegFamily::kEntropy, RegFamily::kEuclidean}) {
    for (double tau : {0.1, 0.01}) {
      const SolverParams params = MakeParams(
          tree, Algorithm::kQfrLazy, FeedbackKind::kTrajectoryQ, family,
          0.05, tau, 0.1);
      SolverState lazy = InitState(tree, params);
      SolverState eager = InitState(tree, params);
      Rng rng_lazy(42), rng_eager(42);
      for (int t = 0; t < 1000; ++t) {
        LazyQfrStep(lazy, tree, params, rng_lazy);
        EagerDilatedStep(eager, tree, params, rng_eager);
        SolverState synced = lazy;
        LazySynchronize(synced, tree, params);
        REQUIRE(synced.current == eager.current);
        REQUIRE(synced.center == eager.center);
      }
    }
  }
}

TEST_CASE("lazy update without regularization is the stochastic update") {
  const GameTree tree = BuildKuhn();
  SolverParams lazy_params = MakeParams(
      tree, Algorithm::kQfrLazy, FeedbackKind::kTrajectoryQ,
      RegFamily::kEntropy, 0.05, 0.0, 0.1);
  SolverParams stoch_params = lazy_params;
  stoch_params.algorithm = Algorithm::kQfrStochastic;
  SolverState a = InitState(tree, lazy_params);
  SolverState b = InitState(tree, stoch_params);
  Rng ra(5), rb(5);
  for (int t = 0; t < 500; ++t) {
    LazyQfrStep(a, tree, lazy_params, ra);
    QfrStochasticStep(b, tree, stoch_params, rb);
    REQUIRE(a.current == b.current);
  }
}

TEST_CASE("cfr average satisfies the folk bound") {
  for (const GameTree& tree : {BuildKuhn(), BuildLeduc()}) {
    const SolverParams params =
        MakeParams(tree, Algorithm::kCfr, FeedbackKind::kCounterfactual,
                   RegFamily::kEntropy, 1.0, 0.0, 0.0);
    SolverState state = InitState(tree, params);
    Rng rng(0);
    const int checkpoints[] = {1, 10, 50, 200};
    int done = 0;
    for (int t : checkpoints) {
      RunSteps(state, tree, params, rng, t - done);
      done = t;
      const double expl = Exploitability(tree, AverageProfile(tree, state));
      const double bound =
          (RegretBound(tree, state, 1) + RegretBound(tree, state, 2)) / t;
      CHECK(expl <= bound + 1e-12);
    }
  }
}

TEST_CASE("cfr plus solves kuhn") {
  const GameTree tree = BuildKuhn();
  const SolverParams params =
      MakeParams(tree, Algorithm::kCfrPlus, FeedbackKind::kCounterfactual,
                 RegFamily::kEntropy, 1.0, 0.0, 0.0);
  SolverState state = InitState(tree, params);
  Rng rng(0);
  RunSteps(state, tree, params, rng, 10000);
  const BehavioralProfile avg = AverageProfile(tree, state);
  CHECK(Exploitability(tree, avg) <= 1e-4);
  CHECK(std::abs(ExpectedUtility(tree, avg) * tree.utility_scale() -
                 oracle::Kuhn::kValue) <= 1e-3);
}

TEST_CASE("outcome-sampling regret samples are unbiased") {
  const GameTree tree = BuildKuhn();
  Rng rng(6);
  const BehavioralProfile pi = testing::RandomProfile(tree, rng, 0.2);
  const FeedbackBundle cf = ComputeFeedback(
      tree, pi, FeedbackKind::kCounterfactual, 0.0, RegularizerSpec{});
  std::vector<double> sum(tree.num_slots(), 0.0), sq(tree.num_slots(), 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> r = OsMccfrRegretSample(tree, pi, rng, 0.6);
    for (int k = 0; k < tree.num_slots(); ++k) {
      sum[k] += r[k];
      sq[k] += r[k] * r[k];
    }
  }
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    double v = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      v += pi[s][a] * cf.q[info.offset + a];
    }
    for (int a = 0; a < info.num_actions(); ++a) {
      const int k = info.offset + a;
      const double want = cf.q[k] - v;
      const double mean = sum[k] / n;
      const double se = std::sqrt(std::max(sq[k] / n - mean * mean, 0.0) / n);
      CHECK(std::abs(mean - want) <= 5.0 * se + 1e-12);
    }
  }
}

TEST_CASE("outcome-sampling mccfr approaches equilibrium on kuhn") {
  const GameTree tree = BuildKuhn();
  const SolverParams params =
      MakeParams(tree, Algorithm::kOsMccfr, FeedbackKind::kCounterfactual,
                 RegFamily::kEntropy, 1.0, 0.0, 0.0);
  SolverState state = InitState(tree, params);
  Rng rng(1);
  RunSteps(state, tree, params, rng, 200000);
  CHECK(Exploitability(tree, AverageProfile(tree, state)) < 0.02);
}

TEST_CASE("full-information qfr drives kuhn exploitability down") {
  const GameTree tree = BuildKuhn();
  for (FeedbackKind kind :
       {FeedbackKind::kQValue, FeedbackKind::kTrajectoryQ,
        FeedbackKind::kCounterfactual}) {
    SolverParams params = MakeParams(tree, Algorithm::kQfr, kind,
                                     RegFamily::kEntropy, 0.1, 0.001, 0.001);
    SolverState state = InitState(tree, params);
    ConstantsParams cp;
    cp.kind = kind;
    cp.tau = 0.001;
    cp.gamma0 = 0.001;
    EnableMonitor(state, tree, params, ComputeGameConstants(tree, cp));
    Rng rng(0);
    RunSteps(state, tree, params, rng, 10);
    const double early = Exploitability(tree, state.current);
    RunSteps(state, tree, params, rng, 9990);
    const double late = Exploitability(tree, state.current);
    // Q-value feedback is the fast variant at this rate; the others still
    // descend, more slowly.
    if (kind == FeedbackKind::kQValue) {
      CHECK(late <= 0.1 * early);
    } else {
      CHECK(late < 0.5 * early);
    }
    CHECK(state.monitor.hard_violations == 0);
    CHECK(state.monitor.observations == 10000);
  }
}

TEST_CASE("baselines keep iterates on the perturbed simplex") {
  const GameTree tree = BuildKuhn();
  for (Algorithm algo : {Algorithm::kPga, Algorithm::kMmd,
                         Algorithm::kMmdStochastic, Algorithm::kQfrStochastic}) {
    const SolverParams params =
        MakeParams(tree, algo, FeedbackKind::kQValue, RegFamily::kEuclidean,
                   0.05, 0.01, 0.1);
    SolverState state = InitState(tree, params);
    Rng rng(3);
    RunSteps(state, tree, params, rng, 300);
    ValidateProfile(tree, state.current);
    CHECK_NOTHROW(CheckFeasible(tree, state.current, params.perturbation, 1e-12));
  }
}

TEST_CASE("monitor counts bound violations") {
  MultiplierMonitor mon;
  mon.enabled = true;
  mon.lower = 0.5;
  mon.upper = 2.0;
  mon.step_bound = {0.1, 0.1};
  mon.Observe({1.0, 1.0}, true);
  mon.Observe({1.05, 3.0}, true);
  CHECK(mon.hard_violations == 1);
  CHECK(mon.soft_violations == 1);
  CHECK(mon.observations == 2);
}

TEST_CASE("algorithm names round trip") {
  for (Algorithm a :
       {Algorithm::kQfr, Algorithm::kQfrStochastic, Algorithm::kQfrLazy,
        Algorithm::kPga, Algorithm::kCfr, Algorithm::kCfrPlus,
        Algorithm::kOsMccfr, Algorithm::kMmd, Algorithm::kMmdStochastic}) {
    CHECK(ParseAlgorithm(AlgorithmName(a)) == a);
  }
  CHECK_THROWS_AS(ParseAlgorithm("sgd"), std::invalid_argument);
}

TEST_CASE("infoset levels and schedules on kuhn") {
  const GameTree tree = BuildKuhn();
  const std::vector<int> level = InfosetLevels(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    const int expect = info.player == 2 ? 1 : (info.own_depth == 0 ? 0 : 2);
    CHECK(level[s] == expect);
  }
  const std::vector<double> eta =
      LrSchedule(tree, ScheduleMode::kDepthScaled, 0.01, 0.5);
  const std::vector<double> anc = AncestorEta(tree, eta);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    CHECK(eta[s] == doctest::Approx(0.01 * std::pow(2.0, level[s])));
    if (level[s] > 0) CHECK(anc[s] / eta[s] <= 0.5 + 1e-15);
    if (level[s] == 0) CHECK(anc[s] == 0.0);
  }
  CHECK_THROWS(LrSchedule(tree, ScheduleMode::kDepthScaled, 0.01, 0.0));
}

TEST_CASE("multiplier bounds per feedback kind") {
  const GameTree tree = BuildKuhn();
  const double gamma = GammaLowerBound(tree, 0.1);
  double m1, m2;
  MultiplierBounds(tree, FeedbackKind::kCounterfactual, gamma, &m1, &m2);
  CHECK(m1 == 1.0);
  CHECK(m2 == 1.0);
  MultiplierBounds(tree, FeedbackKind::kTrajectoryQ, gamma, &m1, &m2);
  CHECK(m1 == 1.0);
  CHECK(m2 == doctest::Approx(1.0 / gamma).epsilon(1e-14));
  MultiplierBounds(tree, FeedbackKind::kQValue, gamma, &m1, &m2);
  // Every kuhn infoset holds two of the six deals.
  CHECK(m1 == doctest::Approx(gamma / 3.0).epsilon(1e-14));
  CHECK(m2 == 1.0);
}

TEST_CASE("feedback bound follows its formula") {
  const GameTree tree = BuildKuhn();
  ConstantsParams cp;
  cp.kind = FeedbackKind::kCounterfactual;
  cp.gamma0 = 0.1;
  cp.tau = 0.0;
  CHECK(ComputeGameConstants(tree, cp).q_bound == 1.0);
  cp.tau = 0.2;
  const GameConstants c = ComputeGameConstants(tree, cp);
  CHECK(c.q_bound == doctest::Approx(0.2 * 3 * std::log(2.0) + 1.0));
  cp.outcome_sampling = true;
  const GameConstants os = ComputeGameConstants(tree, cp);
  CHECK(os.q_bound == doctest::Approx(c.q_bound / c.min_floor));
  CHECK(c.c_minus == std::vector<double>(tree.num_infosets(), 0.0));
}

// Conditions recomputed by hand from the constants for a uniform schedule.
TEST_CASE("condition report flags what the hand computation flags") {
  const GameTree tree = BuildKuhn();
  ConstantsParams cp;
  cp.kind = FeedbackKind::kCounterfactual;
  cp.tau = 0.1;
  cp.gamma0 = 0.1;
  const GameConstants c = ComputeGameConstants(tree, cp);
  const double tau_log = cp.tau / c.m1 * std::log(1.0 / c.gamma);
  const double inner = 2.0 * c.q_bound + tau_log;
  for (double eta0 : {0.1, 0.05, 0.01, 0.001}) {
    const std::vector<double> eta(tree.num_infosets(), eta0);
    const ConditionReport report = EvaluateConditions(tree, eta, c, cp);
    std::vector<int> expect_b, expect_c;
    for (int s = 0; s < tree.num_infosets(); ++s) {
      const bool has_ancestor = tree.node(tree.infoset(s).members[0]).depth > 1;
      if (has_ancestor && 6.0 * eta0 * inner > 1.0) expect_b.push_back(s);
      if (eta0 * inner > 1.0) expect_c.push_back(s);
    }
    CHECK(report.a_ok());
    CHECK(report.b_violations == expect_b);
    CHECK(report.c_violations == expect_c);
  }
  const ConditionReport bad = EvaluateConditions(
      tree, std::vector<double>(tree.num_infosets(), 0.1), c, cp);
  CHECK_FALSE(bad.b_ok());
  const ConditionReport good = EvaluateConditions(
      tree, std::vector<double>(tree.num_infosets(), 0.001), c, cp);
  CHECK(good.b_ok());
  CHECK(good.c_ok());
}

TEST_CASE("condition A fails for uniform rates on leduc") {
  const GameTree tree = BuildLeduc();
  ConstantsParams cp;
  cp.tau = 0.01;
  cp.gamma0 = 0.1;
  const GameConstants c = ComputeGameConstants(tree, cp);
  const ConditionReport uniform = EvaluateConditions(
      tree, std::vector<double>(tree.num_infosets(), 1e-6), c, cp);
  CHECK_FALSE(uniform.a_ok());
  const ConditionReport scaled = EvaluateConditions(
      tree, LrSchedule(tree, ScheduleMode::kDepthScaled, 1e-9, 0.5), c, cp);
  CHECK(scaled.a_ok());
}

}  // namespace
}  // namespace qfr
