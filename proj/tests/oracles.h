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

// Reference computations for tests. They walk root paths or enumerate
// candidates directly and share no code with the library's backward passes.

#ifndef QFR_TESTS_ORACLES_H_
#define QFR_TESTS_ORACLES_H_

#include <span>
#include <vector>

#include "qfr/game.h"
#include "qfr/regularizers.h"
#include "qfr/strategy.h"

namespace qfr::testing {

// Profile with every probability at least `min_prob` before normalization.
BehavioralProfile RandomProfile(const GameTree& tree, Rng& rng,
                                double min_prob = 0.0);

// Local regularizer written out by hand: entropy alpha (log n + sum x log x),
// Euclidean (alpha / 2) sum x^2.
double PsiByHand(RegFamily family, double alpha, std::span<const double> x);

// Augmented counterfactual values by summing over every rewarded node below
// each (h, a): reach of h by chance and opponent times all probabilities
// strictly below the edge, times the acting player's reward.
std::vector<double> PathSumCounterfactual(const GameTree& tree,
                                          const BehavioralProfile& profile,
                                          double tau, RegFamily family);

// Player-1 expected utility by recursive traversal.
double TraversalUtility(const GameTree& tree, const BehavioralProfile& profile);

// max over pure strategies of the responder of its expected utility.
double PureStrategyBestResponse(const GameTree& tree,
                                const BehavioralProfile& profile, int player);

// <x, g> + tau0 psi(x) + (1 / eta) D(x, x0) with psi written by hand.
double ProxObjective(RegFamily family, std::span<const double> x,
                     std::span<const double> x0, std::span<const double> g,
                     double tau0, double eta, double alpha);

// Smallest ProxObjective over `points` feasible points of the perturbed
// simplex: its vertices, a regular lattice when |A| <= 3, then random draws
// ranging from flat to concentrated near faces.
double GridMinimum(RegFamily family, std::span<const double> x0,
                   std::span<const double> g, double tau0, double eta,
                   double alpha, double gamma, std::span<const double> nu,
                   int points, Rng& rng);

// Random prox instance with |A| in [2, 6] and a feasible interior center.
struct Instance {
  std::vector<double> x0, g, nu;
  double gamma, tau0, eta, alpha;
};
Instance RandomInstance(Rng& rng);

// KKT residual for min ||x - z||^2 over {x >= l, sum x = 1}, written as
// x = max(z - theta, l).
double KktResidual(const std::vector<double>& z, const std::vector<double>& l,
                   const std::vector<double>& x);

}  // namespace qfr::testing

#endif  // QFR_TESTS_ORACLES_H_
