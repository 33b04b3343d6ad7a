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

#ifndef QFR_STRATEGY_H_
#define QFR_STRATEGY_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qfr/game.h"

namespace qfr {

// Per-infoset action distributions for both players, stored flat in the
// tree's slot layout.
class BehavioralProfile {
 public:
  BehavioralProfile() = default;
  // Uniform profile.
  explicit BehavioralProfile(const GameTree& tree);

  int num_infosets() const { return static_cast<int>(offset_.size()) - 1; }
  std::span<double> operator[](int s) {
    return {probs_.data() + offset_[s],
            static_cast<size_t>(offset_[s + 1] - offset_[s])};
  }
  std::span<const double> operator[](int s) const {
    return {probs_.data() + offset_[s],
            static_cast<size_t>(offset_[s + 1] - offset_[s])};
  }
  std::vector<double>& data() { return probs_; }
  const std::vector<double>& data() const { return probs_; }

  bool operator==(const BehavioralProfile& o) const {
    return probs_ == o.probs_;
  }

 private:
  std::vector<double> probs_;
  std::vector<int> offset_;
};

// Throws GameError on dimension mismatch, negative entries or rows not
// summing to one within `tol`.
void ValidateProfile(const GameTree& tree, const BehavioralProfile& profile,
                     double tol = 1e-9);

// Sequence-form strategy of one player in the tree's slot layout; entries of
// the other player's slots are zero.
struct SequenceFormStrategy {
  int player = 1;
  std::vector<double> values;

  // mu(sigma(s)), one for root infosets.
  double parent(const GameTree& tree, int s) const {
    const Sequence& ps = tree.infoset(s).parent_sequence;
    return ps.empty() ? 1.0
                      : values[tree.infoset(ps.infoset).offset + ps.action];
  }
};

SequenceFormStrategy ToSequenceForm(const GameTree& tree,
                                    const BehavioralProfile& profile,
                                    int player);

struct ReachTriple {
  double p1 = 1.0;
  double p2 = 1.0;
  double chance = 1.0;
  double product() const { return p1 * p2 * chance; }
  double player(int p) const { return p == 1 ? p1 : p2; }
};

std::vector<ReachTriple> ReachProbabilities(const GameTree& tree,
                                            const BehavioralProfile& profile);

// Expected player-1 utility by tree traversal.
double ExpectedUtility(const GameTree& tree, const BehavioralProfile& profile);

// mu_1^T A mu_2 from the tree's terminal payoff list.
double BilinearUtility(const GameTree& tree, const SequenceFormStrategy& mu1,
                       const SequenceFormStrategy& mu2);

// nu_{s,a} proportional to the number of the owner's terminal infosets below
// (s,a), counting (s,a) itself as one when no own infoset follows.
std::vector<double> ExplorationDistribution(const GameTree& tree);

// gamma_0^D / |S| with D the maximal number of own decisions on a path.
double GammaLowerBound(const GameTree& tree, double gamma0);

// View of Delta^{gamma, nu} for one infoset.
struct PerturbedSimplex {
  double gamma = 0.0;
  std::span<const double> nu;
};

// Per-infoset floors gamma_s * nu_{s,a}.
struct Perturbation {
  std::vector<double> gamma;  // Per infoset.
  std::vector<double> nu;     // Flat, slot layout.

  PerturbedSimplex simplex(const GameTree& tree, int s) const {
    const Infoset& info = tree.infoset(s);
    return {gamma[s], std::span<const double>(nu.data() + info.offset,
                                              info.num_actions())};
  }
};

// Same gamma_0 at every infoset; nu from ExplorationDistribution or uniform.
Perturbation MakePerturbation(const GameTree& tree, double gamma0,
                              bool uniform_nu = false);

// Uniform profile projected onto the perturbed simplices.
BehavioralProfile InitialProfile(const GameTree& tree, const Perturbation& pert);

// Deterministic 64-bit generator with a fixed mapping to [0, 1).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Index drawn from a distribution summing to one.
  int Sample(std::span<const double> probs) {
    const double u = Uniform();
    double acc = 0.0;
    int last = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last = static_cast<int>(i);
      acc += probs[i];
      if (u < acc) return last;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qfr

#endif  // QFR_STRATEGY_H_
