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

#include "qfr/strategy.h"

#include <cmath>
#include <string>

#include "qfr/regularizers.h"

namespace qfr {

BehavioralProfile::BehavioralProfile(const GameTree& tree) {
  offset_.reserve(tree.num_infosets() + 1);
  probs_.reserve(tree.num_slots());
  for (const Infoset& s : tree.infosets()) {
    offset_.push_back(static_cast<int>(probs_.size()));
    for (int a = 0; a < s.num_actions(); ++a) {
      probs_.push_back(1.0 / s.num_actions());
    }
  }
  offset_.push_back(static_cast<int>(probs_.size()));
}

void ValidateProfile(const GameTree& tree, const BehavioralProfile& profile,
                     double tol) {
  if (profile.num_infosets() != tree.num_infosets() ||
      static_cast<int>(profile.data().size()) != tree.num_slots()) {
    throw GameError("profile dimensions do not match the game tree");
  }
  for (int s = 0; s < tree.num_infosets(); ++s) {
    auto x = profile[s];
    if (static_cast<int>(x.size()) != tree.infoset(s).num_actions()) {
      throw GameError("profile dimensions do not match infoset " +
                      std::to_string(s));
    }
    double total = 0.0;
    for (double v : x) {
      if (!(v >= 0.0)) {
        throw GameError("negative probability at infoset " +
                        std::to_string(s));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > tol) {
      throw GameError("probabilities at infoset " + std::to_string(s) +
                      " do not sum to one");
    }
  }
}

SequenceFormStrategy ToSequenceForm(const GameTree& tree,
                                    const BehavioralProfile& profile,
                                    int player) {
  if (static_cast<int>(profile.data().size()) != tree.num_slots()) {
    throw GameError("profile dimensions do not match the game tree");
  }
  SequenceFormStrategy mu;
  mu.player = player;
  mu.values.assign(tree.num_slots(), 0.0);
  // Infosets are topologically ordered, so the parent is always filled.
  for (int s : tree.infosets_of(player)) {
    const double parent = mu.parent(tree, s);
    const Infoset& info = tree.infoset(s);
    auto pi = profile[s];
    for (int a = 0; a < info.num_actions(); ++a) {
      mu.values[info.offset + a] = parent * pi[a];
    }
  }
  return mu;
}

std::vector<ReachTriple> ReachProbabilities(const GameTree& tree,
                                            const BehavioralProfile& profile) {
  std::vector<ReachTriple> reach(tree.num_nodes());
  for (int h = 0; h < tree.num_nodes(); ++h) {
    const Node& node = tree.node(h);
    for (int a = 0; a < static_cast<int>(node.actions.size()); ++a) {
      ReachTriple r = reach[h];
      switch (node.kind) {
        case NodeKind::kChance: r.chance *= node.actions[a].prob; break;
        case NodeKind::kPlayer1: r.p1 *= profile[node.infoset][a]; break;
        case NodeKind::kPlayer2: r.p2 *= profile[node.infoset][a]; break;
        default: break;
      }
      reach[node.actions[a].child] = r;
    }
  }
  return reach;
}

double ExpectedUtility(const GameTree& tree, const BehavioralProfile& profile) {
  const std::vector<ReachTriple> reach = ReachProbabilities(tree, profile);
  double total = 0.0;
  for (int z : tree.terminals()) {
    total += reach[z].product() * tree.node(z).utility_p1;
  }
  return total;
}

double BilinearUtility(const GameTree& tree, const SequenceFormStrategy& mu1,
                       const SequenceFormStrategy& mu2) {
  double total = 0.0;
  for (const PayoffEntry& e : tree.payoff_entries()) {
    const double a = e.seq1 < 0 ? 1.0 : mu1.values[e.seq1];
    const double b = e.seq2 < 0 ? 1.0 : mu2.values[e.seq2];
    total += a * b * e.weight;
  }
  return total;
}

std::vector<double> ExplorationDistribution(const GameTree& tree) {
  const int n = tree.num_infosets();
  // Terminal infosets (no own child infoset) below each infoset, itself
  // included; infosets are topological so a reverse sweep sees children first.
  std::vector<int> below(n, 0);
  std::vector<bool> has_child(n, false);
  for (int s = 0; s < n; ++s) {
    const Sequence& ps = tree.infoset(s).parent_sequence;
    if (!ps.empty()) has_child[ps.infoset] = true;
  }
  for (int s = n - 1; s >= 0; --s) {
    if (!has_child[s]) below[s] += 1;
    const Sequence& ps = tree.infoset(s).parent_sequence;
    if (!ps.empty()) below[ps.infoset] += below[s];
  }
  std::vector<double> nu(tree.num_slots(), 0.0);
  for (int s = 0; s < n; ++s) {
    const Infoset& info = tree.infoset(s);
    double total = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      int count = 0;
      for (int c : tree.child_infosets(info.offset + a)) count += below[c];
      nu[info.offset + a] = count > 0 ? count : 1;
      total += nu[info.offset + a];
    }
    for (int a = 0; a < info.num_actions(); ++a) nu[info.offset + a] /= total;
  }
  return nu;
}

double GammaLowerBound(const GameTree& tree, double gamma0) {
  if (!(gamma0 > 0.0 && gamma0 <= 1.0)) {
    throw std::invalid_argument("gamma0 must lie in (0, 1]");
  }
  return std::pow(gamma0, tree.max_own_decisions()) / tree.num_infosets();
}

Perturbation MakePerturbation(const GameTree& tree, double gamma0,
                              bool uniform_nu) {
  Perturbation p;
  p.gamma.assign(tree.num_infosets(), gamma0);
  if (uniform_nu) {
    p.nu.resize(tree.num_slots());
    for (const Infoset& s : tree.infosets()) {
      for (int a = 0; a < s.num_actions(); ++a) {
        p.nu[s.offset + a] = 1.0 / s.num_actions();
      }
    }
  } else {
    p.nu = ExplorationDistribution(tree);
  }
  return p;
}

BehavioralProfile InitialProfile(const GameTree& tree,
                                 const Perturbation& pert) {
  BehavioralProfile profile(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    std::vector<double> uniform(profile[s].begin(), profile[s].end());
    ProjectTruncatedSimplex(uniform, pert.simplex(tree, s), profile[s]);
  }
  return profile;
}

}  // namespace qfr
