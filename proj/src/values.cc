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

#include "qfr/values.h"

#include <stdexcept>

namespace qfr {

const char* FeedbackKindName(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::kQValue: return "q";
    case FeedbackKind::kTrajectoryQ: return "tq";
    case FeedbackKind::kCounterfactual: return "cf";
  }
  return "";
}

FeedbackKind ParseFeedbackKind(const std::string& name) {
  for (FeedbackKind k : {FeedbackKind::kQValue, FeedbackKind::kTrajectoryQ,
                         FeedbackKind::kCounterfactual}) {
    if (name == FeedbackKindName(k)) return k;
  }
  throw std::invalid_argument("unknown feedback kind " + name);
}

double OpponentReach(const GameTree& tree, const BehavioralProfile& profile,
                     int s) {
  const std::vector<ReachTriple> reach = ReachProbabilities(tree, profile);
  const int opp = 3 - tree.infoset(s).player;
  double total = 0.0;
  for (int h : tree.infoset(s).members) {
    total += reach[h].chance * reach[h].player(opp);
  }
  return total;
}

std::vector<double> OpponentReaches(const GameTree& tree,
                                    const std::vector<ReachTriple>& reach) {
  std::vector<double> out(tree.num_infosets(), 0.0);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const int opp = 3 - tree.infoset(s).player;
    for (int h : tree.infoset(s).members) {
      out[s] += reach[h].chance * reach[h].player(opp);
    }
  }
  return out;
}

FeedbackBundle ComputeFeedback(const GameTree& tree,
                               const BehavioralProfile& profile,
                               FeedbackKind kind, double tau,
                               const RegularizerSpec& spec) {
  const int n = tree.num_nodes();
  const std::vector<ReachTriple> reach = ReachProbabilities(tree, profile);

  // Signed regularizer reward of each infoset from player 1's view.
  std::vector<double> reward(tree.num_infosets(), 0.0);
  if (tau != 0.0) {
    for (int s = 0; s < tree.num_infosets(); ++s) {
      const double psi = LocalPsi(spec.local(s), profile[s]);
      reward[s] = (tree.infoset(s).player == 1 ? -tau : tau) * psi;
    }
  }
  // v[h]: expected player-1 reward collected from h on, h included.
  std::vector<double> v(n, 0.0);
  for (int h = n - 1; h >= 0; --h) {
    const Node& node = tree.node(h);
    if (node.is_terminal()) {
      v[h] = node.utility_p1;
      continue;
    }
    double total = 0.0;
    for (int a = 0; a < static_cast<int>(node.actions.size()); ++a) {
      const double p = node.is_chance() ? node.actions[a].prob
                                        : profile[node.infoset][a];
      total += p * v[node.actions[a].child];
    }
    v[h] = total + (node.is_decision() ? reward[node.infoset] : 0.0);
  }

  FeedbackBundle out;
  out.kind = kind;
  out.tau = tau;
  out.augmented = tau != 0.0;
  out.q.assign(tree.num_slots(), 0.0);
  out.m.assign(tree.num_infosets(), 1.0);
  out.opp_reach.assign(tree.num_infosets(), 0.0);
  out.own_reach.assign(tree.num_infosets(), 0.0);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    const int p = info.player;
    const double sign = p == 1 ? 1.0 : -1.0;
    double* cf = out.q.data() + info.offset;
    for (int h : info.members) {
      const double w = reach[h].chance * reach[h].player(3 - p);
      out.opp_reach[s] += w;
      const Node& node = tree.node(h);
      for (int a = 0; a < info.num_actions(); ++a) {
        cf[a] += w * sign * v[node.actions[a].child];
      }
    }
    out.own_reach[s] = reach[info.members.front()].player(p);
    double scale = 1.0;
    switch (kind) {
      case FeedbackKind::kCounterfactual:
        break;
      case FeedbackKind::kTrajectoryQ:
        if (!(out.own_reach[s] > 0.0)) {
          throw std::domain_error(
              "trajectory Q-value needs positive own reach at infoset " +
              std::to_string(s));
        }
        out.m[s] = 1.0 / out.own_reach[s];
        scale = out.own_reach[s];
        break;
      case FeedbackKind::kQValue:
        if (!(out.opp_reach[s] > 0.0)) {
          throw std::domain_error(
              "Q-value needs positive opponent reach at infoset " +
              std::to_string(s));
        }
        out.m[s] = out.opp_reach[s];
        scale = 1.0 / out.opp_reach[s];
        break;
    }
    if (scale != 1.0) {
      for (int a = 0; a < info.num_actions(); ++a) cf[a] *= scale;
    }
  }
  return out;
}

int SampleChance(const Node& node, Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  const int n = static_cast<int>(node.actions.size());
  for (int i = 0; i + 1 < n; ++i) {
    acc += node.actions[i].prob;
    if (u < acc) return i;
  }
  return n - 1;
}

Trajectory SampleTrajectory(const GameTree& tree,
                            const BehavioralProfile& profile, Rng& rng) {
  Trajectory traj;
  int h = tree.root();
  while (!tree.node(h).is_terminal()) {
    const Node& node = tree.node(h);
    const int a = node.is_chance() ? SampleChance(node, rng)
                                   : rng.Sample(profile[node.infoset]);
    traj.steps.push_back({h, a});
    h = node.actions[a].child;
  }
  traj.terminal = h;
  traj.utility_p1 = tree.node(h).utility_p1;
  return traj;
}

SampledFeedback EstimateTrajectoryQ(const GameTree& tree,
                                    const Trajectory& trajectory,
                                    const BehavioralProfile& profile,
                                    double tau, const RegularizerSpec& spec) {
  SampledFeedback out;
  // Sum of later regularizer rewards from player 1's view.
  double later = 0.0;
  for (auto it = trajectory.steps.rbegin(); it != trajectory.steps.rend();
       ++it) {
    const Node& node = tree.node(it->node);
    if (node.is_chance()) continue;
    const int s = node.infoset;
    const double prob = profile[s][it->action];
    if (!(prob > 0.0)) {
      throw std::logic_error("sampled action has zero probability");
    }
    const double sign = node.player() == 1 ? 1.0 : -1.0;
    out.entries.push_back(
        {s, it->action, sign * (trajectory.utility_p1 + tau * later) / prob});
    if (tau != 0.0) {
      later += -sign * LocalPsi(spec.local(s), profile[s]);
    }
  }
  return out;
}

}  // namespace qfr
