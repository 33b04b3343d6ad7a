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

#include "qfr/game.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace qfr {
namespace {

constexpr double kProbTolerance = 1e-9;
constexpr double kUtilityTolerance = 1e-12;

[[noreturn]] void Fail(const std::string& msg) { throw GameError(msg); }

std::string NodeName(int h) { return "node " + std::to_string(h); }

void CheckNodeLocal(const std::vector<Node>& nodes, int h) {
  const Node& n = nodes[h];
  switch (n.kind) {
    case NodeKind::kTerminal:
      if (!n.actions.empty()) Fail("terminal " + NodeName(h) + " has actions");
      if (!(std::abs(n.utility_p1) <= 1.0 + kUtilityTolerance)) {
        std::ostringstream os;
        os << "terminal utility of " << NodeName(h) << " is " << n.utility_p1
           << ", outside [-1, 1]";
        Fail(os.str());
      }
      break;
    case NodeKind::kChance: {
      if (n.actions.empty()) Fail("chance " + NodeName(h) + " has no actions");
      double total = 0.0;
      for (const Edge& e : n.actions) {
        if (!(e.prob > 0.0)) {
          Fail("chance probabilities of " + NodeName(h) +
               " must be strictly positive");
        }
        total += e.prob;
      }
      if (std::abs(total - 1.0) > kProbTolerance) {
        std::ostringstream os;
        os << "chance probabilities of " << NodeName(h) << " sum to " << total
           << ", expected 1";
        Fail(os.str());
      }
      break;
    }
    default:
      if (n.actions.empty()) {
        Fail("decision " + NodeName(h) + " has no actions");
      }
      if (n.infoset < 0) Fail("decision " + NodeName(h) + " has no infoset");
  }
  for (const Edge& e : n.actions) {
    if (e.child < 0 || e.child >= static_cast<int>(nodes.size())) {
      Fail(NodeName(h) + " has a child index out of range");
    }
  }
}

// Preorder from root; also verifies that the input is a tree.
std::vector<int> Preorder(const std::vector<Node>& nodes, int root) {
  const int n = static_cast<int>(nodes.size());
  std::vector<int> parents(n, 0);
  for (int h = 0; h < n; ++h) {
    for (const Edge& e : nodes[h].actions) ++parents[e.child];
  }
  if (parents[root] != 0) Fail("root " + NodeName(root) + " has a parent");
  for (int h = 0; h < n; ++h) {
    if (h != root && parents[h] != 1) {
      Fail(NodeName(h) + " has " + std::to_string(parents[h]) +
           " parents, expected exactly one");
    }
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    int h = stack.back();
    stack.pop_back();
    order.push_back(h);
    const auto& acts = nodes[h].actions;
    for (auto it = acts.rbegin(); it != acts.rend(); ++it) {
      stack.push_back(it->child);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    std::vector<bool> seen(n, false);
    for (int h : order) seen[h] = true;
    for (int h = 0; h < n; ++h) {
      if (!seen[h]) Fail(NodeName(h) + " is unreachable from the root");
    }
  }
  return order;
}

std::vector<Sequence> OwnHistory(const std::vector<Node>& nodes, int h) {
  const int player = nodes[h].player();
  std::vector<Sequence> hist;
  int child = h;
  for (int p = nodes[h].parent; p >= 0; child = p, p = nodes[p].parent) {
    if (nodes[p].player() == player) {
      hist.push_back({nodes[p].infoset, nodes[child].parent_action});
    }
  }
  std::reverse(hist.begin(), hist.end());
  return hist;
}

}  // namespace

GameTree GameTree::FromNodes(std::string name, std::vector<Node> input,
                             int root, std::vector<std::string> infoset_labels,
                             double utility_scale,
                             bool require_perfect_recall) {
  const int n = static_cast<int>(input.size());
  if (n == 0) Fail("game has no nodes");
  if (root < 0 || root >= n) Fail("root index out of range");
  for (int h = 0; h < n; ++h) CheckNodeLocal(input, h);
  const std::vector<int> order = Preorder(input, root);

  std::vector<int> new_index(n);
  for (int i = 0; i < n; ++i) new_index[order[i]] = i;
  std::map<int, int> infoset_index;  // input id -> dense topological id
  std::vector<int> infoset_input_id;

  GameTree tree;
  tree.name_ = std::move(name);
  tree.utility_scale_ = utility_scale;
  tree.nodes_.resize(n);
  for (int i = 0; i < n; ++i) {
    Node node = std::move(input[order[i]]);
    for (Edge& e : node.actions) e.child = new_index[e.child];
    if (node.is_decision()) {
      auto [it, inserted] = infoset_index.try_emplace(
          node.infoset, static_cast<int>(infoset_input_id.size()));
      if (inserted) infoset_input_id.push_back(node.infoset);
      node.infoset = it->second;
    } else {
      node.infoset = -1;
    }
    tree.nodes_[i] = std::move(node);
  }

  auto& nodes = tree.nodes_;
  nodes[0].parent = -1;
  nodes[0].parent_action = -1;
  nodes[0].depth = 0;
  for (int h = 0; h < n; ++h) {
    for (int a = 0; a < static_cast<int>(nodes[h].actions.size()); ++a) {
      Node& c = nodes[nodes[h].actions[a].child];
      c.parent = h;
      c.parent_action = a;
      c.depth = nodes[h].depth + 1;
    }
  }

  const int num_infosets = static_cast<int>(infoset_input_id.size());
  auto& infosets = tree.infosets_;
  infosets.resize(num_infosets);
  for (int h = 0; h < n; ++h) {
    const Node& node = nodes[h];
    if (!node.is_decision()) continue;
    Infoset& s = infosets[node.infoset];
    if (s.members.empty()) {
      s.player = node.player();
      for (const Edge& e : node.actions) s.actions.push_back(e.label);
    } else {
      if (s.player != node.player()) {
        Fail("infoset " + std::to_string(infoset_input_id[node.infoset]) +
             " mixes players at " + NodeName(h));
      }
      bool same = s.actions.size() == node.actions.size();
      for (size_t a = 0; same && a < node.actions.size(); ++a) {
        same = s.actions[a] == node.actions[a].label;
      }
      if (!same) {
        Fail("infoset " + std::to_string(infoset_input_id[node.infoset]) +
             " has inconsistent action sets at " + NodeName(h));
      }
    }
    s.members.push_back(h);
    s.depth = std::max(s.depth, node.depth);
  }
  int slot = 0;
  for (int s = 0; s < num_infosets; ++s) {
    Infoset& info = infosets[s];
    info.offset = slot;
    slot += info.num_actions();
    const int id = infoset_input_id[s];
    if (id >= 0 && id < static_cast<int>(infoset_labels.size())) {
      info.label = infoset_labels[id];
    }
    tree.player_infosets_[info.player - 1].push_back(s);
    tree.max_infoset_depth_ = std::max(tree.max_infoset_depth_, info.depth);
  }
  tree.num_slots_ = slot;
  tree.slot_infoset_.resize(slot);
  for (int s = 0; s < num_infosets; ++s) {
    for (int a = 0; a < infosets[s].num_actions(); ++a) {
      tree.slot_infoset_[infosets[s].offset + a] = s;
    }
  }

  // Reach data and own sequences, relying on preorder.
  tree.chance_reach_.assign(n, 1.0);
  for (int p = 0; p < 2; ++p) tree.node_seq_[p].assign(n, -1);
  for (int h = 0; h < n; ++h) {
    const Node& node = nodes[h];
    tree.height_ = std::max(tree.height_, node.depth);
    for (int a = 0; a < static_cast<int>(node.actions.size()); ++a) {
      const int c = node.actions[a].child;
      tree.chance_reach_[c] = tree.chance_reach_[h] *
                              (node.is_chance() ? node.actions[a].prob : 1.0);
      for (int p = 0; p < 2; ++p) tree.node_seq_[p][c] = tree.node_seq_[p][h];
      if (node.is_decision()) {
        tree.node_seq_[node.player() - 1][c] =
            infosets[node.infoset].offset + a;
      }
    }
    if (node.is_terminal()) {
      tree.terminals_.push_back(h);
      tree.payoffs_.push_back({tree.node_seq_[0][h], tree.node_seq_[1][h],
                               tree.chance_reach_[h] * node.utility_p1});
    }
  }

  tree.infoset_chance_mass_.assign(num_infosets, 0.0);
  tree.child_infosets_.assign(slot, {});
  for (int s = 0; s < num_infosets; ++s) {
    Infoset& info = infosets[s];
    const int first = info.members.front();
    const int parent_slot = tree.node_seq_[info.player - 1][first];
    if (parent_slot >= 0) {
      const int ps = tree.slot_infoset_[parent_slot];
      info.parent_sequence = {ps, parent_slot - infosets[ps].offset};
      tree.child_infosets_[parent_slot].push_back(s);
    } else {
      tree.root_infosets_[info.player - 1].push_back(s);
    }
    info.own_depth = static_cast<int>(OwnHistory(nodes, first).size());
    tree.max_own_decisions_ =
        std::max(tree.max_own_decisions_, info.own_depth + 1);
    for (int h : info.members) tree.infoset_chance_mass_[s] += tree.chance_reach_[h];
  }

  tree.recall_violations_ = ValidatePerfectRecall(tree);
  if (require_perfect_recall && !tree.recall_violations_.empty()) {
    Fail("perfect recall violated: " + tree.recall_violations_[0].message);
  }
  return tree;
}

std::vector<PerfectRecallViolation> ValidatePerfectRecall(
    const GameTree& tree) {
  std::vector<PerfectRecallViolation> out;
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const auto& members = tree.infoset(s).members;
    const std::vector<Sequence> ref = OwnHistory(tree.nodes(), members[0]);
    for (size_t i = 1; i < members.size(); ++i) {
      if (OwnHistory(tree.nodes(), members[i]) != ref) {
        out.push_back({s, members[0], members[i],
                       "infoset " + std::to_string(s) + ": " +
                           NodeName(members[0]) + " and " +
                           NodeName(members[i]) +
                           " have different own histories"});
      }
    }
  }
  return out;
}

}  // namespace qfr
