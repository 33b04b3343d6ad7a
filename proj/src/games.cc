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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qfr/game.h"

namespace qfr {
namespace {

// Appends nodes and interns infoset labels.
class TreeBuilder {
 public:
  int AddTerminal(double utility_p1) {
    Node n;
    n.kind = NodeKind::kTerminal;
    n.utility_p1 = utility_p1;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int AddChance() {
    Node n;
    n.kind = NodeKind::kChance;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int AddDecision(int player, const std::string& infoset_label) {
    Node n;
    n.kind = player == 1 ? NodeKind::kPlayer1 : NodeKind::kPlayer2;
    auto [it, inserted] =
        infosets_.try_emplace(infoset_label, static_cast<int>(labels_.size()));
    if (inserted) labels_.push_back(infoset_label);
    n.infoset = it->second;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  void Connect(int parent, std::string label, int child, double prob = 0.0) {
    nodes_[parent].actions.push_back({std::move(label), child, prob});
  }
  GameTree Build(std::string name, int root, double scale) {
    return GameTree::FromNodes(std::move(name), std::move(nodes_), root,
                               std::move(labels_), scale);
  }

 private:
  std::vector<Node> nodes_;
  std::map<std::string, int> infosets_;
  std::vector<std::string> labels_;
};

constexpr char kKuhnCards[] = {'J', 'Q', 'K'};

// --- Leduc -----------------------------------------------------------------

constexpr int kLeducDeck = 6;
constexpr int kLeducMaxRaises = 2;
constexpr double kLeducMaxContribution = 13.0;  // 1 + 2 * 2 + 2 * 4.

std::string LeducCard(int c) {
  return std::string(1, kKuhnCards[c / 2]) + std::to_string(c % 2);
}

struct LeducState {
  int cards[2] = {-1, -1};
  int public_card = -1;
  int round = 0;
  std::string history[2];
  double contribution[2] = {1.0, 1.0};
  int raises = 0;
  bool facing_bet = false;
  int to_act = 0;  // 0 or 1.
};

class LeducBuilder {
 public:
  int Build(const LeducState& st) { return Decision(st); }
  TreeBuilder& builder() { return b_; }

  int Showdown(const LeducState& st) {
    const int r0 = st.cards[0] / 2, r1 = st.cards[1] / 2;
    const int pub = st.public_card / 2;
    int winner = -1;
    if (r0 == pub) {
      winner = 0;
    } else if (r1 == pub) {
      winner = 1;
    } else if (r0 != r1) {
      winner = r0 > r1 ? 0 : 1;
    }
    double u = 0.0;
    if (winner == 0) u = st.contribution[1];
    if (winner == 1) u = -st.contribution[0];
    return b_.AddTerminal(u / kLeducMaxContribution);
  }

  int DealPublic(const LeducState& st) {
    const int node = b_.AddChance();
    std::vector<int> remaining;
    for (int c = 0; c < kLeducDeck; ++c) {
      if (c != st.cards[0] && c != st.cards[1]) remaining.push_back(c);
    }
    for (int c : remaining) {
      LeducState next = st;
      next.public_card = c;
      next.round = 1;
      next.raises = 0;
      next.facing_bet = false;
      next.to_act = 0;
      b_.Connect(node, LeducCard(c), Decision(next),
                 1.0 / static_cast<double>(remaining.size()));
    }
    return node;
  }

  int Decision(const LeducState& st) {
    const int p = st.to_act;
    std::string label = "P" + std::to_string(p + 1) + ":" +
                        LeducCard(st.cards[p]) + "|" + st.history[0];
    if (st.round == 1) {
      label += "|" + LeducCard(st.public_card) + "|" + st.history[1];
    }
    const int node = b_.AddDecision(p + 1, label);
    const double raise_size = st.round == 0 ? 2.0 : 4.0;
    if (st.facing_bet) {
      // Fold.
      const double u = p == 0 ? -st.contribution[0] : st.contribution[1];
      b_.Connect(node, "fold", b_.AddTerminal(u / kLeducMaxContribution));
    }
    {
      // Check or call.
      LeducState next = st;
      next.history[st.round] += 'c';
      next.contribution[p] = next.contribution[1 - p];
      const bool round_over = st.facing_bet || st.history[st.round] == "c";
      int child;
      if (!round_over) {
        next.to_act = 1 - p;
        child = Decision(next);
      } else if (st.round == 0) {
        child = DealPublic(next);
      } else {
        child = Showdown(next);
      }
      b_.Connect(node, "call", child);
    }
    if (st.raises < kLeducMaxRaises) {
      LeducState next = st;
      next.history[st.round] += 'r';
      next.contribution[p] = next.contribution[1 - p] + raise_size;
      next.raises = st.raises + 1;
      next.facing_bet = true;
      next.to_act = 1 - p;
      b_.Connect(node, "raise", Decision(next));
    }
    return node;
  }

 private:
  TreeBuilder b_;
};

}  // namespace

GameTree BuildKuhn() {
  TreeBuilder b;
  const int root = b.AddChance();
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      const double win = c1 > c2 ? 1.0 : -1.0;
      const std::string k1(1, kKuhnCards[c1]), k2(1, kKuhnCards[c2]);
      const int p1 = b.AddDecision(1, k1);
      b.Connect(root, k1 + k2, p1, 1.0 / 6.0);

      const int after_check = b.AddDecision(2, k2 + ":c");
      b.Connect(p1, "check", after_check);
      b.Connect(after_check, "check", b.AddTerminal(win * 1.0 / 2.0));
      const int facing = b.AddDecision(1, k1 + ":cb");
      b.Connect(after_check, "bet", facing);
      b.Connect(facing, "fold", b.AddTerminal(-1.0 / 2.0));
      b.Connect(facing, "call", b.AddTerminal(win * 2.0 / 2.0));

      const int after_bet = b.AddDecision(2, k2 + ":b");
      b.Connect(p1, "bet", after_bet);
      b.Connect(after_bet, "fold", b.AddTerminal(1.0 / 2.0));
      b.Connect(after_bet, "call", b.AddTerminal(win * 2.0 / 2.0));
    }
  }
  return b.Build("kuhn", root, 2.0);
}

GameTree BuildLeduc() {
  LeducBuilder lb;
  TreeBuilder& b = lb.builder();
  const int root = b.AddChance();
  for (int c1 = 0; c1 < kLeducDeck; ++c1) {
    const int deal2 = b.AddChance();
    b.Connect(root, LeducCard(c1), deal2, 1.0 / kLeducDeck);
    for (int c2 = 0; c2 < kLeducDeck; ++c2) {
      if (c2 == c1) continue;
      LeducState st;
      st.cards[0] = c1;
      st.cards[1] = c2;
      b.Connect(deal2, LeducCard(c2), lb.Build(st), 1.0 / (kLeducDeck - 1));
    }
  }
  return b.Build("leduc", root, kLeducMaxContribution);
}

GameTree BuildMatchingPennies() {
  TreeBuilder b;
  const int root = b.AddDecision(1, "P1");
  for (int a = 0; a < 2; ++a) {
    const int p2 = b.AddDecision(2, "P2");
    b.Connect(root, a == 0 ? "heads" : "tails", p2);
    for (int c = 0; c < 2; ++c) {
      b.Connect(p2, c == 0 ? "heads" : "tails",
                b.AddTerminal(a == c ? 1.0 : -1.0));
    }
  }
  return b.Build("matching_pennies", root, 1.0);
}

}  // namespace qfr
