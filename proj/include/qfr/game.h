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

#ifndef QFR_GAME_H_
#define QFR_GAME_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace qfr {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { kPlayer1, kPlayer2, kChance, kTerminal };

struct Edge {
  std::string label;
  int child = -1;
  double prob = 0.0;  // Only meaningful at chance nodes.
};

struct Node {
  NodeKind kind = NodeKind::kTerminal;
  int infoset = -1;
  std::vector<Edge> actions;
  double utility_p1 = 0.0;
  int depth = 0;
  int parent = -1;
  int parent_action = -1;

  // 1 or 2 for decision nodes, 0 otherwise.
  int player() const {
    return kind == NodeKind::kPlayer1 ? 1 : kind == NodeKind::kPlayer2 ? 2 : 0;
  }
  bool is_terminal() const { return kind == NodeKind::kTerminal; }
  bool is_chance() const { return kind == NodeKind::kChance; }
  bool is_decision() const { return player() != 0; }
};

// A (infoset, action) pair. infoset < 0 is the empty sequence.
struct Sequence {
  int infoset = -1;
  int action = -1;
  bool empty() const { return infoset < 0; }
  bool operator==(const Sequence&) const = default;
};

struct Infoset {
  int player = 0;
  std::vector<int> members;
  std::vector<std::string> actions;
  Sequence parent_sequence;
  int depth = 0;      // Max node depth among members.
  int own_depth = 0;  // Number of own actions preceding the infoset.
  int offset = 0;     // First slot in flat per-action arrays.
  std::string label;

  int num_actions() const { return static_cast<int>(actions.size()); }
};

struct PayoffEntry {
  int seq1 = -1;  // Slot of sigma_1(z), -1 for the empty sequence.
  int seq2 = -1;
  double weight = 0.0;  // mu_c(z) * U_1(z).
};

struct PerfectRecallViolation {
  int infoset = -1;
  int node_a = -1;
  int node_b = -1;
  std::string message;
};

// Immutable game tree. Nodes are stored in depth-first preorder from the root
// (index 0) and infosets in order of first appearance, so parents always
// precede children.
class GameTree {
 public:
  GameTree() = default;

  // Validates structure, renumbers nodes and infosets topologically and fills
  // derived data. Node::parent, parent_action and depth are recomputed.
  // `infoset_labels` is indexed by the infoset ids used in `nodes`.
  static GameTree FromNodes(std::string name, std::vector<Node> nodes,
                            int root,
                            std::vector<std::string> infoset_labels = {},
                            double utility_scale = 1.0,
                            bool require_perfect_recall = true);

  const std::string& name() const { return name_; }
  // Factor converting stored utilities back into the game's native units.
  double utility_scale() const { return utility_scale_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int h) const { return nodes_[h]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }

  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const Infoset& infoset(int s) const { return infosets_[s]; }
  const std::vector<Infoset>& infosets() const { return infosets_; }
  const std::vector<int>& infosets_of(int player) const {
    return player_infosets_[player - 1];
  }
  int num_slots() const { return num_slots_; }
  // Infoset owning a flat action slot.
  int slot_infoset(int slot) const { return slot_infoset_[slot]; }

  // Slot of sigma_i(h), the last own sequence of `player` above h; -1 if empty.
  int seq(int h, int player) const { return node_seq_[player - 1][h]; }
  double chance_reach(int h) const { return chance_reach_[h]; }
  const std::vector<int>& terminals() const { return terminals_; }
  const std::vector<PayoffEntry>& payoff_entries() const { return payoffs_; }
  // Infosets s' with sigma(s') equal to the given slot.
  const std::vector<int>& child_infosets(int slot) const {
    return child_infosets_[slot];
  }
  // Infosets of `player` with empty parent sequence.
  const std::vector<int>& root_infosets(int player) const {
    return root_infosets_[player - 1];
  }
  // Sum over members h of mu_c(h).
  double infoset_chance_mass(int s) const { return infoset_chance_mass_[s]; }

  int height() const { return height_; }
  // Max over infosets of D(s) (node depth).
  int max_infoset_depth() const { return max_infoset_depth_; }
  // Max over infosets of own_depth + 1, i.e. own decisions on a path.
  int max_own_decisions() const { return max_own_decisions_; }

  const std::vector<PerfectRecallViolation>& recall_violations() const {
    return recall_violations_;
  }

 private:
  std::string name_;
  double utility_scale_ = 1.0;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<int> player_infosets_[2];
  std::vector<int> root_infosets_[2];
  std::vector<int> node_seq_[2];
  std::vector<double> chance_reach_;
  std::vector<int> terminals_;
  std::vector<PayoffEntry> payoffs_;
  std::vector<std::vector<int>> child_infosets_;
  std::vector<int> slot_infoset_;
  std::vector<double> infoset_chance_mass_;
  std::vector<PerfectRecallViolation> recall_violations_;
  int num_slots_ = 0;
  int height_ = 0;
  int max_infoset_depth_ = 0;
  int max_own_decisions_ = 0;
};

// Every pair of members of an infoset must share the owner's own
// (infoset, action) history. Returns one entry per offending member.
std::vector<PerfectRecallViolation> ValidatePerfectRecall(const GameTree& tree);

// Standard three-card Kuhn poker. Utilities are chip payoffs divided by 2.
GameTree BuildKuhn();

// Leduc hold'em: six cards (two suits of J, Q, K), antes of 1, raise sizes 2
// and 4, at most two raises per round. Utilities divided by the maximum
// per-player contribution (13).
GameTree BuildLeduc();

// One-shot matching pennies written as an extensive-form game: player 1
// moves, player 2 moves without observing it.
GameTree BuildMatchingPennies();

// JSON game document; see README for the format.
GameTree LoadGame(const std::string& text);
GameTree LoadGameFile(const std::string& path);
std::string SerializeGame(const GameTree& tree);

// "kuhn", "leduc", "matching_pennies" or a path to a JSON document.
GameTree LoadGameByName(const std::string& id);

}  // namespace qfr

#endif  // QFR_GAME_H_
