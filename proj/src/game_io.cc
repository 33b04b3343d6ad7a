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

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "qfr/game.h"

namespace qfr {
namespace {

using nlohmann::json;

NodeKind ParseKind(const std::string& kind, int id) {
  if (kind == "p1") return NodeKind::kPlayer1;
  if (kind == "p2") return NodeKind::kPlayer2;
  if (kind == "chance") return NodeKind::kChance;
  if (kind == "terminal") return NodeKind::kTerminal;
  throw GameError("node " + std::to_string(id) + " has unknown kind \"" +
                  kind + "\"");
}

const char* KindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kPlayer1: return "p1";
    case NodeKind::kPlayer2: return "p2";
    case NodeKind::kChance: return "chance";
    case NodeKind::kTerminal: return "terminal";
  }
  return "";
}

GameTree FromJson(const json& doc) {
  if (!doc.is_object()) throw GameError("game document must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw GameError("game document lacks a \"nodes\" array");
  }
  if (!doc.contains("root")) throw GameError("game document lacks \"root\"");
  const json& jnodes = doc["nodes"];
  std::unordered_map<long long, int> index;
  for (size_t i = 0; i < jnodes.size(); ++i) {
    const long long id = jnodes[i].at("id").get<long long>();
    if (!index.emplace(id, static_cast<int>(i)).second) {
      throw GameError("duplicate node id " + std::to_string(id));
    }
  }
  auto lookup = [&](long long id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw GameError("reference to unknown node id " + std::to_string(id));
    }
    return it->second;
  };

  std::vector<Node> nodes(jnodes.size());
  for (size_t i = 0; i < jnodes.size(); ++i) {
    const json& jn = jnodes[i];
    const int id = jn.at("id").get<int>();
    Node& n = nodes[i];
    n.kind = ParseKind(jn.at("kind").get<std::string>(), id);
    const bool terminal = n.kind == NodeKind::kTerminal;
    if (terminal != jn.contains("utility_p1")) {
      throw GameError("node " + std::to_string(id) +
                      ": utility_p1 must be present exactly on terminals");
    }
    if (terminal) n.utility_p1 = jn["utility_p1"].get<double>();
    if (n.kind == NodeKind::kPlayer1 || n.kind == NodeKind::kPlayer2) {
      if (!jn.contains("infoset")) {
        throw GameError("decision node " + std::to_string(id) +
                        " lacks an infoset");
      }
      n.infoset = jn["infoset"].get<int>();
      if (n.infoset < 0) {
        throw GameError("node " + std::to_string(id) + " has negative infoset");
      }
    }
    if (jn.contains("actions")) {
      for (const json& ja : jn["actions"]) {
        Edge e;
        e.label = ja.at("label").get<std::string>();
        e.child = lookup(ja.at("child").get<long long>());
        const bool chance = n.kind == NodeKind::kChance;
        if (chance != ja.contains("prob")) {
          throw GameError("node " + std::to_string(id) +
                          ": prob must be present exactly on chance actions");
        }
        if (chance) e.prob = ja["prob"].get<double>();
        n.actions.push_back(std::move(e));
      }
    }
  }
  std::vector<std::string> labels;
  if (doc.contains("infoset_labels")) {
    labels = doc["infoset_labels"].get<std::vector<std::string>>();
  }
  const double scale = doc.value("utility_scale", 1.0);
  return GameTree::FromNodes(doc.value("name", std::string("game")),
                             std::move(nodes),
                             lookup(doc["root"].get<long long>()),
                             std::move(labels), scale);
}

}  // namespace

GameTree LoadGame(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GameError(std::string("parse error: ") + e.what());
  }
  try {
    return FromJson(doc);
  } catch (const json::exception& e) {
    throw GameError(std::string("malformed game document: ") + e.what());
  }
}

GameTree LoadGameFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError("cannot open game file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return LoadGame(buf.str());
}

std::string SerializeGame(const GameTree& tree) {
  json doc;
  doc["name"] = tree.name();
  doc["root"] = tree.root();
  doc["utility_scale"] = tree.utility_scale();
  json labels = json::array();
  for (const Infoset& s : tree.infosets()) labels.push_back(s.label);
  doc["infoset_labels"] = labels;
  json nodes = json::array();
  for (int h = 0; h < tree.num_nodes(); ++h) {
    const Node& n = tree.node(h);
    json jn;
    jn["id"] = h;
    jn["kind"] = KindName(n.kind);
    if (n.is_decision()) jn["infoset"] = n.infoset;
    if (n.is_terminal()) {
      jn["utility_p1"] = n.utility_p1;
    } else {
      json acts = json::array();
      for (const Edge& e : n.actions) {
        json ja = {{"label", e.label}, {"child", e.child}};
        if (n.is_chance()) ja["prob"] = e.prob;
        acts.push_back(ja);
      }
      jn["actions"] = acts;
    }
    nodes.push_back(jn);
  }
  doc["nodes"] = nodes;
  return doc.dump(1);
}

GameTree LoadGameByName(const std::string& id) {
  if (id == "kuhn") return BuildKuhn();
  if (id == "leduc") return BuildLeduc();
  if (id == "matching_pennies") return BuildMatchingPennies();
  return LoadGameFile(id);
}

}  // namespace qfr
