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
#include <limits>
#include <set>
#include <stdexcept>

#include "qfr/solvers.h"

namespace qfr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Infosets owning a decision node strictly above some member of s.
std::vector<std::set<int>> AncestorInfosets(const GameTree& tree) {
  std::vector<std::set<int>> out(tree.num_infosets());
  for (int s = 0; s < tree.num_infosets(); ++s) {
    for (int h : tree.infoset(s).members) {
      for (int u = tree.node(h).parent; u >= 0; u = tree.node(u).parent) {
        if (tree.node(u).is_decision()) out[s].insert(tree.node(u).infoset);
      }
    }
  }
  return out;
}

// tau / M1 scaled term; zero whenever tau is zero.
double TauOverM1(double tau, double m1) { return tau == 0.0 ? 0.0 : tau / m1; }

}  // namespace

std::vector<int> InfosetLevels(const GameTree& tree) {
  const auto anc = AncestorInfosets(tree);
  const int n = tree.num_infosets();
  std::vector<int> level(n, -1);
  std::vector<int> state(n, 0);  // 0 new, 1 in progress, 2 done.
  std::vector<std::pair<int, std::set<int>::const_iterator>> stack;
  for (int root = 0; root < n; ++root) {
    if (state[root] == 2) continue;
    stack.push_back({root, anc[root].begin()});
    state[root] = 1;
    while (!stack.empty()) {
      auto& [s, it] = stack.back();
      if (it != anc[s].end()) {
        const int a = *it++;
        if (state[a] == 1) {
          throw std::logic_error("cyclic infoset ancestry");
        }
        if (state[a] == 0) {
          state[a] = 1;
          stack.push_back({a, anc[a].begin()});
        }
        continue;
      }
      int best = 0;
      for (int a : anc[s]) best = std::max(best, level[a] + 1);
      level[s] = best;
      state[s] = 2;
      stack.pop_back();
    }
  }
  return level;
}

std::vector<double> LrSchedule(const GameTree& tree, ScheduleMode mode,
                               double eta0, double ratio) {
  if (mode == ScheduleMode::kUniform) {
    return std::vector<double>(tree.num_infosets(), eta0);
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("schedule ratio must lie in (0, 1]");
  }
  const std::vector<int> level = InfosetLevels(tree);
  std::vector<double> eta(tree.num_infosets());
  for (int s = 0; s < tree.num_infosets(); ++s) {
    eta[s] = eta0 / std::pow(ratio, level[s]);
  }
  return eta;
}

std::vector<double> AncestorEta(const GameTree& tree,
                                const std::vector<double>& eta) {
  const auto anc = AncestorInfosets(tree);
  std::vector<double> out(tree.num_infosets(), 0.0);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    for (int a : anc[s]) out[s] = std::max(out[s], eta[a]);
  }
  return out;
}

void MultiplierBounds(const GameTree& tree, FeedbackKind kind, double gamma,
                      double* m1, double* m2) {
  switch (kind) {
    case FeedbackKind::kCounterfactual:
      *m1 = 1.0;
      *m2 = 1.0;
      break;
    case FeedbackKind::kTrajectoryQ:
      *m1 = 1.0;
      *m2 = gamma > 0.0 ? 1.0 / gamma : kInf;
      break;
    case FeedbackKind::kQValue: {
      double mass = kInf;
      for (int s = 0; s < tree.num_infosets(); ++s) {
        mass = std::min(mass, tree.infoset_chance_mass(s));
      }
      *m1 = gamma * mass;
      *m2 = 1.0;
      break;
    }
  }
}

GameConstants ComputeGameConstants(const GameTree& tree,
                                   const ConstantsParams& params) {
  GameConstants c;
  const int n = tree.num_infosets();
  c.gamma = params.gamma0 > 0.0 ? GammaLowerBound(tree, params.gamma0) : 0.0;
  c.depth = tree.max_infoset_depth();
  int max_actions = 0, min_actions = std::numeric_limits<int>::max();
  for (const Infoset& s : tree.infosets()) {
    max_actions = std::max(max_actions, s.num_actions());
    min_actions = std::min(min_actions, s.num_actions());
  }
  const bool entropy = params.reg.family == RegFamily::kEntropy;
  if (entropy) {
    c.psi_max = std::log(static_cast<double>(max_actions));
    c.psi_max_stated = c.psi_max;
  } else {
    c.psi_max = 0.5;
    c.psi_max_stated = 1.0 / (2.0 * min_actions);
  }
  MultiplierBounds(tree, params.kind, c.gamma, &c.m1, &c.m2);

  c.min_chance_mass = kInf;
  for (int s = 0; s < n; ++s) {
    c.min_chance_mass = std::min(c.min_chance_mass, tree.infoset_chance_mass(s));
  }
  const std::vector<double> nu = ExplorationDistribution(tree);
  c.min_floor = kInf;
  for (double v : nu) c.min_floor = std::min(c.min_floor, params.gamma0 * v);

  const double tm1 = TauOverM1(params.tau, c.m1);
  c.q_bound = tm1 * params.reg.max_alpha() * c.depth * c.psi_max + 1.0;
  if (params.outcome_sampling) {
    c.q_bound = c.min_floor > 0.0 ? c.q_bound / c.min_floor : kInf;
  }
  const double log_inv_gamma = c.gamma > 0.0 ? std::log(1.0 / c.gamma) : kInf;
  const double tau_log = params.tau == 0.0 ? 0.0 : tm1 * log_inv_gamma;

  c.c_diff.resize(n);
  c.c_diff_single.resize(n);
  double max_cdiff = 0.0, max_inner = 0.0;
  for (int s = 0; s < n; ++s) {
    const double alpha = params.reg.alpha_at(s);
    const double k = tree.infoset(s).num_actions();
    if (entropy) {
      c.c_diff[s] = (2.0 / alpha) * (2.0 * c.q_bound + alpha * tau_log);
      c.c_diff_single[s] = (2.0 / alpha) * (c.q_bound + alpha * tau_log);
    } else {
      c.c_diff[s] = (k / alpha) * c.q_bound + 2.0 * std::sqrt(k) * tm1;
      c.c_diff_single[s] = (k / alpha) * c.q_bound + std::sqrt(k) * tm1;
    }
    max_cdiff = std::max(max_cdiff, c.c_diff[s]);
    max_inner = std::max(max_inner, 2.0 * c.q_bound / alpha + tau_log);
  }

  c.c_minus.assign(n, 0.0);
  c.c_ratio.assign(n, 0.0);
  for (int s = 0; s < n; ++s) {
    const double members = tree.infoset(s).members.size();
    switch (params.kind) {
      case FeedbackKind::kCounterfactual:
        break;  // m_s is constant.
      case FeedbackKind::kTrajectoryQ:
        if (entropy) {
          c.c_minus[s] = 12.0 * max_inner / c.gamma;
          c.c_ratio[s] = 12.0 * max_inner;
        } else {
          c.c_minus[s] = 6.0 / (c.gamma * c.gamma) * max_cdiff;
          c.c_ratio[s] = 6.0 * max_cdiff / (c.gamma * c.gamma * c.m1);
        }
        break;
      case FeedbackKind::kQValue:
        if (entropy) {
          c.c_minus[s] = 12.0 * c.m2 * max_inner;
          c.c_ratio[s] = 12.0 * max_inner;
        } else {
          c.c_minus[s] = 6.0 * members * max_cdiff;
          c.c_ratio[s] = 6.0 * members * max_cdiff / c.m1;
        }
        break;
    }
  }

  const double log_terms = std::log(static_cast<double>(params.horizon)) +
                           std::log(static_cast<double>(n)) +
                           std::log(1.0 / params.delta);
  c.c_eta.resize(n);
  c.c_eta_t.resize(n);
  for (int s = 0; s < n; ++s) {
    const double mass = tree.infoset_chance_mass(s);
    if (c.c_minus[s] > 0.0) {
      c.c_eta[s] = c.gamma / (2.0 * c.c_minus[s]) * mass;
      c.c_eta_t[s] =
          c.gamma * c.gamma * mass / (2.0 * c.c_minus[s] * log_terms);
    } else {
      c.c_eta[s] = kInf;
      c.c_eta_t[s] = kInf;
    }
  }
  c.c_visit = log_terms / (c.gamma * c.gamma * c.min_chance_mass);
  return c;
}

ConditionReport EvaluateConditions(const GameTree& tree,
                                   const std::vector<double>& eta,
                                   const GameConstants& constants,
                                   const ConstantsParams& params) {
  ConditionReport report;
  const std::vector<double> anc = AncestorEta(tree, eta);
  const double tm1 = TauOverM1(params.tau, constants.m1);
  const double log_inv_gamma =
      constants.gamma > 0.0 ? std::log(1.0 / constants.gamma) : kInf;
  const double tau_log = params.tau == 0.0 ? 0.0 : tm1 * log_inv_gamma;
  double max_inner = 0.0;
  for (int s = 0; s < tree.num_infosets(); ++s) {
    max_inner = std::max(
        max_inner, 2.0 * constants.q_bound / params.reg.alpha_at(s) + tau_log);
  }
  auto check = [](double lhs, double rhs, int s, std::vector<int>& bad,
                  double& worst) {
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0);
    worst = std::max(worst, ratio);
    if (lhs > rhs * (1.0 + 1e-12)) bad.push_back(s);
  };
  for (int s = 0; s < tree.num_infosets(); ++s) {
    // A: own-ancestor sums for each player along every member's path.
    double lhs_a = 0.0;
    for (int h : tree.infoset(s).members) {
      double sum[2] = {0.0, 0.0};
      for (int u = tree.node(h).parent; u >= 0; u = tree.node(u).parent) {
        const Node& node = tree.node(u);
        if (node.is_decision()) sum[node.player() - 1] += eta[node.infoset];
      }
      lhs_a = std::max({lhs_a, sum[0], sum[1]});
    }
    check(lhs_a, eta[s], s, report.a_violations, report.worst_a);
    check(6.0 * anc[s] * max_inner, 1.0, s, report.b_violations,
          report.worst_b);
    const double alpha = params.reg.alpha_at(s);
    check(eta[s] * (2.0 * constants.q_bound + alpha * tau_log), 1.0, s,
          report.c_violations, report.worst_c);
  }
  return report;
}

void EnableMonitor(SolverState& state, const GameTree& tree,
                   const SolverParams& params, const GameConstants& constants) {
  MultiplierMonitor& mon = state.monitor;
  mon.enabled = true;
  MultiplierBounds(tree, params.kind, constants.gamma, &mon.lower, &mon.upper);
  const std::vector<double> anc = AncestorEta(tree, params.eta);
  mon.step_bound.resize(tree.num_infosets());
  for (int s = 0; s < tree.num_infosets(); ++s) {
    mon.step_bound[s] = constants.c_minus[s] * anc[s];
  }
}

}  // namespace qfr
