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

#include "qfr/solvers.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfr {
namespace {

void RegretMatching(std::span<const double> regrets, std::span<double> out) {
  double total = 0.0;
  for (double r : regrets) total += std::max(r, 0.0);
  for (size_t a = 0; a < out.size(); ++a) {
    out[a] = total > 0.0 ? std::max(regrets[a], 0.0) / total
                         : 1.0 / static_cast<double>(out.size());
  }
}

// Adds weight * mu_p(s, a) for the given players to the average.
void AccumulateAverage(SolverState& state, const GameTree& tree,
                       double weight, int first_player, int last_player) {
  for (int p = first_player; p <= last_player; ++p) {
    const SequenceFormStrategy mu = ToSequenceForm(tree, state.current, p);
    for (int s : tree.infosets_of(p)) {
      const Infoset& info = tree.infoset(s);
      for (int a = 0; a < info.num_actions(); ++a) {
        state.average[info.offset + a] += weight * mu.values[info.offset + a];
      }
    }
  }
  state.has_average = true;
}

// Optimistic pair of proxes sharing one gradient.
void TwoProx(SolverState& state, const GameTree& tree,
             const SolverParams& params, int s, std::span<const double> g,
             double tau0) {
  const PerturbedSimplex simplex = params.perturbation.simplex(tree, s);
  const double alpha = params.reg.alpha_at(s);
  thread_local std::vector<double> next;
  next.resize(g.size());
  Prox(params.reg.family, state.center[s], g, tau0, params.eta[s], alpha,
       simplex, next);
  std::copy(next.begin(), next.end(), state.center[s].begin());
  Prox(params.reg.family, state.center[s], g, tau0, params.eta[s], alpha,
       simplex, state.current[s]);
}

// Zero-feedback steps of the lazy variant: `count` center updates, then the
// played strategy from the final center.
void ZeroFeedbackSteps(SolverState& state, const GameTree& tree,
                       const SolverParams& params, int s, int64_t count) {
  const double w = state.lazy_weight[s];
  if (count <= 0 || w == 0.0) return;
  thread_local std::vector<double> zero, next;
  const int n = tree.infoset(s).num_actions();
  zero.assign(n, 0.0);
  next.resize(n);
  const PerturbedSimplex simplex = params.perturbation.simplex(tree, s);
  const double alpha = params.reg.alpha_at(s);
  for (int64_t k = 0; k < count; ++k) {
    Prox(params.reg.family, state.center[s], zero, w, params.eta[s], alpha,
         simplex, next);
    std::copy(next.begin(), next.end(), state.center[s].begin());
  }
  Prox(params.reg.family, state.center[s], zero, w, params.eta[s], alpha,
       simplex, state.current[s]);
}

void CatchUp(SolverState& state, const GameTree& tree,
             const SolverParams& params, int s, int64_t upto) {
  ZeroFeedbackSteps(state, tree, params, s, upto - state.stamp[s]);
  state.stamp[s] = std::max(state.stamp[s], upto);
}

// Product of own probabilities on the path to h (mu_p(sigma_p(h))).
double OwnReachAbove(const GameTree& tree, const BehavioralProfile& profile,
                     int h) {
  const int p = tree.node(h).player();
  double r = 1.0;
  for (int c = h, u = tree.node(h).parent; u >= 0;
       c = u, u = tree.node(u).parent) {
    const Node& node = tree.node(u);
    if (node.player() == p) r *= profile[node.infoset][tree.node(c).parent_action];
  }
  return r;
}

// mu_{-p}(s) by walking up from every member. `before` is called on each
// opponent infoset encountered prior to reading its strategy.
template <typename F>
double OpponentReachWalk(const GameTree& tree, const BehavioralProfile& profile,
                         int s, F before) {
  const int opp = 3 - tree.infoset(s).player;
  double total = 0.0;
  for (int h : tree.infoset(s).members) {
    double r = tree.chance_reach(h);
    for (int c = h, u = tree.node(h).parent; u >= 0;
         c = u, u = tree.node(u).parent) {
      const Node& node = tree.node(u);
      if (node.player() != opp) continue;
      before(node.infoset);
      r *= profile[node.infoset][tree.node(c).parent_action];
    }
    total += r;
  }
  return total;
}

struct LazyEntry {
  int infoset;
  int action;
  double value;
  double weight;  // tau / m_s = tau * mu_p(sigma(s)).
};

// Dilated-form estimator along the trajectory: utility plus the player's own
// later regularizers, each importance-weighted by 1 / mu_{-p}(s').
template <typename F>
std::vector<LazyEntry> LazyEstimate(const GameTree& tree,
                                    const Trajectory& traj,
                                    const BehavioralProfile& profile,
                                    const SolverParams& params, F before) {
  std::vector<LazyEntry> out;
  double later[2] = {0.0, 0.0};
  for (auto it = traj.steps.rbegin(); it != traj.steps.rend(); ++it) {
    const Node& node = tree.node(it->node);
    if (node.is_chance()) continue;
    const int s = node.infoset;
    const int p = node.player();
    const double prob = profile[s][it->action];
    const double value =
        (traj.utility(p) - params.tau * later[p - 1]) / prob;
    const double weight =
        params.tau * OwnReachAbove(tree, profile, it->node);
    out.push_back({s, it->action, value, weight});
    if (params.tau != 0.0) {
      const double psi = LocalPsi(params.reg.local(s), profile[s]);
      later[p - 1] += psi / OpponentReachWalk(tree, profile, s, before);
    }
  }
  return out;
}

void ApplyOneHot(SolverState& state, const GameTree& tree,
                 const SolverParams& params, int s, int action, double value,
                 double tau0, bool optimistic) {
  thread_local std::vector<double> g;
  g.assign(tree.infoset(s).num_actions(), 0.0);
  g[action] = -value;
  if (optimistic) {
    TwoProx(state, tree, params, s, g, tau0);
  } else {
    Prox(params.reg.family, std::vector<double>(state.current[s].begin(),
                                                state.current[s].end()),
         g, tau0, params.eta[s], params.reg.alpha_at(s),
         params.perturbation.simplex(tree, s), state.current[s]);
    std::copy(state.current[s].begin(), state.current[s].end(),
              state.center[s].begin());
  }
}

}  // namespace

const char* AlgorithmName(Algorithm algo) {
  switch (algo) {
    case Algorithm::kQfr: return "qfr";
    case Algorithm::kQfrStochastic: return "qfr-stoch";
    case Algorithm::kQfrLazy: return "qfr-lazy";
    case Algorithm::kPga: return "pga";
    case Algorithm::kCfr: return "cfr";
    case Algorithm::kCfrPlus: return "cfrplus";
    case Algorithm::kOsMccfr: return "osmccfr";
    case Algorithm::kMmd: return "mmd";
    case Algorithm::kMmdStochastic: return "mmd-stoch";
  }
  return "";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a :
       {Algorithm::kQfr, Algorithm::kQfrStochastic, Algorithm::kQfrLazy,
        Algorithm::kPga, Algorithm::kCfr, Algorithm::kCfrPlus,
        Algorithm::kOsMccfr, Algorithm::kMmd, Algorithm::kMmdStochastic}) {
    if (name == AlgorithmName(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm " + name);
}

SolverParams MakeParams(const GameTree& tree, Algorithm algo,
                        FeedbackKind kind, RegFamily family, double eta,
                        double tau, double gamma0, bool uniform_nu) {
  SolverParams p;
  p.algorithm = algo;
  p.kind = kind;
  p.reg.family = family;
  p.tau = tau;
  p.eta.assign(tree.num_infosets(), eta);
  p.perturbation = MakePerturbation(tree, gamma0, uniform_nu);
  return p;
}

void MultiplierMonitor::Observe(const std::vector<double>& m,
                                bool consecutive) {
  if (!enabled) return;
  ++observations;
  for (size_t s = 0; s < m.size(); ++s) {
    if (m[s] < lower * (1.0 - 1e-12) - 1e-300 ||
        m[s] > upper * (1.0 + 1e-12)) {
      ++hard_violations;
    }
  }
  if (consecutive && last_m.size() == m.size() && !step_bound.empty()) {
    for (size_t s = 0; s < m.size(); ++s) {
      const double d = std::abs(m[s] - last_m[s]);
      const double bound = step_bound[s];
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, d / bound);
      if (d > bound * (1.0 + 1e-12) + 1e-15) ++soft_violations;
    }
  }
  last_m = m;
}

SolverState InitState(const GameTree& tree, const SolverParams& params) {
  SolverState state;
  state.current = InitialProfile(tree, params.perturbation);
  state.center = state.current;
  state.stamp.assign(tree.num_infosets(), 0);
  state.regrets.assign(tree.num_slots(), 0.0);
  state.average.assign(tree.num_slots(), 0.0);
  state.lazy_weight.assign(tree.num_infosets(), 0.0);
  if (params.tau != 0.0) {
    for (int s = 0; s < tree.num_infosets(); ++s) {
      state.lazy_weight[s] =
          params.tau *
          OwnReachAbove(tree, state.current, tree.infoset(s).members.front());
    }
  }
  return state;
}

BehavioralProfile AverageProfile(const GameTree& tree,
                                 const SolverState& state) {
  BehavioralProfile out(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    double total = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      total += state.average[info.offset + a];
    }
    if (total <= 0.0) continue;
    for (int a = 0; a < info.num_actions(); ++a) {
      out[s][a] = state.average[info.offset + a] / total;
    }
  }
  return out;
}

void QfrFullStep(SolverState& state, const GameTree& tree,
                 const SolverParams& params) {
  const FeedbackBundle fb =
      ComputeFeedback(tree, state.current, params.kind, params.tau, params.reg);
  state.monitor.Observe(fb.m, true);
  thread_local std::vector<double> g;
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    g.resize(info.num_actions());
    for (int a = 0; a < info.num_actions(); ++a) g[a] = -fb.q[info.offset + a];
    const double tau0 = params.tau * fb.opp_reach[s] / fb.m[s];
    TwoProx(state, tree, params, s, g, tau0);
  }
  ++state.t;
}

void QfrStochasticStep(SolverState& state, const GameTree& tree,
                       const SolverParams& params, Rng& rng) {
  const Trajectory traj = SampleTrajectory(tree, state.current, rng);
  const SampledFeedback est =
      EstimateTrajectoryQ(tree, traj, state.current, params.tau, params.reg);
  for (const SampledEntry& e : est.entries) {
    ApplyOneHot(state, tree, params, e.infoset, e.action, e.value, params.tau,
                true);
  }
  ++state.t;
}

void LazyQfrStep(SolverState& state, const GameTree& tree,
                 const SolverParams& params, Rng& rng) {
  const int64_t t = state.t;
  auto catch_up = [&](int s) { CatchUp(state, tree, params, s, t - 1); };
  Trajectory traj;
  int h = tree.root();
  while (!tree.node(h).is_terminal()) {
    const Node& node = tree.node(h);
    int a;
    if (node.is_chance()) {
      a = SampleChance(node, rng);
    } else {
      catch_up(node.infoset);
      a = rng.Sample(state.current[node.infoset]);
    }
    traj.steps.push_back({h, a});
    h = node.actions[a].child;
  }
  traj.terminal = h;
  traj.utility_p1 = tree.node(h).utility_p1;

  const std::vector<LazyEntry> est =
      LazyEstimate(tree, traj, state.current, params, catch_up);
  for (const LazyEntry& e : est) {
    state.lazy_weight[e.infoset] = e.weight;
    ApplyOneHot(state, tree, params, e.infoset, e.action, e.value, e.weight,
                true);
    state.stamp[e.infoset] = t;
  }
  ++state.t;
}

void EagerDilatedStep(SolverState& state, const GameTree& tree,
                      const SolverParams& params, Rng& rng) {
  const int64_t t = state.t;
  const Trajectory traj = SampleTrajectory(tree, state.current, rng);
  const std::vector<LazyEntry> est =
      LazyEstimate(tree, traj, state.current, params, [](int) {});
  std::vector<bool> visited(tree.num_infosets(), false);
  for (const LazyEntry& e : est) {
    visited[e.infoset] = true;
    state.lazy_weight[e.infoset] = e.weight;
    ApplyOneHot(state, tree, params, e.infoset, e.action, e.value, e.weight,
                true);
  }
  for (int s = 0; s < tree.num_infosets(); ++s) {
    if (!visited[s]) ZeroFeedbackSteps(state, tree, params, s, 1);
    state.stamp[s] = t;
  }
  ++state.t;
}

void LazySynchronize(SolverState& state, const GameTree& tree,
                     const SolverParams& params) {
  for (int s = 0; s < tree.num_infosets(); ++s) {
    CatchUp(state, tree, params, s, state.t - 1);
  }
}

void PgaStep(SolverState& state, const GameTree& tree,
             const SolverParams& params) {
  const FeedbackBundle fb =
      ComputeFeedback(tree, state.current, params.kind, params.tau, params.reg);
  state.monitor.Observe(fb.m, true);
  AccumulateAverage(state, tree, 1.0, 1, 2);
  thread_local std::vector<double> z;
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    z.resize(info.num_actions());
    for (int a = 0; a < info.num_actions(); ++a) {
      z[a] = state.current[s][a] + params.eta[s] * fb.q[info.offset + a];
    }
    ProjectTruncatedSimplex(z, params.perturbation.simplex(tree, s),
                            state.current[s]);
    std::copy(state.current[s].begin(), state.current[s].end(),
              state.center[s].begin());
  }
  ++state.t;
}

void CfrStep(SolverState& state, const GameTree& tree) {
  const FeedbackBundle fb = ComputeFeedback(
      tree, state.current, FeedbackKind::kCounterfactual, 0.0, {});
  AccumulateAverage(state, tree, 1.0, 1, 2);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    double v = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      v += state.current[s][a] * fb.q[info.offset + a];
    }
    for (int a = 0; a < info.num_actions(); ++a) {
      state.regrets[info.offset + a] += fb.q[info.offset + a] - v;
    }
  }
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    RegretMatching({state.regrets.data() + info.offset,
                    static_cast<size_t>(info.num_actions())},
                   state.current[s]);
  }
  ++state.t;
}

void CfrPlusStep(SolverState& state, const GameTree& tree) {
  for (int p = 1; p <= 2; ++p) {
    const FeedbackBundle fb = ComputeFeedback(
        tree, state.current, FeedbackKind::kCounterfactual, 0.0, {});
    AccumulateAverage(state, tree, static_cast<double>(state.t), p, p);
    for (int s : tree.infosets_of(p)) {
      const Infoset& info = tree.infoset(s);
      double v = 0.0;
      for (int a = 0; a < info.num_actions(); ++a) {
        v += state.current[s][a] * fb.q[info.offset + a];
      }
      for (int a = 0; a < info.num_actions(); ++a) {
        double& r = state.regrets[info.offset + a];
        r = std::max(r + fb.q[info.offset + a] - v, 0.0);
      }
      RegretMatching({state.regrets.data() + info.offset,
                      static_cast<size_t>(info.num_actions())},
                     state.current[s]);
    }
  }
  ++state.t;
}

namespace {

struct OsSample {
  std::vector<double> regret;          // Slot layout, sparse.
  std::vector<std::pair<int, double>> avg_weight;  // (infoset, weight).
  std::vector<int> visited;
};

// One epsilon-on-policy trajectory; regret increments
//   r(s, a) = 1{a = a_k} v(s, a_k) - v(s),
//   v(s, a_k) = W pi_{-p}(h) pi(h a_k -> z) / q(z).
void OsSampleInto(const GameTree& tree, const BehavioralProfile& profile,
                  Rng& rng, double explore, OsSample& out) {
  struct Visit {
    int node;
    int action;
    double reach[3];  // p1, p2, chance under pi, at the node.
    double sample;    // Sampling probability of reaching the node.
  };
  thread_local std::vector<Visit> path;
  thread_local std::vector<double> mixed;
  path.clear();
  double reach[3] = {1.0, 1.0, 1.0};
  double sample = 1.0;
  int h = tree.root();
  while (!tree.node(h).is_terminal()) {
    const Node& node = tree.node(h);
    Visit v{h, -1, {reach[0], reach[1], reach[2]}, sample};
    if (node.is_chance()) {
      v.action = SampleChance(node, rng);
      const double p = node.actions[v.action].prob;
      reach[2] *= p;
      sample *= p;
    } else {
      auto pi = profile[node.infoset];
      mixed.resize(pi.size());
      for (size_t a = 0; a < pi.size(); ++a) {
        mixed[a] = (1.0 - explore) * pi[a] +
                   explore / static_cast<double>(pi.size());
      }
      v.action = rng.Sample(mixed);
      reach[node.player() - 1] *= pi[v.action];
      sample *= mixed[v.action];
    }
    path.push_back(v);
    h = node.actions[v.action].child;
  }
  const double u1 = tree.node(h).utility_p1;
  // Walk back keeping pi and q products from the node to z.
  double tail_pi = 1.0;
  double tail_q = 1.0;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Node& node = tree.node(it->node);
    if (node.is_chance()) {
      const double p = node.actions[it->action].prob;
      tail_pi *= p;
      tail_q *= p;
      continue;
    }
    const int s = node.infoset;
    const int p = node.player();
    auto pi = profile[s];
    const double q_action = (1.0 - explore) * pi[it->action] +
                            explore / static_cast<double>(pi.size());
    const double total_q = it->sample * q_action * tail_q;
    const double w = (p == 1 ? u1 : -u1) * it->reach[2] * it->reach[2 - p] /
                     total_q;
    const double value_action = w * tail_pi;  // pi from the child on.
    const double value_node = value_action * pi[it->action];
    const Infoset& info = tree.infoset(s);
    for (int a = 0; a < info.num_actions(); ++a) {
      out.regret[info.offset + a] +=
          (a == it->action ? value_action : 0.0) - value_node;
    }
    out.visited.push_back(s);
    out.avg_weight.push_back({s, it->reach[p - 1] / it->sample});
    tail_pi *= pi[it->action];
    tail_q *= q_action;
  }
}

}  // namespace

std::vector<double> OsMccfrRegretSample(const GameTree& tree,
                                        const BehavioralProfile& profile,
                                        Rng& rng, double explore) {
  OsSample sample;
  sample.regret.assign(tree.num_slots(), 0.0);
  OsSampleInto(tree, profile, rng, explore, sample);
  return sample.regret;
}

void OsMccfrStep(SolverState& state, const GameTree& tree, Rng& rng,
                 double explore) {
  if (!(explore > 0.0 && explore <= 1.0)) {
    throw std::invalid_argument("exploration must lie in (0, 1]");
  }
  thread_local OsSample sample;
  sample.regret.assign(tree.num_slots(), 0.0);
  sample.avg_weight.clear();
  sample.visited.clear();
  OsSampleInto(tree, state.current, rng, explore, sample);
  for (const auto& [s, w] : sample.avg_weight) {
    const Infoset& info = tree.infoset(s);
    for (int a = 0; a < info.num_actions(); ++a) {
      state.average[info.offset + a] += w * state.current[s][a];
    }
  }
  state.has_average = true;
  for (int s : sample.visited) {
    const Infoset& info = tree.infoset(s);
    for (int a = 0; a < info.num_actions(); ++a) {
      state.regrets[info.offset + a] += sample.regret[info.offset + a];
    }
  }
  for (int s : sample.visited) {
    const Infoset& info = tree.infoset(s);
    RegretMatching({state.regrets.data() + info.offset,
                    static_cast<size_t>(info.num_actions())},
                   state.current[s]);
  }
  ++state.t;
}

double RegretBound(const GameTree& tree, const SolverState& state,
                   int player) {
  double total = 0.0;
  for (int s : tree.infosets_of(player)) {
    const Infoset& info = tree.infoset(s);
    double best = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      best = std::max(best, state.regrets[info.offset + a]);
    }
    total += best;
  }
  return total;
}

void MmdStep(SolverState& state, const GameTree& tree,
             const SolverParams& params) {
  const FeedbackBundle fb =
      ComputeFeedback(tree, state.current, params.kind, params.tau, params.reg);
  state.monitor.Observe(fb.m, true);
  thread_local std::vector<double> g, x0;
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const Infoset& info = tree.infoset(s);
    g.resize(info.num_actions());
    for (int a = 0; a < info.num_actions(); ++a) g[a] = -fb.q[info.offset + a];
    x0.assign(state.current[s].begin(), state.current[s].end());
    const double tau0 = params.tau * fb.opp_reach[s] / fb.m[s];
    Prox(params.reg.family, x0, g, tau0, params.eta[s], params.reg.alpha_at(s),
         params.perturbation.simplex(tree, s), state.current[s]);
    std::copy(state.current[s].begin(), state.current[s].end(),
              state.center[s].begin());
  }
  ++state.t;
}

void MmdStochasticStep(SolverState& state, const GameTree& tree,
                       const SolverParams& params, Rng& rng) {
  const Trajectory traj = SampleTrajectory(tree, state.current, rng);
  const SampledFeedback est =
      EstimateTrajectoryQ(tree, traj, state.current, params.tau, params.reg);
  for (const SampledEntry& e : est.entries) {
    ApplyOneHot(state, tree, params, e.infoset, e.action, e.value, params.tau,
                false);
  }
  ++state.t;
}

void Step(SolverState& state, const GameTree& tree, const SolverParams& params,
          Rng& rng) {
  switch (params.algorithm) {
    case Algorithm::kQfr: QfrFullStep(state, tree, params); break;
    case Algorithm::kQfrStochastic:
      QfrStochasticStep(state, tree, params, rng);
      break;
    case Algorithm::kQfrLazy: LazyQfrStep(state, tree, params, rng); break;
    case Algorithm::kPga: PgaStep(state, tree, params); break;
    case Algorithm::kCfr: CfrStep(state, tree); break;
    case Algorithm::kCfrPlus: CfrPlusStep(state, tree); break;
    case Algorithm::kOsMccfr:
      OsMccfrStep(state, tree, rng, params.explore);
      break;
    case Algorithm::kMmd: MmdStep(state, tree, params); break;
    case Algorithm::kMmdStochastic:
      MmdStochasticStep(state, tree, params, rng);
      break;
  }
}

}  // namespace qfr
