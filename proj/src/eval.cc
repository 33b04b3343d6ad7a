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

#include "qfr/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qfr {
namespace {

// Backward induction for one responder. Opponent and chance are fixed, so
// values below a decided infoset never change and are memoized per node.
class ResponseSolver {
 public:
  ResponseSolver(const GameTree& tree, const BehavioralProfile& profile,
                 int player, double tau, const Perturbation* pert,
                 const RegularizerSpec& spec)
      : tree_(tree),
        player_(player),
        tau_(tau),
        pert_(pert),
        spec_(spec),
        policy_(profile),
        value_(tree.num_nodes(), 0.0),
        done_(tree.num_nodes(), 0),
        opp_reward_(tree.num_infosets(), 0.0) {
    const std::vector<ReachTriple> reach = ReachProbabilities(tree, profile);
    weight_.resize(tree.num_nodes());
    for (int h = 0; h < tree.num_nodes(); ++h) {
      weight_[h] = reach[h].chance * reach[h].player(3 - player);
    }
    if (tau != 0.0) {
      for (int s = 0; s < tree.num_infosets(); ++s) {
        if (tree.infoset(s).player == player) continue;
        opp_reward_[s] = tau * LocalPsi(spec.local(s), profile[s]);
      }
    }
  }

  BestResponseResult Solve() {
    std::vector<int> order = tree_.infosets_of(player_);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return tree_.infoset(a).own_depth > tree_.infoset(b).own_depth;
    });
    std::vector<double> q, zero_nu;
    for (int s : order) {
      const Infoset& info = tree_.infoset(s);
      q.assign(info.num_actions(), 0.0);
      double mass = 0.0;
      for (int h : info.members) {
        const double w = weight_[h];
        mass += w;
        if (w == 0.0) continue;
        const Node& node = tree_.node(h);
        for (int a = 0; a < info.num_actions(); ++a) {
          q[a] += w * Value(node.actions[a].child);
        }
      }
      PerturbedSimplex simplex;
      if (pert_ != nullptr) {
        simplex = pert_->simplex(tree_, s);
      } else {
        zero_nu.assign(info.num_actions(), 0.0);
        simplex = {0.0, zero_nu};
      }
      ArgmaxRegularized(q, tau_ * mass, spec_.alpha_at(s), spec_.family,
                        simplex, policy_[s]);
    }
    return {Value(tree_.root()), policy_};
  }

 private:
  double Value(int h) {
    if (done_[h]) return value_[h];
    const Node& node = tree_.node(h);
    double v = 0.0;
    if (node.is_terminal()) {
      v = player_ == 1 ? node.utility_p1 : -node.utility_p1;
    } else if (node.is_chance()) {
      for (const Edge& e : node.actions) v += e.prob * Value(e.child);
    } else {
      const auto pi = policy_[node.infoset];
      for (size_t a = 0; a < node.actions.size(); ++a) {
        if (pi[a] != 0.0) v += pi[a] * Value(node.actions[a].child);
      }
      if (tau_ != 0.0) {
        v += node.player() == player_
                 ? -tau_ * LocalPsi(spec_.local(node.infoset), pi)
                 : opp_reward_[node.infoset];
      }
    }
    value_[h] = v;
    done_[h] = 1;
    return v;
  }

  const GameTree& tree_;
  int player_;
  double tau_;
  const Perturbation* pert_;
  const RegularizerSpec& spec_;
  BehavioralProfile policy_;
  std::vector<double> value_;
  std::vector<char> done_;
  std::vector<double> weight_;
  std::vector<double> opp_reward_;
};

}  // namespace

BestResponseResult BestResponse(const GameTree& tree,
                                const BehavioralProfile& profile, int player) {
  ResponseSolver solver(tree, profile, player, 0.0, nullptr, RegularizerSpec{});
  return solver.Solve();
}

double Exploitability(const GameTree& tree, const BehavioralProfile& profile) {
  const double gap =
      BestResponse(tree, profile, 1).value + BestResponse(tree, profile, 2).value;
  return gap;
}

BestResponseResult RegularizedResponse(const GameTree& tree,
                                       const BehavioralProfile& profile,
                                       int player, double tau,
                                       const Perturbation& pert,
                                       const RegularizerSpec& spec) {
  ResponseSolver solver(tree, profile, player, tau, &pert, spec);
  return solver.Solve();
}

void CheckFeasible(const GameTree& tree, const BehavioralProfile& profile,
                   const Perturbation& pert, double tol) {
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const PerturbedSimplex simplex = pert.simplex(tree, s);
    const auto pi = profile[s];
    for (size_t a = 0; a < pi.size(); ++a) {
      const double floor = simplex.gamma * simplex.nu[a];
      if (pi[a] < floor - tol) {
        throw DomainError("profile below the perturbation floor at infoset " +
                          std::to_string(s) + " action " + std::to_string(a));
      }
    }
  }
}

double PerturbedRegularizedGap(const GameTree& tree,
                               const BehavioralProfile& profile, double tau,
                               const Perturbation& pert,
                               const RegularizerSpec& spec) {
  CheckFeasible(tree, profile, pert, 1e-9);
  return RegularizedResponse(tree, profile, 1, tau, pert, spec).value +
         RegularizedResponse(tree, profile, 2, tau, pert, spec).value;
}

BehavioralProfile RandomFeasibleProfile(const GameTree& tree,
                                        const Perturbation& pert, Rng& rng) {
  BehavioralProfile out(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const PerturbedSimplex simplex = pert.simplex(tree, s);
    auto pi = out[s];
    double total = 0.0, floor_mass = 0.0;
    for (size_t a = 0; a < pi.size(); ++a) {
      pi[a] = -std::log(1.0 - rng.Uniform());
      total += pi[a];
      floor_mass += simplex.gamma * simplex.nu[a];
    }
    for (size_t a = 0; a < pi.size(); ++a) {
      pi[a] = simplex.gamma * simplex.nu[a] + (1.0 - floor_mass) * pi[a] / total;
    }
  }
  return out;
}

ReferenceResult ComputeReference(const GameTree& tree, double tau,
                                 const Perturbation& pert,
                                 const RegularizerSpec& spec, double tol,
                                 const ReferenceOptions& options) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("reference solution needs tau > 0");
  }
  SolverParams params;
  params.algorithm = Algorithm::kQfr;
  params.kind = FeedbackKind::kQValue;
  params.reg = spec;
  params.tau = tau;
  params.eta.assign(tree.num_infosets(), options.eta);
  params.perturbation = pert;
  SolverState state = InitState(tree, params);
  if (options.init_seed) {
    Rng rng(*options.init_seed);
    state.current = RandomFeasibleProfile(tree, pert, rng);
    state.center = state.current;
  }
  double best = std::numeric_limits<double>::infinity();
  const int64_t every = std::max<int64_t>(1, options.check_every);
  for (int64_t it = 0; it <= options.max_iters; ++it) {
    if (it % every == 0 || it == options.max_iters) {
      const double gap =
          PerturbedRegularizedGap(tree, state.current, tau, pert, spec);
      if (std::isfinite(gap)) best = std::min(best, gap);
      if (gap <= tol) return {state.current, gap, it};
    }
    if (it == options.max_iters) break;
    QfrFullStep(state, tree, params);
  }
  throw ReferenceError("reference solve exhausted " +
                           std::to_string(options.max_iters) +
                           " iterations; best gap " + std::to_string(best),
                       best);
}

double BregmanToReference(const GameTree& tree,
                          const BehavioralProfile& profile,
                          const BehavioralProfile& reference,
                          const RegularizerSpec& spec) {
  return BregmanProfiles(tree, reference, profile, spec);
}

}  // namespace qfr
