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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qfr::testing {

BehavioralProfile RandomProfile(const GameTree& tree, Rng& rng,
                                double min_prob) {
  BehavioralProfile out(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    auto pi = out[s];
    double total = 0.0;
    for (double& v : pi) {
      v = min_prob + rng.Uniform();
      total += v;
    }
    for (double& v : pi) v /= total;
  }
  return out;
}

double PsiByHand(RegFamily family, double alpha, std::span<const double> x) {
  double total = 0.0;
  if (family == RegFamily::kEntropy) {
    total = std::log(static_cast<double>(x.size()));
    for (double v : x) {
      if (v > 0.0) total += v * std::log(v);
    }
  } else {
    for (double v : x) total += 0.5 * v * v;
  }
  return alpha * total;
}

std::vector<double> PathSumCounterfactual(const GameTree& tree,
                                          const BehavioralProfile& profile,
                                          double tau, RegFamily family) {
  std::vector<double> cf(tree.num_slots(), 0.0);
  struct Hop {
    int node;    // Node the edge leaves.
    int action;
    double prob;
    int owner;   // 0 chance, 1 or 2.
  };
  std::vector<Hop> path;
  for (int g = 0; g < tree.num_nodes(); ++g) {
    const Node& gn = tree.node(g);
    if (gn.is_chance()) continue;
    double reward_p1;
    if (gn.is_terminal()) {
      reward_p1 = gn.utility_p1;
    } else {
      if (tau == 0.0) continue;
      const double psi = PsiByHand(family, 1.0, profile[gn.infoset]);
      reward_p1 = gn.player() == 1 ? -tau * psi : tau * psi;
    }
    path.clear();
    for (int c = g; tree.node(c).parent >= 0; c = tree.node(c).parent) {
      const int u = tree.node(c).parent;
      const Node& un = tree.node(u);
      const int a = tree.node(c).parent_action;
      const double p =
          un.is_chance() ? un.actions[a].prob : profile[un.infoset][a];
      path.push_back({u, a, p, un.player()});
    }
    std::reverse(path.begin(), path.end());
    for (size_t i = 0; i < path.size(); ++i) {
      const int p = path[i].owner;
      if (p == 0) continue;
      double w = 1.0;
      for (size_t j = 0; j < i; ++j) {
        if (path[j].owner != p) w *= path[j].prob;
      }
      for (size_t j = i + 1; j < path.size(); ++j) w *= path[j].prob;
      const Infoset& info = tree.infoset(tree.node(path[i].node).infoset);
      const double sign = p == 1 ? 1.0 : -1.0;
      cf[info.offset + path[i].action] += w * sign * reward_p1;
    }
  }
  return cf;
}

namespace {

double Traverse(const GameTree& tree, const BehavioralProfile& profile,
                int h) {
  const Node& node = tree.node(h);
  if (node.is_terminal()) return node.utility_p1;
  double v = 0.0;
  for (size_t a = 0; a < node.actions.size(); ++a) {
    const double p =
        node.is_chance() ? node.actions[a].prob : profile[node.infoset][a];
    if (p != 0.0) v += p * Traverse(tree, profile, node.actions[a].child);
  }
  return v;
}

}  // namespace

double TraversalUtility(const GameTree& tree, const BehavioralProfile& profile) {
  return Traverse(tree, profile, tree.root());
}

double PureStrategyBestResponse(const GameTree& tree,
                                const BehavioralProfile& profile, int player) {
  const std::vector<int>& own = tree.infosets_of(player);
  double count = 1.0;
  for (int s : own) count *= tree.infoset(s).num_actions();
  if (count > 1e7) throw std::invalid_argument("too many pure strategies");
  std::vector<int> choice(own.size(), 0);
  BehavioralProfile work = profile;
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (size_t i = 0; i < own.size(); ++i) {
      auto pi = work[own[i]];
      std::fill(pi.begin(), pi.end(), 0.0);
      pi[choice[i]] = 1.0;
    }
    const double u = TraversalUtility(tree, work);
    best = std::max(best, player == 1 ? u : -u);
    size_t i = 0;
    for (; i < own.size(); ++i) {
      if (++choice[i] < tree.infoset(own[i]).num_actions()) break;
      choice[i] = 0;
    }
    if (i == own.size()) break;
  }
  return best;
}

namespace {

// ProxObjective with log x0 supplied, so grid scans take one log per entry.
double Objective(RegFamily family, std::span<const double> x,
                 std::span<const double> x0, std::span<const double> log_x0,
                 std::span<const double> g, double tau0, double eta,
                 double alpha) {
  double linear = 0.0, div = 0.0, psi = 0.0;
  for (size_t a = 0; a < x.size(); ++a) {
    linear += x[a] * g[a];
    if (family == RegFamily::kEntropy) {
      if (x[a] > 0.0) {
        const double log_x = std::log(x[a]);
        psi += x[a] * log_x;
        div += x[a] * (log_x - log_x0[a]);
      }
      div += x0[a] - x[a];
    } else {
      psi += 0.5 * x[a] * x[a];
      div += 0.5 * (x[a] - x0[a]) * (x[a] - x0[a]);
    }
  }
  if (family == RegFamily::kEntropy) {
    psi += std::log(static_cast<double>(x.size()));
  }
  return linear + tau0 * alpha * psi + alpha * div / eta;
}

std::vector<double> Logs(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (size_t a = 0; a < x.size(); ++a) out[a] = std::log(x[a]);
  return out;
}

}  // namespace

double ProxObjective(RegFamily family, std::span<const double> x,
                     std::span<const double> x0, std::span<const double> g,
                     double tau0, double eta, double alpha) {
  return Objective(family, x, x0, Logs(x0), g, tau0, eta, alpha);
}

double GridMinimum(RegFamily family, std::span<const double> x0,
                   std::span<const double> g, double tau0, double eta,
                   double alpha, double gamma, std::span<const double> nu,
                   int points, Rng& rng) {
  const size_t n = x0.size();
  double floor_mass = 0.0;
  for (double v : nu) floor_mass += gamma * v;
  const std::vector<double> log_x0 = Logs(x0);
  std::vector<double> x(n), y(n);
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&]() {
    for (size_t a = 0; a < n; ++a) {
      x[a] = gamma * nu[a] + (1.0 - floor_mass) * y[a];
    }
    best = std::min(best,
                    Objective(family, x, x0, log_x0, g, tau0, eta, alpha));
  };
  for (size_t v = 0; v < n; ++v) {
    std::fill(y.begin(), y.end(), 0.0);
    y[v] = 1.0;
    consider();
  }
  int used = static_cast<int>(n);
  if (n == 2) {
    for (; used < points; ++used) {
      y[0] = static_cast<double>(used) / (points - 1);
      y[1] = 1.0 - y[0];
      consider();
    }
  } else if (n == 3) {
    const int m = static_cast<int>(std::sqrt(2.0 * points)) - 2;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; i + j <= m; ++j, ++used) {
        y[0] = static_cast<double>(i) / m;
        y[1] = static_cast<double>(j) / m;
        y[2] = std::max(0.0, 1.0 - y[0] - y[1]);
        consider();
      }
    }
  }
  for (int k = used; k < points; ++k) {
    // Alternate flat Dirichlet draws with sharper ones that reach faces.
    const int shape = k % 3;
    double total = 0.0;
    for (size_t a = 0; a < n; ++a) {
      const double e = -std::log(1.0 - rng.Uniform());
      const double e2 = e * e;
      y[a] = shape == 0 ? e : shape == 1 ? e2 * e : e2 * e2 * e2 * e2;
      total += y[a];
    }
    for (double& v : y) v /= total;
    consider();
  }
  return best;
}

Instance RandomInstance(Rng& rng) {
  Instance in;
  const int n = 2 + static_cast<int>(rng.Uniform() * 5);
  in.nu.resize(n);
  double total = 0.0;
  for (double& v : in.nu) total += (v = 0.2 + rng.Uniform());
  for (double& v : in.nu) v /= total;
  in.gamma = rng.Uniform() < 0.25 ? 0.0 : 0.5 * rng.Uniform();
  in.x0.resize(n);
  total = 0.0;
  for (double& v : in.x0) total += (v = 0.05 + rng.Uniform());
  double mass = 0.0;
  for (double v : in.nu) mass += in.gamma * v;
  for (int a = 0; a < n; ++a) {
    in.x0[a] = in.gamma * in.nu[a] + (1.0 - mass) * in.x0[a] / total;
  }
  in.g.resize(n);
  for (double& v : in.g) v = 4.0 * rng.Uniform() - 2.0;
  in.tau0 = rng.Uniform() < 0.25 ? 0.0 : rng.Uniform();
  in.eta = std::pow(10.0, -2.0 + 2.5 * rng.Uniform());
  in.alpha = 0.5 + rng.Uniform();
  return in;
}

double KktResidual(const std::vector<double>& z, const std::vector<double>& l,
                   const std::vector<double>& x) {
  double theta = 0.0;
  int free = 0;
  for (size_t a = 0; a < x.size(); ++a) {
    if (x[a] > l[a] + 1e-12) {
      theta += z[a] - x[a];
      ++free;
    }
  }
  if (free > 0) theta /= free;
  double residual = 0.0, total = 0.0;
  for (size_t a = 0; a < x.size(); ++a) {
    total += x[a];
    residual = std::max(residual, l[a] - x[a]);
    if (x[a] > l[a] + 1e-12) {
      residual = std::max(residual, std::abs(z[a] - x[a] - theta));
    } else {
      residual = std::max(residual, z[a] - l[a] - theta);
    }
  }
  return std::max(residual, std::abs(total - 1.0));
}

}  // namespace qfr::testing
