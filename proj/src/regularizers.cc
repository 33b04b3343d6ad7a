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

#include "qfr/regularizers.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qfr {
namespace {

constexpr double kLogClip = 1e-300;
constexpr double kFeasibilityTol = 1e-12;

double FloorMass(const PerturbedSimplex& simplex) {
  if (simplex.gamma == 0.0) return 0.0;
  double total = 0.0;
  for (double v : simplex.nu) total += v;
  const double mass = simplex.gamma * total;
  if (mass > 1.0 + kFeasibilityTol) {
    throw DomainError("infeasible perturbed simplex: gamma * sum(nu) > 1");
  }
  return mass;
}

void CheckSizes(size_t a, size_t b) {
  if (a != b) throw std::invalid_argument("dimension mismatch");
}

// x restricted to the single feasible point when the floors use all mass.
void PinToFloor(const PerturbedSimplex& simplex, std::span<double> out) {
  double total = 0.0;
  for (double v : simplex.nu) total += v;
  for (size_t a = 0; a < out.size(); ++a) out[a] = simplex.nu[a] / total;
}

std::vector<double> ParentProbs(const GameTree& tree,
                                const SequenceFormStrategy& mu, int s,
                                double parent) {
  const Infoset& info = tree.infoset(s);
  std::vector<double> pi(info.num_actions());
  for (int a = 0; a < info.num_actions(); ++a) {
    pi[a] = mu.values[info.offset + a] / parent;
  }
  return pi;
}

}  // namespace

const char* RegFamilyName(RegFamily family) {
  return family == RegFamily::kEntropy ? "entropy" : "euclidean";
}

RegFamily ParseRegFamily(const std::string& name) {
  if (name == "entropy") return RegFamily::kEntropy;
  if (name == "euclidean") return RegFamily::kEuclidean;
  throw std::invalid_argument("unknown regularizer " + name);
}

double RegularizerSpec::max_alpha() const {
  if (alpha.empty()) return 1.0;
  return *std::max_element(alpha.begin(), alpha.end());
}

double LocalPsi(const LocalRegularizer& reg, std::span<const double> x) {
  double total = 0.0;
  if (reg.family == RegFamily::kEntropy) {
    for (double v : x) {
      if (v < 0.0) throw DomainError("entropy of a negative coordinate");
      if (v > 0.0) total += v * std::log(v);
    }
    return reg.alpha * (std::log(static_cast<double>(x.size())) + total);
  }
  for (double v : x) total += v * v;
  return 0.5 * reg.alpha * total;
}

void LocalPsiGrad(const LocalRegularizer& reg, std::span<const double> x,
                  std::span<double> out) {
  CheckSizes(x.size(), out.size());
  for (size_t a = 0; a < x.size(); ++a) {
    if (reg.family == RegFamily::kEntropy) {
      if (!(x[a] > 0.0)) {
        throw DomainError("entropy gradient at a zero coordinate");
      }
      out[a] = reg.alpha * (1.0 + std::log(x[a]));
    } else {
      out[a] = reg.alpha * x[a];
    }
  }
}

std::vector<double> LocalPsiGrad(const LocalRegularizer& reg,
                                 std::span<const double> x) {
  std::vector<double> out(x.size());
  LocalPsiGrad(reg, x, out);
  return out;
}

double BregmanLocal(const LocalRegularizer& reg, std::span<const double> x,
                    std::span<const double> y) {
  CheckSizes(x.size(), y.size());
  std::vector<double> grad = LocalPsiGrad(reg, y);
  double inner = 0.0;
  for (size_t a = 0; a < x.size(); ++a) inner += grad[a] * (x[a] - y[a]);
  return LocalPsi(reg, x) - LocalPsi(reg, y) - inner;
}

double DilatedPsi(const GameTree& tree, const SequenceFormStrategy& mu,
                  const RegularizerSpec& spec) {
  double total = 0.0;
  for (int s : tree.infosets_of(mu.player)) {
    const double parent = mu.parent(tree, s);
    if (parent <= 0.0) continue;
    total += parent * LocalPsi(spec.local(s), ParentProbs(tree, mu, s, parent));
  }
  return total;
}

double BidilatedPsi(const GameTree& tree, const SequenceFormStrategy& mu1,
                    const SequenceFormStrategy& mu2, int player,
                    const RegularizerSpec& spec) {
  const SequenceFormStrategy& own = player == 1 ? mu1 : mu2;
  const SequenceFormStrategy& opp = player == 1 ? mu2 : mu1;
  const int opponent = 3 - player;
  double total = 0.0;
  for (int s : tree.infosets_of(player)) {
    const double parent = own.parent(tree, s);
    if (parent <= 0.0) continue;
    double weight = 0.0;
    for (int h : tree.infoset(s).members) {
      const int slot = tree.seq(h, opponent);
      weight += tree.chance_reach(h) * (slot < 0 ? 1.0 : opp.values[slot]);
    }
    total += parent * weight *
             LocalPsi(spec.local(s), ParentProbs(tree, own, s, parent));
  }
  return total;
}

double BregmanTree(const GameTree& tree, const SequenceFormStrategy& mu,
                   const SequenceFormStrategy& mu_tilde,
                   const RegularizerSpec& spec) {
  double total = 0.0;
  for (int s : tree.infosets_of(mu.player)) {
    const double parent = mu.parent(tree, s);
    if (parent <= 0.0) continue;
    const double parent_tilde = mu_tilde.parent(tree, s);
    if (!(parent_tilde > 0.0)) {
      throw DomainError("reference strategy has zero reach at infoset " +
                        std::to_string(s));
    }
    total += parent * BregmanLocal(spec.local(s),
                                   ParentProbs(tree, mu, s, parent),
                                   ParentProbs(tree, mu_tilde, s, parent_tilde));
  }
  return total;
}

double BregmanTreeDirect(const GameTree& tree, const SequenceFormStrategy& mu,
                         const SequenceFormStrategy& mu_tilde,
                         const RegularizerSpec& spec) {
  // Gradient of the dilated regularizer at mu_tilde, per own slot:
  //   grad psi_s(pi~_s)_a + sum_{s' : sigma(s') = (s,a)} (psi_s' - <grad psi_s', pi~_s'>).
  std::vector<double> grad(tree.num_slots(), 0.0);
  for (int s : tree.infosets_of(mu.player)) {
    const double parent = mu_tilde.parent(tree, s);
    if (!(parent > 0.0)) {
      throw DomainError("reference strategy has zero reach at infoset " +
                        std::to_string(s));
    }
    const LocalRegularizer reg = spec.local(s);
    const std::vector<double> pi = ParentProbs(tree, mu_tilde, s, parent);
    const std::vector<double> g = LocalPsiGrad(reg, pi);
    const Infoset& info = tree.infoset(s);
    double inner = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) {
      grad[info.offset + a] += g[a];
      inner += g[a] * pi[a];
    }
    const Sequence& ps = info.parent_sequence;
    if (!ps.empty()) {
      grad[tree.infoset(ps.infoset).offset + ps.action] +=
          LocalPsi(reg, pi) - inner;
    }
  }
  double linear = 0.0;
  for (int s : tree.infosets_of(mu.player)) {
    const Infoset& info = tree.infoset(s);
    for (int a = 0; a < info.num_actions(); ++a) {
      const int k = info.offset + a;
      linear += grad[k] * (mu.values[k] - mu_tilde.values[k]);
    }
  }
  // Root infosets contribute psi_s times the constant mu(empty) = 1; those
  // terms cancel in the difference and carry no gradient.
  return DilatedPsi(tree, mu, spec) - DilatedPsi(tree, mu_tilde, spec) -
         linear;
}

double BregmanProfiles(const GameTree& tree, const BehavioralProfile& mu,
                       const BehavioralProfile& mu_tilde,
                       const RegularizerSpec& spec) {
  double total = 0.0;
  for (int p = 1; p <= 2; ++p) {
    total += BregmanTree(tree, ToSequenceForm(tree, mu, p),
                         ToSequenceForm(tree, mu_tilde, p), spec);
  }
  return total;
}

void FlooredNormalize(std::span<const double> log_w,
                      const PerturbedSimplex& simplex, std::span<double> out) {
  const size_t n = log_w.size();
  CheckSizes(n, out.size());
  const double floor_mass = FloorMass(simplex);
  if (floor_mass >= 1.0) {
    PinToFloor(simplex, out);
    return;
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  thread_local std::vector<double> w, key, suffix;
  thread_local std::vector<int> order;
  w.resize(n);
  for (size_t a = 0; a < n; ++a) w[a] = std::exp(log_w[a] - top);
  if (simplex.gamma == 0.0) {
    double z = 0.0;
    for (size_t a = 0; a < n; ++a) z += w[a];
    for (size_t a = 0; a < n; ++a) out[a] = w[a] / z;
    return;
  }
  // Floored coordinates form a prefix in ascending order of w_a / nu_a.
  key.resize(n);
  order.resize(n);
  for (size_t a = 0; a < n; ++a) {
    key[a] = log_w[a] - std::log(std::max(simplex.nu[a], kLogClip));
    order[a] = static_cast<int>(a);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return key[i] < key[j]; });
  suffix.assign(n + 1, 0.0);
  for (size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + w[order[i]];
  double floored_nu = 0.0;
  double z = suffix[0];
  size_t floored = 0;
  for (size_t i = 0; i < n; ++i) {
    const double free_mass = 1.0 - simplex.gamma * floored_nu;
    z = suffix[i] / free_mass;
    const int a = order[i];
    // The last candidate always qualifies when gamma * sum(nu) <= 1.
    if (w[a] >= simplex.gamma * simplex.nu[a] * z || i + 1 == n) {
      floored = i;
      break;
    }
    floored_nu += simplex.nu[a];
  }
  for (size_t i = 0; i < n; ++i) {
    const int a = order[i];
    out[a] = i < floored ? simplex.gamma * simplex.nu[a]
                         : std::max(w[a] / z, simplex.gamma * simplex.nu[a]);
  }
}

void ProxEntropy(std::span<const double> x0, std::span<const double> g,
                 double tau0, double eta, double alpha,
                 const PerturbedSimplex& simplex, std::span<double> out) {
  CheckSizes(x0.size(), g.size());
  CheckSizes(x0.size(), out.size());
  thread_local std::vector<double> log_w;
  log_w.resize(x0.size());
  const double shrink = 1.0 + eta * tau0;
  for (size_t a = 0; a < x0.size(); ++a) {
    log_w[a] = std::log(std::max(x0[a], kLogClip)) / shrink -
               eta * g[a] / (alpha * shrink);
  }
  FlooredNormalize(log_w, simplex, out);
}

std::vector<double> ProxEntropy(std::span<const double> x0,
                                std::span<const double> g, double tau0,
                                double eta, double alpha,
                                const PerturbedSimplex& simplex) {
  std::vector<double> out(x0.size());
  ProxEntropy(x0, g, tau0, eta, alpha, simplex, out);
  return out;
}

void ProxEuclidean(std::span<const double> x0, std::span<const double> g,
                   double tau0, double eta, double alpha,
                   const PerturbedSimplex& simplex, std::span<double> out) {
  CheckSizes(x0.size(), g.size());
  CheckSizes(x0.size(), out.size());
  thread_local std::vector<double> z;
  z.resize(x0.size());
  const double shrink = 1.0 + eta * tau0;
  for (size_t a = 0; a < x0.size(); ++a) {
    z[a] = x0[a] / shrink - eta * g[a] / (alpha * shrink);
  }
  ProjectTruncatedSimplex(z, simplex, out);
}

std::vector<double> ProxEuclidean(std::span<const double> x0,
                                  std::span<const double> g, double tau0,
                                  double eta, double alpha,
                                  const PerturbedSimplex& simplex) {
  std::vector<double> out(x0.size());
  ProxEuclidean(x0, g, tau0, eta, alpha, simplex, out);
  return out;
}

void Prox(RegFamily family, std::span<const double> x0,
          std::span<const double> g, double tau0, double eta, double alpha,
          const PerturbedSimplex& simplex, std::span<double> out) {
  if (family == RegFamily::kEntropy) {
    ProxEntropy(x0, g, tau0, eta, alpha, simplex, out);
  } else {
    ProxEuclidean(x0, g, tau0, eta, alpha, simplex, out);
  }
}

void ProjectTruncatedSimplex(std::span<const double> z,
                             const PerturbedSimplex& simplex,
                             std::span<double> out) {
  const size_t n = z.size();
  CheckSizes(n, out.size());
  const double floor_mass = FloorMass(simplex);
  if (floor_mass >= 1.0) {
    PinToFloor(simplex, out);
    return;
  }
  const double mass = 1.0 - floor_mass;
  auto floor = [&](size_t a) {
    return simplex.gamma == 0.0 ? 0.0 : simplex.gamma * simplex.nu[a];
  };
  thread_local std::vector<double> y, u;
  y.resize(n);
  for (size_t a = 0; a < n; ++a) y[a] = z[a] - floor(a);
  u = y;
  std::sort(u.begin(), u.end(), std::greater<double>());
  // theta such that sum max(y - theta, 0) = mass.
  double cum = 0.0, theta = 0.0;
  for (size_t j = 0; j < n; ++j) {
    cum += u[j];
    const double t = (cum - mass) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (size_t a = 0; a < n; ++a) {
    out[a] = floor(a) + std::max(y[a] - theta, 0.0);
  }
}

std::vector<double> ProjectTruncatedSimplex(std::span<const double> z,
                                            const PerturbedSimplex& simplex) {
  std::vector<double> out(z.size());
  ProjectTruncatedSimplex(z, simplex, out);
  return out;
}

void ArgmaxRegularized(std::span<const double> q, double tau0, double alpha,
                       RegFamily family, const PerturbedSimplex& simplex,
                       std::span<double> out) {
  const size_t n = q.size();
  CheckSizes(n, out.size());
  if (tau0 > 0.0) {
    thread_local std::vector<double> scaled;
    scaled.resize(n);
    for (size_t a = 0; a < n; ++a) scaled[a] = q[a] / (alpha * tau0);
    if (family == RegFamily::kEntropy) {
      FlooredNormalize(scaled, simplex, out);
    } else {
      ProjectTruncatedSimplex(scaled, simplex, out);
    }
    return;
  }
  const double floor_mass = FloorMass(simplex);
  if (floor_mass >= 1.0) {
    PinToFloor(simplex, out);
    return;
  }
  size_t best = 0;
  for (size_t a = 1; a < n; ++a) {
    if (q[a] > q[best]) best = a;
  }
  for (size_t a = 0; a < n; ++a) {
    out[a] = simplex.gamma == 0.0 ? 0.0 : simplex.gamma * simplex.nu[a];
  }
  out[best] += 1.0 - floor_mass;
}

std::vector<double> ArgmaxRegularized(std::span<const double> q, double tau0,
                                      double alpha, RegFamily family,
                                      const PerturbedSimplex& simplex) {
  std::vector<double> out(q.size());
  ArgmaxRegularized(q, tau0, alpha, family, simplex, out);
  return out;
}

}  // namespace qfr
