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

#ifndef QFR_REGULARIZERS_H_
#define QFR_REGULARIZERS_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfr/game.h"
#include "qfr/strategy.h"

namespace qfr {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class RegFamily { kEntropy, kEuclidean };

const char* RegFamilyName(RegFamily family);
RegFamily ParseRegFamily(const std::string& name);

struct LocalRegularizer {
  RegFamily family = RegFamily::kEntropy;
  double alpha = 1.0;
};

struct RegularizerSpec {
  RegFamily family = RegFamily::kEntropy;
  std::vector<double> alpha;  // Per infoset; empty means 1 everywhere.

  double alpha_at(int s) const { return alpha.empty() ? 1.0 : alpha[s]; }
  double max_alpha() const;
  LocalRegularizer local(int s) const { return {family, alpha_at(s)}; }
};

// Entropy: alpha (log|A| + sum x log x). Euclidean: (alpha/2) sum x^2.
double LocalPsi(const LocalRegularizer& reg, std::span<const double> x);
void LocalPsiGrad(const LocalRegularizer& reg, std::span<const double> x,
                  std::span<double> out);
std::vector<double> LocalPsiGrad(const LocalRegularizer& reg,
                                 std::span<const double> x);
double BregmanLocal(const LocalRegularizer& reg, std::span<const double> x,
                    std::span<const double> y);

// sum_s mu(sigma(s)) psi_s(pi(.|s)) over the strategy's player.
double DilatedPsi(const GameTree& tree, const SequenceFormStrategy& mu,
                  const RegularizerSpec& spec);
// Dilated weights times the opponent-and-chance mass of the infoset.
double BidilatedPsi(const GameTree& tree, const SequenceFormStrategy& mu1,
                    const SequenceFormStrategy& mu2, int player,
                    const RegularizerSpec& spec);

// D(mu, mu~) as sum_s mu(sigma(s)) D_s(pi(.|s), pi~(.|s)).
double BregmanTree(const GameTree& tree, const SequenceFormStrategy& mu,
                   const SequenceFormStrategy& mu_tilde,
                   const RegularizerSpec& spec);
// Same quantity from the dilated regularizer and its gradient directly.
double BregmanTreeDirect(const GameTree& tree, const SequenceFormStrategy& mu,
                         const SequenceFormStrategy& mu_tilde,
                         const RegularizerSpec& spec);
// BregmanTree summed over both players of two behavioral profiles.
double BregmanProfiles(const GameTree& tree, const BehavioralProfile& mu,
                       const BehavioralProfile& mu_tilde,
                       const RegularizerSpec& spec);

// argmin_{x in simplex} <x, g> + tau0 psi(x) + (1/eta) D(x, x0), entropy psi.
void ProxEntropy(std::span<const double> x0, std::span<const double> g,
                 double tau0, double eta, double alpha,
                 const PerturbedSimplex& simplex, std::span<double> out);
std::vector<double> ProxEntropy(std::span<const double> x0,
                                std::span<const double> g, double tau0,
                                double eta, double alpha,
                                const PerturbedSimplex& simplex);

// Same problem with Euclidean psi.
void ProxEuclidean(std::span<const double> x0, std::span<const double> g,
                   double tau0, double eta, double alpha,
                   const PerturbedSimplex& simplex, std::span<double> out);
std::vector<double> ProxEuclidean(std::span<const double> x0,
                                  std::span<const double> g, double tau0,
                                  double eta, double alpha,
                                  const PerturbedSimplex& simplex);

void Prox(RegFamily family, std::span<const double> x0,
          std::span<const double> g, double tau0, double eta, double alpha,
          const PerturbedSimplex& simplex, std::span<double> out);

// Euclidean projection onto Delta^{gamma, nu}.
void ProjectTruncatedSimplex(std::span<const double> z,
                             const PerturbedSimplex& simplex,
                             std::span<double> out);
std::vector<double> ProjectTruncatedSimplex(std::span<const double> z,
                                            const PerturbedSimplex& simplex);

// argmax_{x in simplex} <q, x> - tau0 psi(x). Ties go to the lowest index.
void ArgmaxRegularized(std::span<const double> q, double tau0, double alpha,
                       RegFamily family, const PerturbedSimplex& simplex,
                       std::span<double> out);
std::vector<double> ArgmaxRegularized(std::span<const double> q, double tau0,
                                      double alpha, RegFamily family,
                                      const PerturbedSimplex& simplex);

// x_a = max(w_a / Z, gamma nu_a) with Z making x sum to one, given log w.
void FlooredNormalize(std::span<const double> log_w,
                      const PerturbedSimplex& simplex, std::span<double> out);

}  // namespace qfr

#endif  // QFR_REGULARIZERS_H_
