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

#include "qfr/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qfr {
namespace {

using json = nlohmann::json;

bool UsesCenter(Algorithm algo) {
  return algo == Algorithm::kQfr || algo == Algorithm::kQfrStochastic ||
         algo == Algorithm::kQfrLazy;
}

bool IsStochastic(Algorithm algo) {
  return algo == Algorithm::kQfrStochastic || algo == Algorithm::kQfrLazy ||
         algo == Algorithm::kOsMccfr || algo == Algorithm::kMmdStochastic;
}

bool UsesFeedbackKind(Algorithm algo) {
  return algo == Algorithm::kQfr || algo == Algorithm::kPga ||
         algo == Algorithm::kMmd;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

bool Feasible(const GameTree& tree, const BehavioralProfile& profile,
              const Perturbation& pert) {
  try {
    CheckFeasible(tree, profile, pert, 1e-9);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

// Runs tasks [0, n) on up to `threads` workers; the first exception wins.
template <typename Fn>
void ParallelFor(int64_t n, int threads, Fn fn) {
  const int workers =
      static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(threads, n)));
  if (workers == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int64_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void RunConfig::Validate() const {
  if (iters < 1) throw std::invalid_argument("iterations must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("eval interval must be >= 1");
  if (reps < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (!(gamma0 >= 0.0 && gamma0 <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (!(explore > 0.0 && explore <= 1.0)) {
    throw std::invalid_argument("exploration must lie in (0, 1]");
  }
  if (anneal_every < 0 || !(anneal_factor > 0.0 && anneal_factor <= 1.0)) {
    throw std::invalid_argument("annealing needs every >= 0, factor in (0, 1]");
  }
  if (anneal_every > 0 && algorithm == Algorithm::kQfrLazy) {
    throw std::invalid_argument("annealing is not supported for qfr-lazy");
  }
}

SolverParams ParamsFromConfig(const GameTree& tree, const RunConfig& config) {
  SolverParams params =
      MakeParams(tree, config.algorithm, config.kind, config.reg, config.eta,
                 config.tau, config.gamma0, config.uniform_nu);
  params.eta = LrSchedule(tree, config.schedule, config.eta,
                          config.schedule_ratio);
  params.explore = config.explore;
  return params;
}

ConstantsParams ConstantsFromConfig(const RunConfig& config) {
  ConstantsParams c;
  c.kind = config.kind;
  c.reg.family = config.reg;
  c.tau = config.tau;
  c.gamma0 = config.gamma0;
  c.outcome_sampling = config.algorithm == Algorithm::kQfrStochastic ||
                       config.algorithm == Algorithm::kQfrLazy;
  c.horizon = config.iters;
  return c;
}

SeedRun RunSeed(const GameTree& tree, const RunConfig& config, uint64_t seed) {
  config.Validate();
  SolverParams params = ParamsFromConfig(tree, config);
  SolverState state = InitState(tree, params);
  const bool monitored = UsesFeedbackKind(config.algorithm) ||
                         UsesCenter(config.algorithm);
  if (monitored) {
    EnableMonitor(state, tree, params,
                  ComputeGameConstants(tree, ConstantsFromConfig(config)));
  }
  Rng rng(seed);
  SeedRun run;
  run.seed = seed;
  double solver_ms = 0.0;
  using Clock = std::chrono::steady_clock;

  auto evaluate = [&](int64_t iter) {
    const SolverState* view = &state;
    SolverState synced;
    if (config.algorithm == Algorithm::kQfrLazy) {
      synced = state;
      LazySynchronize(synced, tree, params);
      view = &synced;
    }
    ConvergenceRow row;
    row.seed = seed;
    row.iter = iter;
    row.expl_last = Exploitability(tree, view->current);
    if (view->has_average) {
      row.expl_avg = Exploitability(tree, AverageProfile(tree, *view));
    }
    if (Feasible(tree, view->current, params.perturbation)) {
      row.reg_gap = PerturbedRegularizedGap(tree, view->current, params.tau,
                                            params.perturbation, params.reg);
    }
    if (config.reference) {
      const BehavioralProfile& target =
          UsesCenter(config.algorithm) ? view->center : view->current;
      row.bregman_ref =
          BregmanToReference(tree, target, *config.reference, params.reg);
    }
    if (config.timing) row.wall_ms = solver_ms;
    // Stochastic steps never see full feedback; check m at the iterate here.
    if (monitored && IsStochastic(config.algorithm)) {
      const FeedbackBundle fb = ComputeFeedback(tree, view->current,
                                                params.kind, 0.0, params.reg);
      state.monitor.Observe(fb.m, false);
    }
    run.rows.push_back(row);
  };

  for (int64_t t = 1; t <= config.iters; ++t) {
    const auto start = Clock::now();
    try {
      Step(state, tree, params, rng);
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(t) + ": " +
                               e.what());
    }
    solver_ms +=
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (config.anneal_every > 0 && t % config.anneal_every == 0) {
      params.tau *= config.anneal_factor;
    }
    if (t % config.eval_every == 0 || t == config.iters) evaluate(t);
  }
  if (config.algorithm == Algorithm::kQfrLazy) {
    LazySynchronize(state, tree, params);
  }
  run.monitor = state.monitor;
  run.last = state.current;
  run.average = state.has_average ? AverageProfile(tree, state) : state.center;
  return run;
}

ConvergenceRecord Run(const GameTree& tree, const RunConfig& config) {
  config.Validate();
  ConvergenceRecord record;
  record.runs.resize(config.reps);
  ParallelFor(config.reps, config.threads, [&](int64_t i) {
    record.runs[i] = RunSeed(tree, config, config.seed + i);
  });
  if (!config.out.empty()) WriteCsvFile(config.out, record);
  return record;
}

void WriteCsv(std::ostream& os, const ConvergenceRecord& record) {
  os << "seed,iter,expl_last,expl_avg,reg_gap,bregman_ref,wall_ms\n";
  for (const SeedRun& run : record.runs) {
    for (const ConvergenceRow& r : run.rows) {
      os << r.seed << ',' << r.iter << ',' << FormatDouble(r.expl_last) << ','
         << FormatOptional(r.expl_avg) << ',' << FormatOptional(r.reg_gap)
         << ',' << FormatOptional(r.bregman_ref) << ','
         << FormatOptional(r.wall_ms) << '\n';
    }
  }
}

void WriteCsvFile(const std::string& path, const ConvergenceRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  WriteCsv(out, record);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

GridSpec PresetGrid() {
  GridSpec spec;
  spec.eta = {0.1, 0.01, 0.001, 0.0001};
  spec.tau = {0.1, 0.01, 0.001, 0.0001, 0.0};
  spec.gamma = {0.1, 0.01, 0.001, 0.0001};
  spec.reg = {RegFamily::kEntropy};
  return spec;
}

GridSpec ParseGridSpec(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.is_string()) {
    if (j.get<std::string>() == "paper-grid") return PresetGrid();
    throw std::invalid_argument("unknown grid preset " + j.get<std::string>());
  }
  if (!j.is_object()) throw std::invalid_argument("grid spec must be an object");
  if (j.contains("preset")) {
    if (j.at("preset").get<std::string>() != "paper-grid") {
      throw std::invalid_argument("unknown grid preset");
    }
    GridSpec spec = PresetGrid();
    if (j.contains("reg")) {
      spec.reg.clear();
      for (const auto& r : j.at("reg")) {
        spec.reg.push_back(ParseRegFamily(r.get<std::string>()));
      }
    }
    return spec;
  }
  GridSpec spec;
  spec.eta = j.at("eta").get<std::vector<double>>();
  spec.tau = j.at("tau").get<std::vector<double>>();
  spec.gamma = j.at("gamma").get<std::vector<double>>();
  if (j.contains("reg")) {
    for (const auto& r : j.at("reg")) {
      spec.reg.push_back(ParseRegFamily(r.get<std::string>()));
    }
  } else {
    spec.reg = {RegFamily::kEntropy};
  }
  if (spec.num_cells() == 0) throw std::invalid_argument("empty grid");
  return spec;
}

GridSpec LoadGridSpec(const std::string& path_or_name) {
  if (path_or_name == "paper-grid") return PresetGrid();
  std::ifstream in(path_or_name);
  if (!in) throw std::runtime_error("cannot open grid spec " + path_or_name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseGridSpec(ss.str());
}

GridResult RunGrid(const GameTree& tree, const RunConfig& base,
                   const GridSpec& spec) {
  GridResult result;
  int64_t index = 0;
  for (double eta : spec.eta) {
    for (double tau : spec.tau) {
      for (double gamma : spec.gamma) {
        for (RegFamily reg : spec.reg) {
          GridCell cell;
          cell.index = index++;
          cell.eta = eta;
          cell.tau = tau;
          cell.gamma = gamma;
          cell.reg = reg;
          RunConfig config = base;
          config.eta = eta;
          config.tau = tau;
          config.gamma0 = gamma;
          config.reg = reg;
          config.out.clear();
          try {
            const ConvergenceRecord rec = Run(tree, config);
            double total = 0.0;
            for (const SeedRun& run : rec.runs) {
              cell.finals.push_back(run.rows.back().expl_last);
              total += cell.finals.back();
            }
            cell.score = total / static_cast<double>(cell.finals.size());
          } catch (const std::exception& e) {
            cell.error = e.what();
            cell.score = std::numeric_limits<double>::quiet_NaN();
          }
          result.ranked.push_back(std::move(cell));
        }
      }
    }
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const GridCell& a, const GridCell& b) {
                     const bool na = std::isnan(a.score);
                     const bool nb = std::isnan(b.score);
                     if (na != nb) return nb;
                     if (!na && a.score != b.score) return a.score < b.score;
                     return a.index < b.index;
                   });
  return result;
}

void WriteGridTable(std::ostream& os, const GridResult& result) {
  os << "rank,cell,eta,tau,gamma,reg,score,error\n";
  for (size_t r = 0; r < result.ranked.size(); ++r) {
    const GridCell& c = result.ranked[r];
    std::string error = c.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    os << r + 1 << ',' << c.index << ',' << FormatDouble(c.eta) << ','
       << FormatDouble(c.tau) << ',' << FormatDouble(c.gamma) << ','
       << RegFamilyName(c.reg) << ',' << FormatDouble(c.score) << ',' << error
       << '\n';
  }
}

void PrintConstants(std::ostream& os, const GameTree& tree,
                    const RunConfig& config, bool json_out) {
  const ConstantsParams params = ConstantsFromConfig(config);
  const GameConstants c = ComputeGameConstants(tree, params);
  const std::vector<double> eta =
      LrSchedule(tree, config.schedule, config.eta, config.schedule_ratio);
  const ConditionReport report = EvaluateConditions(tree, eta, c, params);
  auto finite = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return FormatDouble(v);
  };
  auto finite_vec = [&](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(finite(x));
    return arr;
  };
  if (json_out) {
    json j;
    j["game"] = tree.name();
    j["feedback"] = FeedbackKindName(params.kind);
    j["reg"] = RegFamilyName(params.reg.family);
    j["tau"] = params.tau;
    j["gamma0"] = params.gamma0;
    j["outcome_sampling"] = params.outcome_sampling;
    j["gamma"] = finite(c.gamma);
    j["depth"] = c.depth;
    j["psi_max"] = finite(c.psi_max);
    j["psi_max_stated"] = finite(c.psi_max_stated);
    j["q_bound"] = finite(c.q_bound);
    j["M1"] = finite(c.m1);
    j["M2"] = finite(c.m2);
    j["min_floor"] = finite(c.min_floor);
    j["min_chance_mass"] = finite(c.min_chance_mass);
    j["C_visit"] = finite(c.c_visit);
    j["C_diff"] = finite_vec(c.c_diff);
    j["C_diff_single"] = finite_vec(c.c_diff_single);
    j["C_minus"] = finite_vec(c.c_minus);
    j["C_ratio"] = finite_vec(c.c_ratio);
    j["C_eta"] = finite_vec(c.c_eta);
    j["C_eta_T"] = finite_vec(c.c_eta_t);
    j["eta"] = finite_vec(eta);
    j["conditions"] = {
        {"A", {{"ok", report.a_ok()},
               {"violations", report.a_violations},
               {"worst_ratio", finite(report.worst_a)}}},
        {"B", {{"ok", report.b_ok()},
               {"violations", report.b_violations},
               {"worst_ratio", finite(report.worst_b)}}},
        {"C", {{"ok", report.c_ok()},
               {"violations", report.c_violations},
               {"worst_ratio", finite(report.worst_c)}}}};
    os << j.dump(2) << '\n';
    return;
  }
  auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  auto min_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  };
  os << "game            " << tree.name() << " (" << tree.num_infosets()
     << " infosets)\n"
     << "feedback        " << FeedbackKindName(params.kind) << '\n'
     << "regularizer     " << RegFamilyName(params.reg.family) << '\n'
     << "tau             " << FormatDouble(params.tau) << '\n'
     << "gamma0          " << FormatDouble(params.gamma0) << '\n'
     << "gamma           " << FormatDouble(c.gamma) << '\n'
     << "D               " << c.depth << '\n'
     << "psi_max         " << FormatDouble(c.psi_max) << '\n'
     << "q_bound         " << FormatDouble(c.q_bound) << '\n'
     << "M1              " << FormatDouble(c.m1) << '\n'
     << "M2              " << FormatDouble(c.m2) << '\n'
     << "C_diff max      " << FormatDouble(max_of(c.c_diff)) << '\n'
     << "C_minus max     " << FormatDouble(max_of(c.c_minus)) << '\n'
     << "C_ratio max     " << FormatDouble(max_of(c.c_ratio)) << '\n'
     << "C_eta min       " << FormatDouble(min_of(c.c_eta)) << '\n'
     << "C_eta_T min     " << FormatDouble(min_of(c.c_eta_t)) << '\n'
     << "C_visit         " << FormatDouble(c.c_visit) << '\n'
     << "condition A     " << (report.a_ok() ? "ok" : "violated") << " ("
     << report.a_violations.size() << " infosets, worst ratio "
     << FormatDouble(report.worst_a) << ")\n"
     << "condition B     " << (report.b_ok() ? "ok" : "violated") << " ("
     << report.b_violations.size() << " infosets, worst ratio "
     << FormatDouble(report.worst_b) << ")\n"
     << "condition C     " << (report.c_ok() ? "ok" : "violated") << " ("
     << report.c_violations.size() << " infosets, worst ratio "
     << FormatDouble(report.worst_c) << ")\n";
}

BehavioralProfile ParseProfile(const GameTree& tree,
                               const std::string& json_text) {
  const json j = json::parse(json_text);
  const json& list = j.at("infosets");
  if (!list.is_array() ||
      static_cast<int>(list.size()) != tree.num_infosets()) {
    throw std::invalid_argument("profile must list every infoset");
  }
  BehavioralProfile profile(tree);
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const json& entry = list[s];
    if (entry.contains("label") &&
        entry.at("label").get<std::string>() != tree.infoset(s).label) {
      throw std::invalid_argument("profile label mismatch at infoset " +
                                  std::to_string(s));
    }
    const auto probs = entry.at("probs").get<std::vector<double>>();
    if (static_cast<int>(probs.size()) != tree.infoset(s).num_actions()) {
      throw std::invalid_argument("wrong action count at infoset " +
                                  std::to_string(s));
    }
    std::copy(probs.begin(), probs.end(), profile[s].begin());
  }
  ValidateProfile(tree, profile);
  return profile;
}

BehavioralProfile LoadProfileFile(const GameTree& tree,
                                  const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseProfile(tree, ss.str());
}

std::string SerializeProfile(const GameTree& tree,
                             const BehavioralProfile& profile) {
  json list = json::array();
  for (int s = 0; s < tree.num_infosets(); ++s) {
    const auto pi = profile[s];
    list.push_back({{"label", tree.infoset(s).label},
                    {"player", tree.infoset(s).player},
                    {"probs", std::vector<double>(pi.begin(), pi.end())}});
  }
  return json{{"game", tree.name()}, {"infosets", list}}.dump(1);
}

}  // namespace qfr
