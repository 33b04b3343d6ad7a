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

// Command-line front end: run, grid, constants, bestresp.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "qfr/eval.h"
#include "qfr/game.h"
#include "qfr/harness.h"

namespace {

struct CommonOptions {
  std::string game = "kuhn";
  std::string algo = "qfr";
  std::string feedback = "cf";
  std::string reg = "entropy";
  std::string schedule = "uniform";
  std::string reference;
  std::string dump_profile;
  qfr::RunConfig config;
};

void AddRunOptions(CLI::App* app, CommonOptions& o) {
  app->add_option("--game", o.game, "kuhn, leduc, matching_pennies or FILE");
  app->add_option("--algo", o.algo,
                  "qfr|qfr-stoch|qfr-lazy|pga|cfr|cfrplus|osmccfr|mmd|"
                  "mmd-stoch");
  app->add_option("--feedback", o.feedback, "cf|q|tq");
  app->add_option("--reg", o.reg, "entropy|euclidean");
  app->add_option("--eta", o.config.eta, "Base learning rate");
  app->add_option("--schedule", o.schedule, "uniform or depth:RATIO");
  app->add_option("--tau", o.config.tau, "Regularization strength");
  app->add_option("--gamma", o.config.gamma0, "Perturbation gamma_0");
  app->add_option("--iters", o.config.iters, "Iterations per run");
  app->add_option("--eval-every", o.config.eval_every, "Evaluation interval");
  app->add_option("--seed", o.config.seed, "First seed");
  app->add_option("--reps", o.config.reps, "Repetitions");
  app->add_option("--threads", o.config.threads, "Concurrent repetitions");
  app->add_option("--explore", o.config.explore,
                  "Outcome-sampling exploration");
  app->add_option("--anneal-every", o.config.anneal_every,
                  "Multiply tau by --anneal-factor every N iterations");
  app->add_option("--anneal-factor", o.config.anneal_factor, "Decay factor");
  app->add_option("--reference", o.reference,
                  "Profile JSON for the bregman_ref column");
  app->add_flag("--uniform-nu", o.config.uniform_nu, "Uniform perturbation");
  app->add_flag("--timing", o.config.timing, "Record wall_ms");
}

void Resolve(CommonOptions& o, const qfr::GameTree& tree) {
  o.config.game = o.game;
  o.config.algorithm = qfr::ParseAlgorithm(o.algo);
  o.config.kind = qfr::ParseFeedbackKind(o.feedback);
  o.config.reg = qfr::ParseRegFamily(o.reg);
  if (o.schedule == "uniform") {
    o.config.schedule = qfr::ScheduleMode::kUniform;
  } else if (o.schedule.rfind("depth:", 0) == 0) {
    o.config.schedule = qfr::ScheduleMode::kDepthScaled;
    o.config.schedule_ratio = std::stod(o.schedule.substr(6));
  } else {
    throw std::invalid_argument("unknown schedule " + o.schedule);
  }
  if (!o.reference.empty()) {
    o.config.reference = std::make_shared<qfr::BehavioralProfile>(
        qfr::LoadProfileFile(tree, o.reference));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular solvers for two-player zero-sum extensive-form games"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Run a solver and write a CSV");
  AddRunOptions(run, run_opts);
  run->add_option("--out", run_opts.config.out, "CSV output path");
  run->add_option("--dump-profile", run_opts.dump_profile,
                  "Write the final iterate as profile JSON");

  CommonOptions grid_opts;
  std::string grid_spec = "paper-grid";
  std::string grid_out;
  CLI::App* grid = app.add_subcommand("grid", "Grid search over eta/tau/gamma");
  AddRunOptions(grid, grid_opts);
  grid->add_option("--spec", grid_spec, "Grid JSON file or paper-grid");
  grid->add_option("--out", grid_out, "Ranked table output path");

  CommonOptions const_opts;
  bool const_json = false;
  CLI::App* constants =
      app.add_subcommand("constants", "Print stability constants");
  AddRunOptions(constants, const_opts);
  constants->add_flag("--json", const_json, "Machine-readable output");

  std::string br_game = "kuhn";
  std::string br_profile;
  int br_player = 1;
  CLI::App* bestresp =
      app.add_subcommand("bestresp", "Best response against a profile");
  bestresp->add_option("--game", br_game, "Game name or file");
  bestresp->add_option("--profile", br_profile, "Profile JSON")->required();
  bestresp->add_option("--player", br_player, "Responder (1 or 2)")
      ->check(CLI::IsMember({1, 2}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const qfr::GameTree tree = qfr::LoadGameByName(run_opts.game);
      Resolve(run_opts, tree);
      const qfr::ConvergenceRecord record = qfr::Run(tree, run_opts.config);
      if (run_opts.config.out.empty()) qfr::WriteCsv(std::cout, record);
      if (!run_opts.dump_profile.empty()) {
        std::ofstream out(run_opts.dump_profile);
        out << qfr::SerializeProfile(tree, record.runs.front().last) << '\n';
      }
      for (const qfr::SeedRun& r : record.runs) {
        if (r.monitor.hard_violations > 0) {
          std::cerr << "seed " << r.seed << ": " << r.monitor.hard_violations
                    << " multiplier bound violations\n";
        }
      }
    } else if (*grid) {
      const qfr::GameTree tree = qfr::LoadGameByName(grid_opts.game);
      Resolve(grid_opts, tree);
      const qfr::GridResult result = qfr::RunGrid(
          tree, grid_opts.config, qfr::LoadGridSpec(grid_spec));
      if (grid_out.empty()) {
        qfr::WriteGridTable(std::cout, result);
      } else {
        std::ofstream out(grid_out);
        qfr::WriteGridTable(out, result);
      }
      const qfr::GridCell& w = result.winner();
      std::cerr << "winner: cell " << w.index << " eta=" << w.eta
                << " tau=" << w.tau << " gamma=" << w.gamma
                << " score=" << w.score << '\n';
    } else if (*constants) {
      const qfr::GameTree tree = qfr::LoadGameByName(const_opts.game);
      Resolve(const_opts, tree);
      qfr::PrintConstants(std::cout, tree, const_opts.config, const_json);
    } else if (*bestresp) {
      const qfr::GameTree tree = qfr::LoadGameByName(br_game);
      const qfr::BehavioralProfile profile =
          qfr::LoadProfileFile(tree, br_profile);
      const qfr::BestResponseResult br =
          qfr::BestResponse(tree, profile, br_player);
      std::cout << std::setprecision(17) << "value " << br.value
                << "\nvalue_unscaled " << br.value * tree.utility_scale()
                << '\n'
                << qfr::SerializeProfile(tree, br.policy) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
