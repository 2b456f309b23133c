// Copyright 2026 The safewalk Authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "safewalk/log_io.hpp"
#include "safewalk/simulation.hpp"
#include "safewalk/transition_trajgen.hpp"

namespace fs = std::filesystem;
using namespace safewalk;

namespace {

int cmd_run(const std::string& scenario_path, const std::string& plant,
            const std::optional<std::uint64_t>& seed, const fs::path& out, bool no_filter) {
  Scenario s = Scenario::from_json_file(scenario_path);
  if (!plant.empty()) s.plant = plant_from_string(plant);
  if (seed) s.seed = *seed;
  s.validate();

  RunOptions opt;
  opt.disable_filter = no_filter;
  const TrajectoryLog log = run_scenario(s, opt);

  fs::create_directories(out);
  write_log(log, out / "trajectory_log.json");
  write_csvs(log, out);
  const RunSummary summary = summarize(log);
  write_summary(summary, out / "summary.json");

  std::printf("%s: %zu ticks, final error %.4f m, min h_path %.6f, %d replans%s\n",
              s.name.c_str(), log.ticks.size(), summary.final_position_error,
              summary.min_h_path, summary.replan_count, log.aborted ? ", ABORTED" : "");
  for (const auto& e : log.events) {
    std::printf("  t=%.3f %s %s\n", e.t, e.kind.c_str(), e.message.c_str());
  }
  return log.aborted ? 3 : 0;
}

int cmd_validate(const fs::path& log_path) {
  const ValidationReport report = validate_log(read_log(log_path));
  std::cout << report_to_json(report);
  return report.ok() ? 0 : 1;
}

int cmd_emit(const fs::path& log_path, const std::string& format, const std::string& out) {
  const TrajectoryLog log = read_log(log_path);
  if (format == "csv") {
    const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    for (const auto& f : write_csvs(log, dir)) std::cout << f.string() << "\n";
    return 0;
  }
  const RunSummary summary = summarize(log);
  if (out.empty()) {
    std::cout << summary_to_json(summary);
  } else {
    write_summary(summary, out);
  }
  return 0;
}

int cmd_trajgen(const std::string& direction, double t_a, double t_r, double t_f,
                const std::string& out) {
  const PhaseSchedule sched = build_schedule(direction_from_string(direction), t_a, t_r, t_f);
  const bool down = sched.direction == TransitionDirection::Downward;
  const Vec2d lo(0.05, 0.0), hi(0.55, 0.0);
  const ComTrajectory traj =
      generate_com_trajectory(sched, default_support_polygons(), down ? lo : hi, down ? hi : lo);
  if (out.empty()) {
    write_trajectory_csv(std::cout, traj.dense);
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot open '" + out + "' for writing");
  write_trajectory_csv(f, traj.dense);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"safewalk quadruped safety pipeline simulator"};
  app.require_subcommand(1);

  std::string scenario, plant, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool no_filter = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write logs");
  run->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--plant", plant, "Plant mode")->check(CLI::IsMember({"kinematic", "dynamic"}));
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--no-filter", no_filter, "Disable the safety filter (ablation)");

  std::string log_path;
  auto* validate = app.add_subcommand("validate", "Check a trajectory log");
  validate->add_option("log", log_path, "trajectory_log.json")->required()->check(CLI::ExistingFile);

  std::string format = "csv", emit_out;
  auto* emit = app.add_subcommand("emit", "Write CSV files or the JSON summary from a log");
  emit->add_option("log", log_path, "trajectory_log.json")->required()->check(CLI::ExistingFile);
  emit->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  emit->add_option("--out", emit_out, "Directory (csv) or file (json); stdout for json if omitted");

  std::string direction = "downward", traj_out;
  double t_a = 1.6, t_r = 1.6, t_f = 1.6;
  auto* trajgen = app.add_subcommand("trajgen", "Generate a level transition COM trajectory");
  trajgen->add_option("--direction", direction)->check(CLI::IsMember({"downward", "upward"}));
  trajgen->add_option("--t-all", t_a, "All-feet phase duration [s]");
  trajgen->add_option("--t-rear", t_r, "Rear-roller phase duration [s]");
  trajgen->add_option("--t-front", t_f, "Front-roller phase duration [s]");
  trajgen->add_option("--out", traj_out, "CSV file; stdout if omitted");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, plant, seed, out_dir, no_filter);
    if (*validate) return cmd_validate(log_path);
    if (*emit) return cmd_emit(log_path, format, emit_out);
    if (*trajgen) return cmd_trajgen(direction, t_a, t_r, t_f, traj_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
