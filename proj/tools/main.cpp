// Command-line entry point: run the experimental protocol on a scenario,
// validate scenario files, and turn episode logs into plot-ready dumps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "replan/bench.hpp"

using namespace replan;

namespace
{

int run(const std::string& file, std::optional<std::uint64_t> seed, std::optional<std::size_t> trials,
        const std::string& out, bool wall_clock)
{
  const Scenario scenario = loadScenario(file);
  for(const auto& w : scenario.warnings) std::cerr << "warning: " << w << '\n';

  ProtocolOptions options;
  options.seed = seed;
  options.trials = trials;
  options.wall_clock = wall_clock;
  options.on_trial = [](const TrialResult& t) {
    std::cerr << "trial " << t.trial;
    if(t.skipped) std::cerr << ": skipped (" << t.skip_reason << ")\n";
    else
      std::cerr << ": " << (t.episode.goal_reached ? "goal reached" : "goal not reached") << " at "
                << t.episode.end_time << " s, " << t.episode.replans.size() << " re-plans, " << t.records.size()
                << " swaps, " << t.episode.safety_stops << " safety stops\n";
  };
  const ProtocolResult result = runProtocol(scenario, options);
  writeProtocolOutputs(scenario, result, out);
  std::cout << renderTable(result.table, "Results of scenario '" + scenario.name + "'");
  std::cout << "outputs written to " << out << '\n';
  return result.skipped == result.trials.size() && !result.trials.empty() ? 1 : 0;
}

int validate(const std::string& file)
{
  const Scenario s = loadScenario(file);
  for(const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << file << ": ok (" << s.name << ", dimension " << s.dimension << ", " << s.static_obstacles.size()
            << " static obstacles, " << s.spawns.size() << " scheduled cubes, " << s.trials << " trials)\n";
  return 0;
}

int exportLog(const std::string& log_file, const std::string& dir)
{
  std::ifstream in(log_file);
  if(!in) throw std::runtime_error(log_file + ": cannot open file");
  exportPaths(EpisodeLog::read(in), dir);
  std::cout << "dumps written to " << dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Anytime path re-planning over pre-computed path sets"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir = "out", log_file, dump_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool wall_clock = false;

  auto* run_cmd = app.add_subcommand("run", "Run the protocol on a scenario");
  run_cmd->add_option("scenario", scenario_file, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--trials", trials, "Override the number of trials");
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_flag("--wall-clock", wall_clock, "Run the loops as threads on the wall clock");

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", scenario_file, "Scenario file")->required();

  auto* export_cmd = app.add_subcommand("export", "Write plot-ready dumps from an episode log");
  export_cmd->add_option("log", log_file, "episode.jsonl")->required();
  export_cmd->add_option("dir", dump_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if(*run_cmd) return run(scenario_file, seed, trials, out_dir, wall_clock);
    if(*validate_cmd) return validate(scenario_file);
    if(*export_cmd) return exportLog(log_file, dump_dir);
  }
  catch(const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
