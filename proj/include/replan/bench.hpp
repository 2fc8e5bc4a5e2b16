#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "replan/executor.hpp"
#include "replan/scenario.hpp"

namespace replan
{

/// Relative length variation in percent: 100 (cur - new) / cur.
double qualityIndex(double cur_len, double new_len);

/// One accepted re-plan.
struct MetricsRecord
{
  std::size_t trial = 0;
  std::size_t replan_id = 0;
  ReplanMode mode = ReplanMode::optimization;
  double length_cur = 0.0;
  double length_rp = 0.0;
  double delta = 0.0;        ///< percent
  double replan_time = 0.0;  ///< seconds
  double timestamp = 0.0;    ///< episode time of the swap

  nlohmann::json toJson() const;
  static MetricsRecord fromJson(const nlohmann::json& j);
};

struct AggregateRow
{
  std::size_t count = 0;
  double mean_delta = 0.0;
  double std_delta = 0.0;  ///< sample standard deviation; NaN below two records
  double mean_time = 0.0;
  double std_time = 0.0;
};

struct AggregateTable
{
  AggregateRow avoidance;
  AggregateRow optimization;

  const AggregateRow& row(ReplanMode m) const { return m == ReplanMode::avoidance ? avoidance : optimization; }
};

AggregateTable aggregate(const std::vector<MetricsRecord>& records);

/// Renders the table with times in both seconds and milliseconds.
std::string renderTable(const AggregateTable& table, const std::string& title);
nlohmann::json toJson(const AggregateTable& table);

/// Spawn policy implementing one scheduled cube of a scenario.
SpawnPolicy makeSpawnPolicy(const SpawnEvent& event, const Scenario& scenario);

/// Plans scenario.planning.paths start-goal paths: RRT-Connect, then RRT*
/// refinement, then subdivision. Returns nullopt when a path cannot be found.
std::optional<PathSet> planInitialPaths(const Scenario& scenario, Rng& rng);

/// Executor configuration derived from a scenario.
ExecutorConfig executorConfig(const Scenario& scenario, bool wall_clock = false);

struct TrialResult
{
  std::size_t trial = 0;
  bool skipped = false;
  std::string skip_reason;
  PathSet initial;
  EpisodeResult episode;
  std::vector<MetricsRecord> records;
};

/// One protocol iteration with its own random stream.
TrialResult runTrial(const Scenario& scenario, std::size_t trial, std::uint64_t seed, bool wall_clock = false);

struct ProtocolOptions
{
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  bool wall_clock = false;
  bool keep_episodes = true;
  std::function<void(const TrialResult&)> on_trial;
};

/// Per-invocation bookkeeping accumulated over a protocol run.
struct ProtocolStats
{
  std::size_t trials_run = 0;
  std::size_t goals_reached = 0;
  std::size_t safety_stops = 0;
  std::size_t invocations = 0;
  std::size_t within_budget = 0;  ///< elapsed <= t_RP + mean path-switch cycle
  std::size_t avoidance_invocations = 0;
  std::size_t avoidance_feasible = 0;

  void add(const EpisodeResult& episode);
  nlohmann::json toJson() const;
};

struct ProtocolResult
{
  std::vector<MetricsRecord> records;
  AggregateTable table;
  ProtocolStats stats;
  std::vector<TrialResult> trials;
  std::size_t skipped = 0;
};

ProtocolResult runProtocol(const Scenario& scenario, const ProtocolOptions& options = {});

void writeMetrics(const std::vector<MetricsRecord>& records, std::ostream& os);
std::vector<MetricsRecord> readMetrics(std::istream& is);

/// Plot-ready dumps of an episode: initial_paths/path_<k>.txt,
/// replans/replan_<nnn>.txt (one per swap), obstacles.txt and traversed.txt.
/// Waypoint files hold one whitespace-separated configuration per line.
void exportPaths(const EpisodeLog& log, const std::filesystem::path& dir);

/// Writes metrics.jsonl, summary.txt, summary.json and one directory per trial.
void writeProtocolOutputs(const Scenario& scenario, const ProtocolResult& result, const std::filesystem::path& dir);

}  // namespace replan
