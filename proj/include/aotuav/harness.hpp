#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aotuav/agent.hpp"
#include "aotuav/baselines.hpp"
#include "aotuav/config.hpp"
#include "aotuav/environment.hpp"

namespace aot {

/// Per-episode means over exactly T slots.
struct MetricsRecord {
  std::size_t episode = 0;
  std::string phase = "train";  // "train" or "eval"
  std::string policy;
  double avg_reward = 0.0;
  double avg_aot = 0.0;
  double avg_throughput = 0.0;  // Kbps
  double avg_loss = 0.0;        // mean over the episode's training steps, 0 when none ran
  std::size_t train_steps = 0;
  std::array<double, 4> solar_occupancy{};  // fraction of slots spent in each weather state
  std::size_t charge_events = 0;            // slots in which the station charged the UAV

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Energy bookkeeping of one episode, for conservation audits.
struct EnergyLedger {
  double uav_start = 0.0, uav_end = 0.0;
  double station_start = 0.0, station_end = 0.0;
  double travel = 0.0, charge = 0.0, harvested = 0.0;
  bool uav_clamped = false, station_clamped = false;
};

struct EpisodeResult {
  MetricsRecord metrics;
  EnergyLedger ledger;
  std::vector<std::size_t> actions;
};

/// How an episode is driven. While training, exploration and the importance exponent anneal
/// linearly in the global environment step (step_offset + t) over schedule_steps.
struct EpisodePlan {
  std::size_t episode = 0;
  std::size_t slots = 0;
  bool train = false;
  double epsilon = 0.0;  // fixed exploration when not training
  std::uint64_t step_offset = 0;
  std::uint64_t schedule_steps = 1;
  std::uint64_t env_seed = 0;
  std::uint64_t policy_seed = 0;
};

/// Runs one episode from a fresh reset. `agent` is required for PolicyKind::Pd3qn; with
/// plan.train it stores every transition and calls train_step once per slot.
EpisodeResult run_episode(Environment& env, PolicyKind policy, Agent* agent, const EpisodePlan& plan);

struct TrainOutput {
  std::vector<MetricsRecord> records;
  Agent agent;
};

/// Training episodes with annealed exploration, then assessment episodes at the exploration
/// floor (or greedy with config.greedy_eval) without learning.
TrainOutput train(const RunConfig& config);

/// Greedy, non-learning rollouts of a trained agent over the assessment episodes.
std::vector<MetricsRecord> evaluate(const RunConfig& config, const Agent& agent);

/// Every episode of the protocol driven by a baseline; rows keep the train/eval phase labels so
/// they line up with an agent run of the same seed.
std::vector<MetricsRecord> run_baseline(const RunConfig& config, PolicyKind policy);

/// Writes metrics.csv, metrics.jsonl and run_config.json into `dir` (created if missing).
void emit_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& dir,
                  const RunConfig& config);

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

struct PhaseSummary {
  std::string phase;
  std::size_t episodes = 0;
  double avg_reward = 0.0, avg_aot = 0.0, avg_throughput = 0.0, avg_loss = 0.0;
};

/// Per-phase means of a metrics file plus a 10-episode moving average written to summary.csv.
std::vector<PhaseSummary> summarize(const std::filesystem::path& dir);

/// Phase means of an in-memory series.
PhaseSummary phase_mean(const std::vector<MetricsRecord>& records, const std::string& phase);

/// Seeds of episode `episode` under run seed `seed`.
std::uint64_t episode_env_seed(std::uint64_t seed, std::size_t episode);
std::uint64_t episode_policy_seed(std::uint64_t seed, std::size_t episode);

}  // namespace aot
