#include "aotuav/harness.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "aotuav/errors.hpp"

namespace aot {

std::uint64_t episode_env_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(seed, Stream::Environment, episode);
}

std::uint64_t episode_policy_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(seed, Stream::Policy, episode);
}

EpisodeResult run_episode(Environment& env, PolicyKind policy, Agent* agent, const EpisodePlan& plan) {
  if (plan.slots == 0) throw ConfigError("run_episode: episode needs at least one slot");
  if (policy == PolicyKind::Pd3qn && agent == nullptr) throw ContractViolation("run_episode: pd3qn needs an agent");

  const auto& hyper = agent ? agent->hyper() : AgentHyper{};
  Rng policy_rng(plan.policy_seed);
  EnvState state = env.reset(plan.env_seed);
  std::optional<std::size_t> last_visited;

  EpisodeResult result;
  auto& m = result.metrics;
  auto& ledger = result.ledger;
  m.episode = plan.episode;
  m.policy = policy_name(policy);
  ledger.uav_start = state.uav_level;
  ledger.station_start = state.station_level;
  result.actions.reserve(plan.slots);

  const double uav_cap = env.config().uav_capacity;
  const double station_cap = env.config().station_capacity;
  double reward_sum = 0.0, aot_sum = 0.0, flow_sum = 0.0, loss_sum = 0.0;
  std::array<std::size_t, 4> occupancy{};

  Eigen::VectorXd obs = env.observe(state);
  for (std::size_t t = 0; t < plan.slots; ++t) {
    const ActionMask mask = env.feasible_actions(state);
    const double progress =
        static_cast<double>(plan.step_offset + t) / static_cast<double>(std::max<std::uint64_t>(1, plan.schedule_steps));
    const double epsilon = plan.train ? linear_schedule(hyper.eps_start, hyper.eps_end, progress) : plan.epsilon;

    std::size_t action = 0;
    switch (policy) {
      case PolicyKind::Pd3qn: action = agent->act(obs, mask, epsilon, policy_rng); break;
      case PolicyKind::Rand: action = rand_policy(mask, policy_rng); break;
      case PolicyKind::Maf: action = maf_policy(state, mask); break;
      case PolicyKind::Nf: action = nf_policy(env, state, mask, last_visited); break;
    }

    StepOutcome out = env.step(state, Action{action});
    result.actions.push_back(action);
    last_visited = out.attested;

    // Clamp detection: the unclamped ledger value would have exceeded capacity.
    if (action == env.base_action() && state.uav_level - out.travel + out.charge > uav_cap) ledger.uav_clamped = true;
    const double station_raw = state.station_level - out.charge + out.harvested;
    if (station_raw > station_cap) ledger.station_clamped = true;
    ledger.travel += out.travel;
    ledger.charge += out.charge;
    ledger.harvested += out.harvested;

    reward_sum += out.reward;
    aot_sum += out.avg_aot;
    flow_sum += out.throughput;
    ++occupancy[out.next_state.solar_state];
    if (out.charge > 0.0) ++m.charge_events;

    Eigen::VectorXd next_obs = env.observe(out.next_state);
    if (plan.train && policy == PolicyKind::Pd3qn) {
      agent->remember({obs, action, out.reward, next_obs, env.feasible_actions(out.next_state)});
      const double beta = linear_schedule(hyper.beta_start, hyper.beta_end, progress);
      if (auto stats = agent->train_step(beta)) {
        loss_sum += stats->loss;
        ++m.train_steps;
      }
    }
    obs = std::move(next_obs);
    state = std::move(out.next_state);
  }

  const auto slots = static_cast<double>(plan.slots);
  m.avg_reward = reward_sum / slots;
  m.avg_aot = aot_sum / slots;
  m.avg_throughput = flow_sum / slots;
  m.avg_loss = m.train_steps ? loss_sum / static_cast<double>(m.train_steps) : 0.0;
  for (std::size_t j = 0; j < 4; ++j) m.solar_occupancy[j] = static_cast<double>(occupancy[j]) / slots;
  ledger.uav_end = state.uav_level;
  ledger.station_end = state.station_level;
  return result;
}

namespace {

EpisodePlan plan_for(const RunConfig& config, std::size_t episode) {
  EpisodePlan plan;
  plan.episode = episode;
  plan.slots = config.slots_per_episode;
  plan.env_seed = episode_env_seed(config.seed, episode);
  plan.policy_seed = episode_policy_seed(config.seed, episode);
  plan.schedule_steps = static_cast<std::uint64_t>(config.train_episodes) * config.slots_per_episode;
  plan.step_offset = static_cast<std::uint64_t>(episode) * config.slots_per_episode;
  return plan;
}

}  // namespace

TrainOutput train(const RunConfig& config) {
  Environment env(config);
  TrainOutput out{{}, Agent(config.agent, env.observation_size(), env.action_count(), config.seed)};
  for (std::size_t e = 0; e < config.episodes; ++e) {
    EpisodePlan plan = plan_for(config, e);
    plan.train = e < config.train_episodes;
    plan.epsilon = config.greedy_eval ? 0.0 : config.agent.eps_end;
    auto record = run_episode(env, PolicyKind::Pd3qn, &out.agent, plan).metrics;
    record.phase = plan.train ? "train" : "eval";
    out.records.push_back(std::move(record));
  }
  return out;
}

std::vector<MetricsRecord> evaluate(const RunConfig& config, const Agent& agent) {
  Environment env(config);
  if (static_cast<std::size_t>(agent.online().in_dim()) != env.observation_size() ||
      static_cast<std::size_t>(agent.online().actions()) != env.action_count()) {
    throw ConfigError("checkpoint dimensions do not match the configured network");
  }
  Agent frozen = agent;
  std::vector<MetricsRecord> records;
  for (std::size_t e = config.train_episodes; e < config.episodes; ++e) {
    EpisodePlan plan = plan_for(config, e);
    plan.epsilon = 0.0;
    auto record = run_episode(env, PolicyKind::Pd3qn, &frozen, plan).metrics;
    record.phase = "eval";
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<MetricsRecord> run_baseline(const RunConfig& config, PolicyKind policy) {
  if (policy == PolicyKind::Pd3qn) throw ConfigError("run_baseline: pd3qn is not a baseline");
  Environment env(config);
  std::vector<MetricsRecord> records;
  for (std::size_t e = 0; e < config.episodes; ++e) {
    auto record = run_episode(env, policy, nullptr, plan_for(config, e)).metrics;
    record.phase = e < config.train_episodes ? "train" : "eval";
    records.push_back(std::move(record));
  }
  return records;
}

namespace {

const char* kCsvHeader =
    "episode,phase,policy,avg_reward,avg_aot,avg_throughput,avg_loss,train_steps,solar_0,solar_1,solar_2,solar_3,"
    "charge_events";

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) throw IoError("metrics: bad number '" + s + "'");
  return v;
}

nlohmann::json record_json(const MetricsRecord& r) {
  return {{"episode", r.episode},
          {"phase", r.phase},
          {"policy", r.policy},
          {"avg_reward", r.avg_reward},
          {"avg_aot", r.avg_aot},
          {"avg_throughput", r.avg_throughput},
          {"avg_loss", r.avg_loss},
          {"train_steps", r.train_steps},
          {"solar_occupancy", r.solar_occupancy},
          {"charge_events", r.charge_events}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void emit_metrics(const std::vector<MetricsRecord>& records, const std::filesystem::path& dir,
                  const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  std::ostringstream jsonl;
  for (const auto& r : records) {
    csv << r.episode << ',' << r.phase << ',' << r.policy << ',' << fmt(r.avg_reward) << ',' << fmt(r.avg_aot) << ','
        << fmt(r.avg_throughput) << ',' << fmt(r.avg_loss) << ',' << r.train_steps;
    for (double o : r.solar_occupancy) csv << ',' << fmt(o);
    csv << ',' << r.charge_events << '\n';
    jsonl << record_json(r).dump() << '\n';
  }
  write_file(dir / "metrics.csv", csv.str());
  write_file(dir / "metrics.jsonl", jsonl.str());

  nlohmann::json snapshot = to_json(config);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  snapshot["metadata"] = {{"written_at", stamp}};
  write_file(dir / "run_config.json", snapshot.dump(2) + "\n");
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError(path.string() + ": unexpected header");
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 13) throw IoError(path.string() + ": malformed row '" + line + "'");
    MetricsRecord r;
    r.episode = std::stoul(f[0]);
    r.phase = f[1];
    r.policy = f[2];
    r.avg_reward = parse_double(f[3]);
    r.avg_aot = parse_double(f[4]);
    r.avg_throughput = parse_double(f[5]);
    r.avg_loss = parse_double(f[6]);
    r.train_steps = std::stoul(f[7]);
    for (std::size_t j = 0; j < 4; ++j) r.solar_occupancy[j] = parse_double(f[8 + j]);
    r.charge_events = std::stoul(f[12]);
    records.push_back(std::move(r));
  }
  return records;
}

PhaseSummary phase_mean(const std::vector<MetricsRecord>& records, const std::string& phase) {
  PhaseSummary s;
  s.phase = phase;
  for (const auto& r : records) {
    if (r.phase != phase) continue;
    ++s.episodes;
    s.avg_reward += r.avg_reward;
    s.avg_aot += r.avg_aot;
    s.avg_throughput += r.avg_throughput;
    s.avg_loss += r.avg_loss;
  }
  if (s.episodes) {
    const auto n = static_cast<double>(s.episodes);
    s.avg_reward /= n;
    s.avg_aot /= n;
    s.avg_throughput /= n;
    s.avg_loss /= n;
  }
  return s;
}

std::vector<PhaseSummary> summarize(const std::filesystem::path& dir) {
  const auto records = read_metrics_csv(dir / "metrics.csv");
  constexpr std::size_t kWindow = 10;
  std::ostringstream out;
  out << "episode,phase,ma_reward,ma_aot,ma_throughput,ma_loss\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t lo = i + 1 >= kWindow ? i + 1 - kWindow : 0;
    double reward = 0.0, aot = 0.0, flow = 0.0, loss = 0.0;
    for (std::size_t k = lo; k <= i; ++k) {
      reward += records[k].avg_reward;
      aot += records[k].avg_aot;
      flow += records[k].avg_throughput;
      loss += records[k].avg_loss;
    }
    const auto n = static_cast<double>(i - lo + 1);
    out << records[i].episode << ',' << records[i].phase << ',' << fmt(reward / n) << ',' << fmt(aot / n) << ','
        << fmt(flow / n) << ',' << fmt(loss / n) << '\n';
  }
  write_file(dir / "summary.csv", out.str());
  return {phase_mean(records, "train"), phase_mean(records, "eval")};
}

}  // namespace aot
