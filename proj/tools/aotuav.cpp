#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "aotuav/errors.hpp"
#include "aotuav/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kContractViolation = 3;

aot::RunConfig resolve_config(const std::string& path, const std::string& preset) {
  aot::RunConfig c = path.empty() ? aot::preset_config(preset.empty() ? "paper" : preset) : aot::load_config(path);
  if (!path.empty() && !preset.empty()) {
    // Explicit --preset only overrides the run length.
    const auto p = aot::preset_config(preset);
    c.episodes = p.episodes;
    c.train_episodes = p.train_episodes;
    c.slots_per_episode = p.slots_per_episode;
    c.preset = p.preset;
  }
  return c;
}

void print_phases(const std::vector<aot::MetricsRecord>& records) {
  for (const char* phase : {"train", "eval"}) {
    const auto s = aot::phase_mean(records, phase);
    if (s.episodes == 0) continue;
    std::cout << std::fixed << std::setprecision(3) << phase << ": episodes=" << s.episodes
              << " reward=" << s.avg_reward << " aot=" << s.avg_aot << " throughput=" << s.avg_throughput
              << " loss=" << s.avg_loss << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV attestation scheduling: age-of-trust vs. throughput simulator and PD3QN agent"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "runs/default", checkpoint, policy = "pd3qn", graph_path, in_dir;
  std::uint64_t seed = 0;
  bool seed_given = false, greedy_eval = false;

  auto* train_cmd = app.add_subcommand("train", "train the agent, then run the assessment episodes");
  train_cmd->add_option("--config", config_path, "run configuration (JSON)");
  train_cmd->add_option("--preset", preset, "paper or desk");
  train_cmd->add_option("--seed", seed, "run seed")->each([&](const std::string&) { seed_given = true; });
  train_cmd->add_option("--out", out_dir, "output directory");
  train_cmd->add_flag("--greedy-eval", greedy_eval, "assess with epsilon = 0");

  auto* eval_cmd = app.add_subcommand("eval", "greedy assessment of a checkpoint or a baseline");
  eval_cmd->add_option("--config", config_path, "run configuration (JSON)");
  eval_cmd->add_option("--preset", preset, "paper or desk");
  eval_cmd->add_option("--checkpoint", checkpoint, "agent checkpoint");
  eval_cmd->add_option("--policy", policy, "pd3qn, rand, maf or nf")
      ->check(CLI::IsMember({"pd3qn", "rand", "maf", "nf"}));
  eval_cmd->add_option("--seed", seed, "run seed")->each([&](const std::string&) { seed_given = true; });
  eval_cmd->add_option("--out", out_dir, "output directory");

  auto* base_cmd = app.add_subcommand("baseline", "run a non-learning policy for the whole protocol");
  base_cmd->add_option("--policy", policy, "rand, maf or nf")->required()->check(CLI::IsMember({"rand", "maf", "nf"}));
  base_cmd->add_option("--config", config_path, "run configuration (JSON)");
  base_cmd->add_option("--preset", preset, "paper or desk");
  base_cmd->add_option("--seed", seed, "run seed")->each([&](const std::string&) { seed_given = true; });
  base_cmd->add_option("--out", out_dir, "output directory");

  auto* flow_cmd = app.add_subcommand("flowcheck", "print full and per-device attested throughput of a graph");
  flow_cmd->add_option("--graph", graph_path, "graph file (JSON)")->required();

  auto* sum_cmd = app.add_subcommand("summarize", "phase means and 10-episode moving averages of a run");
  sum_cmd->add_option("--in", in_dir, "run directory holding metrics.csv")->required();

  auto* gen_cmd = app.add_subcommand("gengraph", "write the topology a configuration describes");
  gen_cmd->add_option("--config", config_path, "run configuration (JSON)");
  gen_cmd->add_option("--out", graph_path, "graph file to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*flow_cmd) {
      const auto graph = aot::load_graph(graph_path);
      const auto table = aot::build_throughput_table(graph);
      std::cout << "full " << table.full << " Kbps\n";
      for (const auto& [node, kbps] : table.degraded) std::cout << "device " << node << " offline " << kbps << " Kbps\n";
      return 0;
    }
    if (*sum_cmd) {
      for (const auto& s : aot::summarize(in_dir)) {
        if (s.episodes == 0) continue;
        std::cout << std::fixed << std::setprecision(3) << s.phase << ": episodes=" << s.episodes
                  << " reward=" << s.avg_reward << " aot=" << s.avg_aot << " throughput=" << s.avg_throughput
                  << " loss=" << s.avg_loss << '\n';
      }
      std::cout << "wrote " << (std::filesystem::path(in_dir) / "summary.csv").string() << '\n';
      return 0;
    }

    aot::RunConfig config = resolve_config(config_path, preset);
    if (seed_given) config.seed = seed;
    aot::validate(config);

    if (*gen_cmd) {
      aot::save_graph(aot::build_graph(config.network), graph_path);
      return 0;
    }
    if (*train_cmd) {
      if (greedy_eval) config.greedy_eval = true;
      auto result = aot::train(config);
      aot::emit_metrics(result.records, out_dir, config);
      result.agent.save(std::filesystem::path(out_dir) / "checkpoint.bin");
      print_phases(result.records);
      return 0;
    }
    if (*base_cmd) {
      const auto records = aot::run_baseline(config, aot::parse_policy(policy));
      aot::emit_metrics(records, out_dir, config);
      print_phases(records);
      return 0;
    }
    if (*eval_cmd) {
      const auto kind = aot::parse_policy(policy);
      std::vector<aot::MetricsRecord> records;
      if (kind == aot::PolicyKind::Pd3qn) {
        if (checkpoint.empty()) throw aot::ConfigError("eval --policy pd3qn needs --checkpoint");
        records = aot::evaluate(config, aot::Agent::load(checkpoint, config.agent));
      } else {
        for (auto& r : aot::run_baseline(config, kind)) {
          if (r.phase == "eval") records.push_back(std::move(r));
        }
      }
      aot::emit_metrics(records, out_dir, config);
      print_phases(records);
      return 0;
    }
  } catch (const aot::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const aot::FormatError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return kConfigError;
  } catch (const aot::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kContractViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
