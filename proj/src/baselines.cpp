#include "aotuav/baselines.hpp"

#include <algorithm>

#include "aotuav/errors.hpp"
#include "aotuav/kinetics.hpp"

namespace aot {

PolicyKind parse_policy(const std::string& name) {
  if (name == "pd3qn") return PolicyKind::Pd3qn;
  if (name == "rand") return PolicyKind::Rand;
  if (name == "maf") return PolicyKind::Maf;
  if (name == "nf") return PolicyKind::Nf;
  throw ConfigError("unknown policy '" + name + "' (expected pd3qn, rand, maf or nf)");
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Pd3qn: return "pd3qn";
    case PolicyKind::Rand: return "rand";
    case PolicyKind::Maf: return "maf";
    case PolicyKind::Nf: return "nf";
  }
  return "unknown";
}

std::size_t rand_policy(const ActionMask& mask, Rng& rng) {
  const auto feasible = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (feasible == 0) throw ContractViolation("rand_policy: empty action mask");
  std::uniform_int_distribution<std::size_t> pick(0, feasible - 1);
  std::size_t k = pick(rng);
  for (std::size_t a = 0; a < mask.size(); ++a) {
    if (mask[a] && k-- == 0) return a;
  }
  return mask.size() - 1;
}

std::size_t maf_policy(const EnvState& state, const ActionMask& mask) {
  if (mask.size() != state.aot.size() + 1) throw ShapeError("maf_policy: mask size mismatch");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < state.aot.size(); ++i) {
    if (!mask[i] || i == state.position) continue;
    if (!best || state.aot[i] > state.aot[*best]) best = i;
  }
  return best.value_or(state.aot.size());
}

std::size_t nf_policy(const Environment& env, const EnvState& state, const ActionMask& mask,
                      std::optional<std::size_t> last_visited) {
  if (mask.size() != env.action_count()) throw ShapeError("nf_policy: mask size mismatch");
  const Coordinate here = env.position_of(state.position);
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < env.device_count(); ++i) {
    if (!mask[i] || (last_visited && *last_visited == i)) continue;
    const double d = travel_distance(here, env.position_of(i));
    if (!best || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best.value_or(env.base_action());
}

}  // namespace aot
