#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "aotuav/environment.hpp"
#include "aotuav/rng.hpp"

namespace aot {

enum class PolicyKind { Pd3qn, Rand, Maf, Nf };

PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind kind);

/// Uniform over the feasible set.
std::size_t rand_policy(const ActionMask& mask, Rng& rng);

/// Feasible device with the largest AoT (lowest index on ties); the base when no device is feasible.
/// The device the UAV is parked on is not a candidate: staying is always affordable, so counting
/// it would pin a low-battery UAV in place instead of sending it home.
std::size_t maf_policy(const EnvState& state, const ActionMask& mask);

/// Feasible device nearest to the UAV, skipping the device attested in the previous slot
/// (lowest index on ties); the base when nothing qualifies.
std::size_t nf_policy(const Environment& env, const EnvState& state, const ActionMask& mask,
                      std::optional<std::size_t> last_visited);

}  // namespace aot
