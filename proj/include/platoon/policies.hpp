#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "platoon/stopping.hpp"

namespace platoon {

struct PolicyDecision {
    bool release_now = false;
};

/// Release the first time occupancy reaches n_star. An empty n_star never
/// releases before the deadline.
struct ThresholdPolicy {
    std::optional<std::int64_t> n_star;
};

/// Release at the last step of every `period_steps` interval.
struct PeriodicPolicy {
    std::int64_t period_steps = 60;
};

/// Every step's arrivals leave immediately.
struct SpontaneousPolicy {};

/// Sees the realized arrivals of the episode and releases at the
/// reward-maximizing step.
struct NonCausalPolicy {};

using PolicyKind = std::variant<ThresholdPolicy, PeriodicPolicy, SpontaneousPolicy, NonCausalPolicy>;

/// CSV/CLI name: "optimal", "periodic", "spontaneous" or "non_causal".
std::string_view policy_name(const PolicyKind& policy);

/// Parses a policy name. The threshold policy gets its n_star later from
/// the arrival rate; the periodic one uses `period_steps`.
PolicyKind parse_policy(std::string_view name, std::int64_t period_steps = 60);

/// Throws on n_star < 1 or period < 1.
void validate(const PolicyKind& policy);

PolicyDecision decide_threshold(std::int64_t n, std::optional<std::int64_t> n_star);
PolicyDecision decide_periodic(std::int64_t k, std::int64_t period_steps);
PolicyDecision decide_spontaneous();

/// `counts[i]` is the occupancy at absolute step episode_start + i, through
/// the horizon. Returns the absolute step maximizing
/// R (n_t - 1) / n_t - c (t - episode_start) over occupied steps, earliest on
/// ties, or nothing if the hub stays empty.
std::optional<std::int64_t> decide_non_causal(std::int64_t episode_start,
                                              std::span<const std::int64_t> counts,
                                              const RewardParams& params);

}  // namespace platoon
