#include "platoon/policies.hpp"

#include <stdexcept>

namespace platoon {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view policy_name(const PolicyKind& policy) {
    return std::visit(overloaded{
                          [](const ThresholdPolicy&) { return std::string_view("optimal"); },
                          [](const PeriodicPolicy&) { return std::string_view("periodic"); },
                          [](const SpontaneousPolicy&) { return std::string_view("spontaneous"); },
                          [](const NonCausalPolicy&) { return std::string_view("non_causal"); },
                      },
                      policy);
}

PolicyKind parse_policy(std::string_view name, std::int64_t period_steps) {
    if (name == "optimal" || name == "threshold") {
        return ThresholdPolicy{};
    }
    if (name == "periodic") {
        PolicyKind p = PeriodicPolicy{period_steps};
        validate(p);
        return p;
    }
    if (name == "spontaneous") {
        return SpontaneousPolicy{};
    }
    if (name == "non_causal" || name == "noncausal") {
        return NonCausalPolicy{};
    }
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

void validate(const PolicyKind& policy) {
    if (const auto* t = std::get_if<ThresholdPolicy>(&policy); t && t->n_star && *t->n_star < 1) {
        throw std::invalid_argument("threshold n_star must be at least 1");
    }
    if (const auto* p = std::get_if<PeriodicPolicy>(&policy); p && p->period_steps < 1) {
        throw std::invalid_argument("period must be at least 1 step");
    }
}

PolicyDecision decide_threshold(std::int64_t n, std::optional<std::int64_t> n_star) {
    return {n_star.has_value() && n >= 1 && n >= *n_star};
}

PolicyDecision decide_periodic(std::int64_t k, std::int64_t period_steps) {
    return {(k + 1) % period_steps == 0};
}

PolicyDecision decide_spontaneous() { return {true}; }

std::optional<std::int64_t> decide_non_causal(std::int64_t episode_start,
                                              std::span<const std::int64_t> counts,
                                              const RewardParams& params) {
    std::optional<std::int64_t> best_step;
    double best_reward = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1) {
            continue;
        }
        const double r = reward(counts[i], static_cast<std::int64_t>(i), params);
        if (!best_step || r > best_reward) {
            best_step = episode_start + static_cast<std::int64_t>(i);
            best_reward = r;
        }
    }
    return best_step;
}

}  // namespace platoon
