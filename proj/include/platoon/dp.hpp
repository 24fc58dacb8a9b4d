#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "platoon/arrival.hpp"
#include "platoon/stopping.hpp"

namespace platoon {

/// Probability budget for the state-space cap to bind over the whole horizon.
inline constexpr double kMaxCapViolation = 1e-9;

/// Thrown when the capped state space could distort the solution.
class CapViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite-horizon release problem with release forced at step `horizon`.
/// Occupancy is capped at `max_count`; transitions beyond it are clamped.
struct DpConfig {
    std::int64_t horizon = 720;
    std::int64_t max_count = 60;
    ArrivalDistribution dist;
    RewardParams params;

    DpConfig(std::int64_t horizon, std::int64_t max_count, ArrivalDistribution dist,
             RewardParams params);
};

enum class Action : std::uint8_t { wait = 0, release = 1 };

/// Value and action tables over k in [0, horizon] and n in [1, max_count].
class DpSolution {
public:
    DpSolution(std::int64_t horizon, std::int64_t max_count);

    std::int64_t horizon() const { return horizon_; }
    std::int64_t max_count() const { return max_count_; }

    double value(std::int64_t k, std::int64_t n) const { return values_[index(k, n)]; }
    Action action(std::int64_t k, std::int64_t n) const { return actions_[index(k, n)]; }

    /// Union bound on the probability that any trajectory hits the cap while
    /// the solved policy is still waiting.
    double cap_violation_bound() const { return cap_violation_bound_; }

    void write_actions_csv(std::ostream& out) const;

private:
    friend DpSolution solve(const DpConfig& config);

    std::size_t index(std::int64_t k, std::int64_t n) const {
        if (k < 0 || k > horizon_ || n < 1 || n > max_count_) {
            throw std::out_of_range("DP state outside table");
        }
        return static_cast<std::size_t>(k * max_count_ + (n - 1));
    }

    std::int64_t horizon_;
    std::int64_t max_count_;
    std::vector<double> values_;
    std::vector<Action> actions_;
    double cap_violation_bound_ = 0.0;
};

/// Backward induction from the forced release at the horizon. Ties release.
/// Throws CapViolation if the cap could bind with probability >= 1e-9.
DpSolution solve(const DpConfig& config);

struct StateMismatch {
    std::int64_t k;
    std::int64_t n;
    Action dp_action;
    Action rule_action;
};

/// States where the DP action differs from the threshold rule, for k below
/// `window_end` (defaults to the horizon). At the horizon both must release.
std::vector<StateMismatch> compare_with_threshold(const DpSolution& solution,
                                                  const Threshold& threshold,
                                                  std::int64_t window_end = -1);

}  // namespace platoon
