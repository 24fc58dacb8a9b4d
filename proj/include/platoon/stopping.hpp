#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "platoon/arrival.hpp"

namespace platoon {

/// Benefit R per follower vehicle and waiting cost c per time-step.
class RewardParams {
public:
    RewardParams(double benefit, double cost);

    /// R = 1, c = ratio.
    static RewardParams from_ratio(double ratio) { return RewardParams(1.0, ratio); }

    double benefit() const { return benefit_; }
    double cost() const { return cost_; }
    double ratio() const { return ratio_; }

private:
    double benefit_;
    double cost_;
    double ratio_;
};

/// Coordinator reward for releasing n vehicles k steps into the episode:
/// R (n - 1) / n - c k.
double reward(std::int64_t n, std::int64_t k, const RewardParams& params);

/// Sum over x of x P(x) / (n^2 + n x): the expected marginal platooning gain of
/// waiting one more step, in units of R. Evaluated in descending order of x.
double lookahead_gain(std::int64_t n, const ArrivalDistribution& dist);

/// Release is worth it at occupancy n iff ratio >= lookahead_gain(n, dist).
bool release_condition(std::int64_t n, const ArrivalDistribution& dist, double ratio);

/// Release iff the immediate reward is at least the expected reward of
/// releasing one step later, computed literally from reward().
bool one_step_lookahead(std::int64_t n, std::int64_t k, const ArrivalDistribution& dist,
                        const RewardParams& params);

/// Smallest occupancy at which releasing is optimal. Empty `n_star` means the
/// release condition never holds (zero cost with positive arrival mean).
struct Threshold {
    std::optional<std::int64_t> n_star;
    double ratio_used = 0.0;
    std::string distribution_id;

    bool never() const { return !n_star.has_value(); }
    /// Whether a hub holding n vehicles should be released under this rule.
    bool releases_at(std::int64_t n) const { return n_star && n >= *n_star; }
    /// "6" or "never".
    std::string to_string() const;
};

Threshold compute_threshold(const ArrivalDistribution& dist, double ratio);

}  // namespace platoon
