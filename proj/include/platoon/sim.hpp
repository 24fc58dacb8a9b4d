#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "platoon/arrival.hpp"
#include "platoon/policies.hpp"
#include "platoon/stopping.hpp"

namespace platoon {

struct SimConfig {
    double step_seconds = 5.0;
    std::int64_t horizon_steps = 720;
    double lambda = 1.0 / 6.0;
    /// Rate of the zero-truncated Poisson for the initial occupancy; defaults
    /// to `lambda`.
    std::optional<double> initial_lambda;
    RewardParams params = RewardParams::from_ratio(0.005);
    PolicyKind policy = ThresholdPolicy{};
    std::int64_t samples = 1000;
    std::uint64_t master_seed = 1;
    /// Mixed into every sample's stream; the sweep uses the lambda index so
    /// all policies at one rate see the same arrivals.
    std::uint64_t cell_id = 0;
    /// Count the forced deadline release in platoon-length statistics.
    bool include_forced_in_length = true;

    void validate() const;
};

/// One realized hour: initial occupancy and arrivals[k] for k >= 1
/// (arrivals[0] is always 0).
struct Realization {
    std::int64_t initial_count = 0;
    std::vector<std::int64_t> arrivals;

    std::int64_t total_vehicles() const;
};

struct VehicleRecord {
    std::int64_t arrival_step = 0;
    std::int64_t release_step = 0;
    bool is_lead = false;
};

struct PlatoonRecord {
    std::int64_t release_step = 0;
    std::int64_t size = 0;
    std::vector<std::int64_t> member_arrival_steps;
    /// Step at which the hub became occupied, starting the coordinator's
    /// episode (the lead's arrival step).
    std::int64_t episode_start = 0;
    /// Released only because the deadline was reached.
    bool forced = false;
};

struct HourResult {
    std::vector<PlatoonRecord> platoons;
    std::vector<VehicleRecord> vehicles;
};

/// Coordinator reward y = R (n - 1) / n - c k of one release, with k counted
/// from the episode start.
double platoon_reward(const PlatoonRecord& p, const RewardParams& params);

/// Own-benefit minus own waiting cost: (0 for the lead, R otherwise) - c * wait.
double per_vehicle_utility(const VehicleRecord& v, const RewardParams& params);

/// Checks conservation, one lead per platoon and release >= arrival. Throws
/// std::logic_error on the first violation.
void verify_hour(const Realization& realization, const HourResult& hour);

/// Means are ratio estimators over all samples; ci_* are 95% half-widths
/// (delta method, normal approximation across samples).
struct MetricsSummary {
    /// Coordinator reward per vehicle: each release's y weighted by platoon size.
    double mean_utility = 0.0;
    double ci_utility = 0.0;
    double mean_platoon_length = 0.0;
    double ci_platoon_length = 0.0;
    double mean_wait_steps = 0.0;
    double ci_wait_steps = 0.0;
    /// Mean of per_vehicle_utility: each vehicle pays for its own wait.
    double mean_vehicle_utility = 0.0;
    double ci_vehicle_utility = 0.0;
    std::int64_t samples = 0;
    std::int64_t vehicles = 0;
    std::int64_t platoons = 0;
};

/// Hour-long hub simulation for one (rate, policy) configuration.
class HubSimulator {
public:
    explicit HubSimulator(SimConfig config);

    const SimConfig& config() const { return config_; }
    const ArrivalDistribution& arrivals() const { return arrivals_; }
    const InitialCountDistribution& initial() const { return initial_; }
    const Threshold& threshold() const { return threshold_; }

    /// Deterministic in (master_seed, cell_id, sample_index) and independent
    /// of the policy.
    Realization draw(std::int64_t sample_index) const;

    HourResult run(const Realization& realization) const;
    HourResult run_episode_hour(std::int64_t sample_index) const { return run(draw(sample_index)); }

    /// Runs `samples` hours, verifying each, and aggregates them.
    MetricsSummary monte_carlo() const;

private:
    SimConfig config_;
    ArrivalDistribution arrivals_;
    InitialCountDistribution initial_;
    Threshold threshold_;
    std::optional<std::int64_t> n_star_;
};

inline MetricsSummary monte_carlo(const SimConfig& config) { return HubSimulator(config).monte_carlo(); }

/// Rewards of the first episode of a realization under the threshold rule
/// and under the non-causal rule.
struct EpisodeComparison {
    std::int64_t threshold_release_step = 0;
    double threshold_reward = 0.0;
    std::int64_t non_causal_release_step = 0;
    double non_causal_reward = 0.0;
};

EpisodeComparison compare_first_episode(const Realization& realization,
                                        std::optional<std::int64_t> n_star,
                                        const RewardParams& params);

struct SweepRow {
    double lambda = 0.0;
    PolicyKind policy;
    Threshold threshold;
    MetricsSummary metrics;
};

/// Cross product of rates and policies; cell_id is the rate's grid index.
std::vector<SweepRow> sweep(const std::vector<double>& lambda_grid,
                            const std::vector<PolicyKind>& policies, const SimConfig& base);

/// `points` evenly spaced rates from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::int64_t points);

}  // namespace platoon
