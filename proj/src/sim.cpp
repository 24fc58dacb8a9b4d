#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "platoon/rng.hpp"

namespace platoon {

namespace {

constexpr double kZ95 = 1.959963984540054;

ArrivalDistribution make_arrivals(const SimConfig& config) {
    return ArrivalDistribution::poisson_truncated(config.lambda);
}

InitialCountDistribution make_initial(const SimConfig& config) {
    const double rate = config.initial_lambda.value_or(config.lambda);
    if (rate == 0.0) {
        return InitialCountDistribution::single_vehicle();
    }
    return InitialCountDistribution::zero_truncated_poisson(rate);
}

// Ratio estimator sum(a) / sum(b) over samples with a delta-method 95% half-width.
struct RatioAccumulator {
    std::vector<double> num;
    std::vector<double> den;

    void add(double a, double b) {
        num.push_back(a);
        den.push_back(b);
    }

    std::pair<double, double> mean_ci() const {
        double total_num = 0.0;
        double total_den = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            total_num += num[i];
            total_den += den[i];
        }
        if (total_den == 0.0) {
            return {0.0, 0.0};
        }
        const double ratio = total_num / total_den;
        const auto s = static_cast<double>(num.size());
        if (num.size() < 2) {
            return {ratio, std::numeric_limits<double>::quiet_NaN()};
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            const double r = num[i] - ratio * den[i];
            ss += r * r;
        }
        const double mean_den = total_den / s;
        return {ratio, kZ95 * std::sqrt(ss / (s * (s - 1.0))) / mean_den};
    }
};

}  // namespace

void SimConfig::validate() const {
    if (!(step_seconds > 0.0)) {
        throw std::invalid_argument("step length must be positive");
    }
    if (horizon_steps < 1) {
        throw std::invalid_argument("horizon must be at least one step");
    }
    if (samples < 1) {
        throw std::invalid_argument("need at least one Monte-Carlo sample");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("arrival rate must be nonnegative");
    }
    if (initial_lambda && !(*initial_lambda >= 0.0)) {
        throw std::invalid_argument("initial-count rate must be nonnegative");
    }
    platoon::validate(policy);
}

std::int64_t Realization::total_vehicles() const {
    std::int64_t total = initial_count;
    for (auto x : arrivals) {
        total += x;
    }
    return total;
}

double per_vehicle_utility(const VehicleRecord& v, const RewardParams& params) {
    const double benefit = v.is_lead ? 0.0 : params.benefit();
    return benefit - params.cost() * static_cast<double>(v.release_step - v.arrival_step);
}

double platoon_reward(const PlatoonRecord& p, const RewardParams& params) {
    return reward(p.size, p.release_step - p.episode_start, params);
}

void verify_hour(const Realization& realization, const HourResult& hour) {
    auto fail = [](const std::string& what) { throw std::logic_error("hour check failed: " + what); };

    std::int64_t platooned = 0;
    std::int64_t members = 0;
    for (const auto& p : hour.platoons) {
        if (p.size < 1 || static_cast<std::int64_t>(p.member_arrival_steps.size()) != p.size) {
            fail("platoon size does not match its member list");
        }
        for (auto a : p.member_arrival_steps) {
            if (a > p.release_step) {
                fail("vehicle released before it arrived");
            }
        }
        platooned += p.size;
    }
    if (platooned != realization.total_vehicles()) {
        fail("released " + std::to_string(platooned) + " of " +
             std::to_string(realization.total_vehicles()) + " vehicles");
    }
    if (static_cast<std::int64_t>(hour.vehicles.size()) != platooned) {
        fail("vehicle records do not match platoon members");
    }

    // Vehicle records are emitted platoon by platoon, lead first.
    std::size_t v = 0;
    for (const auto& p : hour.platoons) {
        std::int64_t leads = 0;
        for (std::int64_t i = 0; i < p.size; ++i, ++v) {
            const auto& rec = hour.vehicles[v];
            if (rec.release_step != p.release_step || rec.arrival_step < 0 ||
                rec.release_step < rec.arrival_step) {
                fail("vehicle record inconsistent with its platoon");
            }
            leads += rec.is_lead ? 1 : 0;
        }
        if (leads != 1) {
            fail("platoon at step " + std::to_string(p.release_step) + " has " +
                 std::to_string(leads) + " leads");
        }
        members += p.size;
    }
    if (members != platooned) {
        fail("vehicle count mismatch");
    }
}

HubSimulator::HubSimulator(SimConfig config)
    : config_((config.validate(), std::move(config))),
      arrivals_(make_arrivals(config_)),
      initial_(make_initial(config_)),
      threshold_(compute_threshold(arrivals_, config_.params.ratio())) {
    if (const auto* t = std::get_if<ThresholdPolicy>(&config_.policy); t && t->n_star) {
        n_star_ = t->n_star;
    } else {
        n_star_ = threshold_.n_star;
    }
}

Realization HubSimulator::draw(std::int64_t sample_index) const {
    Rng rng = make_rng(config_.master_seed, config_.cell_id, static_cast<std::uint64_t>(sample_index));
    Realization r;
    r.initial_count = initial_.sample(rng);
    r.arrivals.assign(static_cast<std::size_t>(config_.horizon_steps), 0);
    for (std::size_t k = 1; k < r.arrivals.size(); ++k) {
        r.arrivals[k] = arrivals_.sample(rng);
    }
    return r;
}

HourResult HubSimulator::run(const Realization& realization) const {
    const std::int64_t horizon = config_.horizon_steps;
    if (static_cast<std::int64_t>(realization.arrivals.size()) != horizon) {
        throw std::invalid_argument("realization length does not match the horizon");
    }

    HourResult out;
    std::vector<std::int64_t> waiting;  // arrival steps, in arrival order
    std::int64_t planned = -1;  // non-causal release step for the current episode
    std::vector<std::int64_t> counts;

    const auto* periodic = std::get_if<PeriodicPolicy>(&config_.policy);
    const bool non_causal = std::holds_alternative<NonCausalPolicy>(config_.policy);
    const bool spontaneous = std::holds_alternative<SpontaneousPolicy>(config_.policy);

    for (std::int64_t k = 0; k < horizon; ++k) {
        const std::int64_t new_arrivals =
            k == 0 ? realization.initial_count : realization.arrivals[static_cast<std::size_t>(k)];
        waiting.insert(waiting.end(), static_cast<std::size_t>(new_arrivals), k);
        const auto n = static_cast<std::int64_t>(waiting.size());

        bool fire = false;
        if (periodic) {
            fire = decide_periodic(k, periodic->period_steps).release_now;
        } else if (spontaneous) {
            fire = decide_spontaneous().release_now;
        } else if (non_causal) {
            // An episode begins once the hub is occupied; plan it with the full future.
            if (planned < 0 && n > 0) {
                counts.assign(1, n);
                for (std::int64_t t = k + 1; t < horizon; ++t) {
                    counts.push_back(counts.back() + realization.arrivals[static_cast<std::size_t>(t)]);
                }
                planned = *decide_non_causal(k, counts, config_.params);
            }
            fire = planned == k;
        } else {
            fire = decide_threshold(n, n_star_).release_now;
        }

        const bool forced = !fire && k == horizon - 1;
        if (n == 0 || !(fire || forced)) {
            continue;
        }
        PlatoonRecord p;
        p.release_step = k;
        p.size = n;
        p.member_arrival_steps = waiting;
        p.episode_start = waiting.front();
        p.forced = forced;
        for (std::size_t i = 0; i < waiting.size(); ++i) {
            out.vehicles.push_back({waiting[i], k, i == 0});
        }
        out.platoons.push_back(std::move(p));
        waiting.clear();
        planned = -1;
    }
    return out;
}

MetricsSummary HubSimulator::monte_carlo() const {
    RatioAccumulator utility;
    RatioAccumulator vehicle_utility;
    RatioAccumulator length;
    RatioAccumulator wait;
    MetricsSummary summary;
    const RewardParams& params = config_.params;

    for (std::int64_t s = 0; s < config_.samples; ++s) {
        const Realization realization = draw(s);
        const HourResult hour = run(realization);
        verify_hour(realization, hour);

        double vehicle_utility_sum = 0.0;
        double wait_sum = 0.0;
        for (const auto& v : hour.vehicles) {
            vehicle_utility_sum += per_vehicle_utility(v, params);
            wait_sum += static_cast<double>(v.release_step - v.arrival_step);
        }
        double utility_sum = 0.0;
        double length_sum = 0.0;
        double counted_platoons = 0.0;
        for (const auto& p : hour.platoons) {
            utility_sum += static_cast<double>(p.size) * platoon_reward(p, params);
            if (config_.include_forced_in_length || !p.forced) {
                length_sum += static_cast<double>(p.size);
                counted_platoons += 1.0;
            }
        }
        const auto vehicles = static_cast<double>(hour.vehicles.size());
        utility.add(utility_sum, vehicles);
        vehicle_utility.add(vehicle_utility_sum, vehicles);
        wait.add(wait_sum, vehicles);
        length.add(length_sum, counted_platoons);

        summary.vehicles += static_cast<std::int64_t>(hour.vehicles.size());
        summary.platoons += static_cast<std::int64_t>(hour.platoons.size());
    }

    summary.samples = config_.samples;
    std::tie(summary.mean_utility, summary.ci_utility) = utility.mean_ci();
    std::tie(summary.mean_vehicle_utility, summary.ci_vehicle_utility) = vehicle_utility.mean_ci();
    std::tie(summary.mean_platoon_length, summary.ci_platoon_length) = length.mean_ci();
    std::tie(summary.mean_wait_steps, summary.ci_wait_steps) = wait.mean_ci();
    return summary;
}

EpisodeComparison compare_first_episode(const Realization& realization,
                                        std::optional<std::int64_t> n_star,
                                        const RewardParams& params) {
    const auto horizon = static_cast<std::int64_t>(realization.arrivals.size());
    if (horizon < 1 || realization.initial_count < 1) {
        throw std::invalid_argument("episode needs a nonempty hub and at least one step");
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(horizon));
    std::int64_t running = realization.initial_count;
    for (std::int64_t t = 0; t < horizon; ++t) {
        running += t == 0 ? 0 : realization.arrivals[static_cast<std::size_t>(t)];
        counts[static_cast<std::size_t>(t)] = running;
    }

    EpisodeComparison cmp;
    cmp.threshold_release_step = horizon - 1;
    for (std::int64_t t = 0; t < horizon; ++t) {
        if (decide_threshold(counts[static_cast<std::size_t>(t)], n_star).release_now) {
            cmp.threshold_release_step = t;
            break;
        }
    }
    cmp.threshold_reward =
        reward(counts[static_cast<std::size_t>(cmp.threshold_release_step)], cmp.threshold_release_step, params);

    cmp.non_causal_release_step = *decide_non_causal(0, counts, params);
    cmp.non_causal_reward = reward(counts[static_cast<std::size_t>(cmp.non_causal_release_step)],
                                   cmp.non_causal_release_step, params);
    return cmp;
}

std::vector<SweepRow> sweep(const std::vector<double>& lambda_grid,
                            const std::vector<PolicyKind>& policies, const SimConfig& base) {
    std::vector<SweepRow> rows;
    rows.reserve(lambda_grid.size() * policies.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] >= 0.0)) {
            throw std::invalid_argument("sweep rates must be nonnegative");
        }
        for (const auto& policy : policies) {
            SimConfig cfg = base;
            cfg.lambda = lambda_grid[i];
            cfg.policy = policy;
            cfg.cell_id = i;
            HubSimulator sim(cfg);
            rows.push_back({cfg.lambda, policy, sim.threshold(), sim.monte_carlo()});
        }
    }
    return rows;
}

std::vector<double> linear_grid(double lo, double hi, std::int64_t points) {
    if (points < 1 || !(lo >= 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("invalid rate grid");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (std::int64_t i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    grid.back() = hi;
    return grid;
}

}  // namespace platoon
