#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "platoon/rng.hpp"

namespace platoon {

/// Default truncation mass for infinite-support pmfs.
inline constexpr double kDefaultTailMass = 1e-12;

/// Finite pmf over the number of vehicles arriving in one time-step.
///
/// Immutable after construction. Probabilities are indexed by count
/// 0..support_max() and sum to one within 1e-12.
class ArrivalDistribution {
public:
    /// Poisson(lambda) truncated at the smallest support with remaining tail
    /// below `tail_mass`, then renormalized. lambda = 0 gives the point mass at 0.
    static ArrivalDistribution poisson_truncated(double lambda, double tail_mass = kDefaultTailMass);

    /// Arbitrary pmf from (count, probability) pairs. A total mass off by less
    /// than 1e-9 is renormalized; anything further off is rejected.
    static ArrivalDistribution from_pmf(std::span<const std::pair<std::int64_t, double>> pairs);

    static ArrivalDistribution point_mass(std::int64_t count);

    std::int64_t support_max() const { return static_cast<std::int64_t>(probs_.size()) - 1; }
    std::span<const double> probabilities() const { return probs_; }
    double pmf(std::int64_t x) const;
    double mean() const { return mean_; }
    /// P(X > x).
    double tail_above(std::int64_t x) const;

    /// Short human-readable label, e.g. "poisson(0.1666666667)" or "pmf[3]".
    const std::string& id() const { return id_; }

    std::int64_t sample(Rng& rng) const;

private:
    friend class InitialCountDistribution;

    ArrivalDistribution(std::vector<double> probs, std::string id);

    std::vector<double> probs_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    std::string id_;
};

/// Distribution of the initial hub occupancy n_0; no mass at zero.
class InitialCountDistribution {
public:
    /// P(n) = lambda^n / ((e^lambda - 1) n!) for n >= 1, truncated like
    /// ArrivalDistribution::poisson_truncated. Requires lambda > 0.
    static InitialCountDistribution zero_truncated_poisson(double lambda,
                                                           double tail_mass = kDefaultTailMass);

    /// The lambda -> 0 limit: always exactly one vehicle.
    static InitialCountDistribution single_vehicle();

    const ArrivalDistribution& distribution() const { return dist_; }
    double pmf(std::int64_t n) const { return dist_.pmf(n); }
    double mean() const { return dist_.mean(); }
    std::int64_t sample(Rng& rng) const { return dist_.sample(rng); }

private:
    explicit InitialCountDistribution(ArrivalDistribution dist) : dist_(std::move(dist)) {}

    ArrivalDistribution dist_;
};

}  // namespace platoon
