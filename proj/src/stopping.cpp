#include "platoon/stopping.hpp"

#include <cmath>
#include <stdexcept>

namespace platoon {

namespace {

void require_occupied(std::int64_t n) {
    if (n < 1) {
        throw std::invalid_argument("vehicle count must be at least 1");
    }
}

}  // namespace

RewardParams::RewardParams(double benefit, double cost)
    : benefit_(benefit), cost_(cost), ratio_(cost / benefit) {
    if (!(benefit > 0.0) || !std::isfinite(benefit)) {
        throw std::invalid_argument("platooning benefit R must be positive");
    }
    if (!(cost >= 0.0) || !std::isfinite(cost)) {
        throw std::invalid_argument("waiting cost c must be nonnegative");
    }
}

double reward(std::int64_t n, std::int64_t k, const RewardParams& params) {
    require_occupied(n);
    if (k < 0) {
        throw std::invalid_argument("time-step must be nonnegative");
    }
    const auto nd = static_cast<double>(n);
    return params.benefit() * (nd - 1.0) / nd - params.cost() * static_cast<double>(k);
}

double lookahead_gain(std::int64_t n, const ArrivalDistribution& dist) {
    require_occupied(n);
    const auto probs = dist.probabilities();
    const auto nd = static_cast<double>(n);
    double sum = 0.0;
    // x = 0 contributes exactly nothing.
    for (std::size_t x = probs.size(); x-- > 1;) {
        const auto xd = static_cast<double>(x);
        sum += xd / (nd * nd + nd * xd) * probs[x];
    }
    return sum;
}

bool release_condition(std::int64_t n, const ArrivalDistribution& dist, double ratio) {
    return ratio >= lookahead_gain(n, dist);
}

bool one_step_lookahead(std::int64_t n, std::int64_t k, const ArrivalDistribution& dist,
                        const RewardParams& params) {
    const double now = reward(n, k, params);
    const auto probs = dist.probabilities();
    double later = 0.0;
    for (std::size_t x = probs.size(); x-- > 0;) {
        if (probs[x] > 0.0) {
            later += probs[x] * reward(n + static_cast<std::int64_t>(x), k + 1, params);
        }
    }
    return now >= later;
}

std::string Threshold::to_string() const {
    return n_star ? std::to_string(*n_star) : std::string("never");
}

Threshold compute_threshold(const ArrivalDistribution& dist, double ratio) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
        throw std::invalid_argument("cost-benefit ratio must be nonnegative");
    }
    Threshold result{std::nullopt, ratio, dist.id()};
    if (release_condition(1, dist, ratio)) {
        result.n_star = 1;
        return result;
    }
    if (ratio == 0.0) {
        // Positive mean: the gain stays strictly positive for every n.
        return result;
    }

    // gain(n) <= mean / n^2, so the condition holds once n^2 >= mean / ratio.
    // The computed gain is nonincreasing in n, so bisection finds the exact minimum.
    std::int64_t lo = 1;  // fails
    auto hi = static_cast<std::int64_t>(std::ceil(std::sqrt(dist.mean() / ratio))) + 1;
    while (!release_condition(hi, dist, ratio)) {
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (release_condition(mid, dist, ratio)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.n_star = hi;
    return result;
}

}  // namespace platoon
