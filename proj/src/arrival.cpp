#include "platoon/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace platoon {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kFromPmfTolerance = 1e-9;

std::string format_rate(const char* name, double lambda) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s(%.10g)", name, lambda);
    return buf;
}

void check_tail_mass(double tail_mass) {
    if (!(tail_mass > 0.0 && tail_mass <= 1e-6)) {
        throw std::invalid_argument("tail_mass must lie in (0, 1e-6]");
    }
}

// Poisson terms from `first` up to where the remaining mass is negligible,
// cut at the smallest support whose tail drops below tail_mass.
std::vector<double> truncated_poisson_terms(double lambda, double tail_mass, std::int64_t first,
                                            double log_norm) {
    std::vector<double> terms(static_cast<std::size_t>(first), 0.0);
    const double log_lambda = std::log(lambda);
    double log_term = -lambda - log_norm;
    for (std::int64_t x = 1; x <= first; ++x) {
        log_term += log_lambda - std::log(static_cast<double>(x));
    }
    for (std::int64_t x = first;; ++x) {
        if (x > first) {
            log_term += log_lambda - std::log(static_cast<double>(x));
        }
        const double term = std::exp(log_term);
        terms.push_back(term);
        if (static_cast<double>(x) > lambda && term < tail_mass * 1e-6) {
            break;
        }
    }

    // tail_after[x] = sum of terms beyond x, accumulated from the small end.
    std::vector<double> tail_after(terms.size(), 0.0);
    for (std::size_t i = terms.size() - 1; i > 0; --i) {
        tail_after[i - 1] = tail_after[i] + terms[i];
    }
    std::size_t cut = 0;
    while (cut + 1 < terms.size() && !(tail_after[cut] < tail_mass)) {
        ++cut;
    }
    terms.resize(cut + 1);
    return terms;
}

}  // namespace

ArrivalDistribution::ArrivalDistribution(std::vector<double> probs, std::string id)
    : probs_(std::move(probs)), id_(std::move(id)) {
    if (probs_.empty()) {
        throw std::invalid_argument("distribution has empty support");
    }
    while (probs_.size() > 1 && probs_.back() == 0.0) {
        probs_.pop_back();
    }
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0 + kFromPmfTolerance)) {
            throw std::invalid_argument("probability outside [0, 1]");
        }
        total += p;
    }
    for (double& p : probs_) {
        p /= total;
    }

    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < probs_.size(); ++x) {
        acc += probs_[x];
        cdf_[x] = acc;
    }
    if (std::abs(acc - 1.0) > kSumTolerance) {
        throw std::logic_error("renormalized pmf does not sum to one");
    }
    cdf_.back() = 1.0;

    for (std::size_t x = probs_.size(); x-- > 1;) {
        mean_ += static_cast<double>(x) * probs_[x];
    }
}

ArrivalDistribution ArrivalDistribution::poisson_truncated(double lambda, double tail_mass) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("arrival rate must be a finite nonnegative number");
    }
    check_tail_mass(tail_mass);
    if (lambda == 0.0) {
        return ArrivalDistribution({1.0}, format_rate("poisson", 0.0));
    }
    return ArrivalDistribution(truncated_poisson_terms(lambda, tail_mass, 0, 0.0),
                               format_rate("poisson", lambda));
}

ArrivalDistribution ArrivalDistribution::from_pmf(
    std::span<const std::pair<std::int64_t, double>> pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("pmf has no entries");
    }
    std::int64_t max_count = 0;
    for (const auto& [count, p] : pairs) {
        if (count < 0) {
            throw std::invalid_argument("pmf count must be nonnegative");
        }
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("pmf probability must be nonnegative");
        }
        max_count = std::max(max_count, count);
    }
    std::vector<double> probs(static_cast<std::size_t>(max_count) + 1, 0.0);
    std::vector<bool> seen(probs.size(), false);
    double total = 0.0;
    for (const auto& [count, p] : pairs) {
        const auto i = static_cast<std::size_t>(count);
        if (seen[i]) {
            throw std::invalid_argument("pmf count " + std::to_string(count) + " listed twice");
        }
        seen[i] = true;
        probs[i] = p;
        total += p;
    }
    if (!(std::abs(total - 1.0) < kFromPmfTolerance)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "pmf mass %.12g deviates from 1 by more than 1e-9", total);
        throw std::invalid_argument(buf);
    }
    return ArrivalDistribution(std::move(probs), "pmf[" + std::to_string(pairs.size()) + "]");
}

ArrivalDistribution ArrivalDistribution::point_mass(std::int64_t count) {
    if (count < 0) {
        throw std::invalid_argument("point mass count must be nonnegative");
    }
    std::vector<double> probs(static_cast<std::size_t>(count) + 1, 0.0);
    probs.back() = 1.0;
    return ArrivalDistribution(std::move(probs), "point(" + std::to_string(count) + ")");
}

double ArrivalDistribution::pmf(std::int64_t x) const {
    if (x < 0 || x > support_max()) {
        return 0.0;
    }
    return probs_[static_cast<std::size_t>(x)];
}

double ArrivalDistribution::tail_above(std::int64_t x) const {
    if (x < 0) {
        return 1.0;
    }
    double tail = 0.0;
    for (std::int64_t y = support_max(); y > x; --y) {
        tail += probs_[static_cast<std::size_t>(y)];
    }
    return tail;
}

std::int64_t ArrivalDistribution::sample(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::int64_t>(it - cdf_.begin());
}

InitialCountDistribution InitialCountDistribution::zero_truncated_poisson(double lambda,
                                                                          double tail_mass) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument(
            "zero-truncated Poisson needs a positive rate; use single_vehicle() for the limit");
    }
    check_tail_mass(tail_mass);
    // P(n) = Poisson(n) / (1 - e^-lambda); expm1 keeps small rates accurate.
    const double log_norm = std::log(-std::expm1(-lambda));
    return InitialCountDistribution(ArrivalDistribution(
        truncated_poisson_terms(lambda, tail_mass, 1, log_norm), format_rate("ztpoisson", lambda)));
}

InitialCountDistribution InitialCountDistribution::single_vehicle() {
    return InitialCountDistribution(ArrivalDistribution::point_mass(1));
}

}  // namespace platoon
