#include "platoon/dp.hpp"

#include <algorithm>
#include <ostream>

namespace platoon {

DpConfig::DpConfig(std::int64_t horizon_, std::int64_t max_count_, ArrivalDistribution dist_,
                   RewardParams params_)
    : horizon(horizon_), max_count(max_count_), dist(std::move(dist_)), params(params_) {
    if (horizon < 1) {
        throw std::invalid_argument("DP horizon must be at least 1");
    }
    if (max_count < 1) {
        throw std::invalid_argument("DP max_count must be at least 1");
    }
    // A single step from one vehicle must essentially never leave the table.
    if (dist.tail_above(max_count - 1) >= kMaxCapViolation) {
        throw CapViolation("max_count " + std::to_string(max_count) +
                           " is reachable in one step with non-negligible probability");
    }
}

DpSolution::DpSolution(std::int64_t horizon, std::int64_t max_count)
    : horizon_(horizon),
      max_count_(max_count),
      values_(static_cast<std::size_t>((horizon + 1) * max_count), 0.0),
      actions_(values_.size(), Action::release) {}

void DpSolution::write_actions_csv(std::ostream& out) const {
    out << "k,n,action\n";
    for (std::int64_t k = 0; k <= horizon_; ++k) {
        for (std::int64_t n = 1; n <= max_count_; ++n) {
            out << k << ',' << n << ',' << (action(k, n) == Action::release ? "release" : "wait")
                << '\n';
        }
    }
}

DpSolution solve(const DpConfig& config) {
    const std::int64_t horizon = config.horizon;
    const std::int64_t cap = config.max_count;
    const auto probs = config.dist.probabilities();
    DpSolution sol(horizon, cap);

    // Deadline: only release is feasible.
    for (std::int64_t n = 1; n <= cap; ++n) {
        sol.values_[sol.index(horizon, n)] = reward(n, horizon, config.params);
        sol.actions_[sol.index(horizon, n)] = Action::release;
    }

    std::int64_t max_wait_n = 0;
    for (std::int64_t k = horizon - 1; k >= 0; --k) {
        for (std::int64_t n = 1; n <= cap; ++n) {
            double continuation = 0.0;
            for (std::size_t x = probs.size(); x-- > 0;) {
                if (probs[x] == 0.0) {
                    continue;
                }
                const std::int64_t next = std::min(n + static_cast<std::int64_t>(x), cap);
                continuation += probs[x] * sol.values_[sol.index(k + 1, next)];
            }
            const double now = reward(n, k, config.params);
            const auto i = sol.index(k, n);
            if (now >= continuation) {
                sol.values_[i] = now;
                sol.actions_[i] = Action::release;
            } else {
                sol.values_[i] = continuation;
                sol.actions_[i] = Action::wait;
                max_wait_n = std::max(max_wait_n, n);
            }
        }
    }

    if (max_wait_n > 0) {
        const double per_step = config.dist.tail_above(cap - max_wait_n);
        sol.cap_violation_bound_ = std::min(1.0, per_step * static_cast<double>(horizon));
        if (sol.cap_violation_bound_ >= kMaxCapViolation) {
            throw CapViolation("state-space cap " + std::to_string(cap) +
                               " binds: policy waits at n=" + std::to_string(max_wait_n));
        }
    }
    return sol;
}

std::vector<StateMismatch> compare_with_threshold(const DpSolution& solution,
                                                  const Threshold& threshold,
                                                  std::int64_t window_end) {
    const std::int64_t horizon = solution.horizon();
    const std::int64_t end = window_end < 0 ? horizon : std::min(window_end, horizon);
    std::vector<StateMismatch> mismatches;
    auto check = [&](std::int64_t k, std::int64_t n, Action expected) {
        const Action got = solution.action(k, n);
        if (got != expected) {
            mismatches.push_back({k, n, got, expected});
        }
    };
    for (std::int64_t k = 0; k < end; ++k) {
        for (std::int64_t n = 1; n <= solution.max_count(); ++n) {
            check(k, n, threshold.releases_at(n) ? Action::release : Action::wait);
        }
    }
    for (std::int64_t n = 1; n <= solution.max_count(); ++n) {
        check(horizon, n, Action::release);
    }
    return mismatches;
}

}  // namespace platoon
