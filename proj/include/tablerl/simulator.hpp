#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tablerl/errors.hpp"
#include "tablerl/grpo.hpp"
#include "tablerl/rng.hpp"

namespace tablerl {

/// One-parameter logistic policy over a binary outcome. The smallest system
/// in which the reward-variance -> advantage -> gradient chain is fully
/// observable and exactly analyzable.
struct BernoulliPolicy {
    double theta = 0.0;

    double accuracy() const { return 1.0 / (1.0 + std::exp(-theta)); }

    static BernoulliPolicy from_accuracy(double p) {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("accuracy must be in (0, 1)");
        return BernoulliPolicy{std::log(p / (1.0 - p))};
    }
};

/// Variance of a Bernoulli(p) reward: p * (1 - p).
inline double reward_variance(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("accuracy must be in [0, 1]");
    return p * (1.0 - p);
}

/// Exact KL divergence between Bernoulli(p) and Bernoulli(q). The kernel's
/// kl_penalty is a per-sample estimator; this is the closed form available
/// when the distributions are known.
inline double bernoulli_kl(double p, double q) {
    if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
        throw DomainError("bernoulli_kl needs probabilities in (0, 1)");
    }
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

/// Monte-Carlo fraction of G-sized groups whose Bernoulli(p) rewards are all
/// equal. Converges to p^G + (1-p)^G.
inline double zero_variance_fraction(double p, int group_size, int n_groups,
                                     std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("accuracy must be in [0, 1]");
    if (group_size < 2) throw ConfigError("group_size must be >= 2");
    if (n_groups < 1) throw ConfigError("n_groups must be >= 1");

    Rng rng(seed);
    int degenerate = 0;
    for (int g = 0; g < n_groups; ++g) {
        const bool first = rng.bernoulli(p);
        bool all_equal = true;
        for (int i = 1; i < group_size; ++i) {
            if (rng.bernoulli(p) != first) all_equal = false;
        }
        if (all_equal) ++degenerate;
    }
    return static_cast<double>(degenerate) / static_cast<double>(n_groups);
}

/// Summary of one toy training run.
struct SimReport {
    double p_init = 0.0;
    double p_final = 0.0;
    double delta = 0.0;
    double variance_init = 0.0;
    double zero_variance_group_fraction = 0.0;
    std::vector<std::pair<int, double>> trajectory; // (step, accuracy), step 0 included
};

/// Trains the logistic Bernoulli policy with group-relative advantages. Each
/// step samples G rewards from Bernoulli(p), normalizes them through
/// group_advantages under the configured degeneracy policy, and applies the
/// score-function update
///
///     theta += lr * mean_i(A_i * (r_i - p))
///
/// where (r_i - p) is the log-likelihood gradient of a Bernoulli outcome
/// under the logistic parameterization. Degenerate groups contribute no
/// update: ZeroOut through all-zero advantages, Skip by dropping the group.
inline SimReport train_toy_policy(double p_init, int steps, const GrpoConfig& cfg,
                                  double lr, std::uint64_t seed) {
    if (!(p_init > 0.0 && p_init < 1.0)) throw DomainError("p_init must be in (0, 1)");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    cfg.validate();

    BernoulliPolicy policy = BernoulliPolicy::from_accuracy(p_init);
    Rng rng(seed);

    SimReport report;
    report.p_init = p_init;
    report.variance_init = reward_variance(p_init);
    report.trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    report.trajectory.emplace_back(0, policy.accuracy());

    const int g = cfg.group_size;
    std::vector<double> rewards(static_cast<std::size_t>(g));
    int degenerate_groups = 0;

    for (int step = 1; step <= steps; ++step) {
        const double p = policy.accuracy();
        for (double& r : rewards) r = rng.bernoulli(p) ? 1.0 : 0.0;

        const std::optional<std::vector<double>> advantages =
            group_advantages(rewards, cfg.degenerate_policy);
        if (!advantages) {
            ++degenerate_groups; // Skip: group dropped, no update
        } else {
            double update = 0.0;
            bool any_nonzero = false;
            for (int i = 0; i < g; ++i) {
                update += (*advantages)[static_cast<std::size_t>(i)] *
                          (rewards[static_cast<std::size_t>(i)] - p);
                if ((*advantages)[static_cast<std::size_t>(i)] != 0.0) any_nonzero = true;
            }
            if (!any_nonzero) ++degenerate_groups; // ZeroOut: all-zero advantages
            policy.theta += lr * update / static_cast<double>(g);
        }
        report.trajectory.emplace_back(step, policy.accuracy());
    }

    report.p_final = policy.accuracy();
    report.delta = report.p_final - report.p_init;
    report.zero_variance_group_fraction =
        steps == 0 ? 0.0 : static_cast<double>(degenerate_groups) / static_cast<double>(steps);
    return report;
}

namespace detail {

inline double binomial_pmf(int k, int n, double p) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

} // namespace detail

/// Exact expected GRPO objective of the toy policy at parameter theta_new,
/// with rewards sampled from (and the reference frozen at) theta_old.
/// Enumerating the success count k of the G Bernoulli draws makes this an
/// exact expectation over grpo_loss, no Monte Carlo involved.
inline double expected_objective(double theta_new, double theta_old, const GrpoConfig& cfg) {
    cfg.validate();
    const int g = cfg.group_size;
    const double p_old = BernoulliPolicy{theta_old}.accuracy();
    const double p_new = BernoulliPolicy{theta_new}.accuracy();

    double value = 0.0;
    for (int k = 0; k <= g; ++k) {
        const double weight = detail::binomial_pmf(k, g, p_old);
        RolloutGroup group;
        group.rewards.assign(static_cast<std::size_t>(g), 0.0);
        for (int i = 0; i < k; ++i) group.rewards[static_cast<std::size_t>(i)] = 1.0;
        group.ratio.resize(static_cast<std::size_t>(g));
        group.ref_ratio.resize(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i) {
            const bool success = i < k;
            group.ratio[static_cast<std::size_t>(i)] =
                success ? p_new / p_old : (1.0 - p_new) / (1.0 - p_old);
            group.ref_ratio[static_cast<std::size_t>(i)] =
                success ? p_old / p_new : (1.0 - p_old) / (1.0 - p_new);
        }
        double objective;
        try {
            objective = grpo_loss(group, cfg);
        } catch (const DegenerateGroupSkipped&) {
            continue; // dropped groups contribute nothing
        }
        value += weight * objective;
    }
    return value;
}

/// Exact expected score-function update direction E[mean_i(A_i * (r_i - p))]
/// at parameter theta, again by enumerating the success count. This is the
/// quantity train_toy_policy applies per step (times lr).
inline double expected_update(double theta, const GrpoConfig& cfg) {
    cfg.validate();
    const int g = cfg.group_size;
    const double p = BernoulliPolicy{theta}.accuracy();

    double value = 0.0;
    for (int k = 0; k <= g; ++k) {
        const double weight = detail::binomial_pmf(k, g, p);
        std::vector<double> rewards(static_cast<std::size_t>(g), 0.0);
        for (int i = 0; i < k; ++i) rewards[static_cast<std::size_t>(i)] = 1.0;
        const std::optional<std::vector<double>> advantages =
            group_advantages(rewards, cfg.degenerate_policy);
        if (!advantages) continue;
        double update = 0.0;
        for (int i = 0; i < g; ++i) {
            update += (*advantages)[static_cast<std::size_t>(i)] *
                      (rewards[static_cast<std::size_t>(i)] - p);
        }
        value += weight * update / static_cast<double>(g);
    }
    return value;
}

} // namespace tablerl
