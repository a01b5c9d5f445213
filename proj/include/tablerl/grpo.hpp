#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tablerl/errors.hpp"

namespace tablerl {

/// What to do with a group whose rewards are all equal (zero variance, hence
/// no gradient signal): emit all-zero advantages, or tell the trainer to
/// drop the group.
enum class DegeneratePolicy { ZeroOut, Skip };

struct GrpoConfig {
    int group_size = 4;
    double clip_epsilon = 0.2;
    double kl_beta = 0.04;
    DegeneratePolicy degenerate_policy = DegeneratePolicy::ZeroOut;
    std::uint64_t seed = 0;

    void validate() const {
        if (group_size < 2) throw ConfigError("group_size must be >= 2");
        if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
            throw ConfigError("clip_epsilon must be in (0, 1)");
        }
        if (!(kl_beta >= 0.0)) throw ConfigError("kl_beta must be >= 0");
    }
};

/// One question's G sampled outputs. ratio[i] is the current-over-old policy
/// probability ratio of output i as a whole sequence; ref_ratio[i] is
/// reference-over-current. Advantages may be precomputed or left empty for
/// grpo_loss to fill from the rewards.
struct RolloutGroup {
    std::vector<double> rewards;
    std::vector<double> ratio;
    std::vector<double> ref_ratio;
    std::optional<std::vector<double>> advantages;
};

/// Group-relative advantages: (R_i - mean) / population std. All-equal
/// rewards are degenerate: ZeroOut yields an all-zero vector, Skip yields
/// nullopt. Throws GroupTooSmall below two rewards.
inline std::optional<std::vector<double>> group_advantages(
    std::span<const double> rewards, DegeneratePolicy policy = DegeneratePolicy::ZeroOut) {
    const std::size_t n = rewards.size();
    if (n < 2) throw GroupTooSmall("advantage normalization needs at least 2 rewards");

    bool all_equal = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (rewards[i] != rewards[0]) {
            all_equal = false;
            break;
        }
    }
    if (all_equal) {
        if (policy == DegeneratePolicy::Skip) return std::nullopt;
        return std::vector<double>(n, 0.0);
    }

    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(n);

    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = rewards[i] - mean;

    // Re-center: removes the first-pass rounding residual so the normalized
    // mean is zero to machine precision even for tightly clustered rewards.
    double residual = 0.0;
    for (double d : dev) residual += d;
    residual /= static_cast<double>(n);
    for (double& d : dev) d -= residual;

    double var = 0.0;
    for (double d : dev) var += d * d;
    var /= static_cast<double>(n);
    const double std_dev = std::sqrt(var);

    for (double& d : dev) d /= std_dev;
    return dev;
}

/// PPO-style pessimistic clipped surrogate term for one output:
/// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A).
inline double clip_term(double ratio, double advantage, double epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

/// Per-output KL penalty estimate r - ln r - 1 with r = pi_ref / pi_theta.
/// Non-negative, zero iff r = 1.
inline double kl_penalty(double ref_ratio) {
    return ref_ratio - std::log(ref_ratio) - 1.0;
}

/// Scalar group objective: mean clipped surrogate minus beta times the mean
/// KL penalty. Written as a value to MAXIMIZE; trainers that minimize should
/// negate it. Uses the group's advantages if present, otherwise derives them
/// from the rewards under the configured degeneracy policy (Skip on an
/// all-equal group throws DegenerateGroupSkipped).
inline double grpo_loss(const RolloutGroup& group, const GrpoConfig& cfg) {
    cfg.validate();
    const std::size_t n = group.rewards.size();
    if (n < 2) throw GroupTooSmall("rollout group needs at least 2 outputs");
    if (group.ratio.size() != n || group.ref_ratio.size() != n) {
        throw ConfigError("rollout group vectors must all have the same length");
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(group.ratio[i] > 0.0) || !(group.ref_ratio[i] > 0.0)) {
            throw DomainError("policy probability ratios must be strictly positive");
        }
    }

    std::vector<double> advantages;
    if (group.advantages) {
        if (group.advantages->size() != n) {
            throw ConfigError("precomputed advantages length mismatch");
        }
        advantages = *group.advantages;
    } else {
        std::optional<std::vector<double>> adv =
            group_advantages(group.rewards, cfg.degenerate_policy);
        if (!adv) throw DegenerateGroupSkipped("all rewards equal; group dropped");
        advantages = std::move(*adv);
    }

    double surrogate = 0.0;
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        surrogate += clip_term(group.ratio[i], advantages[i], cfg.clip_epsilon);
        kl += kl_penalty(group.ref_ratio[i]);
    }
    const double g = static_cast<double>(n);
    return surrogate / g - cfg.kl_beta * (kl / g);
}

} // namespace tablerl
