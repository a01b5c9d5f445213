#include <doctest.h>

#include <cmath>

#include "tablerl/simulator.hpp"

using namespace tablerl;

TEST_CASE("reward_variance") {
    // Measured initial accuracies of the four model scales and their
    // Bernoulli variances.
    CHECK(reward_variance(0.214) == doctest::Approx(0.168).epsilon(0.003));
    CHECK(reward_variance(0.312) == doctest::Approx(0.215).epsilon(0.003));
    CHECK(reward_variance(0.552) == doctest::Approx(0.247).epsilon(0.003));
    CHECK(reward_variance(0.818) == doctest::Approx(0.149).epsilon(0.003));
    CHECK(reward_variance(0.5) == 0.25);
    CHECK(reward_variance(0.0) == 0.0);
    CHECK(reward_variance(1.0) == 0.0);

    CHECK_THROWS_AS(reward_variance(-0.1), DomainError);
    CHECK_THROWS_AS(reward_variance(1.1), DomainError);

    SUBCASE("symmetric around one half") {
        for (double p = 0.0; p <= 0.5; p += 0.01) {
            CHECK(reward_variance(p) == doctest::Approx(reward_variance(1.0 - p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("BernoulliPolicy logistic parameterization") {
    CHECK(BernoulliPolicy{0.0}.accuracy() == 0.5);
    const BernoulliPolicy p = BernoulliPolicy::from_accuracy(0.85);
    CHECK(p.accuracy() == doctest::Approx(0.85).epsilon(1e-12));
    CHECK_THROWS_AS(BernoulliPolicy::from_accuracy(0.0), DomainError);
    CHECK_THROWS_AS(BernoulliPolicy::from_accuracy(1.0), DomainError);
}

TEST_CASE("bernoulli_kl") {
    CHECK(bernoulli_kl(0.3, 0.3) == 0.0);
    CHECK(bernoulli_kl(0.5, 0.25) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
    CHECK(bernoulli_kl(0.2, 0.8) > 0.0);
    CHECK_THROWS_AS(bernoulli_kl(0.0, 0.5), DomainError);
}

TEST_CASE("zero_variance_fraction") {
    CHECK(zero_variance_fraction(1.0, 4, 1000, 1) == 1.0);
    CHECK(zero_variance_fraction(0.0, 8, 1000, 1) == 1.0);

    SUBCASE("matches the closed form within 3 sigma") {
        for (const double p : {0.5, 0.9}) {
            const int n = 100000;
            const double expect = std::pow(p, 4) + std::pow(1 - p, 4);
            const double sigma = std::sqrt(expect * (1 - expect) / n);
            const double got = zero_variance_fraction(p, 4, n, 42);
            CHECK(std::fabs(got - expect) <= 3 * sigma);
        }
    }
}

TEST_CASE("train_toy_policy") {
    GrpoConfig cfg;

    SUBCASE("zero steps is a no-op with variance reported") {
        const SimReport r = train_toy_policy(0.5, 0, cfg, 0.05, 7);
        CHECK(r.p_init == 0.5);
        CHECK(r.p_final == 0.5);
        CHECK(r.delta == 0.0);
        CHECK(r.variance_init == 0.25);
        CHECK(r.trajectory.size() == 1);
    }
    SUBCASE("extreme accuracies collapse to near-zero improvement") {
        const SimReport high = train_toy_policy(0.999, 300, cfg, 0.05, 11);
        CHECK(std::fabs(high.delta) < 0.01);
        CHECK(high.zero_variance_group_fraction > 0.95);

        const SimReport low = train_toy_policy(0.001, 300, cfg, 0.05, 11);
        CHECK(std::fabs(low.delta) < 0.01);
        CHECK(low.zero_variance_group_fraction > 0.95);
    }
    SUBCASE("moderate accuracy improves") {
        const SimReport r = train_toy_policy(0.55, 300, cfg, 0.05, 13);
        CHECK(r.delta > 0.1);
    }
    SUBCASE("deterministic under seed") {
        const SimReport a = train_toy_policy(0.4, 50, cfg, 0.05, 17);
        const SimReport b = train_toy_policy(0.4, 50, cfg, 0.05, 17);
        CHECK(a.trajectory == b.trajectory);
    }
    SUBCASE("degenerate groups never move theta") {
        // Every non-degenerate group moves theta by lr*sqrt(k(G-k))/G > 0 and
        // every degenerate one by exactly 0, so the count of steps where the
        // trajectory moved must equal steps minus the degenerate count.
        const int steps = 100;
        const SimReport r = train_toy_policy(0.98, steps, cfg, 0.05, 19);
        int moved = 0;
        for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
            if (r.trajectory[i].second != r.trajectory[i - 1].second) ++moved;
        }
        const int degenerate =
            static_cast<int>(std::lround(r.zero_variance_group_fraction * steps));
        CHECK(moved == steps - degenerate);
        CHECK(degenerate > 0); // p = 0.98 degenerates most groups at G = 4

        // Skip and ZeroOut see identical draws and neither updates on a
        // degenerate group, so the trajectories coincide.
        GrpoConfig skip = cfg;
        skip.degenerate_policy = DegeneratePolicy::Skip;
        const SimReport skipped = train_toy_policy(0.98, steps, skip, 0.05, 19);
        CHECK(r.trajectory == skipped.trajectory);
    }
    SUBCASE("domain checks") {
        CHECK_THROWS_AS(train_toy_policy(0.0, 10, cfg, 0.05, 1), DomainError);
        CHECK_THROWS_AS(train_toy_policy(1.0, 10, cfg, 0.05, 1), DomainError);
    }
}

TEST_CASE("expected_update matches the closed form") {
    // For k successes out of G, mean_i(A_i (r_i - p)) reduces to
    // sqrt(k (G - k)) / G, so the expectation is the binomial average.
    GrpoConfig cfg;
    for (double theta = -2.0; theta <= 2.0; theta += 0.5) {
        const double p = BernoulliPolicy{theta}.accuracy();
        double expect = 0.0;
        for (int k = 1; k < 4; ++k) {
            double c = 1.0;
            for (int i = 0; i < k; ++i) c *= static_cast<double>(4 - i) / (i + 1);
            expect += c * std::pow(p, k) * std::pow(1 - p, 4 - k) *
                      std::sqrt(static_cast<double>(k) * (4 - k)) / 4.0;
        }
        CHECK(expected_update(theta, cfg) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("expected_objective differentiates to the update direction") {
    GrpoConfig cfg;
    cfg.kl_beta = 0.0;
    const double h = 1e-4;
    for (double theta = -1.5; theta <= 1.5; theta += 0.75) {
        const double fd =
            (expected_objective(theta + h, theta, cfg) - expected_objective(theta - h, theta, cfg)) /
            (2 * h);
        const double analytic = expected_update(theta, cfg);
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
    }

    SUBCASE("objective at the sampling point is the negated KL-free value") {
        // At theta_new == theta_old all ratios are 1: the surrogate equals
        // mean(A) = 0 for non-degenerate groups, so only the KL term remains
        // and it is exactly zero.
        GrpoConfig with_kl;
        with_kl.kl_beta = 0.04;
        CHECK(expected_objective(0.3, 0.3, with_kl) == doctest::Approx(0.0));
    }
}
