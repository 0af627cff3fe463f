#include "doctest.h"

#include "ackhold/rtt_estimator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ackhold;

namespace {

// Iterative references, deliberately written as plain loops over update()
// so the closed forms are checked against an independent computation.
struct IterState {
    double mu, sigma, S;
};

IterState iterate_inflation(int n, double mu0, double sigma0) {
    RttEstimate e{mu0, sigma0};
    double S = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = e.rto();
        S += x;
        e = update(e, x);
    }
    return {e.mu, e.sigma, S};
}

RttEstimate iterate_constant(int k, double theta, double mu, double sigma) {
    RttEstimate e{mu, sigma};
    for (int i = 0; i < k; ++i)
        e = update(e, theta);
    return e;
}

double rel_err(double got, double want) {
    const double scale = std::max(1.0, std::fabs(want));
    return std::fabs(got - want) / scale;
}

} // namespace

TEST_CASE("update applies the gain recursion") {
    RttEstimate e{1.0, 0.3};

    SUBCASE("zero innovation only decays sigma") {
        const RttEstimate r = update(e, 1.0);
        CHECK(r.mu == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.sigma == doctest::Approx(0.225).epsilon(1e-12));
        CHECK(r.rto() == doctest::Approx(1.9).epsilon(1e-12));
    }
    SUBCASE("sample equal to the timeout inflates both terms") {
        const RttEstimate r = update(e, 2.2);
        CHECK(r.mu == doctest::Approx(1.15).epsilon(1e-12));
        CHECK(r.sigma == doctest::Approx(0.525).epsilon(1e-12));
        CHECK(r.rto() == doctest::Approx(3.25).epsilon(1e-12));
    }
    SUBCASE("downward sample") {
        const RttEstimate r = update({1.4125, 0.91875}, 0.5);
        CHECK(r.mu == doctest::Approx(1.2984375).epsilon(1e-9));
        CHECK(r.sigma == doctest::Approx(0.9171875).epsilon(1e-9));
    }
}

TEST_CASE("update rejects bad input") {
    CHECK_THROWS_AS(update({1.0, 0.3}, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(update({1.0, 0.3, 0.0, 0.25}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(update({1.0, 0.3, 0.125, 1.5}, 1.0), std::invalid_argument);
}

TEST_CASE("sigma stays nonnegative under arbitrary samples") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    RttEstimate e{1.0, 0.3};
    for (int i = 0; i < 10000; ++i) {
        e = update(e, dist(rng));
        REQUIRE(e.sigma >= 0.0);
        REQUIRE(e.rto() == e.mu + 4.0 * e.sigma);
    }
}

TEST_CASE("inflation closed form: fixed points") {
    SUBCASE("n=0 is the identity") {
        const PhaseOneResult r = phase1_closed_form(0, 1.0, 0.3);
        CHECK(r.mu_n == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.sigma_n == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(r.rto_n == doctest::Approx(2.2).epsilon(1e-12));
        CHECK(r.elapsed_S_n == 0.0);
    }
    SUBCASE("n=2 worked values") {
        const PhaseOneResult r = phase1_closed_form(2, 1.0, 0.3);
        CHECK(r.mu_n == doctest::Approx(1.4125).epsilon(1e-12));
        CHECK(r.sigma_n == doctest::Approx(0.91875).epsilon(1e-12));
        CHECK(r.rto_n == doctest::Approx(5.0875).epsilon(1e-12));
        CHECK(r.elapsed_S_n == doctest::Approx(5.45).epsilon(1e-12));
    }
    SUBCASE("second-step timeout coefficient is 109/8") {
        for (double mu0 : {0.2, 1.0, 2.5})
            for (double sigma0 : {0.0, 0.3, 1.7}) {
                const PhaseOneResult r = phase1_closed_form(2, mu0, sigma0);
                CHECK(r.rto_n ==
                      doctest::Approx(mu0 + 109.0 / 8.0 * sigma0)
                          .epsilon(1e-12));
            }
    }
    SUBCASE("deviation grows by exactly 7/4 per step") {
        for (int n = 0; n < 30; ++n) {
            const double a = phase1_closed_form(n, 1.0, 0.3).sigma_n;
            const double b = phase1_closed_form(n + 1, 1.0, 0.3).sigma_n;
            CHECK(b / a == doctest::Approx(1.75).epsilon(1e-12));
        }
    }
    SUBCASE("long-horizon elapsed times") {
        // Values frozen from the exact-arithmetic iterative reference.
        CHECK(phase1_closed_form(11, 1.0, 0.3).elapsed_S_n ==
              doctest::Approx(886.93867397308350).epsilon(1e-12));
        CHECK(phase1_closed_form(12, 1.0, 0.3).elapsed_S_n ==
              doctest::Approx(1547.7426794528961).epsilon(1e-12));
    }
}

TEST_CASE("inflation closed form matches the iterative estimator") {
    const std::vector<double> mus = {0.0, 0.05, 0.5, 1.0, 3.0};
    const std::vector<double> sigmas = {0.0, 0.01, 0.3, 1.0, 2.0};
    for (double mu0 : mus)
        for (double sigma0 : sigmas)
            for (int n = 0; n <= 50; ++n) {
                const PhaseOneResult c = phase1_closed_form(n, mu0, sigma0);
                const IterState it = iterate_inflation(n, mu0, sigma0);
                REQUIRE(rel_err(c.mu_n, it.mu) <= 1e-9);
                REQUIRE(rel_err(c.sigma_n, it.sigma) <= 1e-9);
                REQUIRE(rel_err(c.elapsed_S_n, it.S) <= 1e-9);
                REQUIRE(rel_err(c.rto_n, it.mu + 4.0 * it.sigma) <= 1e-9);
            }
}

TEST_CASE("decay closed form: fixed points") {
    SUBCASE("k=0 is the identity") {
        const PhaseTwoResult r = phase2_closed_form(0, 0.7, 1.4125, 0.91875);
        CHECK(r.mu_N == doctest::Approx(1.4125).epsilon(1e-12));
        CHECK(r.sigma_N == doctest::Approx(0.91875).epsilon(1e-12));
        CHECK(r.rto_N == doctest::Approx(5.0875).epsilon(1e-12));
    }
    SUBCASE("theta at the mean leaves mu alone, decays sigma by (3/4)^k") {
        const PhaseTwoResult r = phase2_closed_form(3, 1.4125, 1.4125, 0.8);
        CHECK(r.mu_N == doctest::Approx(1.4125).epsilon(1e-12));
        CHECK(r.sigma_N ==
              doctest::Approx(0.8 * 27.0 / 64.0).epsilon(1e-12));
    }
    SUBCASE("two-step worked values") {
        const PhaseTwoResult r = phase2_closed_form(2, 0.5, 1.4125, 0.91875);
        CHECK(r.mu_N == doctest::Approx(1.1986328125).epsilon(1e-9));
        CHECK(r.sigma_N == doctest::Approx(0.887500).epsilon(1e-6));
        CHECK(r.rto_N == doctest::Approx(4.74863).epsilon(1e-5));
    }
}

TEST_CASE("decay closed form matches the iterative estimator") {
    const double mu_n = 1.4125, sigma_n = 0.91875;
    const std::vector<double> thetas = {0.0, 0.5,  1.0, mu_n,
                                        2.0, 10.0, 123.0};
    for (double theta : thetas)
        for (int k = 0; k <= 200; ++k) {
            const PhaseTwoResult c =
                phase2_closed_form(k, theta, mu_n, sigma_n);
            const RttEstimate it = iterate_constant(k, theta, mu_n, sigma_n);
            REQUIRE(rel_err(c.mu_N, it.mu) <= 1e-9);
            REQUIRE(rel_err(c.sigma_N, it.sigma) <= 1e-9);
            REQUIRE(rel_err(c.rto_N, it.rto()) <= 1e-9);
        }
}

TEST_CASE("decay moves the mean monotonically toward theta") {
    for (double theta : {0.2, 1.4125, 6.0}) {
        RttEstimate e{1.4125, 0.91875};
        double prev_gap = std::fabs(theta - e.mu);
        for (int k = 0; k < 100; ++k) {
            e = update(e, theta);
            const double gap = std::fabs(theta - e.mu);
            REQUIRE(gap <= prev_gap + 1e-15);
            prev_gap = gap;
        }
    }
}

TEST_CASE("closed forms reject non-default gains") {
    CHECK_THROWS_AS(phase1_closed_form(3, 1.0, 0.3, 0.25, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(phase1_closed_form(3, 1.0, 0.3, 0.125, 0.125),
                    std::invalid_argument);
    CHECK_THROWS_AS(phase2_closed_form(3, 1.0, 1.0, 0.3, 0.2, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(phase1_closed_form(-1, 1.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(phase2_closed_form(-1, 1.0, 1.0, 0.3),
                    std::invalid_argument);
}
