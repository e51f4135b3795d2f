#include <cmath>
#include <stdexcept>
#include <vector>

#include "circlegas/quadrature.hpp"
#include "circlegas/special.hpp"
#include "doctest.h"

using namespace circlegas;

TEST_CASE("upper incomplete gamma closed forms") {
    for (double x : {0.0, 0.1, 1.0, 3.0, 20.0}) CHECK(upper_incomplete_gamma(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
    for (double s : {0.3, 1.0, 2.5, 10.0}) CHECK(upper_incomplete_gamma(s, 0.0) == doctest::Approx(std::tgamma(s)).epsilon(1e-13));
    // Q(1/2, x) = erfc(sqrt x)
    for (double x : {0.01, 0.5, 2.0, 9.0}) CHECK(regularized_gamma(0.5, x).q == doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
}

TEST_CASE("Gamma(2/3, 2) against a quadrature oracle") {
    const double oracle =
        quad::integrate_to_infinity([](double t) { return std::pow(t, -1.0 / 3.0) * std::exp(-t); }, 2.0);
    CHECK(std::abs(upper_incomplete_gamma(2.0 / 3.0, 2.0) - oracle) < 1e-10 * oracle);
}

TEST_CASE("P and Q are complementary and both accurate in their tails") {
    for (double s : {0.2, 0.6667, 1.0, 3.5, 40.0})
        for (double x : {1e-6, 0.1, 1.0, 5.0, 50.0, 200.0}) {
            const auto g = regularized_gamma(s, x);
            CHECK(g.p + g.q == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(g.p >= 0.0);
            CHECK(g.q >= 0.0);
        }
    // Deep lower tail: P(s,x) ~ x^s / Gamma(s+1)
    const double x = 1e-8, s = 2.0 / 3.0;
    CHECK(regularized_gamma(s, x).p == doctest::Approx(std::pow(x, s) / std::tgamma(s + 1.0)).epsilon(1e-6));
    // Deep upper tail: Q(1, x) = e^-x
    CHECK(regularized_gamma(1.0, 600.0).q == doctest::Approx(std::exp(-600.0)).epsilon(1e-12));
}

TEST_CASE("log-space helpers") {
    CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
    CHECK(log_add_exp(-INFINITY, 1.5) == 1.5);
    CHECK(log1m_exp(1e-20) == doctest::Approx(std::log(1e-20)));
    CHECK(log1m_exp(50.0) == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
    const std::vector<double> v{1000.0, 1000.0};
    CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp(std::vector<double>{}) == -INFINITY);
}

TEST_CASE("incomplete gamma rejects bad arguments") {
    CHECK_THROWS_AS(upper_incomplete_gamma(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(upper_incomplete_gamma(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(regularized_gamma(1.0, -1.0), std::domain_error);
}
