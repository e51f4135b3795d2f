#include <cmath>
#include <numbers>

#include "circlegas/quadrature.hpp"
#include "doctest.h"

using namespace circlegas::quad;

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
    for (int n : {1, 2, 5, 16, 64}) {
        const Rule r = gauss_legendre(n);
        double wsum = 0.0, moment = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += r.weights[i];
            moment += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(moment == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
    }
}

TEST_CASE("GK15 on a smooth integrand") {
    const Estimate e = gauss_kronrod15([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(e.value == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-15));
    CHECK(e.error < 1e-12);
}

TEST_CASE("adaptive integration handles an endpoint singularity") {
    const AdaptiveResult r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::is_sorted(r.panels.begin(), r.panels.end(), [](const Panel& a, const Panel& b) { return a.a < b.a; }));
}

TEST_CASE("adaptive integration respects breakpoints at kinks") {
    auto f = [](double x) { return std::abs(x - 0.3); };
    const AdaptiveResult r = integrate_adaptive(f, std::vector<double>{0.0, 0.3, 1.0});
    CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
    CHECK(r.converged);
}

TEST_CASE("integral to infinity") {
    CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}
