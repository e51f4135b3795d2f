#include <cmath>
#include <numbers>
#include <vector>

#include "circlegas/potentials.hpp"
#include "doctest.h"

using namespace circlegas;

namespace {
std::vector<double> test_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 400; ++i) g.push_back(0.01 * i);
    for (double r : {5.0, 10.0, 100.0, 1e4}) g.push_back(r);
    return g;
}
}  // namespace

TEST_CASE("eval_potential examples") {
    CHECK(eval_potential(circle_log(), 1.0) == 0.0);
    CHECK(eval_potential(power_q(2.0), std::numbers::e).raw() == doctest::Approx(2.0));
    RadialMeasureSpec unit_circle{{{1.0, 1.0}}, {}};
    CHECK(eval_potential(background(unit_circle), 2.0).raw() == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(eval_potential(circle_log(), -0.5), std::domain_error);
}

TEST_CASE("background potential") {
    RadialMeasureSpec one{{{1.0, 1.0}}, {}};
    CHECK(background_potential(one, 4.0) == doctest::Approx(std::log(4.0)));
    RadialMeasureSpec two{{{1.0, 1.0}, {2.0, 1.0}}, {}};
    CHECK(background_potential(two, 4.0) == doctest::Approx(std::log(4.0) + std::log(2.0)));
    CHECK(background_potential(two, 1.0) == 0.0);
    CHECK_THROWS_AS(background_potential(one, 0.0), std::domain_error);

    // Uniform radial density on [0.5, 1.5] with total mass 1, checked against direct quadrature by hand:
    // nu(D_s) = s - 0.5 on [0.5,1.5]; for r = 1.5, int_1^1.5 (s - 0.5)/s ds = 0.5 - 0.5 log 1.5.
    RadialMeasureSpec spread{{}, {{0.5, 1.5, 1.0}}};
    CHECK(background_potential(spread, 1.5) == doctest::Approx(0.5 - 0.5 * std::log(1.5)).epsilon(1e-14));
    // r < 1 is signed: -int_{0.75}^1 (s - 0.5)/s ds
    CHECK(background_potential(spread, 0.75) == doctest::Approx(-(0.25 - 0.5 * std::log(1.0 / 0.75))).epsilon(1e-14));
}

TEST_CASE("background potential is nondecreasing on [1, inf)") {
    RadialMeasureSpec nu{{{1.0, 0.5}, {3.0, 0.25}}, {{1.5, 2.5, 0.3}}};
    double prev = background_potential(nu, 1.0);
    for (double r = 1.0; r < 20.0; r += 0.01) {
        const double v = background_potential(nu, r);
        CHECK(v >= prev - 1e-15);
        CHECK(std::abs(v - prev) < 0.05);
        prev = v;
    }
}

TEST_CASE("q delta_circle plus mass outside D_R gives q log r on [1,R]") {
    const double q = 1.7, R = 2.5;
    RadialMeasureSpec nu{{{1.0, q}, {R, 0.8}}, {{3.0, 4.0, 0.5}}};
    for (double r = 1.0; r <= R; r += 0.05) CHECK(background_potential(nu, r) == doctest::Approx(q * std::log(r)).epsilon(1e-13));
}

TEST_CASE("measure validation") {
    CHECK_THROWS(background(RadialMeasureSpec{{{2.0, 1.0}, {1.0, 1.0}}, {}}));
    CHECK_THROWS(background(RadialMeasureSpec{{{0.0, 1.0}}, {}}));
    CHECK_THROWS(background(RadialMeasureSpec{{{1.0, -1.0}}, {}}));
}

TEST_CASE("inversion examples") {
    const auto inv_circle = invert_potential(circle_log(), 1.0);
    for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) CHECK(inv_circle(r).raw() == doctest::Approx(circle_log()(r).raw()));
    const auto inv_q = invert_potential(power_q(3.0), 1.0);
    CHECK(inv_q(2.0).raw() == doctest::Approx(std::log(2.0)));
    CHECK(inv_q(0.5).raw() == doctest::Approx(3.0 * std::log(2.0) - std::log(2.0)));
    CHECK(inv_q.reference() == Reference::lambda_chi);
    CHECK_THROWS_AS((void)inv_q(0.0), std::domain_error);
}

TEST_CASE("inversion is an involution") {
    RadialMeasureSpec nu{{{0.5, 0.25}, {1.0, 1.0}}, {{2.0, 3.0, 0.1}}};
    const std::vector<RadialPotential> family{circle_log(), power_q(2.0, 0.5), annulus(1.5, 2.0),
                                              power_tail(3.0, 1.0, 0.5, 1.5), background(nu)};
    for (const RadialPotential& V : family) {
        // Force the generic double inversion rather than the shortcut.
        const RadialPotential once = invert_potential(V, 1.0);
        const RadialPotential twice(family::Inverted{std::make_shared<const RadialPotential>(once), 1.0});
        for (double r : {0.05, 0.3, 0.99, 1.0, 1.7, 8.0}) CHECK(twice(r).raw() == doctest::Approx(V(r).raw()).epsilon(1e-12));
        CHECK(invert_potential(once, 1.0)(0.7).raw() == V(0.7).raw());
    }
}

TEST_CASE("circle conditions") {
    const std::vector<double> g{0.5, 1.0, 2.0};
    CHECK(check_circle_conditions(circle_log(), g).pass);
    CHECK(check_circle_conditions(power_q(2.0), g).pass);
    const auto bad = tabulated({0.5, 1.0, 2.0}, {0.1, 0.1, 1.0});
    const auto report = check_circle_conditions(bad, g);
    CHECK_FALSE(report.pass);
    REQUIRE_FALSE(report.violations.empty());
    CHECK(report.violations.front().r == 1.0);

    for (const RadialPotential& V : {circle_log(), power_q(2.0), power_q(1.5, 2.0), hard_edge_flat(0.5, 1.0),
                                     annulus(1.5, 2.0), power_tail(3.0, 1.0, 0.5, 1.5),
                                     invert_potential(power_q(2.0), 1.0)}) {
        CAPTURE(V.name());
        CHECK(V.is_circle_family());
        CHECK(V(1.0).raw() == doctest::Approx(0.0));
        CHECK(check_circle_conditions(V, test_grid()).pass);
    }
}

TEST_CASE("hard families are +inf exactly beyond 1") {
    const auto V = hard_edge_flat(0.3, 2.0);
    CHECK(V(1.0) == 0.0);
    CHECK(V(1.0 + 1e-15).is_infinite());
    CHECK(V(0.2) == 2.0);
    CHECK(V.confinement() == Confinement::hard);
    CHECK(V.support().second == 1.0);
}

TEST_CASE("power tail potential has the advertised local behaviour") {
    const double alpha = 3.0, gamma = 1.0, lp = 0.5, lm = 1.5;
    const auto V = power_tail(alpha, gamma, lp, lm);
    const double h = 1e-7;
    CHECK(V(1.0 + h).raw() / h == doctest::Approx(lp + 1.0).epsilon(1e-5));
    CHECK(V(1.0 - h).raw() / h == doctest::Approx(lm - 1.0).epsilon(1e-5));
    const double r = 1e3;
    CHECK(std::pow(r, alpha) * (V(r).raw() - std::log(r)) == doctest::Approx(gamma).epsilon(2e-3));
    for (double x = 1.001; x < 50.0; x *= 1.1) CHECK(V(x).raw() > std::log(x));
}

TEST_CASE("log-linear pieces reproduce the potential") {
    RadialMeasureSpec nu{{{0.5, 0.25}, {1.0, 1.0}, {2.0, 0.5}}, {}};
    for (const RadialPotential& V : {circle_log(), power_q(2.0, 0.7), hard_edge_flat(0.4, 1.5), annulus(1.5, 3.0),
                                     background(nu), invert_potential(power_q(2.0), 1.0),
                                     invert_potential(annulus(1.5, 3.0), 2.0)}) {
        CAPTURE(V.name());
        const auto pieces = V.log_linear_pieces();
        REQUIRE(pieces.has_value());
        for (const LogLinearPiece& p : *pieces) {
            const double b = std::isinf(p.b) ? p.a * 10.0 + 10.0 : p.b;
            const double a = p.a == 0.0 ? b * 1e-3 : p.a;
            for (double t : {0.1, 0.5, 0.9}) {
                const double r = a + t * (b - a);
                CHECK(V(r).raw() == doctest::Approx(p.c + p.q * std::log(r)).epsilon(1e-12));
            }
        }
    }
    CHECK_FALSE(power_tail(3.0, 1.0, 0.5, 1.5).log_linear_pieces().has_value());
}

TEST_CASE("tabulated potentials") {
    const auto V = tabulated({0.0, 1.0, 2.0}, {0.0, 0.0, 2.0});
    CHECK(V(1.5).raw() == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)V(2.5), std::domain_error);
    CHECK_THROWS(tabulated({1.0, 0.5}, {0.0, 0.0}));
}

TEST_CASE("confinement classes") {
    CHECK(circle_log().confinement() == Confinement::weak);
    CHECK(power_q(2.0).confinement() == Confinement::strong);
    CHECK(annulus(1.5, 1.0).confinement() == Confinement::weak);
    CHECK(annulus(1.5, 2.0).confinement() == Confinement::strong);
    CHECK(power_tail(3.0, 1.0, 0.5, 1.5).confinement() == Confinement::weak);
}
