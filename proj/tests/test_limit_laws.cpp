#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "circlegas/limit_laws.hpp"
#include "circlegas/quadrature.hpp"

using namespace circlegas;

TEST_CASE("very weak law") {
    const law::VeryWeak vw{1.0, 1.0};
    // long direct product as oracle
    double direct = 1.0;
    for (int k = 0; k < 200; ++k) direct *= 1.0 - std::pow(4.0, -(k + 1.0));
    CHECK(cdf_max(vw, 2.0) == doctest::Approx(direct).epsilon(1e-15));
    CHECK(cdf_max(vw, 2.0) == doctest::Approx(0.68854).epsilon(1e-5));
    CHECK(cdf_max(vw, 1.0) == 0.0);
    CHECK(cdf_max(law::VeryWeak{1.5, 2.0}, 1.5) == 0.0);
    CHECK_THROWS_AS((void)cdf_max(vw, 0.5), std::domain_error);
    CHECK(cdf_max_extended(vw, 0.5) == 0.0);
    CHECK_THROWS_AS((void)cdf_max(law::VeryWeak{1.0, 0.0}, 2.0), std::invalid_argument);

    // gap-probability view: masses 4^{-(k+1)}
    std::vector<double> masses;
    for (int k = 0; k < 60; ++k) masses.push_back(std::pow(4.0, -(k + 1.0)));
    CHECK(radial_gap_probability(masses) == doctest::Approx(cdf_max(vw, 2.0)).epsilon(1e-15));
}

TEST_CASE("radial gap probability") {
    CHECK(radial_gap_probability(std::vector<double>{0.0, 0.0, 0.0}) == 1.0);
    CHECK(radial_gap_probability(std::vector<double>{0.2, 1.0, 0.1}) == 0.0);
    CHECK(radial_gap_probability(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)radial_gap_probability(std::vector<double>{1.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)radial_gap_probability(std::vector<double>{-0.1}), std::invalid_argument);
}

TEST_CASE("annulus law endpoints and oracle") {
    const law::Annulus an{1.5, 1.0};
    CHECK(cdf_max(an, 1.0) == 0.0);
    CHECK(cdf_max(an, 1.5) == 1.0);
    double direct = 1.0;
    for (int k = 0; k < 400; ++k) direct *= (1.0 - std::pow(1.2, -2.0 * k - 2.0)) / (1.0 - std::pow(1.5, -2.0 * k - 2.0));
    CHECK(cdf_max(an, 1.2) == doctest::Approx(direct).epsilon(1e-13));
    CHECK_THROWS_AS((void)cdf_max(an, 1.6), std::domain_error);
    CHECK(cdf_max_extended(an, 1.6) == 1.0);
}

TEST_CASE("finite particle law") {
    // alpha = 3, chi = 1: a single gamma ratio
    const law::FiniteParticles fp{3.0, 1.0, 1.0, 0.5, 1.5};
    for (double t : {0.5, 1.0, 2.0}) {
        const double x = 2.0 * std::pow(t, -3.0);
        const double want = upper_incomplete_gamma(2.0 / 3.0, x) / std::tgamma(2.0 / 3.0);
        CHECK(cdf_max(fp, t) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(cdf_max(fp, 0.0) == 0.0);
    // integer case alpha = 2 chi: Dirac mass at zero plus a Frechet part
    const law::FiniteParticles fi{2.0, 1.0, 1.0, 2.0, 2.0};
    const double c = 1.0 / (0.5 + 1.0);
    CHECK(cdf_max(fi, 0.0) == doctest::Approx(c));
    const double x = 2.0 / (1.3 * 1.3);
    CHECK(cdf_max(fi, 1.3) == doctest::Approx(std::exp(-x) + (1 - std::exp(-x)) * c).epsilon(1e-14));
    // integer case alpha = 4, chi = 1: one full gamma factor times the bracket
    const law::FiniteParticles f4{4.0, 1.0, 0.7, 1.0, 2.0};
    const double x4 = 1.4 * std::pow(1.1, -4.0);
    const double c4 = 1.5 / (1.0 / 2.8 + 1.5);
    const double want4 = upper_incomplete_gamma(0.5, x4) / std::tgamma(0.5) * (std::exp(-x4) + (1 - std::exp(-x4)) * c4);
    CHECK(cdf_max(f4, 1.1) == doctest::Approx(want4).epsilon(1e-12));
    CHECK_THROWS_AS((void)cdf_max(law::FiniteParticles{1.0, 1.0, 1.0, 1.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("infinite particle law and its tail bound") {
    const law::InfiniteParticles ip{1.5, 1.0, 0.8};
    for (double t : {0.3, 1.0, 4.0}) {
        auto d = cdf_max_detail(ip, t);
        double direct = 1.0;
        const double x = 1.6 * std::pow(t, -1.5);
        for (int k = 0; k < 300; ++k) direct *= regularized_gamma((2.0 * k + 2.0) / 1.5, x).q;
        CHECK(d.value == doctest::Approx(direct).epsilon(1e-13));
        // the bound after K factors covers the change from K to 2K factors
        for (int K : {1, 2, 4, 8}) {
            auto a = cdf_max_truncated(ip, t, K);
            auto b = cdf_max_truncated(ip, t, 2 * K);
            CHECK(a.value - b.value <= a.tail_bound * (1 + 1e-12) + 1e-300);
            CHECK(a.value - direct <= a.tail_bound * (1 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("truncation bounds for power products cover the remainder") {
    for (const LimitLaw& law : {LimitLaw{law::VeryWeak{1.0, 1.0}}, LimitLaw{law::Annulus{1.5, 0.5}}}) {
        const double t = std::holds_alternative<law::VeryWeak>(law) ? 1.3 : 1.25;
        const double exact = cdf_max(law, t);
        for (int K : {1, 3, 10, 30}) {
            auto a = cdf_max_truncated(law, t, K);
            auto b = cdf_max_truncated(law, t, 2 * K);
            CHECK(std::abs(a.value - b.value) <= a.tail_bound * (1 + 1e-12));
            CHECK(std::abs(a.value - exact) <= a.tail_bound * (1 + 1e-12) + 1e-16);
        }
    }
}

TEST_CASE("gumbel laws") {
    CHECK(cdf_max(law::GumbelStrong{2.0, {}}, 0.0) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
    CHECK(cdf_max(law::GumbelStrong{2.0, {}}, 0.0) == doctest::Approx(0.778801).epsilon(1e-6));
    for (double q : {1.5, 2.0, 3.0})
        for (double a : {-1.0, 0.0, 0.7, 2.0})
            CHECK(std::abs(cdf_max(law::GumbelStrong{q, 0.0}, a) - cdf_max(law::GumbelStrong{q, {}}, a)) <= 1e-14);
    CHECK_THROWS_AS((void)cdf_max(law::GumbelStrong{1.0, {}}, 0.0), std::invalid_argument);
    CHECK(cdf_max(law::HardExponential{}, 0.0) == 0.0);
    CHECK(cdf_max(law::HardExponential{}, 1.0) == doctest::Approx(1 - std::exp(-1.0)));

    // weak-to-Gumbel convergence along chi
    double prev = 1.0;
    for (double chi : {50.0, 100.0, 200.0, 400.0}) {
        double sup = 0.0;
        for (double a = -2.0; a <= 4.0 + 1e-12; a += 0.01)
            sup = std::max(sup, std::abs(cdf_max(law::GumbelWeak{chi}, a) - std::exp(-std::exp(-a))));
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev <= 0.05);
}

TEST_CASE("every law is a CDF on a fine grid") {
    const std::vector<LimitLaw> laws{
        law::VeryWeak{1.0, 1.0},
        law::VeryWeak{1.2, 2.5},
        law::Annulus{1.5, 1.0},
        law::FiniteParticles{3.0, 1.0, 1.0, 0.5, 1.5},
        law::FiniteParticles{4.0, 1.0, 1.0, 0.5, 1.5},
        law::InfiniteParticles{1.0, 1.0, 1.0},
        law::GumbelStrong{2.0, {}},
        law::GumbelStrong{3.0, 0.5},
        law::HardExponential{},
        law::GumbelWeak{5.0},
    };
    for (const auto& law : laws) {
        CAPTURE(name(law));
        auto [lo, hi] = support(law);
        const double a = std::isinf(lo) ? -40.0 : lo;
        const double b = std::isinf(hi) ? (std::isinf(lo) ? 200.0 : a + 1e6) : hi;
        double prev = -1.0;
        for (int i = 0; i < 1000; ++i) {
            // geometric spacing for long supports
            const double u = i / 999.0;
            const double t = std::isinf(hi) && !std::isinf(lo) ? a + (std::exp(u * std::log1p(b - a)) - 1.0) : a + u * (b - a);
            const double v = cdf_max(law, t);
            CHECK(v >= prev);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
        const bool atom_at_zero = std::holds_alternative<law::FiniteParticles>(law) &&
                                  std::get<law::FiniteParticles>(law).alpha == 4.0;
        if (!atom_at_zero) CHECK(cdf_max(law, a) <= 1e-9);
        CHECK(cdf_max(law, b) >= 1.0 - 1e-9);
    }
}

TEST_CASE("implicit equations for eps") {
    CHECK(solve_eps_n(2.0, 1) == doctest::Approx(0.426303).epsilon(1e-6));
    CHECK(solve_eps_chi(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-15));
    for (double q : {1.5, 2.0, 3.0}) {
        double prev = 1.0;
        for (int n : {10, 100, 1000}) {
            const double e = solve_eps_n(q, n);
            CHECK(std::abs(e * std::exp(2 * (q - 1) * n * e) - 1.0) < 1e-12);
            CHECK(e < prev);
            prev = e;
        }
    }
    double prev = 0.0;
    for (double chi : {1.0, 10.0, 100.0, 1000.0}) {
        const double e = solve_eps_chi(chi);
        CHECK(std::abs(e * std::exp(chi * e) - 1.0) < 1e-12);
        CHECK(chi * e > prev);
        prev = chi * e;
    }
    CHECK_THROWS_AS((void)solve_eps_n(1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_eps_chi(0.0), std::invalid_argument);
}
