#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circlegas/kac.hpp"

using namespace circlegas;

TEST_CASE("coefficient laws satisfy the moment contract") {
    for (auto law : {CoefficientLaw::complex_gaussian, CoefficientLaw::uniform_disk_normalized,
                     CoefficientLaw::complex_rademacher}) {
        CAPTURE(to_string(law));
        Stream s(2024, 0, StreamRole::test);
        const int M = 100000;
        cplx m1{0.0, 0.0}, m2{0.0, 0.0};
        double m11 = 0.0, m22 = 0.0;
        for (int i = 0; i < M; ++i) {
            const cplx a = sample_coefficient(law, s);
            m1 += a;
            m2 += a * a;
            m11 += std::norm(a);
            m22 += std::norm(a) * std::norm(a);
        }
        m1 /= M;
        m2 /= M;
        m11 /= M;
        const double sd_abs2 = std::sqrt(std::max(0.0, m22 / M - m11 * m11));
        CHECK(std::abs(m11 - 1.0) <= 5 * sd_abs2 / std::sqrt(double(M)) + 1e-12);
        CHECK(std::abs(m11 - 1.0) <= 0.01);
        CHECK(std::abs(m1) <= 5 * std::sqrt(1.0 / M));
        CHECK(std::abs(m2) <= 0.02);
    }
    CHECK(parse_coefficient_law("gaussian") == CoefficientLaw::complex_gaussian);
    CHECK_THROWS_AS((void)parse_coefficient_law("cauchy"), std::invalid_argument);
}

TEST_CASE("sample_polynomial is deterministic per stream") {
    Stream a(7, 3, StreamRole::kac_coefficients), b(7, 3, StreamRole::kac_coefficients), c(7, 4, StreamRole::kac_coefficients);
    const auto pa = sample_polynomial(20, CoefficientLaw::complex_gaussian, a);
    const auto pb = sample_polynomial(20, CoefficientLaw::complex_gaussian, b);
    const auto pc = sample_polynomial(20, CoefficientLaw::complex_gaussian, c);
    CHECK(pa.size() == 21);
    CHECK(pa == pb);
    CHECK(pa != pc);
    CHECK_THROWS_AS((void)sample_polynomial(0, CoefficientLaw::complex_gaussian, a), std::invalid_argument);
}

TEST_CASE("find_roots on small cases") {
    const std::vector<cplx> p{-1.0, 0.0, 1.0};
    auto r = find_roots(p);
    REQUIRE(r.roots.size() == 2);
    std::vector<double> re{r.roots[0].real(), r.roots[1].real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(re[1] == doctest::Approx(1.0).epsilon(1e-14));
    // z^2 (z - 3): roots at the origin are exact
    auto r2 = find_roots(std::vector<cplx>{0.0, 0.0, -3.0, 1.0});
    CHECK(std::count(r2.roots.begin(), r2.roots.end(), cplx{0.0, 0.0}) == 2);
    CHECK_THROWS_AS((void)find_roots(std::vector<cplx>{1.0, 2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)find_roots(std::vector<cplx>{1.0}), std::invalid_argument);
    // known roots of unity
    std::vector<cplx> u(13, 0.0);
    u[0] = -1.0;
    u[12] = 1.0;
    auto ru = find_roots(u);
    for (auto z : ru.roots) CHECK(std::abs(std::pow(z, 12) - 1.0) < 1e-12);
}

TEST_CASE("Vieta and residual certification on random polynomials") {
    for (int rep = 0; rep < 10; ++rep) {
        Stream s(99, static_cast<std::uint64_t>(rep), StreamRole::kac_coefficients);
        const auto a = sample_polynomial(50, CoefficientLaw::complex_gaussian, s);
        auto r = find_roots(a);
        cplx sum{0.0, 0.0};
        for (auto z : r.roots) sum += z;
        CHECK(std::abs(sum + a[49] / a[50]) < 1e-8 * std::max(1.0, std::abs(a[49] / a[50])));
    }
    Stream s(5, 0, StreamRole::kac_coefficients);
    for (auto law : {CoefficientLaw::complex_gaussian, CoefficientLaw::complex_rademacher}) {
        const auto a = sample_polynomial(200, law, s);
        auto r = find_roots(a);
        CHECK(r.roots.size() == 200);
        CHECK(r.max_residual() <= 1e-8);
        // roots are distinct (no duplicated converged copies)
        double mind = 1e300;
        for (std::size_t i = 0; i < r.roots.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) mind = std::min(mind, std::abs(r.roots[i] - r.roots[j]));
        CHECK(mind > 1e-6);
    }
    const auto a = sample_polynomial(500, CoefficientLaw::complex_gaussian, s);
    auto r = find_roots(a);
    CHECK(r.max_residual() <= 1e-8);
}

TEST_CASE("inner/outer split, rescaling, disk counts") {
    RootSet rs;
    rs.roots = {0.5, 2.0};
    rs.degree = 2;
    auto io = split_inner_outer(rs);
    REQUIRE(io.inner.size() == 1);
    REQUIRE(io.outer_inverted.size() == 1);
    CHECK(io.inner[0] == cplx{0.5, 0.0});
    CHECK(io.outer_inverted[0] == cplx{0.5, 0.0});
    RootSet empty;
    auto e = split_inner_outer(empty);
    CHECK(e.inner.empty());
    CHECK(e.outer_inverted.empty());
    RootSet edge;
    edge.roots = {cplx{1.0, 0.0}, std::polar(1.0 + 1e-15, 0.3), 0.2};
    auto ed = split_inner_outer(edge);
    CHECK(ed.near_circle == 2);
    CHECK(ed.inner.size() + ed.outer_inverted.size() == 3);

    Stream s(1, 1, StreamRole::kac_coefficients);
    auto r = find_roots(sample_polynomial(60, CoefficientLaw::complex_gaussian, s));
    auto sp = split_inner_outer(r);
    CHECK(sp.inner.size() + sp.outer_inverted.size() == 60);
    for (auto z : sp.outer_inverted) CHECK(std::abs(z) < 1.0);

    RootSet one;
    const int n = 40;
    one.roots = {1.0 + 2.0 / n, 1.0};
    auto sc = rescale_near_one(one, n);
    CHECK(std::abs(sc[0] - 2.0) < 1e-13);
    CHECK(sc[1] == cplx{0.0, 0.0});
    RootSet off;
    off.roots = {cplx{1.0, 0.01}};
    CHECK(std::abs(rescale_near_one(off, 200)[0] - 2.0 * rescale_near_one(off, 100)[0]) < 1e-12);

    std::vector<cplx> pts;
    CHECK(count_in_disk(pts, 0.0, 1.0) == 0);
    pts = {cplx{0.3, 0.3}};
    CHECK(count_in_disk(pts, cplx{0.3, 0.3}, 0.1) == 1);
    pts = {cplx{0.8, 0.0}};
    CHECK(count_in_disk(pts, 0.0, 0.8) == 0);
    CHECK_THROWS_AS((void)count_in_disk(pts, 0.0, 0.0), std::invalid_argument);
}
