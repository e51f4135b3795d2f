#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "circlegas/kostlan.hpp"
#include "circlegas/rng.hpp"
#include "circlegas/stats.hpp"

using namespace circlegas;

TEST_CASE("ecdf evaluation matches direct counting") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> nd;
    std::vector<double> x(500);
    for (auto& v : x) v = std::round(nd(g) * 4) / 4;  // with ties
    Ecdf F(x);
    for (int q = 0; q < 200; ++q) {
        const double t = nd(g);
        double le = 0, lt = 0;
        for (double v : x) {
            le += v <= t;
            lt += v < t;
        }
        CHECK(F(t) == doctest::Approx(le / 500));
        CHECK(F.left_limit(t) == doctest::Approx(lt / 500));
    }
    CHECK(F(-1e9) == 0.0);
    CHECK(F(1e9) == 1.0);
}

TEST_CASE("ks statistic") {
    Ecdf one({0.3});
    CHECK(ks_statistic(one, [](double) { return 0.5; }) == doctest::Approx(0.5));
    std::vector<double> s{0.1, 0.4, 0.4, 0.9};
    Ecdf E(s);
    CHECK(ks_statistic(E, [&](double t) { return E(t); }) == 0.0);
    CHECK_THROWS_AS((void)ks_statistic(Ecdf({}), [](double t) { return t; }), std::invalid_argument);

    Stream st(20240601, 0, StreamRole::test);
    std::vector<double> u(10000);
    for (auto& v : u) v = st.uniform();
    Ecdf U(u);
    const double d = ks_statistic(U, [](double t) { return std::clamp(t, 0.0, 1.0); });
    CHECK(d <= 0.03);
    CHECK(d <= dkw_epsilon(10000, 1e-3));

    // invariance under strictly increasing transforms of sample and argument
    std::vector<double> eu;
    for (double v : u) eu.push_back(std::exp(3 * v) + v);
    Ecdf EU(eu);
    auto inv = [](double y) {  // invert x -> e^{3x} + x on [0,1] by bisection
        double lo = 0, hi = 1;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            (std::exp(3 * m) + m < y ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
    };
    const double d2 = ks_statistic(EU, [&](double y) { return std::clamp(inv(y), 0.0, 1.0); });
    CHECK(d2 == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("two-sample ks") {
    Ecdf a({1, 2, 3}), b({1, 2, 3});
    CHECK(ks_two_sample(a, b) == 0.0);
    Ecdf c({10, 11});
    CHECK(ks_two_sample(a, c) == 1.0);
    Ecdf d({2.5});
    CHECK(ks_two_sample(a, d) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("pearson correlation") {
    std::vector<double> x{1, 2, 3, 4, 5}, y{1, 2, 3, 4, 5}, z{-1, -2, -3, -4, -5}, c{2, 2, 2, 2, 2};
    CHECK(pearson_corr(x, y) == doctest::Approx(1.0));
    CHECK(pearson_corr(x, z) == doctest::Approx(-1.0));
    CHECK_THROWS_AS((void)pearson_corr(x, c), std::invalid_argument);
    CHECK_THROWS_AS((void)pearson_corr(std::vector<double>{1.0}, std::vector<double>{2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)pearson_corr(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("binned intensity") {
    const std::vector<RectBin> bins{{0, 1, 0, 1}, {1, 3, 0, 1}};
    std::vector<std::vector<std::complex<double>>> none(10);
    for (const auto& e : binned_intensity(none, bins)) CHECK(e.mean == 0.0);
    std::vector<std::vector<std::complex<double>>> one(10, {{1.5, 0.5}});
    auto r = binned_intensity(one, bins);
    CHECK(r[0].mean == 0.0);
    CHECK(r[1].mean == doctest::Approx(0.5));
    CHECK(r[1].se == 0.0);
    CHECK_THROWS_AS((void)binned_intensity(one, {{0, 0, 0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS((void)binned_intensity(one, {{0, 2, 0, 1}, {1, 3, 0, 1}}), std::invalid_argument);

    // homogeneous Poisson(lambda) on [0,4]^2: estimates within 3 SE
    const double lambda = 2.0;
    Stream st(77, 0, StreamRole::synthetic);
    std::vector<RectBin> grid;
    for (int i = 0; i < 4; ++i) grid.push_back({double(i), double(i + 1), 0.0, 4.0});
    IntensityAccumulator acc(grid);
    for (int m = 0; m < 2000; ++m) {
        // Poisson count by inversion, then uniform locations
        const double mu = lambda * 16.0;
        double u = st.uniform(), p = std::exp(-mu), cdf = p;
        int k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mu / k;
            cdf += p;
        }
        std::vector<std::complex<double>> pts;
        for (int i = 0; i < k; ++i) pts.emplace_back(4 * st.uniform(), 4 * st.uniform());
        acc.add_replica(pts);
    }
    for (const auto& e : acc.result()) {
        CHECK(std::abs(e.mean - lambda) <= 3 * e.se);
        CHECK(e.se > 0.0);
    }
}

TEST_CASE("closed-form and quadrature samplers agree in distribution") {
    const GasSpec spec(40, 1.0, power_q(2.0));
    KostlanSampler closed(spec, ComponentLaw::Method::closed_form);
    KostlanSampler quad(spec, ComponentLaw::Method::quadrature);
    std::vector<double> a, b;
    for (std::uint64_t r = 0; r < 4000; ++r) {
        a.push_back(closed.sample(11, r).max());
        b.push_back(quad.sample(12, r).max());
    }
    CHECK(ks_two_sample(Ecdf(a), Ecdf(b)) <= 0.03);
}
