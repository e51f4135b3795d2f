#include "circlegas/kac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace circlegas {

namespace {

constexpr double kBoundaryBand = 1e-14;

// p(z) and p'(z)/p(z) by Horner; coefficients in increasing degree.
struct Eval {
    cplx p;
    cplx dp;
};

Eval horner(std::span<const cplx> a, cplx z) {
    cplx p = a.back(), dp{0.0, 0.0};
    for (std::size_t i = a.size() - 1; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + a[i];
    }
    return {p, dp};
}

// Same for the reversed polynomial q(w) = sum a_{n-k} w^k.
Eval horner_reversed(std::span<const cplx> a, cplx w) {
    cplx p = a.front(), dp{0.0, 0.0};
    for (std::size_t i = 1; i < a.size(); ++i) {
        dp = dp * w + p;
        p = p * w + a[i];
    }
    return {p, dp};
}

// Newton correction p(z)/p'(z); uses the reversed polynomial outside the unit disk.
cplx newton_step(std::span<const cplx> a, cplx z) {
    const int n = static_cast<int>(a.size()) - 1;
    if (std::abs(z) <= 1.0) {
        const auto e = horner(a, z);
        if (e.p == cplx{0.0, 0.0}) return {0.0, 0.0};
        return e.p / e.dp;
    }
    // p(z) = z^n q(1/z): p'/p = n/z - q'(w)/(q(w) z^2)
    const cplx w = 1.0 / z;
    const auto e = horner_reversed(a, w);
    if (e.p == cplx{0.0, 0.0}) return {0.0, 0.0};
    return 1.0 / (static_cast<double>(n) * w - w * w * e.dp / e.p);
}

}  // namespace

CoefficientLaw parse_coefficient_law(const std::string& s) {
    if (s == "complex_gaussian" || s == "gaussian") return CoefficientLaw::complex_gaussian;
    if (s == "uniform_disk_normalized" || s == "uniform_disk") return CoefficientLaw::uniform_disk_normalized;
    if (s == "complex_rademacher" || s == "rademacher") return CoefficientLaw::complex_rademacher;
    throw std::invalid_argument("unknown coefficient law '" + s + "'");
}

std::string to_string(CoefficientLaw law) {
    switch (law) {
        case CoefficientLaw::complex_gaussian: return "complex_gaussian";
        case CoefficientLaw::uniform_disk_normalized: return "uniform_disk_normalized";
        case CoefficientLaw::complex_rademacher: return "complex_rademacher";
    }
    return "?";
}

cplx sample_coefficient(CoefficientLaw law, Stream& stream) {
    switch (law) {
        case CoefficientLaw::complex_gaussian: return stream.complex_normal();
        case CoefficientLaw::uniform_disk_normalized: {
            // uniform on the disk of radius sqrt(2)
            const double r = std::sqrt(2.0 * stream.uniform());
            return std::polar(r, 2.0 * std::numbers::pi * stream.uniform());
        }
        case CoefficientLaw::complex_rademacher: {
            const std::uint64_t w = stream.next_word();
            const double s = std::numbers::sqrt2 / 2.0;
            return {(w >> 63) ? s : -s, ((w >> 62) & 1U) ? s : -s};
        }
    }
    throw std::logic_error("sample_coefficient: unhandled law");
}

std::vector<cplx> sample_polynomial(int n, CoefficientLaw law, Stream& stream) {
    if (n < 1) throw std::invalid_argument("sample_polynomial: n must be >= 1");
    std::vector<cplx> a(static_cast<std::size_t>(n) + 1);
    for (auto& c : a) c = sample_coefficient(law, stream);
    return a;
}

double RootSet::max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, r);
    return m;
}

double relative_residual(std::span<const cplx> a, cplx z) {
    const auto az = std::abs(z);
    if (az <= 1.0) {
        cplx p{0.0, 0.0};
        double s = 0.0;
        for (std::size_t i = a.size(); i-- > 0;) {
            p = p * z + a[i];
            s = s * az + std::abs(a[i]);
        }
        return s == 0.0 ? 0.0 : std::abs(p) / s;
    }
    const cplx w = 1.0 / z;
    const double aw = std::abs(w);
    cplx p{0.0, 0.0};
    double s = 0.0;
    for (const cplx& c : a) {
        p = p * w + c;
        s = s * aw + std::abs(c);
    }
    return s == 0.0 ? 0.0 : std::abs(p) / s;
}

RootSet find_roots(std::span<const cplx> coeffs, const RootOptions& options) {
    if (coeffs.size() < 2) throw std::invalid_argument("find_roots: degree must be >= 1");
    if (coeffs.back() == cplx{0.0, 0.0}) throw std::invalid_argument("find_roots: leading coefficient is zero");
    for (const auto& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("find_roots: non-finite coefficient");
    const int n = static_cast<int>(coeffs.size()) - 1;
    RootSet out;
    out.degree = n;

    // Roots at the origin are exact; strip them.
    int zeros = 0;
    while (coeffs[static_cast<std::size_t>(zeros)] == cplx{0.0, 0.0}) ++zeros;
    const std::span<const cplx> a = coeffs.subspan(static_cast<std::size_t>(zeros));
    const int m = n - zeros;

    std::vector<cplx> z(static_cast<std::size_t>(m));
    if (m > 0) {
        // Circle of radius (|a_0|/|a_m|)^{1/m}, the geometric mean of the root moduli.
        const double r = std::exp((std::log(std::abs(a.front())) - std::log(std::abs(a.back()))) / m);
        for (int i = 0; i < m; ++i) z[static_cast<std::size_t>(i)] = std::polar(r, 2.0 * std::numbers::pi * (i + 0.25) / m + 0.4);
    }
    std::vector<char> done(static_cast<std::size_t>(m), 0);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        int active = 0;
        for (int i = 0; i < m; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (done[ui]) continue;
            const cplx N = newton_step(a, z[ui]);
            cplx S{0.0, 0.0};
            for (int j = 0; j < m; ++j)
                if (j != i) S += 1.0 / (z[ui] - z[static_cast<std::size_t>(j)]);
            const cplx step = N / (1.0 - N * S);
            z[ui] -= step;
            if (!(std::abs(step) >= options.move_tol * (1.0 + std::abs(z[ui])))) done[ui] = 1;
            else ++active;
        }
        if (active == 0) break;
    }
    out.iterations = it + 1;
    out.roots.assign(static_cast<std::size_t>(zeros), cplx{0.0, 0.0});
    out.roots.insert(out.roots.end(), z.begin(), z.end());
    double worst = 0.0;
    for (const auto& r : out.roots) {
        const double res = relative_residual(coeffs, r);
        out.residuals.push_back(res);
        if (!(res <= worst)) worst = res;
    }
    if (!(worst <= options.residual_tol))
        throw RootFindingError("find_roots: worst relative residual " + std::to_string(worst) + " above tolerance after " +
                                   std::to_string(out.iterations) + " iterations",
                               worst);
    return out;
}

InnerOuter split_inner_outer(const RootSet& roots) {
    InnerOuter out;
    for (const auto& z : roots.roots) {
        const double d = std::abs(z) - 1.0;
        if (std::abs(d) < kBoundaryBand) ++out.near_circle;
        if (d <= 0.0) out.inner.push_back(z);
        else out.outer_inverted.push_back(1.0 / z);
    }
    return out;
}

std::vector<cplx> rescale_near_one(const RootSet& roots, int n) {
    std::vector<cplx> out;
    out.reserve(roots.roots.size());
    for (const auto& z : roots.roots) out.push_back(static_cast<double>(n) * (z - 1.0));
    return out;
}

int count_in_disk(std::span<const cplx> points, cplx center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("count_in_disk: radius must be > 0");
    int c = 0;
    for (const auto& z : points)
        if (std::abs(z - center) < radius) ++c;
    return c;
}

}  // namespace circlegas
