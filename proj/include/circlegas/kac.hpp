#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlegas/rng.hpp"

namespace circlegas {

using cplx = std::complex<double>;

/// All three laws satisfy E a = 0, E a^2 = 0, E |a|^2 = 1.
enum class CoefficientLaw { complex_gaussian, uniform_disk_normalized, complex_rademacher };

CoefficientLaw parse_coefficient_law(const std::string& s);
std::string to_string(CoefficientLaw law);

cplx sample_coefficient(CoefficientLaw law, Stream& stream);

/// n+1 i.i.d. coefficients a_0..a_n of p_n(z) = sum a_k z^k.
std::vector<cplx> sample_polynomial(int n, CoefficientLaw law, Stream& stream);

struct RootSet {
    std::vector<cplx> roots;
    std::vector<double> residuals;  // |p(z)| / sum |a_k| |z|^k
    int degree = 0;
    int iterations = 0;

    [[nodiscard]] double max_residual() const;
};

struct RootFindingError : std::runtime_error {
    RootFindingError(const std::string& what, double worst) : std::runtime_error(what), worst_residual(worst) {}
    double worst_residual;
};

struct RootOptions {
    int max_iterations = 500;
    double move_tol = 1e-14;      // per-root stop: |step| < move_tol (1 + |z|)
    double residual_tol = 1e-8;
};

/// Relative residual |p(z)| / sum |a_k||z|^k, evaluated on the reversed polynomial when |z| > 1.
double relative_residual(std::span<const cplx> coeffs, cplx z);

/// All roots by Aberth-Ehrlich simultaneous iteration. Trailing zero leading
/// coefficients are rejected; throws RootFindingError when residuals stay above tolerance.
RootSet find_roots(std::span<const cplx> coeffs, const RootOptions& options = {});

struct InnerOuter {
    std::vector<cplx> inner;           // |z| < 1
    std::vector<cplx> outer_inverted;  // 1/z for |z| > 1
    int near_circle = 0;               // roots with ||z| - 1| < 1e-14, assigned by the sign of |z| - 1
};

InnerOuter split_inner_outer(const RootSet& roots);

/// {n (z - 1)} for every root.
std::vector<cplx> rescale_near_one(const RootSet& roots, int n);

/// Number of points with |z - center| < radius.
int count_in_disk(std::span<const cplx> points, cplx center, double radius);

}  // namespace circlegas
