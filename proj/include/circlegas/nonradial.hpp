#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace circlegas {

using cplx = std::complex<double>;

/// Discrete planar measure: integral of f ~ sum_i weights[i] f(nodes[i]). Weights may be negative
/// (correction rules).
struct PlanarRule {
    std::vector<cplx> nodes;
    std::vector<double> weights;

    void append(const PlanarRule& other);
    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre in r on [r0, r1] (weights include the Jacobian r) times the
/// n_theta-point trapezoid in theta, centered at `center`. Exact for polynomials in
/// (z - c, conj(z - c)) of total degree < min(2 n_r - 1, n_theta).
PlanarRule polar_rule(cplx center, double r0, double r1, int n_r, int n_theta);

/// V on the open unit disk (values may be +inf).
using PlanarPotential = std::function<double(cplx)>;

/// Unit disk rule for exp(-beta V) dA; radial_breaks (in (0,1)) split the radial panels.
PlanarRule weighted_disk_rule(const PlanarPotential& V, double beta, int n_r, int n_theta,
                              std::vector<double> radial_breaks = {});

/// V = height on the disk D(center, radius), zero elsewhere in the unit disk.
struct DiskBump {
    cplx center;
    double radius = 0.0;
    double height = 0.0;
};

/// Correction rule for a potential that is a sum of disjoint indicator bumps: nodes lie in the
/// bumps with weights (exp(-beta h) - 1) dA. Combined with the exact unit-disk monomial
/// moments it integrates polynomial moments of degree < min(2 n_r - 1, n_theta) exactly.
PlanarRule disk_indicator_rule(const std::vector<DiskBump>& bumps, double beta, int n_r, int n_theta);

/// Measure used for the Gram matrix: optional exact Lebesgue measure of the unit disk plus a rule.
struct GramMeasure {
    bool unit_disk_lebesgue = false;
    PlanarRule rule;
};

struct GramError : std::runtime_error {
    GramError(const std::string& what, double rcond) : std::runtime_error(what), rcond(rcond) {}
    double rcond;
};

/// K_n(z,w) = m(z)^T G^{-1} conj(m(w)) for the monomial Gram matrix G_jk = <z^j, z^k>.
class NonradialKernel {
public:
    NonradialKernel(int n, const GramMeasure& measure);

    [[nodiscard]] cplx operator()(cplx z, cplx w) const;
    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] const Eigen::MatrixXcd& gram() const { return gram_; }
    [[nodiscard]] double rcond() const { return rcond_; }

private:
    [[nodiscard]] Eigen::VectorXcd whitened(cplx w) const;  // L^{-1} conj(m(w))

    int n_;
    Eigen::MatrixXcd gram_;
    Eigen::LLT<Eigen::MatrixXcd> llt_;
    double rcond_ = 0.0;
};

/// Monomial Gram matrix sum_i w_i conj(z_i^j) z_i^k (plus pi/(j+1) on the diagonal for the unit disk).
Eigen::MatrixXcd monomial_gram(int n, const GramMeasure& measure);

struct QuadratureSpec {
    int n_r = 400;
    int n_theta = 400;
    std::vector<double> radial_breaks;
};

/// Kernel of the n-particle gas with potential V on the unit disk (hard wall outside),
/// weight exp(-2(n+chi)V) against Lebesgue measure.
NonradialKernel nonradial_kernel(const PlanarPotential& V, int n, double chi, const QuadratureSpec& quadrature = {});

/// Same, for V a sum of disjoint indicator bumps; Gram moments are exact up to rounding.
NonradialKernel nonradial_kernel(const std::vector<DiskBump>& bumps, int n, double chi);

/// Diagonal bounds K_{D}(z,z) <= K_n(z,z) <= K_{R,1}(z,z) for V >= 0 vanishing on R <= |z| <= 1,
/// from the Lebesgue kernels of the unit disk and of the annulus {R <= |z| <= 1}.
std::pair<double, double> sandwich_bounds(int n, double R, cplx z);

}  // namespace circlegas
