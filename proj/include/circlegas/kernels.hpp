#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circlegas/kostlan.hpp"

namespace circlegas {

using cplx = std::complex<double>;
using KernelFn = std::function<cplx(cplx, cplx)>;

/// K(z,w) = sum_k a_k z^k conj(w)^k * exp(lw(z) + lw(w)), a_k given by their logs.
class RadialKernel {
public:
    using LogWeight = std::function<double(cplx)>;  // -inf allowed (zero weight)

    RadialKernel(std::vector<double> log_coeffs, LogWeight log_weight, Reference reference = Reference::lebesgue);

    /// Coefficients from the gas; with_weight=false keeps only the polynomial part.
    static RadialKernel from_gas(const GasSpec& spec, bool with_weight = true);

    [[nodiscard]] cplx operator()(cplx z, cplx w) const;
    [[nodiscard]] const std::vector<double>& log_coeffs() const { return log_coeffs_; }
    [[nodiscard]] Reference reference() const { return reference_; }
    [[nodiscard]] std::size_t size() const { return log_coeffs_.size(); }

private:
    std::vector<double> log_coeffs_;
    LogWeight log_weight_;
    Reference reference_;
};

/// log a_k^(n), with 1/a_k^(n) = 2 pi int r^{2k+1+e} exp(-2(n+chi)V) dr.
std::vector<double> radial_coefficients(const GasSpec& spec);

/// Same as eval via RadialKernel; provided for symmetry with the other evaluators.
cplx eval_kernel(const RadialKernel& K, cplx z, cplx w);

/// int_0^1 t e^{-s t} dt = -e^{-s}/s + (1 - e^{-s})/s^2, equal to 1/2 at s = 0.
cplx limit_edge_kernel_hard(cplx s);

/// Kernel of the limiting process at the unit circle for a background potential
/// with inner mass q and mass Q up to the first gap outside the circle.
cplx limit_edge_kernel_E(double q, double Q, cplx alpha, cplx beta);

/// (e^{z + conj w} - 1)/(z + conj w), equal to 1 on z + conj w = 0.
cplx gaf_covariance(cplx z, cplx w);
/// Edelman-Kostlan first intensity (1/4pi) Laplacian log K(z,z) of the zeros of that GAF.
double gaf_intensity(cplx z);
/// Limit of the rescaled hard-edge first intensity: f(2r)/pi with f as in limit_edge_kernel_hard.
double first_intensity_limit_hard(double r);

namespace limit {
struct BR {
    double R = 1.0;
    double chi = 1.0;
};
struct AR {
    double R = 2.0;
    double chi = 1.0;
};
struct F {
    double alpha = 3.0;
    double chi = 1.0;
    double gamma = 1.0;
    double l_plus = 1.0;
    double l_minus = 1.0;
};
struct I {
    double alpha = 1.0;
    double chi = 1.0;
    double gamma = 1.0;
};
struct G {
    double alpha = 3.0;
    double chi = 1.0;
    double lambda = 1.0;
    double l_plus = 1.0;
    double l_minus = 1.0;
};
struct GInf {
    double alpha = 1.0;
    double chi = 1.0;
    double lambda = 1.0;
};
struct MA {
    std::vector<std::pair<double, double>> intervals;  // A as a union of [a, b]
    double chi = 1.0;
};
struct EdgeHard {};
struct EdgeE {
    double q = 0.0;
    double Q = 1.0;
};
struct BergmanDisk {};
struct BergmanHalfplane {};
struct GafF {};
}  // namespace limit

using LimitKernelSpec =
    std::variant<limit::BR, limit::AR, limit::F, limit::I, limit::G, limit::GInf, limit::MA, limit::EdgeHard,
                 limit::EdgeE, limit::BergmanDisk, limit::BergmanHalfplane, limit::GafF>;

/// Throws std::invalid_argument naming the violated parameter range.
void validate(const LimitKernelSpec& spec);
std::string name(const LimitKernelSpec& spec);

struct SeriesValue {
    cplx value;
    double tail_bound = 0.0;  // bound on the modulus of the neglected terms
    int terms = 0;
};

/// Evaluates the limit kernel; series variants stop once the certified tail
/// bound is below 1e-12 times the partial sum. Points outside the domain throw.
SeriesValue eval_limit_kernel_series(const LimitKernelSpec& spec, cplx z, cplx w);
cplx eval_limit_kernel(const LimitKernelSpec& spec, cplx z, cplx w);

/// Coefficients a_k of the finite-particle kernels (F and G variants).
/// Entries with a_k^{-1} = inf are omitted; returns pairs (k, a_k).
std::vector<std::pair<int, double>> finite_particle_coefficients(double alpha, double chi, double scale,
                                                                 double l_plus, double l_minus);

// ------------------------------------------------------------ inner/outer blocks

enum class Block { II, IO, OI, OO };
Block parse_block(const std::string& s);

struct InnerOuterSpec {
    int n = 1;
    double R = 1.0;      // inner radius of supp nu
    double R_bar = 1.0;  // outer radius of supp nu
    double C = 0.0;      // V^nu(R_bar) - log R_bar
    std::vector<double> log_b;  // log b_k^(n), chi = 1
};

/// Standard circle potential: R = R_bar = 1, C = 0, closed-form b_k.
InnerOuterSpec circle_log_inner_outer(int n);
/// General background measure (probability measure assumed by the theorem; not enforced).
InnerOuterSpec background_inner_outer(const RadialMeasureSpec& nu, int n);

/// Conjugated block kernels of the inner process and the inverted outer process.
cplx inner_outer_blocks(const InnerOuterSpec& spec, cplx z, cplx w, Block block);

// ------------------------------------------------------------ independent union

struct TaggedPoint {
    cplx z;
    int part = 1;  // 1 or 2
};

cplx union_kernel(const KernelFn& K1, const KernelFn& K2, const TaggedPoint& x, const TaggedPoint& y);

}  // namespace circlegas
