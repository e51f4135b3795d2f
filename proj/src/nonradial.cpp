#include "circlegas/nonradial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "circlegas/quadrature.hpp"

namespace circlegas {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPivotTol = 1e-12;
constexpr int kChunk = 4096;

void check_orders(int n_r, int n_theta) {
    if (n_r < 1 || n_theta < 1) throw std::invalid_argument("planar rule: orders must be >= 1");
}
}  // namespace

void PlanarRule::append(const PlanarRule& other) {
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

PlanarRule polar_rule(cplx center, double r0, double r1, int n_r, int n_theta) {
    check_orders(n_r, n_theta);
    if (!(r0 >= 0.0 && r1 > r0)) throw std::invalid_argument("polar_rule: need 0 <= r0 < r1");
    const auto gl = quad::gauss_legendre(n_r);
    const double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0);
    const double dth = 2.0 * kPi / n_theta;
    PlanarRule out;
    out.nodes.reserve(static_cast<std::size_t>(n_r) * n_theta);
    out.weights.reserve(out.nodes.capacity());
    for (int i = 0; i < n_r; ++i) {
        const double r = mid + half * gl.nodes[static_cast<std::size_t>(i)];
        const double wr = half * gl.weights[static_cast<std::size_t>(i)] * r * dth;
        for (int j = 0; j < n_theta; ++j) {
            out.nodes.push_back(center + std::polar(r, j * dth));
            out.weights.push_back(wr);
        }
    }
    return out;
}

PlanarRule weighted_disk_rule(const PlanarPotential& V, double beta, int n_r, int n_theta,
                              std::vector<double> radial_breaks) {
    if (!(beta >= 0.0)) throw std::invalid_argument("weighted_disk_rule: beta must be >= 0");
    std::vector<double> edges{0.0};
    std::sort(radial_breaks.begin(), radial_breaks.end());
    for (double b : radial_breaks) {
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("weighted_disk_rule: breaks must lie in (0,1)");
        if (b > edges.back()) edges.push_back(b);
    }
    edges.push_back(1.0);
    PlanarRule out;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) out.append(polar_rule({0.0, 0.0}, edges[p], edges[p + 1], n_r, n_theta));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = V(out.nodes[i]);
        if (std::isnan(v) || v < 0.0) throw std::invalid_argument("weighted_disk_rule: V must be >= 0");
        out.weights[i] *= std::isinf(v) ? 0.0 : std::exp(-beta * v);
    }
    return out;
}

PlanarRule disk_indicator_rule(const std::vector<DiskBump>& bumps, double beta, int n_r, int n_theta) {
    PlanarRule out;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        const auto& b = bumps[i];
        if (!(b.radius > 0.0) || !(b.height >= 0.0)) throw std::invalid_argument("disk bump: need radius > 0, height >= 0");
        if (std::abs(b.center) + b.radius > 1.0 + 1e-15)
            throw std::invalid_argument("disk bump must lie inside the unit disk");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(b.center - bumps[j].center) < b.radius + bumps[j].radius)
                throw std::invalid_argument("disk bumps must be disjoint");
        auto r = polar_rule(b.center, 0.0, b.radius, n_r, n_theta);
        const double f = std::expm1(-beta * b.height);
        for (double& w : r.weights) w *= f;
        out.append(r);
    }
    return out;
}

Eigen::MatrixXcd monomial_gram(int n, const GramMeasure& measure) {
    if (n < 1) throw std::invalid_argument("monomial_gram: n must be >= 1");
    const auto& rule = measure.rule;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    if (measure.unit_disk_lebesgue)
        for (int j = 0; j < n; ++j) G(j, j) = kPi / (j + 1.0);
    const auto total = static_cast<Eigen::Index>(rule.size());
    for (Eigen::Index start = 0; start < total; start += kChunk) {
        const Eigen::Index m = std::min<Eigen::Index>(kChunk, total - start);
        Eigen::MatrixXcd M(m, n);
        Eigen::VectorXd w(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const cplx z = rule.nodes[static_cast<std::size_t>(start + i)];
            w(i) = rule.weights[static_cast<std::size_t>(start + i)];
            cplx p{1.0, 0.0};
            for (int j = 0; j < n; ++j) {
                M(i, j) = p;
                p *= z;
            }
        }
        G.noalias() += M.adjoint() * (w.asDiagonal() * M);
    }
    // Enforce exact Hermitian symmetry.
    return 0.5 * (G + G.adjoint());
}

NonradialKernel::NonradialKernel(int n, const GramMeasure& measure) : n_(n), gram_(monomial_gram(n, measure)) {
    llt_.compute(gram_);
    const double max_diag = gram_.diagonal().real().maxCoeff();
    if (llt_.info() != Eigen::Success) {
        std::ostringstream os;
        os << "Gram matrix is not numerically positive definite (Cholesky failed, n = " << n << ")";
        throw GramError(os.str(), 0.0);
    }
    rcond_ = llt_.rcond();
    const Eigen::MatrixXcd L = llt_.matrixL();
    const double min_pivot = L.diagonal().cwiseAbs2().minCoeff();
    if (!(min_pivot >= kPivotTol * max_diag)) {
        std::ostringstream os;
        os << "Gram matrix is not numerically positive definite: min pivot " << min_pivot << " < 1e-12 * "
           << max_diag << ", rcond estimate " << rcond_;
        throw GramError(os.str(), rcond_);
    }
}

Eigen::VectorXcd NonradialKernel::whitened(cplx w) const {
    Eigen::VectorXcd v(n_);
    const cplx wb = std::conj(w);
    cplx p{1.0, 0.0};
    for (int j = 0; j < n_; ++j) {
        v(j) = p;
        p *= wb;
    }
    return llt_.matrixL().solve(v);
}

cplx NonradialKernel::operator()(cplx z, cplx w) const {
    if (std::isnan(z.real()) || std::isnan(z.imag()) || std::isnan(w.real()) || std::isnan(w.imag()))
        throw std::invalid_argument("nonradial kernel: NaN argument");
    // m(z)^T G^{-1} conj(m(w)) = u(z)^* u(w) with u = L^{-1} conj(m)
    return whitened(z).dot(whitened(w));
}

NonradialKernel nonradial_kernel(const PlanarPotential& V, int n, double chi, const QuadratureSpec& quadrature) {
    if (n < 1 || n > 200) throw std::invalid_argument("nonradial_kernel: need 1 <= n <= 200");
    if (!(chi >= 0.0)) throw std::invalid_argument("nonradial_kernel: chi must be >= 0");
    GramMeasure m;
    m.rule = weighted_disk_rule(V, 2.0 * (n + chi), quadrature.n_r, quadrature.n_theta, quadrature.radial_breaks);
    return NonradialKernel(n, m);
}

NonradialKernel nonradial_kernel(const std::vector<DiskBump>& bumps, int n, double chi) {
    if (n < 1 || n > 200) throw std::invalid_argument("nonradial_kernel: need 1 <= n <= 200");
    if (!(chi >= 0.0)) throw std::invalid_argument("nonradial_kernel: chi must be >= 0");
    GramMeasure m;
    m.unit_disk_lebesgue = true;
    m.rule = disk_indicator_rule(bumps, 2.0 * (n + chi), n + 2, 2 * n + 2);
    return NonradialKernel(n, m);
}

std::pair<double, double> sandwich_bounds(int n, double R, cplx z) {
    if (n < 1) throw std::invalid_argument("sandwich_bounds: n must be >= 1");
    if (!(R >= 0.0 && R < 1.0)) throw std::invalid_argument("sandwich_bounds: need 0 <= R < 1");
    const double r2 = std::norm(z);
    double lo = 0.0, hi = 0.0, p = 1.0;
    for (int k = 0; k < n; ++k) {
        const double a = (k + 1.0) / kPi * p;
        lo += a;
        hi += a / -std::expm1((2.0 * k + 2.0) * std::log(R));
        p *= r2;
    }
    if (R == 0.0) hi = lo;
    return {lo, hi};
}

}  // namespace circlegas
