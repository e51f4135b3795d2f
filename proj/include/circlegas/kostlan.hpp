#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlegas/potentials.hpp"
#include "circlegas/quadrature.hpp"

namespace circlegas {

/// One finite radial gas: n particles, weight exp(-2(n+chi)V(|x|)) against
/// |x|^measure_exponent dx. measure_exponent = 0 is Lebesgue, 2(chi-1) is Lambda_chi.
struct GasSpec {
    GasSpec(int n, double chi, RadialPotential potential, double measure_exponent = 0.0);

    int n;
    double chi;
    RadialPotential potential;
    double measure_exponent;

    [[nodiscard]] double beta() const { return 2.0 * (n + chi); }
    /// Density of component k is r^{exponent(k)} exp(-beta V(r)) dr.
    [[nodiscard]] double exponent(int k) const { return 2.0 * k + 1.0 + measure_exponent; }
};

/// The same gas against Lambda_chi.
GasSpec lambda_gas(int n, double chi, RadialPotential potential);

/// Thrown when a component density is not integrable; the message names k.
struct DivergenceError : std::domain_error {
    DivergenceError(int k, const std::string& detail);
    int k;
};

/// Law of the k-th Kostlan component, density proportional to r^{2k+1+e} exp(-2(n+chi)V(r)).
class ComponentLaw {
public:
    enum class Method { automatic, closed_form, quadrature };

    ComponentLaw(const GasSpec& spec, int k, Method method = Method::automatic);

    [[nodiscard]] double cdf(double m) const;
    [[nodiscard]] double survival(double m) const;
    /// u-quantile, u in (0,1). Relative accuracy about 1e-10 on the quadrature path.
    [[nodiscard]] double quantile(double u) const;
    /// log int_0^inf r^{2k+1+e} exp(-2(n+chi)V(r)) dr.
    [[nodiscard]] double log_mass() const { return log_mass_; }
    [[nodiscard]] bool is_closed_form() const { return closed_; }
    [[nodiscard]] int k() const { return k_; }

private:
    struct Segment {
        double a, b;      // radii (closed form) or log-radii (quadrature)
        double c, p1;     // closed form: density e^{-beta c} r^{p1-1} dr
        double mass;      // normalized mass of the segment
        double left;      // normalized mass strictly left of the segment
        double right;     // normalized mass strictly right of the segment
    };

    void build_closed_form(const std::vector<LogLinearPiece>& pieces);
    void build_quadrature();
    [[nodiscard]] double log_density_s(double s) const;  // quadrature path, shifted by peak
    [[nodiscard]] double partial_left(const Segment& seg, double x) const;   // normalized mass in [seg.a, x]
    [[nodiscard]] double partial_right(const Segment& seg, double x) const;  // normalized mass in [x, seg.b]
    [[nodiscard]] std::size_t locate(double x) const;

    RadialPotential potential_;
    double beta_ = 0.0;
    double power_ = 0.0;  // 2k+2+e: exponent of r in the s-domain integrand
    int k_ = 0;
    bool closed_ = false;
    double log_mass_ = 0.0;
    double shift_ = 0.0;  // quadrature path: log-density at the peak
    double norm_ = 1.0;   // quadrature path: total of the shifted integrand
    std::vector<Segment> segments_;
};

double component_cdf(int k, const GasSpec& spec, double m);
double component_survival(int k, const GasSpec& spec, double m);
double log_component_mass(int k, const GasSpec& spec);
double sample_component(int k, const GasSpec& spec, double u);

/// Generic inverse by bisection on cdf with a bracket grown geometrically
/// from r = 1; relative tolerance rel_tol, at most 200 iterations.
double quantile_by_bisection(const ComponentLaw& law, double u, double rel_tol = 1e-10);

struct ModuliSample {
    std::vector<double> moduli;  // ascending
    std::uint64_t seed = 0;
    std::uint64_t replica_index = 0;

    [[nodiscard]] double max() const { return moduli.back(); }
    [[nodiscard]] double min() const { return moduli.front(); }
};

/// Caches the n component laws of one gas.
class KostlanSampler {
public:
    explicit KostlanSampler(GasSpec spec, ComponentLaw::Method method = ComponentLaw::Method::automatic);

    [[nodiscard]] const GasSpec& spec() const { return spec_; }
    [[nodiscard]] const ComponentLaw& component(int k) const { return laws_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] int n() const { return spec_.n; }

    /// Component k uses the k-th uniform of the (seed, replica, moduli) stream.
    [[nodiscard]] ModuliSample sample(std::uint64_t seed, std::uint64_t replica) const;
    [[nodiscard]] std::vector<double> sample_from_uniforms(std::span<const double> u) const;
    /// P(max <= t) = prod_k F_k(t).
    [[nodiscard]] double max_cdf(double t) const;

private:
    GasSpec spec_;
    std::vector<ComponentLaw> laws_;
};

ModuliSample sample_moduli(const GasSpec& spec, std::uint64_t seed, std::uint64_t replica);

enum class RescaleScheme { identity, linear_gumbel, quadratic_hard, power, weak_gumbel };

struct RescaleParams {
    double n = 1.0;
    double eps = 0.0;
    double alpha = 1.0;
    double chi = 1.0;
};

RescaleScheme parse_rescale_scheme(const std::string& name);
std::string to_string(RescaleScheme s);

/// identity: x; linear_gumbel: n(x-1-eps); quadratic_hard: n^2(1-x);
/// power: n^{-1/alpha} x; weak_gumbel: 2 chi (x - 1 - eps/2).
double rescale_extreme(double x, RescaleScheme scheme, const RescaleParams& params);

}  // namespace circlegas
