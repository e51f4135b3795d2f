#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>

#include "circlegas/special.hpp"

namespace circlegas {

namespace law {
/// prod_k (1 - (R/t)^{2k+2chi}), t >= R.
struct VeryWeak {
    double R = 1.0;
    double chi = 1.0;
};
/// prod_k (1 - t^{-2k-2chi}) / (1 - R^{-2k-2chi}), t in [1, R].
struct Annulus {
    double R = 2.0;
    double chi = 1.0;
};
/// Law of the rescaled maximum n^{-1/alpha} max with finitely many limiting particles, t >= 0.
struct FiniteParticles {
    double alpha = 3.0;
    double chi = 1.0;
    double gamma = 1.0;
    double l_plus = 1.0;
    double l_minus = 1.0;
};
/// prod_{k>=0} Gamma(s_k, 2 gamma t^{-alpha}) / Gamma(s_k), s_k = (2k+2chi)/alpha, t >= 0.
struct InfiniteParticles {
    double alpha = 1.0;
    double chi = 1.0;
    double gamma = 1.0;
};
/// exp(-(1/2q) e^{-2(q-1)a}); with q_tilde, exp(-(1/2)(q_tilde+1)/(q_tilde+q) e^{-2(q-1)a}). a real.
struct GumbelStrong {
    double q = 2.0;
    std::optional<double> q_tilde;
};
/// 1 - e^{-t}, t >= 0.
struct HardExponential {};
/// prod_k (1 - t^{-2k-2chi}) at t = 1 + eps_chi/2 + a/(2chi); a real.
struct GumbelWeak {
    double chi = 1.0;
};
}  // namespace law

using LimitLaw = std::variant<law::VeryWeak, law::Annulus, law::FiniteParticles, law::InfiniteParticles,
                              law::GumbelStrong, law::HardExponential, law::GumbelWeak>;

std::string name(const LimitLaw& law);
/// Throws std::invalid_argument on parameters outside the theorem's hypotheses.
void validate(const LimitLaw& law);
/// Closed support [lo, hi] of the argument (may be infinite).
std::pair<double, double> support(const LimitLaw& law);

struct CdfValue {
    double value = 0.0;
    double tail_bound = 0.0;  // |value - exact| <= tail_bound (truncated products)
    int terms = 0;
};

/// CDF of the limiting law; t outside the support throws std::domain_error.
CdfValue cdf_max_detail(const LimitLaw& law, double t);
double cdf_max(const LimitLaw& law, double t);
/// Same, but 0 below and 1 above the support (for comparing with samples).
double cdf_max_extended(const LimitLaw& law, double t);
/// Product laws truncated after exactly `terms` factors, with the analytic bound on the rest.
CdfValue cdf_max_truncated(const LimitLaw& law, double t, int terms);

/// Unique eps > 0 with eps * e^{2(q-1) n eps} = 1.
double solve_eps_n(double q, int n);
/// Unique eps > 0 with eps * e^{chi eps} = 1.
double solve_eps_chi(double chi);

/// prod_k (1 - mass_k), computed in log space.
double radial_gap_probability(std::span<const double> tail_masses);

}  // namespace circlegas
