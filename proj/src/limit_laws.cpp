#include "circlegas/limit_laws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace circlegas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailTol = 1e-17;  // on the log of the product
constexpr int kMaxFactors = 200000000;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("limit law: " + what);
}

// Truncated product prod_{k<K} factor(k) in log space, with a bound T_K on
// |log(exact) - log(truncated)|. Auto mode (K < 0) stops once T_K <= kTailTol.
template <class LogFactor, class Tail>
CdfValue log_product(LogFactor log_factor, Tail tail, int K) {
    double acc = 0.0;
    int k = 0;
    double T = kInf;
    for (;; ++k) {
        if (K >= 0 ? k >= K : false) {
            T = tail(k);
            break;
        }
        if (K < 0) {
            T = tail(k);
            if (T <= kTailTol) break;
            if (k >= kMaxFactors) throw std::runtime_error("limit law: product did not converge within the factor cap");
        }
        acc += log_factor(k);
        if (acc == -kInf) return {0.0, 0.0, k + 1};
    }
    const double v = std::exp(acc);
    // exact lies in [v e^{-T}, v]
    return {v, std::isinf(T) ? v : -v * std::expm1(-T), k};
}

// sum_{k>=K} -log(1 - u^{k+chi}) <= u^{K+chi} / ((1-u)(1-u^{K+chi}))
double geometric_tail(double log_u, double chi, int K) {
    const double p = std::exp((K + chi) * log_u);
    if (p >= 1.0) return kInf;
    return p / (-std::expm1(log_u) * (1.0 - p));
}

CdfValue power_product(double log_u, double chi, int K) {
    if (log_u >= 0.0) return {0.0, 0.0, 1};  // first factor 1 - 1 = 0
    auto f = [&](int k) {
        const double p = std::exp((k + chi) * log_u);
        return std::log1p(-p);
    };
    return log_product(f, [&](int k) { return geometric_tail(log_u, chi, k); }, K);
}

// prod_{k < count or all k} Q(s_k, x), s_k = (2k+2chi)/alpha. count < 0: infinite product.
CdfValue gamma_product(double alpha, double chi, double x, int count, int K) {
    if (std::isinf(x)) return {count == 0 ? 1.0 : 0.0, 0.0, 0};
    auto s_of = [&](int k) { return (2.0 * k + 2.0 * chi) / alpha; };
    auto f = [&](int k) {
        const auto ig = regularized_gamma(s_of(k), x);
        return ig.q > 0.5 ? std::log1p(-ig.p) : std::log(ig.q);
    };
    if (count >= 0) {
        double acc = 0.0;
        for (int k = 0; k < count; ++k) acc += f(k);
        return {std::exp(acc), 0.0, count};
    }
    if (x == 0.0) return {1.0, 0.0, 0};
    const double lx = std::log(x);
    // P(s,x) <= b(s) = x^s / Gamma(s+1); b_{k+1}/b_k is nonincreasing in k.
    auto log_b = [&](int k) {
        const double s = s_of(k);
        return s * lx - std::lgamma(s + 1.0);
    };
    auto tail = [&](int k) {
        const double lb = log_b(k);
        const double r = std::exp(log_b(k + 1) - lb);
        const double b = std::exp(lb);
        if (!(r < 1.0) || !(b < 1.0)) return kInf;
        return b / ((1.0 - r) * (1.0 - b));
    };
    return log_product(f, tail, K);
}

bool is_integer_case(double alpha, double chi) {
    const double d = alpha / 2.0 - chi;
    return std::abs(d - std::round(d)) < 1e-9;
}

struct Validator {
    void operator()(const law::VeryWeak& p) const {
        require(p.R > 0.0, "very_weak needs R > 0");
        require(p.chi > 0.0, "very_weak needs chi > 0");
    }
    void operator()(const law::Annulus& p) const {
        require(p.R > 1.0, "annulus needs R > 1");
        require(p.chi > 0.0, "annulus needs chi > 0");
    }
    void operator()(const law::FiniteParticles& p) const {
        require(p.alpha > 0.0, "finite_particles needs alpha > 0");
        require(p.chi > 0.0, "finite_particles needs chi > 0");
        require(p.alpha >= 2.0 * p.chi - 1e-9, "finite_particles needs alpha >= 2 chi");
        require(p.gamma > 0.0, "finite_particles needs gamma > 0");
        require(p.l_plus > 0.0, "finite_particles needs L+ > 0");
        require(p.l_minus >= 1.0, "finite_particles needs L- >= 1");
    }
    void operator()(const law::InfiniteParticles& p) const {
        require(p.alpha > 0.0, "infinite_particles needs alpha > 0");
        require(p.chi > 0.0, "infinite_particles needs chi > 0");
        require(p.gamma > 0.0, "infinite_particles needs gamma > 0");
    }
    void operator()(const law::GumbelStrong& p) const {
        require(p.q > 1.0, "gumbel_strong needs q > 1");
        if (p.q_tilde) require(*p.q_tilde >= 0.0, "gumbel_strong needs q_tilde >= 0");
    }
    void operator()(const law::HardExponential&) const {}
    void operator()(const law::GumbelWeak& p) const { require(p.chi > 0.0, "gumbel_weak needs chi > 0"); }
};

struct Namer {
    std::string operator()(const law::VeryWeak&) const { return "very_weak"; }
    std::string operator()(const law::Annulus&) const { return "annulus"; }
    std::string operator()(const law::FiniteParticles&) const { return "finite_particles"; }
    std::string operator()(const law::InfiniteParticles&) const { return "infinite_particles"; }
    std::string operator()(const law::GumbelStrong&) const { return "gumbel_strong"; }
    std::string operator()(const law::HardExponential&) const { return "hard_exponential"; }
    std::string operator()(const law::GumbelWeak&) const { return "gumbel_weak"; }
};

struct Support {
    std::pair<double, double> operator()(const law::VeryWeak& p) const { return {p.R, kInf}; }
    std::pair<double, double> operator()(const law::Annulus& p) const { return {1.0, p.R}; }
    std::pair<double, double> operator()(const law::FiniteParticles&) const { return {0.0, kInf}; }
    std::pair<double, double> operator()(const law::InfiniteParticles&) const { return {0.0, kInf}; }
    std::pair<double, double> operator()(const law::GumbelStrong&) const { return {-kInf, kInf}; }
    std::pair<double, double> operator()(const law::HardExponential&) const { return {0.0, kInf}; }
    std::pair<double, double> operator()(const law::GumbelWeak&) const { return {-kInf, kInf}; }
};

struct Evaluator {
    double t;
    int K;  // -1: automatic truncation

    CdfValue operator()(const law::VeryWeak& p) const {
        if (std::isinf(t)) return {1.0, 0.0, 0};
        return power_product(2.0 * (std::log(p.R) - std::log(t)), p.chi, K);
    }
    CdfValue operator()(const law::Annulus& p) const {
        if (t == p.R) return {1.0, 0.0, 0};
        const double lu = -2.0 * std::log(t), lR = -2.0 * std::log(p.R);
        if (lu >= 0.0) return {0.0, 0.0, 1};
        auto f = [&](int k) {
            const double e = k + p.chi;
            return std::log1p(-std::exp(e * lu)) - std::log1p(-std::exp(e * lR));
        };
        // each remaining term lies in [log(1 - t^{-e}), 0]
        return log_product(f, [&](int k) { return geometric_tail(lu, p.chi, k); }, K);
    }
    CdfValue operator()(const law::FiniteParticles& p) const {
        const double x = t == 0.0 ? kInf : 2.0 * p.gamma * std::pow(t, -p.alpha);
        const double d = p.alpha / 2.0 - p.chi;
        if (!is_integer_case(p.alpha, p.chi)) return gamma_product(p.alpha, p.chi, x, static_cast<int>(std::floor(d)) + 1, K);
        const int N = static_cast<int>(std::round(d));
        auto head = gamma_product(p.alpha, p.chi, x, N, K);
        const double c = (1.0 / p.l_plus + 1.0 / p.l_minus) /
                         (1.0 / (p.alpha * p.gamma) + 1.0 / p.l_plus + 1.0 / p.l_minus);
        const double e = std::exp(-x);
        head.value *= e + (1.0 - e) * c;
        return head;
    }
    CdfValue operator()(const law::InfiniteParticles& p) const {
        const double x = t == 0.0 ? kInf : 2.0 * p.gamma * std::pow(t, -p.alpha);
        return gamma_product(p.alpha, p.chi, x, -1, K);
    }
    CdfValue operator()(const law::GumbelStrong& p) const {
        double coef = 1.0 / (2.0 * p.q);
        if (p.q_tilde) {
            const double qt = *p.q_tilde;
            coef = std::isinf(qt) ? 0.5 : 0.5 * (qt + 1.0) / (qt + p.q);
        }
        return {std::exp(-coef * std::exp(-2.0 * (p.q - 1.0) * t)), 0.0, 0};
    }
    CdfValue operator()(const law::HardExponential&) const { return {-std::expm1(-t), 0.0, 0}; }
    CdfValue operator()(const law::GumbelWeak& p) const {
        if (std::isinf(t)) return {t > 0 ? 1.0 : 0.0, 0.0, 0};
        const double s = 1.0 + solve_eps_chi(p.chi) / 2.0 + t / (2.0 * p.chi);
        if (s <= 1.0) return {0.0, 0.0, 0};
        return power_product(-2.0 * std::log(s), p.chi, K);
    }
};

CdfValue evaluate(const LimitLaw& law, double t, int K) {
    validate(law);
    if (std::isnan(t)) throw std::invalid_argument("cdf_max: NaN argument");
    const auto [lo, hi] = support(law);
    if (t < lo || t > hi) throw std::domain_error("cdf_max: t outside the support of " + name(law));
    return std::visit(Evaluator{t, K}, law);
}

// Solves y + c e^y = 0 (y = log eps) by bisection on [-c, 0], then one Newton step.
double solve_log_lambert(double c) {
    double lo = -c - 1.0, hi = 0.0;
    auto h = [c](double y) { return y + c * std::exp(y); };
    for (int i = 0; i < 400 && hi - lo > 1e-17 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi);
    y -= h(y) / (1.0 + c * std::exp(y));
    const double eps = std::exp(y);
    if (!(std::abs(eps * std::exp(c * eps) - 1.0) < 1e-12)) throw std::runtime_error("eps solver: residual above 1e-12");
    return eps;
}

}  // namespace

std::string name(const LimitLaw& law) { return std::visit(Namer{}, law); }
void validate(const LimitLaw& law) { std::visit(Validator{}, law); }
std::pair<double, double> support(const LimitLaw& law) { return std::visit(Support{}, law); }

CdfValue cdf_max_detail(const LimitLaw& law, double t) { return evaluate(law, t, -1); }

double cdf_max(const LimitLaw& law, double t) { return cdf_max_detail(law, t).value; }

double cdf_max_extended(const LimitLaw& law, double t) {
    const auto [lo, hi] = support(law);
    if (t < lo) return 0.0;
    if (t > hi) return 1.0;
    return cdf_max(law, t);
}

CdfValue cdf_max_truncated(const LimitLaw& law, double t, int terms) {
    if (terms < 0) throw std::invalid_argument("cdf_max_truncated: terms must be >= 0");
    return evaluate(law, t, terms);
}

double solve_eps_n(double q, int n) {
    if (!(q > 1.0)) throw std::invalid_argument("solve_eps_n: q must be > 1");
    if (n < 1) throw std::invalid_argument("solve_eps_n: n must be >= 1");
    return solve_log_lambert(2.0 * (q - 1.0) * n);
}

double solve_eps_chi(double chi) {
    if (!(chi > 0.0)) throw std::invalid_argument("solve_eps_chi: chi must be > 0");
    return solve_log_lambert(chi);
}

double radial_gap_probability(std::span<const double> tail_masses) {
    double acc = 0.0;
    for (double m : tail_masses) {
        if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("radial_gap_probability: mass outside [0,1]");
        if (m == 1.0) return 0.0;
        acc += std::log1p(-m);
    }
    return std::exp(acc);
}

}  // namespace circlegas
