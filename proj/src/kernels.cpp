#include "circlegas/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace circlegas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailRel = 1e-12;
constexpr int kMaxTerms = 1000000;

bool has_nan(cplx z) { return std::isnan(z.real()) || std::isnan(z.imag()); }

void reject_nan(cplx z, cplx w) {
    if (has_nan(z) || has_nan(w)) throw std::invalid_argument("kernel evaluation: NaN argument");
}

// Sum of exp(log_mag_k + i phase_k), factoring out the largest magnitude.
struct LogTerm {
    double log_mag;
    double phase;
};

cplx assemble(const std::vector<LogTerm>& terms) {
    double m = kNegInf;
    for (const auto& t : terms) m = std::max(m, t.log_mag);
    if (m == kNegInf) return {0.0, 0.0};
    cplx s{0.0, 0.0};
    for (const auto& t : terms) {
        if (t.log_mag == kNegInf) continue;
        s += std::polar(std::exp(t.log_mag - m), t.phase);
    }
    return std::exp(m) * s;
}

// z^e as (log|z|*e, arg z*e); nullopt-like flag when the power vanishes.
bool log_power(cplx z, int e, LogTerm& out) {
    if (e == 0) {
        out = {0.0, 0.0};
        return true;
    }
    if (z == cplx{0.0, 0.0}) return false;
    out = {e * std::log(std::abs(z)), e * std::arg(z)};
    return true;
}

}  // namespace

// ------------------------------------------------------------------ radial

RadialKernel::RadialKernel(std::vector<double> log_coeffs, LogWeight log_weight, Reference reference)
    : log_coeffs_(std::move(log_coeffs)), log_weight_(std::move(log_weight)), reference_(reference) {
    if (log_coeffs_.empty()) throw std::invalid_argument("RadialKernel: empty coefficient list");
    for (double c : log_coeffs_)
        if (std::isnan(c)) throw std::invalid_argument("RadialKernel: NaN coefficient");
    if (!log_weight_) log_weight_ = [](cplx) { return 0.0; };
}

RadialKernel RadialKernel::from_gas(const GasSpec& spec, bool with_weight) {
    auto coeffs = radial_coefficients(spec);
    Reference ref = spec.measure_exponent == 0.0 ? Reference::lebesgue : Reference::lambda_chi;
    if (!with_weight) return RadialKernel(std::move(coeffs), nullptr, ref);
    const double half_beta = spec.n + spec.chi;
    RadialPotential V = spec.potential;
    auto lw = [V, half_beta](cplx z) {
        ExtReal v = V(std::abs(z));
        if (v.is_infinite()) return kNegInf;
        return -half_beta * v.raw();
    };
    return RadialKernel(std::move(coeffs), lw, ref);
}

cplx RadialKernel::operator()(cplx z, cplx w) const {
    reject_nan(z, w);
    const double lw = log_weight_(z) + log_weight_(w);
    if (lw == kNegInf) return {0.0, 0.0};
    const cplx x = z * std::conj(w);
    if (x == cplx{0.0, 0.0}) return std::exp(log_coeffs_.front() + lw);
    const double L = std::log(std::abs(z)) + std::log(std::abs(w));
    const double th = std::arg(x);
    std::vector<LogTerm> terms;
    terms.reserve(log_coeffs_.size());
    for (std::size_t k = 0; k < log_coeffs_.size(); ++k) {
        const double kk = static_cast<double>(k);
        terms.push_back({log_coeffs_[k] + kk * L + lw, kk * th});
    }
    return assemble(terms);
}

std::vector<double> radial_coefficients(const GasSpec& spec) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(spec.n));
    const double l2pi = std::log(2.0 * kPi);
    for (int k = 0; k < spec.n; ++k) out.push_back(-l2pi - log_component_mass(k, spec));
    return out;
}

cplx eval_kernel(const RadialKernel& K, cplx z, cplx w) { return K(z, w); }

// ------------------------------------------------------------------ edge kernels

cplx limit_edge_kernel_hard(cplx s) {
    if (has_nan(s)) throw std::invalid_argument("limit_edge_kernel_hard: NaN argument");
    if (std::abs(s) < 1.0) {
        // sum_j (-s)^j / (j! (j+2))
        cplx term{1.0, 0.0};
        cplx sum{0.5, 0.0};
        for (int j = 1; j < 30; ++j) {
            term *= -s / static_cast<double>(j);
            sum += term / static_cast<double>(j + 2);
        }
        return sum;
    }
    const cplx e = std::exp(-s);
    return -e / s + (1.0 - e) / (s * s);
}

double first_intensity_limit_hard(double r) {
    if (!(r >= 0.0)) throw std::domain_error("first_intensity_limit_hard: r must be >= 0");
    return limit_edge_kernel_hard(cplx{2.0 * r, 0.0}).real() / kPi;
}

cplx limit_edge_kernel_E(double q, double Q, cplx alpha, cplx beta) {
    if (!(q >= 0.0) || !(Q > q) || !(q < 1.0))
        throw std::invalid_argument("limit_edge_kernel_E: need 0 <= q < Q and q < 1");
    reject_nan(alpha, beta);
    auto P = [&](cplx x) { return x.real() >= 0.0 ? Q * x.real() : q * x.real(); };
    const double pre = -P(alpha) - P(beta);
    const cplx s = alpha + std::conj(beta);
    const double top = std::min(Q, 1.0);
    const double h = top - q;
    const double D = Q - q;

    if (std::abs(s) * h < 2.0) {
        // e^{sq} sum_j s^j/j! (h^{j+2}/(j+2) - h^{j+3}/((j+3) D))
        cplx sum{0.0, 0.0};
        cplx sp{1.0, 0.0};  // s^j / j!
        double hp = h * h;  // h^{j+2}
        for (int j = 0; j < 80; ++j) {
            const cplx t = sp * (hp / (j + 2) - hp * h / ((j + 3) * D));
            sum += t;
            if (j > 4 && std::abs(t) <= 1e-18 * std::abs(sum)) break;
            sp *= s / static_cast<double>(j + 1);
            hp *= h;
        }
        return std::exp(s * q + pre) * sum / kPi;
    }
    // Antiderivative e^{st}(g/s - g'/s^2 + g''/s^3) of the quadratic weight g.
    auto g = [&](double t) { return (Q - t) * (t - q) / D; };
    auto g1 = [&](double t) { return (Q + q - 2.0 * t) / D; };
    const double g2 = -2.0 / D;
    auto F = [&](double t) {
        const cplx poly = g(t) / s - g1(t) / (s * s) + g2 / (s * s * s);
        return std::exp(s * t + pre) * poly;
    };
    return (F(top) - F(q)) / kPi;
}

cplx gaf_covariance(cplx z, cplx w) {
    reject_nan(z, w);
    const cplx s = z + std::conj(w);
    if (std::abs(s) < 0.5) {
        cplx term{1.0, 0.0};
        cplx sum{1.0, 0.0};
        for (int j = 1; j < 25; ++j) {
            term *= s / static_cast<double>(j + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(s) - 1.0) / s;
}

double gaf_intensity(cplx z) {
    if (has_nan(z)) throw std::invalid_argument("gaf_intensity: NaN argument");
    // (1/4pi) Laplacian of f(2 Re z), f(s) = log((e^s-1)/s); equals f''(2 Re z)/pi,
    // f''(s) = (1/4)(1/y^2 - 1/sinh^2 y) with y = s/2 = Re z.
    const double y = z.real();
    double g;
    if (std::abs(y) < 0.1) {
        const double y2 = y * y;
        g = 1.0 / 3.0 + y2 * (-1.0 / 15.0 + y2 * (2.0 / 189.0 + y2 * (-1.0 / 675.0 + y2 * (2.0 / 10395.0))));
    } else {
        const double sh = std::sinh(y);
        g = 1.0 / (y * y) - 1.0 / (sh * sh);
    }
    return 0.25 * g / kPi;
}

// ------------------------------------------------------------------ limit kernels

std::vector<std::pair<int, double>> finite_particle_coefficients(double alpha, double chi, double scale,
                                                                 double l_plus, double l_minus) {
    std::vector<std::pair<int, double>> out;
    for (int k = 0;; ++k) {
        const double t = 2.0 * k + 2.0 * chi;
        if (std::abs(t - alpha) <= 1e-9 * std::max(1.0, alpha)) {
            out.emplace_back(k, 1.0 / (kPi * (1.0 / (alpha * scale) + 1.0 / l_plus + 1.0 / l_minus)));
            break;
        }
        if (t > alpha) break;
        if (t == 0.0) continue;  // divergent integral at the origin: a_0 = 0
        const double s = t / alpha;
        // 1/a_k = 2 pi Gamma(s) / (alpha (2 scale)^s)
        const double log_inv = std::log(2.0 * kPi) + std::lgamma(s) - std::log(alpha) - s * std::log(2.0 * scale);
        out.emplace_back(k, std::exp(-log_inv));
    }
    return out;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("limit kernel: " + what);
}

struct Validator {
    void operator()(const limit::BR& p) const {
        require(p.R >= 1.0, "B_R needs R >= 1");
        require(p.chi >= 0.0, "B_R needs chi >= 0");
    }
    void operator()(const limit::AR& p) const {
        require(p.R > 1.0, "A_R needs R > 1");
        require(p.chi > 0.0, "A_R needs chi > 0");
    }
    void operator()(const limit::F& p) const {
        require(p.alpha > 0.0, "F needs alpha > 0");
        require(p.chi >= 0.0, "F needs chi >= 0");
        require(p.gamma > 0.0, "F needs gamma > 0");
        require(p.l_plus > 0.0 && p.l_minus > 0.0, "F needs L+ > 0 and L- > 0");
    }
    void operator()(const limit::I& p) const {
        require(p.alpha > 0.0, "I needs alpha > 0");
        require(p.chi >= 0.0, "I needs chi >= 0");
        require(p.gamma > 0.0, "I needs gamma > 0");
    }
    void operator()(const limit::G& p) const {
        require(p.alpha > 0.0, "G needs alpha > 0");
        require(p.chi >= 0.0, "G needs chi >= 0");
        require(p.lambda > 0.0, "G needs lambda > 0");
        require(p.l_plus > 0.0 && p.l_minus > 0.0, "G needs l+ > 0 and l- > 0");
    }
    void operator()(const limit::GInf& p) const {
        require(p.alpha > 0.0, "G needs alpha > 0");
        require(p.chi >= 0.0, "G needs chi >= 0");
        require(p.lambda > 0.0, "G needs lambda > 0");
    }
    void operator()(const limit::MA& p) const {
        require(!p.intervals.empty(), "M_A needs a nonempty interval set");
        require(p.chi > 0.0, "M_A needs chi > 0");
        double prev = -1.0;
        for (auto [a, b] : p.intervals) {
            require(a >= 0.0 && b > a, "M_A intervals must satisfy 0 <= a < b");
            require(a >= prev, "M_A intervals must be sorted and disjoint");
            prev = b;
        }
    }
    void operator()(const limit::EdgeE& p) const {
        require(p.q >= 0.0 && p.Q > p.q, "edge_E needs 0 <= q < Q");
        require(p.q < 1.0, "edge_E needs q < 1");
    }
    void operator()(const limit::EdgeHard&) const {}
    void operator()(const limit::BergmanDisk&) const {}
    void operator()(const limit::BergmanHalfplane&) const {}
    void operator()(const limit::GafF&) const {}
};

struct Namer {
    std::string operator()(const limit::BR&) const { return "B_R"; }
    std::string operator()(const limit::AR&) const { return "A_R"; }
    std::string operator()(const limit::F&) const { return "F_alpha"; }
    std::string operator()(const limit::I&) const { return "I_alpha"; }
    std::string operator()(const limit::G&) const { return "G_alpha"; }
    std::string operator()(const limit::GInf&) const { return "G_alpha_inf"; }
    std::string operator()(const limit::MA&) const { return "M_A"; }
    std::string operator()(const limit::EdgeHard&) const { return "edge_hard"; }
    std::string operator()(const limit::EdgeE&) const { return "edge_E"; }
    std::string operator()(const limit::BergmanDisk&) const { return "bergman_disk"; }
    std::string operator()(const limit::BergmanHalfplane&) const { return "bergman_halfplane"; }
    std::string operator()(const limit::GafF&) const { return "gaf_F"; }
};

void domain_error_if(bool bad, const std::string& what) {
    if (bad) throw std::domain_error("limit kernel: point outside domain (" + what + ")");
}

// Partial sums of sum_k c_k x^k with |x| = rho; stop once tail(K) <= 1e-12 |partial|.
// coef(k) returns log c_k (may be -inf); tail(K, partial) bounds sum_{k>=K} |c_k| rho^k.
template <class Coef, class Tail>
SeriesValue power_series(cplx x, Coef coef, Tail tail) {
    const double lr = std::log(std::abs(x));
    const double th = std::arg(x);
    SeriesValue out{{0.0, 0.0}, 0.0, 0};
    for (int k = 0; k < kMaxTerms; ++k) {
        const double lc = coef(k);
        if (lc != kNegInf) out.value += std::polar(std::exp(lc + k * lr), k * th);
        out.terms = k + 1;
        const double tb = tail(k + 1);
        if (tb <= kTailRel * std::abs(out.value)) {
            out.tail_bound = tb;
            return out;
        }
    }
    throw std::runtime_error("limit kernel: series did not converge within the term cap");
}

// Tail bound for terms t_k = exp(lc(k)) rho^k whose ratio t_{k+1}/t_k is nonincreasing:
// once the ratio r_K < 1, sum_{k>=K} t_k <= t_K / (1 - r_K).
template <class Coef>
double monotone_ratio_tail(Coef coef, double lr, int K) {
    const double a = coef(K) + K * lr;
    const double b = coef(K + 1) + (K + 1) * lr;
    if (a == kNegInf) return 0.0;
    const double r = std::exp(b - a);
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    return std::exp(a) / (1.0 - r);
}

struct Evaluator {
    cplx z, w;

    SeriesValue operator()(const limit::BR& p) const {
        domain_error_if(!(std::abs(z) > p.R && std::abs(w) > p.R), "B_R needs |z|,|w| > R");
        const cplx x = 1.0 / (z * std::conj(w));
        const double ax = std::abs(z * w);
        const double rho = p.R * p.R / ax;
        const double l2 = 2.0 * std::log(p.R);
        auto coef = [&](int k) {
            const double c = k + p.chi;
            return c > 0.0 ? std::log(c) + (k + p.chi) * l2 : kNegInf;
        };
        // sum_{k>=K} (k+chi) R^{2chi} rho^k
        auto tail = [&](int K) {
            const double g = std::pow(rho, K);
            return std::pow(p.R, 2.0 * p.chi) * ((K + p.chi) * g / (1.0 - rho) + g * rho / ((1.0 - rho) * (1.0 - rho)));
        };
        auto sv = power_series(x, coef, tail);
        const double pre = 1.0 / (kPi * std::pow(ax, p.chi + 1.0));
        sv.value *= pre;
        sv.tail_bound *= pre;
        return sv;
    }

    SeriesValue operator()(const limit::AR& p) const {
        domain_error_if(!(std::abs(z) > 1.0 && std::abs(w) > 1.0), "A_R needs |z|,|w| > 1");
        if (std::abs(z) > p.R || std::abs(w) > p.R) return {{0.0, 0.0}, 0.0, 0};
        const cplx x = 1.0 / (z * std::conj(w));
        const double ax = std::abs(z * w);
        const double rho = 1.0 / ax;
        const double lR = std::log(p.R);
        auto coef = [&](int k) {
            const double e = 2.0 * k + 2.0 * p.chi;
            return std::log(k + p.chi) - std::log1p(-std::exp(-e * lR));
        };
        // (k+chi)/(1-R^{-(2k+2chi)}) <= (k+chi)/(1-R^{-(2K+2chi)}) for k >= K
        auto tail = [&](int K) {
            const double d = -std::expm1(-(2.0 * K + 2.0 * p.chi) * lR);
            const double g = std::pow(rho, K);
            return ((K + p.chi) * g / (1.0 - rho) + g * rho / ((1.0 - rho) * (1.0 - rho))) / d;
        };
        auto sv = power_series(x, coef, tail);
        const double pre = 1.0 / (kPi * std::pow(ax, p.chi + 1.0));
        sv.value *= pre;
        sv.tail_bound *= pre;
        return sv;
    }

    SeriesValue operator()(const limit::F& p) const {
        domain_error_if(z == cplx{} || w == cplx{}, "F needs z, w != 0");
        const cplx x = 1.0 / (z * std::conj(w));
        const double ax = std::abs(z * w);
        cplx sum{0.0, 0.0};
        int terms = 0;
        for (auto [k, a] : finite_particle_coefficients(p.alpha, p.chi, p.gamma, p.l_plus, p.l_minus)) {
            sum += a * std::pow(x, k);
            ++terms;
        }
        const double lw = -p.gamma / std::pow(std::abs(z), p.alpha) - p.gamma / std::pow(std::abs(w), p.alpha);
        return {sum * std::exp(lw) / std::pow(ax, p.chi + 1.0), 0.0, terms};
    }

    // Shared by I (x = 1/(z conj w)) and the infinite G (x = z conj w):
    // a_k = alpha (2 scale)^{s_k} / (2 pi Gamma(s_k)), s_k = (2k+2chi)/alpha.
    static SeriesValue gamma_series(cplx x, double alpha, double chi, double scale) {
        const double l2s = std::log(2.0 * scale);
        const double lbase = std::log(alpha) - std::log(2.0 * kPi);
        auto coef = [&](int k) {
            const double s = (2.0 * k + 2.0 * chi) / alpha;
            if (s <= 0.0) return kNegInf;
            return lbase + s * l2s - std::lgamma(s);
        };
        const double lr = std::log(std::abs(x));
        // Gamma(s)/Gamma(s+c) decreases in s, so the term ratio is nonincreasing.
        auto tail = [&](int K) { return monotone_ratio_tail(coef, lr, K); };
        return power_series(x, coef, tail);
    }

    SeriesValue operator()(const limit::I& p) const {
        domain_error_if(z == cplx{} || w == cplx{}, "I needs z, w != 0");
        const cplx x = 1.0 / (z * std::conj(w));
        auto sv = gamma_series(x, p.alpha, p.chi, p.gamma);
        const double lw = -p.gamma / std::pow(std::abs(z), p.alpha) - p.gamma / std::pow(std::abs(w), p.alpha);
        const double pre = std::exp(lw) / std::pow(std::abs(z * w), p.chi + 1.0);
        sv.value *= pre;
        sv.tail_bound *= pre;
        return sv;
    }

    SeriesValue operator()(const limit::G& p) const {
        const cplx x = z * std::conj(w);
        cplx sum{0.0, 0.0};
        int terms = 0;
        for (auto [k, a] : finite_particle_coefficients(p.alpha, p.chi, p.lambda, p.l_plus, p.l_minus)) {
            sum += a * (k == 0 ? cplx{1.0, 0.0} : std::pow(x, k));
            ++terms;
        }
        const double lw = -p.lambda * (std::pow(std::abs(z), p.alpha) + std::pow(std::abs(w), p.alpha));
        return {sum * std::exp(lw), 0.0, terms};
    }

    SeriesValue operator()(const limit::GInf& p) const {
        const cplx x = z * std::conj(w);
        const double lw = -p.lambda * (std::pow(std::abs(z), p.alpha) + std::pow(std::abs(w), p.alpha));
        if (x == cplx{}) {
            const double s = 2.0 * p.chi / p.alpha;
            const double a0 = s > 0.0 ? p.alpha * std::pow(2.0 * p.lambda, s) / (2.0 * kPi * std::tgamma(s)) : 0.0;
            return {a0 * std::exp(lw), 0.0, 1};
        }
        auto sv = gamma_series(x, p.alpha, p.chi, p.lambda);
        sv.value *= std::exp(lw);
        sv.tail_bound *= std::exp(lw);
        return sv;
    }

    SeriesValue operator()(const limit::MA& p) const {
        const double R = p.intervals.back().second;
        domain_error_if(!(std::abs(z) < R && std::abs(w) < R), "M_A needs |z|,|w| < sup A");
        const cplx x = z * std::conj(w);
        // 1/a_k = 2 pi sum_i (b_i^e - a_i^e)/e, e = 2k+2chi
        auto log_inv = [&](double e) {
            double acc = 0.0;
            for (auto [a, b] : p.intervals) acc += std::pow(b, e) - std::pow(a, e);
            return std::log(2.0 * kPi * acc / e);
        };
        if (x == cplx{}) return {std::exp(-log_inv(2.0 * p.chi)), 0.0, 1};
        auto coef = [&](int k) { return -log_inv(2.0 * k + 2.0 * p.chi); };
        const double rho = std::abs(x) / (R * R);
        const double am = p.intervals.back().first / R;
        // a_k <= e R^{-e} / (2 pi (1 - am^e)), e = 2k+2chi, and am^e decreases in k.
        auto tail = [&](int K) {
            const double eK = 2.0 * K + 2.0 * p.chi;
            const double d = 1.0 - std::pow(am, eK);
            const double g = std::pow(rho, K);
            const double s = 2.0 * ((K + p.chi) * g / (1.0 - rho) + g * rho / ((1.0 - rho) * (1.0 - rho)));
            return s * std::pow(R, -2.0 * p.chi) / (2.0 * kPi * d);
        };
        return power_series(x, coef, tail);
    }

    SeriesValue operator()(const limit::EdgeHard&) const {
        return {limit_edge_kernel_hard(z + std::conj(w)) / kPi, 0.0, 0};
    }
    SeriesValue operator()(const limit::EdgeE& p) const { return {limit_edge_kernel_E(p.q, p.Q, z, w), 0.0, 0}; }
    SeriesValue operator()(const limit::BergmanDisk&) const {
        domain_error_if(!(std::abs(z) < 1.0 && std::abs(w) < 1.0), "Bergman disk needs |z|,|w| < 1");
        const cplx d = 1.0 - z * std::conj(w);
        return {1.0 / (kPi * d * d), 0.0, 0};
    }
    SeriesValue operator()(const limit::BergmanHalfplane&) const {
        domain_error_if(!(z.real() < 0.0 && w.real() < 0.0), "half-plane Bergman needs Re z, Re w < 0");
        const cplx s = z + std::conj(w);
        return {1.0 / (kPi * s * s), 0.0, 0};
    }
    SeriesValue operator()(const limit::GafF&) const { return {gaf_covariance(z, w), 0.0, 0}; }
};

}  // namespace

void validate(const LimitKernelSpec& spec) { std::visit(Validator{}, spec); }

std::string name(const LimitKernelSpec& spec) { return std::visit(Namer{}, spec); }

SeriesValue eval_limit_kernel_series(const LimitKernelSpec& spec, cplx z, cplx w) {
    validate(spec);
    reject_nan(z, w);
    return std::visit(Evaluator{z, w}, spec);
}

cplx eval_limit_kernel(const LimitKernelSpec& spec, cplx z, cplx w) {
    return eval_limit_kernel_series(spec, z, w).value;
}

// ------------------------------------------------------------------ inner/outer

Block parse_block(const std::string& s) {
    if (s == "II") return Block::II;
    if (s == "IO") return Block::IO;
    if (s == "OI") return Block::OI;
    if (s == "OO") return Block::OO;
    throw std::invalid_argument("unknown block '" + s + "' (expected II, IO, OI or OO)");
}

InnerOuterSpec circle_log_inner_outer(int n) {
    if (n < 1) throw std::invalid_argument("circle_log_inner_outer: n must be >= 1");
    InnerOuterSpec out;
    out.n = n;
    out.log_b.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out.log_b.push_back(-std::log(2.0 * kPi * (1.0 / (2.0 * k + 2.0) + 1.0 / (2.0 * n - 2.0 * k))));
    return out;
}

InnerOuterSpec background_inner_outer(const RadialMeasureSpec& nu, int n) {
    nu.validate();
    const auto bp = nu.breakpoints();
    if (bp.empty()) throw std::invalid_argument("background_inner_outer: empty measure");
    InnerOuterSpec out;
    out.n = n;
    out.R = bp.front();
    out.R_bar = bp.back();
    out.C = background_potential(nu, out.R_bar) - std::log(out.R_bar);
    out.log_b = radial_coefficients(GasSpec(n, 1.0, background(nu)));
    return out;
}

cplx inner_outer_blocks(const InnerOuterSpec& spec, cplx z, cplx w, Block block) {
    reject_nan(z, w);
    const int n = spec.n;
    if (static_cast<int>(spec.log_b.size()) != n) throw std::invalid_argument("inner_outer_blocks: need n coefficients");
    const bool z_inner = block == Block::II || block == Block::IO;
    const bool w_inner = block == Block::II || block == Block::OI;
    const double rz = z_inner ? spec.R : 1.0 / spec.R_bar;
    const double rw = w_inner ? spec.R : 1.0 / spec.R_bar;
    if (!(std::abs(z) < rz && std::abs(w) < rw))
        throw std::domain_error("inner_outer_blocks: point outside the block's disk");
    const double shift = -(n + 1.0) * spec.C * ((z_inner ? 0 : 1) + (w_inner ? 0 : 1));
    const cplx wb = std::conj(w);
    std::vector<LogTerm> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int ez = z_inner ? k : n - 1 - k;
        const int ew = w_inner ? k : n - 1 - k;
        LogTerm a, b;
        if (!log_power(z, ez, a) || !log_power(wb, ew, b)) continue;
        terms.push_back({spec.log_b[static_cast<std::size_t>(k)] + shift + a.log_mag + b.log_mag, a.phase + b.phase});
    }
    return assemble(terms);
}

cplx union_kernel(const KernelFn& K1, const KernelFn& K2, const TaggedPoint& x, const TaggedPoint& y) {
    for (int p : {x.part, y.part})
        if (p != 1 && p != 2) throw std::invalid_argument("union_kernel: part tag must be 1 or 2");
    if (x.part != y.part) return {0.0, 0.0};
    return x.part == 1 ? K1(x.z, y.z) : K2(x.z, y.z);
}

}  // namespace circlegas
