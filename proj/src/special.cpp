#include "circlegas/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circlegas {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// sum_{n>=0} x^n / ((s+1)...(s+n)); converges for all x, fast for x < s+1.
double gamma_series(double s, double x) {
    double term = 1.0, sum = 1.0, ap = s;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    throw std::runtime_error("regularized_gamma: series did not converge");
}

// Continued fraction for Gamma(s,x) e^x x^{-s} (modified Lentz).
double gamma_continued_fraction(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw std::runtime_error("regularized_gamma: continued fraction did not converge");
}

void check_args(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("incomplete gamma: s must be positive");
    if (!(x >= 0.0)) throw std::domain_error("incomplete gamma: x must be nonnegative");
}
}  // namespace

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log1m_exp(double x) {
    if (x < 0.0) throw std::domain_error("log1m_exp: negative argument");
    if (x == 0.0) return kNegInf;
    return x < std::log(2.0) ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

double log_sum_exp(std::span<const double> values) {
    double hi = kNegInf;
    for (double v : values) hi = std::max(hi, v);
    if (hi == kNegInf) return kNegInf;
    if (hi == std::numeric_limits<double>::infinity()) return hi;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - hi);
    return hi + std::log(sum);
}

IncompleteGamma regularized_gamma(double s, double x) {
    check_args(s, x);
    if (x == 0.0) return {0.0, 1.0};
    if (x < s + 1.0) {
        const double log_prefactor = s * std::log(x) - x - std::lgamma(s + 1.0);
        const double p = std::exp(log_prefactor) * gamma_series(s, x);
        return {p, 1.0 - p};
    }
    const double log_prefactor = s * std::log(x) - x - std::lgamma(s);
    const double q = std::exp(log_prefactor) * gamma_continued_fraction(s, x);
    return {1.0 - q, q};
}

double log_upper_incomplete_gamma(double s, double x) {
    check_args(s, x);
    if (x == 0.0) return std::lgamma(s);
    if (x < s + 1.0) {
        const IncompleteGamma g = regularized_gamma(s, x);
        return std::lgamma(s) + std::log(g.q);
    }
    return s * std::log(x) - x + std::log(gamma_continued_fraction(s, x));
}

double upper_incomplete_gamma(double s, double x) { return std::exp(log_upper_incomplete_gamma(s, x)); }

}  // namespace circlegas
