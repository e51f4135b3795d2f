#include "circlegas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace circlegas::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace

Estimate gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, std::vector<double> breakpoints,
                                  const AdaptiveOptions& options) {
    if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    auto worse = [](const Panel& x, const Panel& y) { return x.est.error < y.est.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);

    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Panel p{breakpoints[i], breakpoints[i + 1], gauss_kronrod15(f, breakpoints[i], breakpoints[i + 1])};
        total += p.est.value;
        total_err += p.est.error;
        heap.push(p);
    }

    AdaptiveResult result;
    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
    while (total_err > target() && static_cast<int>(heap.size()) < options.max_panels) {
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
        heap.pop();
        Panel left{worst.a, mid, gauss_kronrod15(f, worst.a, mid)};
        Panel right{mid, worst.b, gauss_kronrod15(f, mid, worst.b)};
        total += left.est.value + right.est.value - worst.est.value;
        total_err += left.est.error + right.est.error - worst.est.error;
        heap.push(left);
        heap.push(right);
    }

    result.panels.reserve(heap.size());
    total = 0.0;
    total_err = 0.0;
    while (!heap.empty()) {
        result.panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(result.panels.begin(), result.panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : result.panels) {
        total += p.est.value;
        total_err += p.est.error;
    }
    result.value = total;
    result.error = total_err;
    result.converged = total_err <= target();
    return result;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, const AdaptiveOptions& options) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double x = a + t / one_minus;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate_adaptive(g, 0.0, 1.0, options).value;
}

}  // namespace circlegas::quad
