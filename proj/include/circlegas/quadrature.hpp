#pragma once

#include <functional>
#include <vector>

namespace circlegas::quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1,1] (Newton iteration on the three-term recurrence).
Rule gauss_legendre(int n);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// One 15-point Gauss-Kronrod panel; error is |K15 - G7|.
Estimate gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

struct Panel {
    double a = 0.0;
    double b = 0.0;
    Estimate est;
};

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    std::vector<Panel> panels;  // sorted by a
    bool converged = false;
};

struct AdaptiveOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_panels = 20000;
};

/// Globally adaptive GK15 on [a,b] starting from the given breakpoints
/// (must include a and b, sorted). Bisects the worst panel until
/// sum(err) <= max(abs_tol, rel_tol * |sum(value)|).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  std::vector<double> breakpoints,
                                  const AdaptiveOptions& options = {});

inline AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                         const AdaptiveOptions& options = {}) {
    return integrate_adaptive(f, std::vector<double>{a, b}, options);
}

/// Integral over [a, +inf) via the substitution x = a + t/(1-t).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const AdaptiveOptions& options = {});

}  // namespace circlegas::quad
