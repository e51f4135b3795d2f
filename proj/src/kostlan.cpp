#include "circlegas/kostlan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "circlegas/rng.hpp"
#include "circlegas/special.hpp"

namespace circlegas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;
constexpr double kTruncation = 80.0;  // drop density below exp(-80) of the peak
constexpr double kScanHalfWidth = 40.0;
constexpr double kScanStep = 0.02;
constexpr double kMaxLogRadius = 700.0;

// log int_a^b r^{p1-1} dr; NaN when the integral diverges.
double log_segment(double p1, double a, double b) {
    if (b <= a) return kNegInf;
    if (a == 0.0 && b == kInf) return std::numeric_limits<double>::quiet_NaN();
    if (a == 0.0) return p1 > 0.0 ? p1 * std::log(b) - std::log(p1) : std::numeric_limits<double>::quiet_NaN();
    if (b == kInf) return p1 < 0.0 ? p1 * std::log(a) - std::log(-p1) : std::numeric_limits<double>::quiet_NaN();
    const double L = std::log(b / a);
    if (p1 == 0.0) return std::log(L);
    if (p1 > 0.0) return p1 * std::log(b) + std::log(-std::expm1(-p1 * L) / p1);
    return p1 * std::log(a) + std::log(std::expm1(p1 * L) / p1);
}

}  // namespace

DivergenceError::DivergenceError(int k_, const std::string& detail)
    : std::domain_error("component k=" + std::to_string(k_) + " is not integrable: " + detail), k(k_) {}

GasSpec::GasSpec(int n_, double chi_, RadialPotential potential_, double measure_exponent_)
    : n(n_), chi(chi_), potential(std::move(potential_)), measure_exponent(measure_exponent_) {
    if (n < 1) throw std::invalid_argument("GasSpec: n must be >= 1");
    if (!(chi >= 0.0) || !std::isfinite(chi)) throw std::invalid_argument("GasSpec: chi must be finite and >= 0");
    if (!std::isfinite(measure_exponent) || measure_exponent <= -2.0)
        throw std::invalid_argument("GasSpec: measure exponent must be finite and > -2");
    // Extreme components are the most fragile at 0 (k=0) and at infinity (k=n-1).
    (void)ComponentLaw(*this, n - 1);
    if (n > 1) (void)ComponentLaw(*this, 0);
}

GasSpec lambda_gas(int n, double chi, RadialPotential potential) {
    return GasSpec(n, chi, std::move(potential), 2.0 * (chi - 1.0));
}

// ---------------------------------------------------------------- ComponentLaw

ComponentLaw::ComponentLaw(const GasSpec& spec, int k, Method method)
    : potential_(spec.potential), beta_(spec.beta()), power_(spec.exponent(k) + 1.0), k_(k) {
    if (k < 0 || k >= spec.n) throw std::out_of_range("ComponentLaw: k outside [0, n)");
    const auto pieces = potential_.log_linear_pieces();
    if (method == Method::closed_form && !pieces)
        throw std::invalid_argument("ComponentLaw: no closed form for " + potential_.name());
    if (pieces && method != Method::quadrature)
        build_closed_form(*pieces);
    else
        build_quadrature();
}

void ComponentLaw::build_closed_form(const std::vector<LogLinearPiece>& pieces) {
    closed_ = true;
    std::vector<double> logs;
    for (const LogLinearPiece& p : pieces) {
        if (!(p.b > p.a)) continue;
        const double p1 = power_ - beta_ * p.q;
        const double ls = log_segment(p1, p.a, p.b);
        if (std::isnan(ls)) {
            throw DivergenceError(k_, "exponent " + std::to_string(p1) + " on [" + std::to_string(p.a) + ", " +
                                          std::to_string(p.b) + ")");
        }
        segments_.push_back({p.a, p.b, p.c, p1, 0.0, 0.0, 0.0});
        logs.push_back(-beta_ * p.c + ls);
    }
    if (segments_.empty()) throw DivergenceError(k_, "empty support");
    log_mass_ = log_sum_exp(logs);
    if (!std::isfinite(log_mass_)) throw DivergenceError(k_, "zero or infinite total mass");
    for (std::size_t i = 0; i < segments_.size(); ++i) segments_[i].mass = std::exp(logs[i] - log_mass_);
    double acc = 0.0;
    for (Segment& s : segments_) {
        s.left = acc;
        acc += s.mass;
    }
    acc = 0.0;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
        it->right = acc;
        acc += it->mass;
    }
}

double ComponentLaw::log_density_s(double s) const {
    const double r = std::exp(s);
    const auto [lo, hi] = potential_.support();
    if (r < lo || r > hi || r == 0.0 || r == kInf) return kNegInf;
    const ExtReal v = potential_(r);
    if (v.is_infinite()) return kNegInf;
    return power_ * s - beta_ * v.raw();
}

void ComponentLaw::build_quadrature() {
    closed_ = false;
    const auto [lo, hi] = potential_.support();
    const double s_min = lo > 0.0 ? std::log(lo) : -kMaxLogRadius;
    const double s_max = hi < kInf ? std::log(hi) : kMaxLogRadius;

    std::vector<double> grid;
    const double g0 = std::max(s_min, -kScanHalfWidth), g1 = std::min(s_max, kScanHalfWidth);
    for (double s = g0; s < g1; s += kScanStep) grid.push_back(s);
    grid.push_back(g1);
    std::vector<double> knots_s;
    for (double x : potential_.knots()) {
        const double s = std::log(x);
        if (s > s_min && s < s_max) knots_s.push_back(s);
    }
    grid.insert(grid.end(), knots_s.begin(), knots_s.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> ell(grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ell[i] = log_density_s(grid[i]);
        if (ell[i] > ell[best]) best = i;
    }
    if (ell[best] == kNegInf) throw DivergenceError(k_, "density vanishes on the scan window");

    // Golden-section refinement of the peak between the neighbouring grid points.
    double peak = grid[best], peak_val = ell[best];
    {
        double a = grid[best == 0 ? 0 : best - 1], b = grid[std::min(best + 1, grid.size() - 1)];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = log_density_s(x1), f2 = log_density_s(x2);
        for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = log_density_s(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = log_density_s(x1);
            }
        }
        const double xm = 0.5 * (a + b), fm = log_density_s(xm);
        if (fm > peak_val) peak = xm, peak_val = fm;
    }
    shift_ = peak_val;
    const double threshold = peak_val - kTruncation;
    auto above = [&](double s) { return log_density_s(s) >= threshold; };
    auto crossing = [&](double inside, double outside) {
        for (int it = 0; it < 200 && std::abs(inside - outside) > 1e-12; ++it) {
            const double mid = 0.5 * (inside + outside);
            (above(mid) ? inside : outside) = mid;
        }
        return inside;
    };

    // Left end of the truncated support.
    double s_left;
    {
        std::size_t first = 0;
        while (first < grid.size() && ell[first] < threshold) ++first;
        if (first > 0) {
            s_left = crossing(grid[first], grid[first - 1]);
        } else if (grid[0] <= s_min) {
            s_left = s_min;
        } else {
            double inside = grid[0], step = 1.0, outside = inside - step;
            while (outside > s_min && above(outside)) {
                inside = outside;
                step *= 2.0;
                outside = std::max(s_min, inside - step);
            }
            if (above(outside)) {
                if (s_min <= -kMaxLogRadius) throw DivergenceError(k_, "mass does not decay at r -> 0");
                s_left = s_min;
            } else {
                s_left = crossing(inside, outside);
            }
        }
    }
    double s_right;
    {
        std::size_t last = grid.size() - 1;
        while (last > 0 && ell[last] < threshold) --last;
        if (last + 1 < grid.size()) {
            s_right = crossing(grid[last], grid[last + 1]);
        } else if (grid.back() >= s_max) {
            s_right = s_max;
        } else {
            double inside = grid.back(), step = 1.0, outside = inside + step;
            while (outside < s_max && above(outside)) {
                inside = outside;
                step *= 2.0;
                outside = std::min(s_max, inside + step);
            }
            if (above(outside)) {
                if (s_max >= kMaxLogRadius) throw DivergenceError(k_, "mass does not decay at r -> infinity");
                s_right = s_max;
            } else {
                s_right = crossing(inside, outside);
            }
        }
    }

    std::vector<double> breaks{s_left, s_right};
    if (peak > s_left && peak < s_right) breaks.push_back(peak);
    for (double s : knots_s)
        if (s > s_left && s < s_right) breaks.push_back(s);
    auto f = [this](double s) {
        const double l = log_density_s(s);
        return l == kNegInf ? 0.0 : std::exp(l - shift_);
    };
    quad::AdaptiveOptions opts;
    opts.rel_tol = 1e-12;
    const quad::AdaptiveResult res = quad::integrate_adaptive(f, breaks, opts);
    if (!(res.value > 0.0) || !std::isfinite(res.value)) throw DivergenceError(k_, "quadrature produced no mass");
    norm_ = res.value;
    log_mass_ = shift_ + std::log(norm_);
    for (const quad::Panel& p : res.panels) segments_.push_back({p.a, p.b, 0.0, 0.0, p.est.value / norm_, 0.0, 0.0});
    double acc = 0.0;
    for (Segment& s : segments_) {
        s.left = acc;
        acc += s.mass;
    }
    acc = 0.0;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
        it->right = acc;
        acc += it->mass;
    }
}

double ComponentLaw::partial_left(const Segment& seg, double x) const {
    if (x <= seg.a) return 0.0;
    if (x >= seg.b) return seg.mass;
    if (closed_) return std::exp(-beta_ * seg.c + log_segment(seg.p1, seg.a, x) - log_mass_);
    auto f = [this](double s) {
        const double l = log_density_s(s);
        return l == kNegInf ? 0.0 : std::exp(l - shift_);
    };
    return quad::gauss_kronrod15(f, seg.a, x).value / norm_;
}

double ComponentLaw::partial_right(const Segment& seg, double x) const {
    if (x >= seg.b) return 0.0;
    if (x <= seg.a) return seg.mass;
    if (closed_) return std::exp(-beta_ * seg.c + log_segment(seg.p1, x, seg.b) - log_mass_);
    auto f = [this](double s) {
        const double l = log_density_s(s);
        return l == kNegInf ? 0.0 : std::exp(l - shift_);
    };
    return quad::gauss_kronrod15(f, x, seg.b).value / norm_;
}

std::size_t ComponentLaw::locate(double x) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const Segment& s) { return v < s.a; });
    if (it == segments_.begin()) return 0;
    return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

double ComponentLaw::cdf(double m) const {
    if (std::isnan(m)) throw std::domain_error("component cdf: NaN argument");
    if (m <= 0.0) return 0.0;
    const double x = closed_ ? m : std::log(m);
    if (x <= segments_.front().a) return 0.0;
    if (x >= segments_.back().b) return 1.0;
    const Segment& seg = segments_[locate(x)];
    const double left = seg.left + partial_left(seg, x);
    if (left <= 0.5) return left;
    return std::clamp(1.0 - (seg.right + partial_right(seg, x)), 0.0, 1.0);
}

double ComponentLaw::survival(double m) const {
    if (std::isnan(m)) throw std::domain_error("component survival: NaN argument");
    if (m <= 0.0) return 1.0;
    const double x = closed_ ? m : std::log(m);
    if (x <= segments_.front().a) return 1.0;
    if (x >= segments_.back().b) return 0.0;
    const Segment& seg = segments_[locate(x)];
    const double right = seg.right + partial_right(seg, x);
    if (right <= 0.5) return right;
    return std::clamp(1.0 - (seg.left + partial_left(seg, x)), 0.0, 1.0);
}

double ComponentLaw::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    const bool from_left = u < 0.5;
    const double target = from_left ? u : 1.0 - u;

    std::size_t i = 0;
    if (from_left) {
        auto it = std::upper_bound(segments_.begin(), segments_.end(), target,
                                   [](double v, const Segment& s) { return v < s.left; });
        i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - segments_.begin()) - 1));
        while (i + 1 < segments_.size() && segments_[i].mass == 0.0) ++i;
    } else {
        // right is nonincreasing; first segment with right <= target
        auto it = std::partition_point(segments_.begin(), segments_.end(),
                                       [target](const Segment& s) { return s.right > target; });
        i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - segments_.begin(),
                                                              static_cast<std::ptrdiff_t>(segments_.size()) - 1));
        while (i > 0 && segments_[i].mass == 0.0) --i;
    }
    const Segment& seg = segments_[i];
    const double frac = std::clamp(target - (from_left ? seg.left : seg.right), 0.0, seg.mass);

    if (closed_) {
        const double log_t = std::log(frac) + log_mass_ + beta_ * seg.c;
        const double p1 = seg.p1;
        double x;
        if (frac == 0.0) {
            x = from_left ? seg.a : seg.b;
        } else if (p1 == 0.0) {
            x = from_left ? seg.a * std::exp(std::exp(log_t)) : seg.b * std::exp(-std::exp(log_t));
        } else if (from_left) {
            if (seg.a == 0.0) {
                x = std::exp((std::log(p1) + log_t) / p1);
            } else {
                const double arg = std::copysign(std::exp(std::log(std::abs(p1)) + log_t - p1 * std::log(seg.a)), p1);
                x = std::exp(std::log(seg.a) + std::log1p(arg) / p1);
            }
        } else {
            if (seg.b == kInf) {
                x = std::exp((std::log(-p1) + log_t) / p1);
            } else {
                const double arg =
                    -std::copysign(std::exp(std::log(std::abs(p1)) + log_t - p1 * std::log(seg.b)), p1);
                x = std::exp(std::log(seg.b) + std::log1p(arg) / p1);
            }
        }
        return std::clamp(x, seg.a, seg.b);
    }

    // Safeguarded Newton in s = log r inside the panel.
    double lo = seg.a, hi = seg.b;
    double s = seg.mass > 0.0 ? seg.a + (seg.b - seg.a) * (frac / seg.mass) : 0.5 * (seg.a + seg.b);
    if (!from_left) s = seg.b - (seg.b - seg.a) * (seg.mass > 0.0 ? frac / seg.mass : 0.5);
    for (int it = 0; it < 200; ++it) {
        // h increasing in s
        const double h = from_left ? partial_left(seg, s) - frac : frac - partial_right(seg, s);
        if (h == 0.0) return std::exp(s);
        (h > 0.0 ? hi : lo) = s;
        const double l = log_density_s(s);
        const double dh = l == kNegInf ? 0.0 : std::exp(l - shift_) / norm_;
        double next = dh > 0.0 ? s - h / dh : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        s = next;
        if (step < 1e-12 * std::max(1.0, std::abs(s)) || hi - lo < 1e-13) return std::exp(s);
    }
    throw std::runtime_error("component quantile: no convergence after 200 iterations (k=" + std::to_string(k_) +
                             ")");
}

double quantile_by_bisection(const ComponentLaw& law, double u, double rel_tol) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0,1)");
    // Compare on the side where the tail probability is small, so both tails keep full precision.
    const double v = 1.0 - u;
    auto below = [&](double x) { return u < 0.5 ? law.cdf(x) < u : law.survival(x) > v; };
    double lo = 1.0, hi = 1.0;
    int iter = 0;
    while (!below(lo)) {
        lo *= 0.5;
        if (++iter > 200) throw std::runtime_error("quantile_by_bisection: cannot bracket from below");
    }
    while (below(hi)) {
        hi *= 2.0;
        if (++iter > 200) throw std::runtime_error("quantile_by_bisection: cannot bracket from above");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? lo : hi) = mid;
        if (hi - lo <= rel_tol * hi) return 0.5 * (lo + hi);
    }
    throw std::runtime_error("quantile_by_bisection: no convergence after 200 iterations");
}

double component_cdf(int k, const GasSpec& spec, double m) { return ComponentLaw(spec, k).cdf(m); }
double component_survival(int k, const GasSpec& spec, double m) { return ComponentLaw(spec, k).survival(m); }
double log_component_mass(int k, const GasSpec& spec) { return ComponentLaw(spec, k).log_mass(); }
double sample_component(int k, const GasSpec& spec, double u) { return ComponentLaw(spec, k).quantile(u); }

// ---------------------------------------------------------------- sampler

KostlanSampler::KostlanSampler(GasSpec spec, ComponentLaw::Method method) : spec_(std::move(spec)) {
    laws_.reserve(static_cast<std::size_t>(spec_.n));
    for (int k = 0; k < spec_.n; ++k) laws_.emplace_back(spec_, k, method);
}

std::vector<double> KostlanSampler::sample_from_uniforms(std::span<const double> u) const {
    if (u.size() != laws_.size()) throw std::invalid_argument("sample_from_uniforms: need one uniform per component");
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = laws_[k].quantile(u[k]);
    std::sort(out.begin(), out.end());
    return out;
}

ModuliSample KostlanSampler::sample(std::uint64_t seed, std::uint64_t replica) const {
    const Stream stream(seed, replica, StreamRole::moduli);
    std::vector<double> u(laws_.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = stream.uniform_at(k);
    return {sample_from_uniforms(u), seed, replica};
}

double KostlanSampler::max_cdf(double t) const {
    double log_p = 0.0;
    for (const ComponentLaw& law : laws_) {
        const double F = law.cdf(t);
        if (F <= 0.0) return 0.0;
        log_p += F > 0.5 ? std::log1p(-law.survival(t)) : std::log(F);
    }
    return std::exp(log_p);
}

ModuliSample sample_moduli(const GasSpec& spec, std::uint64_t seed, std::uint64_t replica) {
    return KostlanSampler(spec).sample(seed, replica);
}

// ---------------------------------------------------------------- rescaling

RescaleScheme parse_rescale_scheme(const std::string& name) {
    if (name == "identity") return RescaleScheme::identity;
    if (name == "linear_gumbel") return RescaleScheme::linear_gumbel;
    if (name == "quadratic_hard") return RescaleScheme::quadratic_hard;
    if (name == "power") return RescaleScheme::power;
    if (name == "weak_gumbel") return RescaleScheme::weak_gumbel;
    throw std::invalid_argument("unknown rescale scheme '" + name + "'");
}

std::string to_string(RescaleScheme s) {
    switch (s) {
        case RescaleScheme::identity: return "identity";
        case RescaleScheme::linear_gumbel: return "linear_gumbel";
        case RescaleScheme::quadratic_hard: return "quadratic_hard";
        case RescaleScheme::power: return "power";
        case RescaleScheme::weak_gumbel: return "weak_gumbel";
    }
    return "?";
}

double rescale_extreme(double x, RescaleScheme scheme, const RescaleParams& p) {
    switch (scheme) {
        case RescaleScheme::identity: return x;
        case RescaleScheme::linear_gumbel: return p.n * (x - 1.0 - p.eps);
        case RescaleScheme::quadratic_hard: return p.n * p.n * (1.0 - x);
        case RescaleScheme::power: return std::pow(p.n, -1.0 / p.alpha) * x;
        case RescaleScheme::weak_gumbel: return 2.0 * p.chi * (x - 1.0 - 0.5 * p.eps);
    }
    throw std::invalid_argument("rescale_extreme: unknown scheme");
}

}  // namespace circlegas
