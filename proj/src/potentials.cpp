#include "circlegas/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace circlegas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

std::string to_string(Confinement c) {
    switch (c) {
        case Confinement::weak: return "weak";
        case Confinement::strong: return "strong";
        case Confinement::hard: return "hard";
    }
    return "?";
}

// ---------------------------------------------------------------- measures

void RadialMeasureSpec::validate() const {
    double prev = 0.0;
    for (const Atom& a : atoms) {
        require(std::isfinite(a.radius) && a.radius > 0.0, "measure: atom radius must be positive and finite");
        require(a.radius > prev, "measure: atom radii must be strictly increasing");
        require(std::isfinite(a.mass) && a.mass > 0.0, "measure: atom mass must be positive and finite");
        prev = a.radius;
    }
    double prev_end = 0.0;
    for (const DensitySegment& d : density) {
        require(std::isfinite(d.r0) && std::isfinite(d.r1) && d.r0 >= 0.0 && d.r1 > d.r0,
                "measure: density segment needs 0 <= r0 < r1 < inf");
        require(d.r0 >= prev_end, "measure: density segments must be sorted and disjoint");
        require(std::isfinite(d.rate) && d.rate >= 0.0, "measure: density rate must be nonnegative");
        prev_end = d.r1;
    }
}

double RadialMeasureSpec::total_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms) m += a.mass;
    for (const DensitySegment& d : density) m += d.rate * (d.r1 - d.r0);
    return m;
}

double RadialMeasureSpec::mass_inside(double s) const {
    double m = 0.0;
    for (const Atom& a : atoms)
        if (s > a.radius) m += a.mass;
    for (const DensitySegment& d : density) m += d.rate * std::clamp(s - d.r0, 0.0, d.r1 - d.r0);
    return m;
}

std::vector<double> RadialMeasureSpec::breakpoints() const {
    std::vector<double> out;
    for (const Atom& a : atoms) out.push_back(a.radius);
    for (const DensitySegment& d : density) {
        if (d.r0 > 0.0) out.push_back(d.r0);
        out.push_back(d.r1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double background_potential(const RadialMeasureSpec& nu, double r) {
    if (std::isnan(r) || r <= 0.0) throw std::domain_error("background_potential: r must be positive");
    if (r == kInf) return nu.total_mass() > 0.0 ? kInf : 0.0;
    const double lo = std::min(1.0, r), hi = std::max(1.0, r);
    std::vector<double> cuts{lo};
    for (double b : nu.breakpoints())
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double u = cuts[i], v = cuts[i + 1];
        if (v <= u) continue;
        // nu(D_s) = A + B s on (u, v)
        const double mid = 0.5 * (u + v);
        double slope = 0.0;
        for (const DensitySegment& d : nu.density)
            if (d.r0 <= u && d.r1 >= v) slope += d.rate;
        const double intercept = nu.mass_inside(mid) - slope * mid;
        total += intercept * std::log(v / u) + slope * (v - u);
    }
    return r >= 1.0 ? total : -total;
}

// ---------------------------------------------------------------- potential

RadialPotential::RadialPotential(Family f) : family_(std::move(f)) {
    std::visit(overloaded{
                   [](const family::CircleLog&) {},
                   [](const family::PowerQ& p) {
                       require(std::isfinite(p.q) && p.q >= 1.0, "power_q: q must be >= 1");
                       require(std::isfinite(p.inner_q) && p.inner_q >= 0.0, "power_q: inner_q must be >= 0");
                   },
                   [](const family::HardEdgeFlat& p) {
                       require(p.R >= 0.0 && p.R <= 1.0, "hard_edge_flat: R must lie in [0,1]");
                       require(std::isfinite(p.inner_value) && p.inner_value >= 0.0,
                               "hard_edge_flat: inner_value must be finite and >= 0");
                   },
                   [](const family::Annulus& p) {
                       require(std::isfinite(p.R) && p.R > 1.0, "annulus: R must be > 1");
                       require(std::isfinite(p.tail_q) && p.tail_q >= 1.0, "annulus: tail_q must be >= 1");
                   },
                   [](const family::Background& p) { p.nu.validate(); },
                   [](const family::PowerTail& p) {
                       require(p.alpha > 0.0, "power_tail: alpha must be > 0");
                       require(p.gamma > 0.0, "power_tail: gamma must be > 0");
                       require(p.l_plus > 0.0, "power_tail: L+ must be > 0");
                       require(p.l_minus >= 1.0, "power_tail: L- must be >= 1");
                   },
                   [](const family::Tabulated& p) {
                       require(p.r.size() >= 2 && p.r.size() == p.v.size(),
                               "tabulated: need at least two (r, v) pairs of equal length");
                       require(p.r.front() >= 0.0, "tabulated: radii must be >= 0");
                       for (std::size_t i = 1; i < p.r.size(); ++i)
                           require(p.r[i] > p.r[i - 1], "tabulated: radii must be strictly increasing");
                       for (double v : p.v) require(std::isfinite(v), "tabulated: values must be finite");
                   },
                   [](const family::Inverted& p) {
                       require(p.base != nullptr, "inverted: missing base potential");
                       require(p.chi >= 0.0, "inverted: chi must be >= 0");
                   },
               },
               family_);
}

ExtReal RadialPotential::operator()(double r) const {
    if (std::isnan(r) || r < 0.0) throw std::domain_error("potential: r must be >= 0");
    return std::visit(
        overloaded{
            [r](const family::CircleLog&) -> ExtReal { return r > 1.0 ? std::log(r) : 0.0; },
            [r](const family::PowerQ& p) -> ExtReal {
                if (r > 1.0) return p.q * std::log(r);
                if (p.inner_q == 0.0) return 0.0;
                if (r == 0.0) return ExtReal::infinity();
                return -p.inner_q * std::log(r);
            },
            [r](const family::HardEdgeFlat& p) -> ExtReal {
                if (r > 1.0) return ExtReal::infinity();
                return r < p.R ? p.inner_value : 0.0;
            },
            [r](const family::Annulus& p) -> ExtReal {
                if (r <= 1.0) return 0.0;
                if (r <= p.R) return std::log(r);
                return std::log(p.R) + p.tail_q * std::log(r / p.R);
            },
            [r](const family::Background& p) -> ExtReal {
                if (r == 0.0) throw std::domain_error("background potential: r = 0");
                return background_potential(p.nu, r);
            },
            [r](const family::PowerTail& p) -> ExtReal {
                if (r < 1.0) return (p.l_minus - 1.0) * (1.0 - r);
                const double x = 1.0 / r;
                return std::log(r) + std::pow(r, -p.alpha) * (1.0 - x) * (p.gamma - (p.gamma - p.l_plus) * x);
            },
            [r](const family::Tabulated& p) -> ExtReal {
                if (r < p.r.front() || r > p.r.back())
                    throw std::domain_error("tabulated potential: r = " + fmt(r) + " outside the grid");
                const auto it = std::upper_bound(p.r.begin(), p.r.end(), r);
                if (it == p.r.end()) return p.v.back();
                const std::size_t j = static_cast<std::size_t>(it - p.r.begin());
                const double t = (r - p.r[j - 1]) / (p.r[j] - p.r[j - 1]);
                return p.v[j - 1] + t * (p.v[j] - p.v[j - 1]);
            },
            [r](const family::Inverted& p) -> ExtReal {
                if (r == 0.0) throw std::domain_error("inverted potential: r = 0");
                const ExtReal v = (*p.base)(1.0 / r);
                if (v.is_infinite()) return v;
                return v.raw() + std::log(r);
            },
        },
        family_);
}

Reference RadialPotential::reference() const {
    return std::holds_alternative<family::Inverted>(family_) ? Reference::lambda_chi : Reference::lebesgue;
}

std::pair<double, double> RadialPotential::support() const {
    return std::visit(overloaded{
                          [](const family::HardEdgeFlat&) { return std::pair{0.0, 1.0}; },
                          [](const family::Tabulated& p) { return std::pair{p.r.front(), p.r.back()}; },
                          [](const family::Inverted& p) {
                              const auto [lo, hi] = p.base->support();
                              return std::pair{hi == kInf ? 0.0 : 1.0 / hi, lo == 0.0 ? kInf : 1.0 / lo};
                          },
                          [](const auto&) { return std::pair{0.0, kInf}; },
                      },
                      family_);
}

Confinement RadialPotential::confinement() const {
    return std::visit(overloaded{
                          [](const family::CircleLog&) { return Confinement::weak; },
                          [](const family::PowerQ& p) { return p.q > 1.0 ? Confinement::strong : Confinement::weak; },
                          [](const family::HardEdgeFlat&) { return Confinement::hard; },
                          [](const family::Annulus& p) {
                              return p.tail_q > 1.0 ? Confinement::strong : Confinement::weak;
                          },
                          [](const family::Background& p) {
                              return p.nu.total_mass() > 1.0 ? Confinement::strong : Confinement::weak;
                          },
                          [](const family::PowerTail&) { return Confinement::weak; },
                          [](const family::Tabulated& p) { return p.confinement; },
                          [this](const family::Inverted&) {
                              if (support().second < kInf) return Confinement::hard;
                              const auto pieces = log_linear_pieces();
                              if (pieces && pieces->back().q > 1.0) return Confinement::strong;
                              return Confinement::weak;
                          },
                      },
                      family_);
}

bool RadialPotential::is_circle_family() const {
    return std::visit(overloaded{
                          [](const family::Background&) { return false; },
                          [](const family::Tabulated&) { return false; },
                          [](const family::Inverted& p) { return p.base->is_circle_family(); },
                          [](const auto&) { return true; },
                      },
                      family_);
}

std::string RadialPotential::name() const {
    return std::visit(
        overloaded{
            [](const family::CircleLog&) -> std::string { return "circle_log"; },
            [](const family::PowerQ& p) -> std::string {
                std::string s = "power_q(q=" + fmt(p.q);
                if (p.inner_q != 0.0) s += ",inner_q=" + fmt(p.inner_q);
                return s + ")";
            },
            [](const family::HardEdgeFlat& p) -> std::string {
                return "hard_edge_flat(R=" + fmt(p.R) + ",inner=" + fmt(p.inner_value) + ")";
            },
            [](const family::Annulus& p) -> std::string {
                return "annulus(R=" + fmt(p.R) + ",tail_q=" + fmt(p.tail_q) + ")";
            },
            [](const family::Background& p) -> std::string {
                return "background(mass=" + fmt(p.nu.total_mass()) + ")";
            },
            [](const family::PowerTail& p) -> std::string {
                return "power_tail(alpha=" + fmt(p.alpha) + ",gamma=" + fmt(p.gamma) + ",L+=" + fmt(p.l_plus) +
                       ",L-=" + fmt(p.l_minus) + ")";
            },
            [](const family::Tabulated& p) -> std::string {
                return "tabulated(" + std::to_string(p.r.size()) + " points)";
            },
            [](const family::Inverted& p) -> std::string {
                return "inverted(" + p.base->name() + ",chi=" + fmt(p.chi) + ")";
            },
        },
        family_);
}

std::optional<std::vector<LogLinearPiece>> RadialPotential::log_linear_pieces() const {
    using Pieces = std::vector<LogLinearPiece>;
    return std::visit(
        overloaded{
            [](const family::CircleLog&) -> std::optional<Pieces> {
                return Pieces{{0.0, 1.0, 0.0, 0.0}, {1.0, kInf, 0.0, 1.0}};
            },
            [](const family::PowerQ& p) -> std::optional<Pieces> {
                return Pieces{{0.0, 1.0, 0.0, -p.inner_q}, {1.0, kInf, 0.0, p.q}};
            },
            [](const family::HardEdgeFlat& p) -> std::optional<Pieces> {
                Pieces out;
                if (p.R > 0.0) out.push_back({0.0, p.R, p.inner_value, 0.0});
                if (p.R < 1.0) out.push_back({p.R, 1.0, 0.0, 0.0});
                return out;
            },
            [](const family::Annulus& p) -> std::optional<Pieces> {
                const double lr = std::log(p.R);
                return Pieces{{0.0, 1.0, 0.0, 0.0}, {1.0, p.R, 0.0, 1.0}, {p.R, kInf, lr - p.tail_q * lr, p.tail_q}};
            },
            [](const family::Background& p) -> std::optional<Pieces> {
                if (!p.nu.density.empty()) return std::nullopt;
                Pieces out;
                if (p.nu.atoms.empty()) return Pieces{{0.0, kInf, 0.0, 0.0}};
                double left = 0.0, mass = 0.0;
                for (const Atom& a : p.nu.atoms) {
                    const double va = background_potential(p.nu, a.radius);
                    out.push_back({left, a.radius, va - mass * std::log(a.radius), mass});
                    mass += a.mass;
                    left = a.radius;
                }
                const double vl = background_potential(p.nu, left);
                out.push_back({left, kInf, vl - mass * std::log(left), mass});
                return out;
            },
            [](const family::PowerTail&) -> std::optional<Pieces> { return std::nullopt; },
            [](const family::Tabulated&) -> std::optional<Pieces> { return std::nullopt; },
            [](const family::Inverted& p) -> std::optional<Pieces> {
                auto base = p.base->log_linear_pieces();
                if (!base) return std::nullopt;
                Pieces out;
                for (auto it = base->rbegin(); it != base->rend(); ++it) {
                    const double a = it->b == kInf ? 0.0 : 1.0 / it->b;
                    const double b = it->a == 0.0 ? kInf : 1.0 / it->a;
                    out.push_back({a, b, it->c, 1.0 - it->q});
                }
                return out;
            },
        },
        family_);
}

std::vector<double> RadialPotential::knots() const {
    std::vector<double> out = std::visit(
        overloaded{
            [](const family::HardEdgeFlat& p) {
                std::vector<double> k{1.0};
                if (p.R > 0.0) k.push_back(p.R);
                return k;
            },
            [](const family::Annulus& p) { return std::vector<double>{1.0, p.R}; },
            [](const family::Background& p) {
                auto k = p.nu.breakpoints();
                k.push_back(1.0);
                return k;
            },
            [](const family::Tabulated& p) { return p.r; },
            [](const family::Inverted& p) {
                std::vector<double> k;
                for (double x : p.base->knots())
                    if (x > 0.0 && x < kInf) k.push_back(1.0 / x);
                return k;
            },
            [](const auto&) { return std::vector<double>{1.0}; },
        },
        family_);
    std::erase_if(out, [](double x) { return !(x > 0.0 && x < kInf); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RadialPotential circle_log() { return RadialPotential(family::CircleLog{}); }
RadialPotential power_q(double q, double inner_q) { return RadialPotential(family::PowerQ{q, inner_q}); }
RadialPotential hard_edge_flat(double R, double inner_value) {
    return RadialPotential(family::HardEdgeFlat{R, inner_value});
}
RadialPotential annulus(double R, double tail_q) { return RadialPotential(family::Annulus{R, tail_q}); }
RadialPotential background(RadialMeasureSpec nu) { return RadialPotential(family::Background{std::move(nu)}); }
RadialPotential power_tail(double alpha, double gamma, double l_plus, double l_minus) {
    return RadialPotential(family::PowerTail{alpha, gamma, l_plus, l_minus});
}
RadialPotential tabulated(std::vector<double> r, std::vector<double> v, Confinement c) {
    return RadialPotential(family::Tabulated{std::move(r), std::move(v), c});
}

ExtReal eval_potential(const RadialPotential& V, double r) { return V(r); }

RadialPotential invert_potential(const RadialPotential& V, double chi) {
    if (const auto* inv = std::get_if<family::Inverted>(&V.family())) return *inv->base;
    return RadialPotential(family::Inverted{std::make_shared<const RadialPotential>(V), chi});
}

CircleReport check_circle_conditions(const RadialPotential& V, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("check_circle_conditions: empty grid");
    CircleReport report;
    auto add = [&](double r, double value, double bound, std::string what) {
        report.pass = false;
        report.violations.push_back({r, value, bound, std::move(what)});
    };
    const ExtReal at_one = V(1.0);
    if (at_one.is_infinite() || std::abs(at_one.raw()) > 1e-9) add(1.0, at_one.raw(), 0.0, "V(1) != 0");
    for (double r : grid) {
        ExtReal v;
        try {
            v = V(r);
        } catch (const std::domain_error&) {
            add(r, std::numeric_limits<double>::quiet_NaN(), 0.0, "V undefined");
            continue;
        }
        const double bound = r > 1.0 ? std::log(r) : 0.0;
        if (v.raw() < bound) add(r, v.raw(), bound, "V(r) < max{0, log r}");
    }
    return report;
}

}  // namespace circlegas
