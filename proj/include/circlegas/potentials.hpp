#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "circlegas/extended_real.hpp"

namespace circlegas {

enum class Confinement { weak, strong, hard };
/// Reference measure the potential is meant to be used against.
enum class Reference { lebesgue, lambda_chi };

std::string to_string(Confinement c);

struct Atom {
    double radius = 1.0;
    double mass = 1.0;
};

/// Mass spread uniformly in the radial variable on [r0, r1]:
/// nu(D_s) grows by rate*(s - r0) across the segment.
struct DensitySegment {
    double r0 = 0.0;
    double r1 = 0.0;
    double rate = 0.0;
};

/// A radial positive measure nu made of circle atoms and piecewise-constant
/// radial density. Atoms at radius rho count as inside D_s iff s > rho.
struct RadialMeasureSpec {
    std::vector<Atom> atoms;
    std::vector<DensitySegment> density;

    void validate() const;
    [[nodiscard]] double total_mass() const;
    /// nu(D_s), open disk of radius s.
    [[nodiscard]] double mass_inside(double s) const;
    /// Radii where s -> nu(D_s) changes behaviour.
    [[nodiscard]] std::vector<double> breakpoints() const;
};

/// V^nu(r) = int_1^r nu(D_s)/s ds, exact segment by segment. Signed for r < 1.
double background_potential(const RadialMeasureSpec& nu, double r);

class RadialPotential;

namespace family {
/// max{0, log r}.
struct CircleLog {};
/// -inner_q log r for r <= 1, q log r for r > 1.
struct PowerQ {
    double q = 2.0;
    double inner_q = 0.0;
};
/// inner_value on [0,R), 0 on [R,1], +inf beyond 1.
struct HardEdgeFlat {
    double R = 0.0;
    double inner_value = 0.0;
};
/// max{0, log r} up to R, then log R + tail_q log(r/R).
struct Annulus {
    double R = 2.0;
    double tail_q = 2.0;
};
struct Background {
    RadialMeasureSpec nu;
};
/// log r + r^-a (1 - 1/r)(gamma - (gamma - L+)/r) for r >= 1, (L- - 1)(1 - r) below.
/// Satisfies V(1) = 0, right slope 1 + L+, left slope -(L- - 1), r^a (V - log r) -> gamma.
struct PowerTail {
    double alpha = 3.0;
    double gamma = 1.0;
    double l_plus = 0.5;
    double l_minus = 1.5;
};
/// Piecewise linear in r through (r_i, v_i); evaluation off the grid is an error.
struct Tabulated {
    std::vector<double> r;
    std::vector<double> v;
    Confinement confinement = Confinement::weak;
};
/// V(1/r) + log r, to be used against Lambda_chi.
struct Inverted {
    std::shared_ptr<const RadialPotential> base;
    double chi = 1.0;
};
}  // namespace family

/// V = c + q log r on [a, b). b may be +inf; a may be 0.
struct LogLinearPiece {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double q = 0.0;
};

class RadialPotential {
public:
    using Family = std::variant<family::CircleLog, family::PowerQ, family::HardEdgeFlat, family::Annulus,
                                family::Background, family::PowerTail, family::Tabulated, family::Inverted>;

    /// Validates the family parameters; throws std::invalid_argument naming the bad one.
    explicit RadialPotential(Family f);

    [[nodiscard]] ExtReal operator()(double r) const;
    [[nodiscard]] const Family& family() const { return family_; }
    [[nodiscard]] Confinement confinement() const;
    [[nodiscard]] Reference reference() const;
    [[nodiscard]] std::string name() const;
    /// True for families built to satisfy V(1) = 0 and V >= max{0, log r}.
    [[nodiscard]] bool is_circle_family() const;

    /// Exact description as log-linear pieces covering the support, when one exists.
    [[nodiscard]] std::optional<std::vector<LogLinearPiece>> log_linear_pieces() const;
    /// Radii where V is not smooth (used as quadrature breakpoints).
    [[nodiscard]] std::vector<double> knots() const;
    /// Closed support of exp(-V): [lo, hi], hi may be +inf.
    [[nodiscard]] std::pair<double, double> support() const;

private:
    Family family_;
};

RadialPotential circle_log();
RadialPotential power_q(double q, double inner_q = 0.0);
RadialPotential hard_edge_flat(double R = 0.0, double inner_value = 0.0);
RadialPotential annulus(double R, double tail_q);
RadialPotential background(RadialMeasureSpec nu);
RadialPotential power_tail(double alpha, double gamma, double l_plus, double l_minus);
RadialPotential tabulated(std::vector<double> r, std::vector<double> v, Confinement c = Confinement::weak);

/// Throws std::domain_error for r < 0 or NaN.
ExtReal eval_potential(const RadialPotential& V, double r);

/// r -> V(1/r) + log r, tagged for Lambda_chi. Inverting an inverted potential returns the original.
RadialPotential invert_potential(const RadialPotential& V, double chi);

struct CircleViolation {
    double r = 0.0;
    double value = 0.0;
    double bound = 0.0;
    std::string what;
};

struct CircleReport {
    bool pass = true;
    std::vector<CircleViolation> violations;
};

/// V(1) = 0 within 1e-9 and V(r) >= max{0, log r} with no slack on the grid.
CircleReport check_circle_conditions(const RadialPotential& V, const std::vector<double>& grid);

}  // namespace circlegas
