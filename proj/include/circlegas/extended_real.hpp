#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace circlegas {

/// A real number that may also be +infinity. Potentials take values in
/// [0, +inf] (hard walls), so there is no -inf. Arithmetic saturates at +inf.
class ExtReal {
public:
    constexpr ExtReal() = default;
    constexpr ExtReal(double v) : value_(v) {}  // NOLINT: implicit from double is intended

    static constexpr ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

    [[nodiscard]] constexpr bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
    [[nodiscard]] constexpr bool is_finite() const { return !is_infinite(); }

    /// Finite value; throws on +inf so callers cannot silently propagate it.
    [[nodiscard]] double value() const {
        if (is_infinite()) throw std::domain_error("ExtReal::value() called on +inf");
        return value_;
    }
    /// Raw double (inf for +inf).
    [[nodiscard]] constexpr double raw() const { return value_; }

    friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_infinite() || b.is_infinite()) return infinity();
        return ExtReal(a.value_ + b.value_);
    }
    // Nonnegative scaling; 0 * inf = 0 (measure-theoretic convention).
    friend ExtReal scale(double k, ExtReal a) {
        if (k < 0) throw std::domain_error("ExtReal: negative scale");
        if (k == 0) return ExtReal(0.0);
        if (a.is_infinite()) return infinity();
        return ExtReal(k * a.value_);
    }

    friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.value_ == b.value_; }
    friend constexpr bool operator<(ExtReal a, ExtReal b) { return a.value_ < b.value_; }
    friend constexpr bool operator<=(ExtReal a, ExtReal b) { return a.value_ <= b.value_; }
    friend constexpr bool operator>(ExtReal a, ExtReal b) { return b < a; }
    friend constexpr bool operator>=(ExtReal a, ExtReal b) { return b <= a; }

    friend std::ostream& operator<<(std::ostream& os, ExtReal x) {
        if (x.is_infinite()) return os << "+inf";
        return os << x.value_;
    }

private:
    double value_ = 0.0;
};

/// exp(-k * V) with exp(-inf) = 0.
inline double boltzmann(double k, ExtReal v) {
    if (v.is_infinite()) return 0.0;
    return std::exp(-k * v.raw());
}

}  // namespace circlegas
