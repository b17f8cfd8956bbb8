#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "josephson/integrator.hpp"

namespace josephson {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of the reduced system. Valid points have a >= 0, b > 0;
/// b = 0 is accepted as a flagged extension.
struct Params {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    /// Validating constructor; throws DomainError outside the admissible set.
    static Params make(double a, double b, double c);

    bool b_zero_extension() const noexcept { return b == 0.0; }
    /// Hopf level -c*sqrt(1-a^2); only meaningful for a <= 1.
    double hopf_b() const noexcept { return a <= 1.0 ? -c * std::sqrt(1.0 - a * a) : 0.0; }
};

inline Params Params::make(double a, double b, double c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw DomainError("parameters must be finite");
    if (a < 0.0) throw DomainError("a must be >= 0 (got " + std::to_string(a) + ")");
    if (b < 0.0) throw DomainError("b must be >= 0 (got " + std::to_string(b) + ")");
    return Params{a, b, c};
}

/// f(x) = b + c cos x, g(x) = sin x - a.
struct AbelField {
    Params p;

    double f(double x) const noexcept { return p.b + p.c * std::cos(x); }
    double g(double x) const noexcept { return std::sin(x) - p.a; }
    double rhs(double x, double y) const noexcept { return (f(x) + g(x) * y) * y * y; }

    Field<1> field() const {
        return [*this](double x, const Vec<1>& s) { return Vec<1>{rhs(x, s[0])}; };
    }
};

}  // namespace josephson
