// The Abel equation dy/dx = f(x) y^2 + g(x) y^3 on the circle: displacement
// map, its derivatives, behaviour near y = 0 and second-kind cycle search.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "josephson/integrator.hpp"
#include "josephson/params.hpp"

namespace josephson {

enum class CycleKind { first, second_positive, second_negative };
enum class Stability { stable, unstable, semistable_lower_stable, semistable_upper_stable };
enum class SignRegion { positive, negative };

std::string to_string(CycleKind k);
std::string to_string(Stability s);

struct LimitCycle {
    CycleKind kind = CycleKind::second_positive;
    double x0 = 0.0;
    double y0 = 0.0;
    /// One period of (x, y) points.
    std::vector<std::array<double, 2>> samples;
    Stability stability = Stability::stable;
    int multiplicity_estimate = 1;
    double g_prime = 0.0;
    /// Second derivative of the displacement; NaN unless it was needed.
    double g_second = std::numeric_limits<double>::quiet_NaN();
};

struct Displacement {
    bool escaped = false;
    double value = 0.0;
    /// x where the orbit left the escape envelope (escaped only).
    double x_stop = 0.0;
};

inline constexpr double kAbelEscapeBound = 1e4;
inline constexpr double kHyperbolicityThreshold = 1e-6;
inline constexpr double kRootTolerance = 1e-10;
inline constexpr double kMergeDistance = 1e-6;

class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// y(x0 + 2pi; x0, y0) - y0, integrated as the displacement from y0 so
/// that tiny |y0| keeps full relative precision.
Displacement poincare_displacement(const Params& p, double x0, double y0,
                                   const IntegratorConfig& cfg = IntegratorConfig::location());

/// Dense orbit of the Abel equation over one period starting at (x0, y0).
Trajectory<1> abel_orbit(const Params& p, double x0, double y0,
                         const IntegratorConfig& cfg = IntegratorConfig::location());

/// exp(int 2fy + 3gy^2) - 1 over one period, by quadrature along a dense orbit.
double displacement_derivative(const Params& p, const Trajectory<1>& orbit);
double displacement_derivative(const Params& p, const LimitCycle& cycle,
                               const IntegratorConfig& cfg = IntegratorConfig::location());

/// (1 + G') * int (2f + 6gy) exp(int_x0^x 2fy + 3gy^2) dx over one period.
double displacement_second_derivative(const Params& p, const Trajectory<1>& orbit);
double displacement_second_derivative(const Params& p, const LimitCycle& cycle,
                                      const IntegratorConfig& cfg = IntegratorConfig::location());

struct ZeroCoefficients {
    double G2 = 0.0;
    double G3 = 0.0;
    double G4 = 0.0;
};

/// Expansion G(y0) = G2 y0^2 + G3 y0^3 + G4 y0^4 + O(y0^5) at x0 = 0.
ZeroCoefficients zero_coefficients(const Params& p);

/// Older closed forms for G3 and G4. They do not satisfy the defining
/// recursion once b != 0; kept for comparison only.
ZeroCoefficients zero_coefficients_printed(const Params& p);

enum class Side { stable, unstable };
std::string to_string(Side s);

struct ZeroStability {
    bool degenerate = false;
    Side upper = Side::unstable;
    Side lower = Side::stable;
};

ZeroStability zero_stability(const Params& p);

enum class SignCondition { none, A1, A2, A3 };
std::string to_string(SignCondition c);

struct SignCriterion {
    bool holds = false;
    std::optional<double> witness_xi;
    SignCondition condition = SignCondition::none;
};

/// Direct evaluation of the definite-sign conditions with a witness xi for
/// xi^2 + c^2 <= (b - xi a)^2.
SignCriterion sign_criterion(const Params& p);

/// -f/g, or nullopt at a pole (sin x = a).
std::optional<double> isocline(const Params& p, double x);
std::optional<double> isocline_slope(const Params& p, double x);

struct SecondKindSearch {
    std::vector<LimitCycle> cycles;
    std::vector<std::string> warnings;
    /// Smallest |y0| on the grid whose orbit escaped, +inf if none did.
    double escape_y0 = std::numeric_limits<double>::infinity();
};

struct SecondKindOptions {
    double y_min = 1e-4;
    int points_per_decade = 24;
    double min_y_max = 1e2;
    double hard_y_max = 1e6;
    int quiet_decades = 3;
};

SecondKindSearch find_second_kind_cycles(const Params& p, SignRegion region,
                                         const IntegratorConfig& cfg = IntegratorConfig::location(),
                                         const SecondKindOptions& opt = {});

/// Builds a fully described cycle from a located anchor.
LimitCycle make_second_kind_cycle(const Params& p, double y0, const IntegratorConfig& cfg,
                                  bool semistable_candidate);

}  // namespace josephson
