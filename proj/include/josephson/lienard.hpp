// The planar system on the cylinder
//   dx/dt = y,  dy/dt = -(sin x - a) - (b + c cos x) y
// equilibria, saddle manifolds, connection gaps, bifurcation curves and
// contractible cycles around the anti-saddle.
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "josephson/abel.hpp"
#include "josephson/integrator.hpp"
#include "josephson/params.hpp"

namespace josephson {

/// a = alpha, b = 1/sqrt(beta), c = gamma/sqrt(beta).
Params from_physical(double alpha, double beta, double gamma);

Field<2> planar_field(const Params& p);
/// The same field with time reversed.
Field<2> planar_field_reversed(const Params& p);
std::array<std::array<double, 2>, 2> planar_jacobian(const Params& p, double x, double y);

enum class EquilibriumKind { saddle, antisaddle, saddle_node };
std::string to_string(EquilibriumKind k);

struct Equilibrium {
    double x = 0.0;
    EquilibriumKind kind = EquilibriumKind::antisaddle;
    std::array<std::complex<double>, 2> eigenvalues{};
    /// Unit eigenvectors (unstable, stable) with positive x-component;
    /// filled for saddles and the saddle-node (centre, strong stable).
    std::array<Vec<2>, 2> eigenvectors{};
};

/// a < 1: A, B, C (A at -pi - arcsin a, C = A + 2pi); a = 1: the merged
/// point at pi/2; a > 1: none.
std::vector<Equilibrium> equilibria(const Params& p);

enum class Branch { unstable_upper, unstable_lower, stable_upper, stable_lower };

inline constexpr double kManifoldOffset = 1e-6;
inline constexpr double kGapTolerance = 1e-6;
inline constexpr double kProbeTolerance = 1e-6;

struct ManifoldOptions {
    double eps = kManifoldOffset;
    double tau_max = 400.0;
};

/// Branch of a saddle's invariant manifold launched eps along the
/// eigenvector. Stable branches are integrated in reversed time.
Trajectory<2> saddle_manifold(const Params& p, const Equilibrium& saddle, Branch branch,
                              const IntegratorConfig& cfg = IntegratorConfig::location(),
                              const ManifoldOptions& opt = {});

enum class CrossingStatus { crossed, turned, settled, overshot };

struct SectionCrossing {
    CrossingStatus status = CrossingStatus::settled;
    /// y at the section; 0 when the branch turned back or settled first.
    double height = 0.0;
};

/// First crossing of the vertical section x = section_x (taken on the
/// cylinder copy the branch reaches first in its natural direction).
SectionCrossing manifold_crossing(const Params& p, const Equilibrium& saddle, Branch branch, double section_x,
                                  const IntegratorConfig& cfg = IntegratorConfig::location(),
                                  const ManifoldOptions& opt = {});

enum class ConnectionKind { homoclinic, upper_saddle_connection, lower_saddle_connection, heteroclinic_2saddle };
std::string to_string(ConnectionKind k);

struct ConnectionResidual {
    ConnectionKind kind = ConnectionKind::upper_saddle_connection;
    /// Signed gap on the section through B; +inf when the homoclinic
    /// branch overshoots the left saddle.
    double gap = 0.0;
    std::string escape_side;
};

/// Sign conventions: upper gap > 0 iff b < psi1, lower gap < 0 iff
/// b < psi2, homoclinic gap > 0 iff b < phi.
ConnectionResidual connection_gap(const Params& p, ConnectionKind kind,
                                  const IntegratorConfig& cfg = IntegratorConfig::location());

/// For a = 1: forward centre branch against the strong stable branch of
/// the saddle-node on x = -pi/2. Positive iff b < psi1(1, c).
double saddle_node_gap(const Params& p, const IntegratorConfig& cfg = IntegratorConfig::location());

enum class InfinityStability { stable, unstable, undetermined };
std::string to_string(InfinityStability s);

struct InfinityReport {
    InfinityStability plus = InfinityStability::undetermined;
    InfinityStability minus = InfinityStability::undetermined;
    double gap_plus = 0.0;
    double gap_minus = 0.0;
};

InfinityReport infinity_stability(const Params& p, const IntegratorConfig& cfg = IntegratorConfig::scan());

enum class Curve { phi, psi1, psi2 };
std::string to_string(Curve c);
std::optional<Curve> parse_curve(const std::string& name);

struct CurveSample {
    Curve curve = Curve::phi;
    double a = 0.0;
    double c = 0.0;
    double b = 0.0;
    double gap_tol = kGapTolerance;
    bool found = false;
    double gap = 0.0;
};

/// Signed quantity whose sign tells on which side of the curve (a, b, c) is:
/// positive iff b < curve(a, c).
double curve_side(Curve curve, const Params& p, const IntegratorConfig& cfg = IntegratorConfig::scan());

CurveSample locate_curve(Curve curve, double a, double c, const IntegratorConfig& cfg = IntegratorConfig::scan());

std::vector<CurveSample> bifurcation_curve(Curve curve, double c, const std::vector<double>& a_grid,
                                           const IntegratorConfig& cfg = IntegratorConfig::scan());

struct DerivedConstants {
    double c = 0.0;
    std::optional<double> a_lower_star;  // psi2 = 0 (c < 0), psi1 = 0 (c > 0)
    std::optional<double> a_upper_star;  // psi1 = -c sqrt(1-a^2), c < 0
    std::optional<double> a_bar;         // psi1 = |c| sqrt(1-a^2)
    std::optional<double> a_tilde;       // psi1 = |c|
};

DerivedConstants derived_constants(double c, const IntegratorConfig& cfg = IntegratorConfig::scan());

struct FirstKindSearch {
    std::vector<LimitCycle> cycles;
    std::vector<std::string> warnings;
    /// Largest height on the ray above B whose orbit still returns.
    double y_top = 0.0;
};

/// Return value of the map on the ray x = arcsin a, y > 0 around B; nullopt
/// when the orbit leaves the strip between the saddles. An orbit absorbed
/// by B without returning maps to 0.
std::optional<double> first_return(const Params& p, double y0,
                                   const IntegratorConfig& cfg = IntegratorConfig::location());

FirstKindSearch find_first_kind_cycles(const Params& p, const IntegratorConfig& cfg = IntegratorConfig::location());

}  // namespace josephson
