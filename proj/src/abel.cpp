#include "josephson/abel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>

namespace josephson {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double escape_bound_for(double y0) { return std::max(kAbelEscapeBound, 100.0 * std::abs(y0)); }

void check_orbit(const Trajectory<1>& orbit) {
    if (orbit.status() != Terminal::completed)
        throw ResolutionError("orbit does not cover a full period");
    if (std::abs(orbit.x_end() - orbit.x_begin() - kTwoPi) > 1e-9)
        throw ResolutionError("orbit span is not one period");
    if (orbit.segments().empty()) throw ResolutionError("orbit has no dense output");
    for (const auto& s : orbit.segments())
        if (!(s.h > 0.0) || s.h > 0.5) throw ResolutionError("orbit under-resolved for quadrature");
}

using Gauss = boost::math::quadrature::gauss<double, 10>;

struct PeriodIntegrals {
    double inner = 0.0;  // int 2fy + 3gy^2
    double outer = 0.0;  // int (2f + 6gy) exp(inner(x))
};

PeriodIntegrals period_integrals(const Params& p, const Trajectory<1>& orbit, bool want_outer) {
    check_orbit(orbit);
    const AbelField af{p};
    auto variational = [&](const Trajectory<1>::Segment& seg, double x) {
        const double y = seg.eval(x)[0];
        return 2.0 * af.f(x) * y + 3.0 * af.g(x) * y * y;
    };
    PeriodIntegrals out;
    for (const auto& seg : orbit.segments()) {
        const double x0 = seg.x0;
        const double x1 = seg.x0 + seg.h;
        if (want_outer) {
            const double base = out.inner;
            out.outer += Gauss::integrate(
                [&](double x) {
                    const double y = seg.eval(x)[0];
                    const double partial =
                        x > x0 ? Gauss::integrate([&](double t) { return variational(seg, t); }, x0, x) : 0.0;
                    return (2.0 * af.f(x) + 6.0 * af.g(x) * y) * std::exp(base + partial);
                },
                x0, x1);
        }
        out.inner += Gauss::integrate([&](double x) { return variational(seg, x); }, x0, x1);
    }
    return out;
}

}  // namespace

std::string to_string(CycleKind k) {
    switch (k) {
        case CycleKind::first: return "first";
        case CycleKind::second_positive: return "second_positive";
        case CycleKind::second_negative: return "second_negative";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::semistable_lower_stable: return "semistable_lower_stable";
        case Stability::semistable_upper_stable: return "semistable_upper_stable";
    }
    return "?";
}

std::string to_string(Side s) { return s == Side::stable ? "stable" : "unstable"; }

std::string to_string(SignCondition c) {
    switch (c) {
        case SignCondition::A1: return "A1";
        case SignCondition::A2: return "A2";
        case SignCondition::A3: return "A3";
        default: return "none";
    }
}

Displacement poincare_displacement(const Params& p, double x0, double y0, const IntegratorConfig& cfg) {
    if (y0 == 0.0) return {};
    const AbelField af{p};
    IntegratorConfig zc = cfg;
    const double scale = std::min(1.0, y0 * y0);
    zc.abs_tol = cfg.abs_tol * scale * scale;
    zc.keep_dense = false;
    zc.escape_bound = escape_bound_for(y0);
    const Field<1> fz = [af, y0](double x, const Vec<1>& z) { return Vec<1>{af.rhs(x, y0 + z[0])}; };
    const auto tr = integrate<1>(fz, x0, Vec<1>{0.0}, x0 + kTwoPi, zc);
    if (tr.status() == Terminal::escaped) return {true, std::numeric_limits<double>::quiet_NaN(), tr.x_stop()};
    return {false, tr.back()[0], 0.0};
}

Trajectory<1> abel_orbit(const Params& p, double x0, double y0, const IntegratorConfig& cfg) {
    IntegratorConfig oc = cfg;
    oc.keep_dense = true;
    oc.escape_bound = escape_bound_for(y0);
    return integrate<1>(AbelField{p}.field(), x0, Vec<1>{y0}, x0 + kTwoPi, oc);
}

double displacement_derivative(const Params& p, const Trajectory<1>& orbit) {
    return std::expm1(period_integrals(p, orbit, false).inner);
}

double displacement_derivative(const Params& p, const LimitCycle& cycle, const IntegratorConfig& cfg) {
    return displacement_derivative(p, abel_orbit(p, cycle.x0, cycle.y0, cfg));
}

double displacement_second_derivative(const Params& p, const Trajectory<1>& orbit) {
    const auto in = period_integrals(p, orbit, true);
    return std::exp(in.inner) * in.outer;
}

double displacement_second_derivative(const Params& p, const LimitCycle& cycle, const IntegratorConfig& cfg) {
    return displacement_second_derivative(p, abel_orbit(p, cycle.x0, cycle.y0, cfg));
}

ZeroCoefficients zero_coefficients(const Params& p) {
    constexpr double pi = std::numbers::pi;
    const double a = p.a, b = p.b, c = p.c;
    return {2.0 * pi * b, 2.0 * pi * (2.0 * pi * b * b - a),
            8.0 * pi * pi * pi * b * b * b - 10.0 * pi * pi * a * b - 2.0 * pi * b + pi * c};
}

ZeroCoefficients zero_coefficients_printed(const Params& p) {
    constexpr double pi = std::numbers::pi;
    const double a = p.a, b = p.b, c = p.c;
    return {2.0 * pi * b, 2.0 * pi * (2.0 * pi * b - a),
            2.0 * pi * b * (4.0 / 3.0 * pi * pi * b * b + pi * b - 4.0 * pi * a - 2.0) + 3.0 * pi * c};
}

ZeroStability zero_stability(const Params& p) {
    if (p.b > 0.0) return {false, Side::unstable, Side::stable};
    if (p.a > 0.0) return {false, Side::stable, Side::stable};
    if (p.c > 0.0) return {false, Side::unstable, Side::stable};
    if (p.c < 0.0) return {false, Side::stable, Side::unstable};
    return {true, Side::stable, Side::stable};
}

SignCriterion sign_criterion(const Params& p) {
    const double a = p.a, b = p.b, c = std::abs(p.c);
    if (!(b > 0.0)) return {};
    if (a >= 1.0) {
        double xi;
        if (a > 1.0)
            xi = -c / std::sqrt(a * a - 1.0);
        else
            xi = (b * b - c * c) / (2.0 * b) - 1.0;
        return {true, xi, SignCondition::A1};
    }
    if (b >= c) return {true, 0.0, SignCondition::A2};
    if (b >= c * std::sqrt(1.0 - a * a)) return {true, -a * b / (1.0 - a * a), SignCondition::A3};
    return {};
}

std::optional<double> isocline(const Params& p, double x) {
    const AbelField af{p};
    const double g = af.g(x);
    if (std::abs(g) < 1e-12) return std::nullopt;
    return -af.f(x) / g;
}

std::optional<double> isocline_slope(const Params& p, double x) {
    const double g = std::sin(x) - p.a;
    if (std::abs(g) < 1e-12) return std::nullopt;
    return (p.c - p.a * p.c * std::sin(x) + p.b * std::cos(x)) / (g * g);
}

LimitCycle make_second_kind_cycle(const Params& p, double y0, const IntegratorConfig& cfg,
                                  bool semistable_candidate) {
    LimitCycle cyc;
    cyc.kind = y0 > 0.0 ? CycleKind::second_positive : CycleKind::second_negative;
    cyc.x0 = 0.0;
    cyc.y0 = y0;
    const auto orbit = abel_orbit(p, 0.0, y0, cfg);
    for (const auto& s : orbit.samples()) cyc.samples.push_back({s.x, s.state[0]});
    cyc.g_prime = displacement_derivative(p, orbit);
    if (semistable_candidate || std::abs(cyc.g_prime) < kHyperbolicityThreshold) {
        cyc.g_second = displacement_second_derivative(p, orbit);
    }
    if (std::abs(cyc.g_prime) < kHyperbolicityThreshold) {
        cyc.multiplicity_estimate = 2;
        cyc.stability = cyc.g_second > 0.0 ? Stability::semistable_lower_stable : Stability::semistable_upper_stable;
    } else {
        cyc.stability = cyc.g_prime < 0.0 ? Stability::stable : Stability::unstable;
    }
    return cyc;
}

SecondKindSearch find_second_kind_cycles(const Params& p, SignRegion region, const IntegratorConfig& cfg,
                                         const SecondKindOptions& opt) {
    SecondKindSearch out;
    const double s = region == SignRegion::positive ? 1.0 : -1.0;
    IntegratorConfig gc = cfg;
    gc.keep_dense = false;
    auto G = [&](double y) {
        const auto d = poincare_displacement(p, 0.0, y, gc);
        if (d.escaped) throw std::domain_error("escaped inside bracket");
        return d.value;
    };

    struct Point {
        double y;
        double g;
    };
    std::vector<Point> grid;
    int last_change = 0;
    for (int k = 0;; ++k) {
        const double mag = opt.y_min * std::pow(10.0, static_cast<double>(k) / opt.points_per_decade);
        if (mag > opt.hard_y_max) {
            out.warnings.push_back("grid reached the hard upper bound without escape");
            break;
        }
        const double y = s * mag;
        Displacement d;
        try {
            d = poincare_displacement(p, 0.0, y, gc);
        } catch (const StiffnessError& e) {
            out.warnings.push_back(std::string("grid stopped: ") + e.what());
            break;
        }
        if (d.escaped) {
            out.escape_y0 = mag;
            if (!grid.empty()) {
                // Orbits just below the escape threshold can still carry a
                // zero of G; resolve the band up to the threshold.
                double lo = std::abs(grid.back().y), hi = mag;
                for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (poincare_displacement(p, 0.0, s * mid, gc).escaped)
                        hi = mid;
                    else
                        lo = mid;
                }
                out.escape_y0 = hi;
                const double base = std::abs(grid.back().y);
                for (int j = 1; j <= 36; ++j) {
                    const double y = s * (lo - (lo - base) * std::ldexp(1.0, -j));
                    const auto dj = poincare_displacement(p, 0.0, y, gc);
                    if (dj.escaped) break;
                    grid.push_back({y, dj.value});
                }
            }
            break;
        }
        if (!grid.empty() && sgn(grid.back().g) != sgn(d.value)) last_change = k;
        grid.push_back({y, d.value});
        if (mag >= opt.min_y_max && k - last_change >= opt.quiet_decades * opt.points_per_decade) break;
    }

    double gmax = 0.0;
    for (const auto& pt : grid) gmax = std::max(gmax, std::abs(pt.g));
    if (grid.size() < 3 || gmax < 1e-14) {
        if (!grid.empty()) out.warnings.push_back("displacement vanishes identically on the grid");
        return out;
    }

    auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= kRootTolerance * std::max(1.0, std::abs(lo)); };
    std::vector<std::pair<double, bool>> roots;  // (y0, semistable candidate)
    auto refine = [&](double y1, double g1, double y2, double g2) {
        if (g1 == 0.0) return roots.emplace_back(y1, false), void();
        if (g2 == 0.0) return roots.emplace_back(y2, false), void();
        double lo = y1, hi = y2, glo = g1, ghi = g2;
        if (lo > hi) std::swap(lo, hi), std::swap(glo, ghi);
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(G, lo, hi, glo, ghi, tol, iters);
        roots.emplace_back(0.5 * (r.first + r.second), false);
    };

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        if (sgn(grid[k].g) != sgn(grid[k + 1].g)) refine(grid[k].y, grid[k].g, grid[k + 1].y, grid[k + 1].g);
    }

    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const double gm = grid[k - 1].g, g0 = grid[k].g, gp = grid[k + 1].g;
        if (sgn(gm) != sgn(g0) || sgn(gp) != sgn(g0)) continue;
        if (!(std::abs(g0) < std::abs(gm) && std::abs(g0) < std::abs(gp))) continue;
        const double side = sgn(g0);
        double lo = grid[k - 1].y, hi = grid[k + 1].y;
        if (lo > hi) std::swap(lo, hi);
        std::uintmax_t iters = 200;
        const auto m =
            boost::math::tools::brent_find_minima([&](double y) { return side * G(y); }, lo, hi, 40, iters);
        const double ymin = m.first;
        const double gmin = side * m.second;
        if (side * gmin < 0.0) {
            // Two transversal zeros closer than the grid spacing.
            refine(grid[k - 1].y, gm, ymin, gmin);
            refine(ymin, gmin, grid[k + 1].y, gp);
        } else if (std::abs(gmin) <= 1e-8 * std::max(1.0, std::abs(ymin))) {
            roots.emplace_back(ymin, true);
        }
    }

    std::sort(roots.begin(), roots.end(),
              [](const auto& l, const auto& r) { return std::abs(l.first) < std::abs(r.first); });
    std::vector<std::pair<double, bool>> merged;
    for (const auto& r : roots) {
        if (!merged.empty() && std::abs(r.first - merged.back().first) < kMergeDistance) {
            merged.back().second = merged.back().second || r.second;
            continue;
        }
        merged.push_back(r);
    }
    for (const auto& [y0, semi] : merged) out.cycles.push_back(make_second_kind_cycle(p, y0, cfg, semi));
    return out;
}

}  // namespace josephson
