#include "josephson/lienard.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace josephson {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec<2> unit(double u, double v) {
    const double n = std::hypot(u, v);
    return {u / n, v / n};
}

void require_saddles(const Params& p) {
    if (!(p.a < 1.0)) throw DomainError("connection gaps need 0 <= a < 1 (saddles exist)");
}

IntegratorConfig planar_cfg(const IntegratorConfig& cfg, double tau_max) {
    IntegratorConfig pc = cfg;
    pc.max_x_span = tau_max;
    pc.escape_bound = std::max(cfg.escape_bound, 1e6);
    return pc;
}

struct Launch {
    Vec<2> state;
    bool reversed;
};

Launch launch_point(const Equilibrium& s, Branch branch, double eps) {
    const auto& vu = s.eigenvectors[0];
    const auto& vs = s.eigenvectors[1];
    switch (branch) {
        case Branch::unstable_upper: return {{s.x + eps * vu[0], eps * vu[1]}, false};
        case Branch::unstable_lower: return {{s.x - eps * vu[0], -eps * vu[1]}, false};
        case Branch::stable_upper: return {{s.x - eps * vs[0], -eps * vs[1]}, true};
        case Branch::stable_lower: return {{s.x + eps * vs[0], eps * vs[1]}, true};
    }
    return {};
}

bool is_upper(Branch b) { return b == Branch::unstable_upper || b == Branch::stable_upper; }

/// Height of a branch launched from an arbitrary point, measured at the
/// first copy of section_x in its direction of motion.
SectionCrossing crossing_from(const Params& p, const Vec<2>& start, bool reversed, bool upper, double section_x,
                              const IntegratorConfig& cfg, double tau_max) {
    const auto field = reversed ? planar_field_reversed(p) : planar_field(p);
    const bool x_increasing = upper != reversed;
    double target = section_x;
    if (x_increasing) {
        while (target <= start[0]) target += 2.0 * kPi;
        while (target - 2.0 * kPi > start[0]) target -= 2.0 * kPi;
    } else {
        while (target >= start[0]) target -= 2.0 * kPi;
        while (target + 2.0 * kPi < start[0]) target += 2.0 * kPi;
    }
    const std::array<Event<2>, 2> events{
        Event<2>{[target](double, const Vec<2>& s) { return s[0] - target; },
                 x_increasing ? Crossing::rising : Crossing::falling},
        Event<2>{[](double, const Vec<2>& s) { return s[1]; }, upper ? Crossing::falling : Crossing::rising}};
    IntegratorConfig pc = planar_cfg(cfg, tau_max);
    pc.keep_dense = false;
    const auto tr = integrate_with_events<2>(field, 0.0, start, events, pc);
    if (tr.status() == Terminal::event) {
        if (tr.event_index() == 0) return {CrossingStatus::crossed, tr.back()[1]};
        return {CrossingStatus::turned, 0.0};
    }
    return {CrossingStatus::settled, 0.0};
}

const Equilibrium& find_eq(const std::vector<Equilibrium>& eqs, EquilibriumKind kind, bool leftmost) {
    const Equilibrium* best = nullptr;
    for (const auto& e : eqs) {
        if (e.kind != kind) continue;
        if (!best || (leftmost ? e.x < best->x : e.x > best->x)) best = &e;
    }
    if (!best) throw DomainError("required equilibrium does not exist");
    return *best;
}

double homoclinic_gap(const Params& p, const IntegratorConfig& cfg) {
    const auto eqs = equilibria(p);
    const auto& A = find_eq(eqs, EquilibriumKind::saddle, true);
    const auto& B = find_eq(eqs, EquilibriumKind::antisaddle, true);
    const auto& C = find_eq(eqs, EquilibriumKind::saddle, false);
    const double top = manifold_crossing(p, C, Branch::stable_upper, B.x, cfg).height;

    const auto start = launch_point(C, Branch::unstable_lower, kManifoldOffset).state;
    const std::array<Event<2>, 2> events{
        Event<2>{[xb = B.x](double, const Vec<2>& s) { return s[0] - xb; }, Crossing::rising},
        Event<2>{[xa = A.x](double, const Vec<2>& s) { return s[0] - xa; }, Crossing::falling}};
    IntegratorConfig pc = planar_cfg(cfg, ManifoldOptions{}.tau_max);
    pc.keep_dense = false;
    const auto tr = integrate_with_events<2>(planar_field(p), 0.0, start, events, pc);
    if (tr.status() == Terminal::event && tr.event_index() == 1) return kInf;
    const double h = tr.status() == Terminal::event ? tr.back()[1] : 0.0;
    return h - top;
}

std::optional<double> bisect_sign_change(const std::function<double(double)>& F, double lo, double hi,
                                         double tol) {
    double flo = F(lo), fhi = F(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Params from_physical(double alpha, double beta, double gamma) {
    if (!std::isfinite(beta) || !(beta > 0.0)) throw DomainError("beta must be > 0");
    const double sigma = 1.0 / std::sqrt(beta);
    return Params::make(alpha, sigma, gamma * sigma);
}

Field<2> planar_field(const Params& p) {
    return [p](double, const Vec<2>& s) {
        return Vec<2>{s[1], -(std::sin(s[0]) - p.a) - (p.b + p.c * std::cos(s[0])) * s[1]};
    };
}

Field<2> planar_field_reversed(const Params& p) {
    return [p](double, const Vec<2>& s) {
        return Vec<2>{-s[1], (std::sin(s[0]) - p.a) + (p.b + p.c * std::cos(s[0])) * s[1]};
    };
}

std::array<std::array<double, 2>, 2> planar_jacobian(const Params& p, double x, double y) {
    return {{{0.0, 1.0}, {-std::cos(x) + p.c * std::sin(x) * y, -(p.b + p.c * std::cos(x))}}};
}

std::string to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::antisaddle: return "antisaddle";
        case EquilibriumKind::saddle_node: return "saddle_node";
    }
    return "?";
}

std::vector<Equilibrium> equilibria(const Params& p) {
    std::vector<Equilibrium> out;
    if (p.a > 1.0) return out;
    auto make = [&](double x) {
        Equilibrium e;
        e.x = x;
        const double tr = -(p.b + p.c * std::cos(x));
        const double det = std::cos(x);
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
        e.eigenvalues = {(tr + disc) / 2.0, (tr - disc) / 2.0};
        if (std::abs(det) < 1e-12)
            e.kind = EquilibriumKind::saddle_node;
        else
            e.kind = det < 0.0 ? EquilibriumKind::saddle : EquilibriumKind::antisaddle;
        if (e.kind != EquilibriumKind::antisaddle) {
            // Eigenvector of [[0,1],[-cos x,-f]] for lambda is (1, lambda).
            e.eigenvectors = {unit(1.0, e.eigenvalues[0].real()), unit(1.0, e.eigenvalues[1].real())};
        }
        return e;
    };
    if (p.a == 1.0) {
        out.push_back(make(kPi / 2.0));
        return out;
    }
    const double s = std::asin(p.a);
    out.push_back(make(-kPi - s));
    out.push_back(make(s));
    out.push_back(make(kPi - s));
    return out;
}

Trajectory<2> saddle_manifold(const Params& p, const Equilibrium& saddle, Branch branch, const IntegratorConfig& cfg,
                              const ManifoldOptions& opt) {
    if (saddle.kind != EquilibriumKind::saddle) throw DomainError("saddle_manifold needs a saddle");
    const auto l = launch_point(saddle, branch, opt.eps);
    IntegratorConfig pc = planar_cfg(cfg, opt.tau_max);
    pc.keep_dense = true;
    return integrate<2>(l.reversed ? planar_field_reversed(p) : planar_field(p), 0.0, l.state, opt.tau_max, pc);
}

SectionCrossing manifold_crossing(const Params& p, const Equilibrium& saddle, Branch branch, double section_x,
                                  const IntegratorConfig& cfg, const ManifoldOptions& opt) {
    if (saddle.kind != EquilibriumKind::saddle) throw DomainError("manifold_crossing needs a saddle");
    const auto l = launch_point(saddle, branch, opt.eps);
    return crossing_from(p, l.state, l.reversed, is_upper(branch), section_x, cfg, opt.tau_max);
}

std::string to_string(ConnectionKind k) {
    switch (k) {
        case ConnectionKind::homoclinic: return "homoclinic";
        case ConnectionKind::upper_saddle_connection: return "upper_saddle_connection";
        case ConnectionKind::lower_saddle_connection: return "lower_saddle_connection";
        case ConnectionKind::heteroclinic_2saddle: return "heteroclinic_2saddle";
    }
    return "?";
}

ConnectionResidual connection_gap(const Params& p, ConnectionKind kind, const IntegratorConfig& cfg) {
    require_saddles(p);
    const auto eqs = equilibria(p);
    const auto& A = find_eq(eqs, EquilibriumKind::saddle, true);
    const auto& B = find_eq(eqs, EquilibriumKind::antisaddle, true);
    const auto& C = find_eq(eqs, EquilibriumKind::saddle, false);
    auto upper = [&] {
        return manifold_crossing(p, A, Branch::unstable_upper, B.x, cfg).height -
               manifold_crossing(p, C, Branch::stable_upper, B.x, cfg).height;
    };
    auto lower = [&] {
        return manifold_crossing(p, C, Branch::unstable_lower, B.x, cfg).height -
               manifold_crossing(p, A, Branch::stable_lower, B.x, cfg).height;
    };
    ConnectionResidual r;
    r.kind = kind;
    switch (kind) {
        case ConnectionKind::upper_saddle_connection: r.gap = upper(); break;
        case ConnectionKind::lower_saddle_connection: r.gap = lower(); break;
        case ConnectionKind::homoclinic:
            r.gap = homoclinic_gap(p, cfg);
            if (std::isinf(r.gap)) r.escape_side = "left";
            break;
        case ConnectionKind::heteroclinic_2saddle: {
            const double u = upper(), l = lower();
            r.gap = std::abs(u) >= std::abs(l) ? u : l;
            break;
        }
    }
    return r;
}

double saddle_node_gap(const Params& p, const IntegratorConfig& cfg) {
    if (p.a != 1.0) throw DomainError("saddle_node_gap needs a = 1");
    const double b = p.b, c = p.c;
    const double section = -kPi / 2.0;
    // Centre branch leaving to the right. Motion along it is algebraically
    // slow (u' ~ u^2/2b) while transverse errors contract like exp(-b t), so
    // the launch offset is tied to b^2 to make the contraction dominate.
    double u, y_centre;
    if (b > 0.0) {
        u = std::min(0.05, 0.1 * b * b);
        const double h2 = 1.0 / (2.0 * b);
        const double h3 = (c * h2 - 2.0 * h2 * h2) / b;
        const double h4 = (c * h3 - 1.0 / 24.0 - 5.0 * h2 * h3) / b;
        y_centre = u * u * (h2 + u * (h3 + u * h4));
    } else {
        u = 1e-4;
        y_centre = std::sqrt(u * u * u / 3.0);
    }
    const double tau_budget = 400.0 + (b > 0.0 ? 40.0 * b / u : 0.0);
    const auto fwd = crossing_from(p, {-1.5 * kPi + u, y_centre}, false, true, section, cfg, tau_budget);
    double incoming = 0.0;
    if (b > 0.0) {
        constexpr double delta = 1e-5;
        incoming = crossing_from(p, {kPi / 2.0 - delta, b * delta}, true, true, section, cfg, 400.0).height;
    }
    return fwd.height - incoming;
}

std::string to_string(InfinityStability s) {
    switch (s) {
        case InfinityStability::stable: return "stable";
        case InfinityStability::unstable: return "unstable";
        case InfinityStability::undetermined: return "undetermined";
    }
    return "?";
}

InfinityReport infinity_stability(const Params& p, const IntegratorConfig& cfg) {
    InfinityReport r;
    auto judge = [](double gap, bool positive_means_unstable) {
        if (!(std::abs(gap) >= kProbeTolerance)) return InfinityStability::undetermined;
        return (gap > 0.0) == positive_means_unstable ? InfinityStability::unstable : InfinityStability::stable;
    };
    if (p.a > 1.0) {
        r.plus = r.minus = InfinityStability::unstable;
        r.gap_plus = r.gap_minus = kInf;
        return r;
    }
    if (p.a == 1.0) {
        r.gap_plus = saddle_node_gap(p, cfg);
        r.plus = judge(r.gap_plus, true);
        r.gap_minus = kInf;
        r.minus = InfinityStability::unstable;
        return r;
    }
    r.gap_plus = connection_gap(p, ConnectionKind::upper_saddle_connection, cfg).gap;
    r.gap_minus = connection_gap(p, ConnectionKind::lower_saddle_connection, cfg).gap;
    r.plus = judge(r.gap_plus, true);
    r.minus = judge(r.gap_minus, true);
    return r;
}

std::string to_string(Curve c) {
    switch (c) {
        case Curve::phi: return "phi";
        case Curve::psi1: return "psi1";
        case Curve::psi2: return "psi2";
    }
    return "?";
}

std::optional<Curve> parse_curve(const std::string& name) {
    if (name == "phi") return Curve::phi;
    if (name == "psi1") return Curve::psi1;
    if (name == "psi2") return Curve::psi2;
    return std::nullopt;
}

double curve_side(Curve curve, const Params& p, const IntegratorConfig& cfg) {
    switch (curve) {
        case Curve::phi: return connection_gap(p, ConnectionKind::homoclinic, cfg).gap;
        case Curve::psi1:
            if (p.a == 1.0) return saddle_node_gap(p, cfg);
            return connection_gap(p, ConnectionKind::upper_saddle_connection, cfg).gap;
        case Curve::psi2: return -connection_gap(p, ConnectionKind::lower_saddle_connection, cfg).gap;
    }
    return 0.0;
}

CurveSample locate_curve(Curve curve, double a, double c, const IntegratorConfig& cfg) {
    CurveSample s;
    s.curve = curve;
    s.a = a;
    s.c = c;
    auto side = [&](double b) { return curve_side(curve, Params{a, b, c}, cfg); };
    double lo = 0.0, hi = std::abs(c) + 1.0;
    double flo = side(lo);
    if (!(flo > 0.0)) return s;
    double fhi = side(hi);
    while (fhi > 0.0 && hi < 256.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = side(hi);
    }
    if (fhi > 0.0) {
        s.b = std::numeric_limits<double>::infinity();
        return s;
    }
    double best_b = hi, best_gap = fhi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = side(mid);
        if (std::abs(fm) < std::abs(best_gap)) best_b = mid, best_gap = fm;
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        if ((std::abs(best_gap) < s.gap_tol && hi - lo < 1e-10) || hi - lo < 1e-14) break;
    }
    s.b = best_b;
    s.gap = best_gap;
    s.found = std::abs(best_gap) < s.gap_tol;
    return s;
}

std::vector<CurveSample> bifurcation_curve(Curve curve, double c, const std::vector<double>& a_grid,
                                           const IntegratorConfig& cfg) {
    if ((curve == Curve::phi || curve == Curve::psi2) && !(c < 0.0))
        throw DomainError(to_string(curve) + " is defined for c < 0 only");
    std::vector<CurveSample> out;
    out.reserve(a_grid.size());
    for (double a : a_grid) {
        if (a < 0.0 || a > 1.0) throw DomainError("curve sampling needs 0 <= a <= 1");
        if (a == 1.0 && curve != Curve::psi1) throw DomainError(to_string(curve) + " needs a < 1");
        out.push_back(locate_curve(curve, a, c, cfg));
    }
    return out;
}

DerivedConstants derived_constants(double c, const IntegratorConfig& cfg) {
    DerivedConstants d;
    d.c = c;
    constexpr double a_lo = 0.0, a_hi = 1.0 - 1e-3, tol = 1e-7;
    auto psi1_vs = [&](auto level) {
        return [&, level](double a) { return curve_side(Curve::psi1, Params{a, level(a), c}, cfg); };
    };
    if (c < 0.0) {
        d.a_lower_star = bisect_sign_change(
            [&](double a) { return curve_side(Curve::psi2, Params{a, 0.0, c}, cfg); }, a_lo, a_hi, tol);
        d.a_upper_star =
            bisect_sign_change(psi1_vs([c](double a) { return -c * std::sqrt(1.0 - a * a); }), a_lo, a_hi, tol);
    } else if (c > 0.0) {
        d.a_lower_star = bisect_sign_change(psi1_vs([](double) { return 0.0; }), a_lo, a_hi, tol);
    }
    if (c != 0.0) {
        const double ac = std::abs(c);
        d.a_bar = bisect_sign_change(psi1_vs([ac](double a) { return ac * std::sqrt(1.0 - a * a); }), a_lo, a_hi, tol);
        d.a_tilde = bisect_sign_change(psi1_vs([ac](double) { return ac; }), a_lo, a_hi, tol);
    }
    return d;
}

std::optional<double> first_return(const Params& p, double y0, const IntegratorConfig& cfg) {
    if (!(p.a < 1.0)) throw DomainError("first-kind cycles need 0 <= a < 1");
    const double xb = std::asin(p.a);
    const double xa = -kPi - xb;
    const double xc = kPi - xb;
    const std::array<Event<2>, 3> events{
        Event<2>{[xb](double, const Vec<2>& s) { return s[0] - xb; }, Crossing::rising},
        Event<2>{[xc](double, const Vec<2>& s) { return s[0] - xc; }, Crossing::rising},
        Event<2>{[xa](double, const Vec<2>& s) { return s[0] - xa; }, Crossing::falling}};
    IntegratorConfig pc = planar_cfg(cfg, 400.0);
    pc.keep_dense = false;
    const auto tr = integrate_with_events<2>(planar_field(p), 0.0, Vec<2>{xb, y0}, events, pc);
    if (tr.status() != Terminal::event) return 0.0;
    if (tr.event_index() == 0) return tr.back()[1];
    return std::nullopt;
}

FirstKindSearch find_first_kind_cycles(const Params& p, const IntegratorConfig& cfg) {
    FirstKindSearch out;
    if (!(p.a < 1.0)) return out;
    const double xb = std::asin(p.a);

    // Bracket the top of the returning band on the ray.
    double lo = 0.0, hi = 0.5;
    while (first_return(p, hi, cfg)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) {
            out.warnings.push_back("orbits on the ray never leave the strip");
            break;
        }
    }
    if (hi > 1e3) {
        out.y_top = lo;
    } else {
        // lo = 0 with hi shrinking below 1e-9: nothing near B returns.
        while (hi - lo > 1e-10 * hi && hi > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            if (first_return(p, mid, cfg))
                lo = mid;
            else
                hi = mid;
        }
        out.y_top = lo;
    }
    if (!(out.y_top > 0.0)) return out;

    auto D = [&](double y) {
        const auto r = first_return(p, y, cfg);
        if (!r) throw std::domain_error("orbit left the strip inside a bracket");
        return *r - y;
    };
    std::vector<std::pair<double, double>> grid;
    constexpr int n = 48;
    for (int k = 0; k < n; ++k) {
        const double y = out.y_top * std::pow(10.0, -4.0 + 4.0 * k / n);
        if (y < out.y_top * (1.0 - 1e-3)) grid.emplace_back(y, D(y));
    }
    for (int j = 10; j <= 30; j += 2) {
        const double y = out.y_top * (1.0 - std::ldexp(1.0, -j));
        if (auto r = first_return(p, y, cfg)) grid.emplace_back(y, *r - y);
    }
    std::sort(grid.begin(), grid.end());

    auto tol = [](double l, double h) { return std::abs(h - l) <= kRootTolerance * std::max(1.0, std::abs(l)); };
    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const auto [y1, d1] = grid[k];
        const auto [y2, d2] = grid[k + 1];
        if (d1 == 0.0) {
            roots.push_back(y1);
            continue;
        }
        if ((d1 > 0.0) == (d2 > 0.0) || d2 == 0.0) continue;
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(D, y1, y2, d1, d2, tol, iters);
        roots.push_back(0.5 * (r.first + r.second));
    }

    for (double y : roots) {
        if (!out.cycles.empty() && std::abs(y - out.cycles.back().y0) < kMergeDistance) continue;
        LimitCycle cyc;
        cyc.kind = CycleKind::first;
        cyc.x0 = xb;
        cyc.y0 = y;
        const double h = std::min(1e-4 * y, 0.5 * (out.y_top - y));
        const auto rp = first_return(p, y + h, cfg);
        const auto rm = first_return(p, y - h, cfg);
        if (!rp || !rm) {
            out.warnings.push_back("finite difference stencil left the strip");
            continue;
        }
        cyc.g_prime = (*rp - *rm) / (2.0 * h) - 1.0;
        if (std::abs(cyc.g_prime) < kHyperbolicityThreshold) {
            cyc.multiplicity_estimate = 2;
            cyc.g_second = (*rp - 2.0 * *first_return(p, y, cfg) + *rm) / (h * h);
            cyc.stability = cyc.g_second > 0.0 ? Stability::semistable_lower_stable : Stability::semistable_upper_stable;
        } else {
            cyc.stability = cyc.g_prime < 0.0 ? Stability::stable : Stability::unstable;
        }
        const std::array<Event<2>, 1> ret{
            Event<2>{[xb](double, const Vec<2>& s) { return s[0] - xb; }, Crossing::rising}};
        IntegratorConfig pc = planar_cfg(cfg, 400.0);
        const auto tr = integrate_with_events<2>(planar_field(p), 0.0, Vec<2>{xb, y}, ret, pc);
        for (const auto& s : tr.samples()) cyc.samples.push_back({s.state[0], s.state[1]});
        out.cycles.push_back(std::move(cyc));
    }
    return out;
}

}  // namespace josephson
