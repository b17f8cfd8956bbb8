#include "josephson/census.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace josephson {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Relation from_gap(double gap, bool positive_means_below) {
    if (std::abs(gap) < kGapTolerance) return Relation::on;
    return (gap > 0.0) == positive_means_below ? Relation::below : Relation::above;
}

Relation from_values(double b, double curve, double tol) {
    if (std::abs(b - curve) <= tol) return Relation::on;
    return b < curve ? Relation::below : Relation::above;
}

bool is(const std::optional<Relation>& r, Relation v) { return r && *r == v; }

std::vector<int> by_side(const std::optional<Relation>& r, std::vector<int> below, std::vector<int> above) {
    return is(r, Relation::below) ? below : above;
}

bool decided(const std::optional<Relation>& r) { return r && *r != Relation::on; }

}  // namespace

Relations relations_at(const Params& p, const IntegratorConfig& cfg) {
    Relations r;
    if (p.a > 1.0) return r;
    if (p.a == 1.0) {
        r.gap_psi1 = saddle_node_gap(p, cfg);
        r.psi1 = from_gap(r.gap_psi1, true);
        r.near_curve = std::abs(r.gap_psi1) < kNearBand;
        return r;
    }
    r.gap_psi1 = connection_gap(p, ConnectionKind::upper_saddle_connection, cfg).gap;
    r.gap_psi2 = -connection_gap(p, ConnectionKind::lower_saddle_connection, cfg).gap;
    r.psi1 = from_gap(r.gap_psi1, true);
    r.psi2 = from_gap(r.gap_psi2, true);
    r.hopf = from_values(p.b, p.hopf_b(), kGapTolerance);
    r.near_curve = std::abs(r.gap_psi1) < kNearBand || std::abs(r.gap_psi2) < kNearBand;
    if (p.c < 0.0) {
        r.gap_phi = connection_gap(p, ConnectionKind::homoclinic, cfg).gap;
        r.phi = from_gap(r.gap_phi, true);
        r.near_curve = r.near_curve || std::abs(r.gap_phi) < kNearBand || std::abs(p.b - p.hopf_b()) < kNearBand;
    }
    return r;
}

RegionLabel classify_region(const Params& p, const Relations& rel) {
    const double a = p.a, b = p.b, c = p.c;
    if (a > 1.0) return {"S7", false};
    if (a == 1.0) {
        if (b == 0.0 && c < 0.0) return {"BT", true};
        if (is(rel.psi1, Relation::on)) return {c < 0.0 ? "P1" : "boundary-of:SN1/SN2", true};
        if (b == 0.0) return {"none", false};
        return {is(rel.psi1, Relation::above) ? "SN1" : "SN2", false};
    }
    if (b == 0.0) {
        if (c == 0.0 && a > 0.0) return {"HLC", true};
        return {"none", false};
    }
    if (c >= 0.0) {
        if (is(rel.psi1, Relation::on)) return {"SC11", true};
        return {is(rel.psi1, Relation::below) ? "S6" : "S5", false};
    }
    if (is(rel.phi, Relation::on)) return {a == 0.0 ? "HE" : "HL", true};
    const bool below_hopf = is(rel.hopf, Relation::below);
    if (is(rel.psi1, Relation::on)) return {below_hopf ? "SC12" : "SC11", true};
    if (is(rel.psi2, Relation::on)) return {"SC2", true};
    if (is(rel.phi, Relation::below)) return {is(rel.psi2, Relation::below) ? "S1" : "S2", false};
    // Above the homoclinic curve.
    const bool below_psi1 = is(rel.psi1, Relation::below);
    if (below_psi1 && below_hopf) return {"S3", false};
    if (below_hopf) return {"S4", false};
    if (below_psi1) return {"S6", false};
    return {"S5", false};
}

RegionLabel classify_region(const Params& p, const CurveSet& curves) {
    std::string missing;
    auto need = [&](const std::optional<CurveSample>& s, const char* name) {
        if (!s || std::abs(s->a - p.a) > 1e-12 || std::abs(s->c - p.c) > 1e-12)
            missing += missing.empty() ? name : std::string(",") + name;
    };
    if (p.a <= 1.0) need(curves.psi1, "psi1");
    if (p.a < 1.0 && p.c < 0.0) {
        need(curves.phi, "phi");
        need(curves.psi2, "psi2");
    }
    if (!missing.empty()) throw NeedsCurvesError(missing);
    auto rel_of = [&](const std::optional<CurveSample>& s) -> std::optional<Relation> {
        if (!s) return std::nullopt;
        return from_values(p.b, s->b, s->gap_tol);
    };
    Relations r;
    r.psi1 = rel_of(curves.psi1);
    if (p.a < 1.0 && p.c < 0.0) {
        r.phi = rel_of(curves.phi);
        r.psi2 = rel_of(curves.psi2);
    } else if (p.a < 1.0) {
        r.psi2 = Relation::above;
    }
    if (p.a < 1.0) r.hopf = from_values(p.b, p.hopf_b(), kGapTolerance);
    return classify_region(p, r);
}

std::string to_string(Target t) {
    switch (t) {
        case Target::first: return "first";
        case Target::second_positive: return "second_positive";
        case Target::second_negative: return "second_negative";
    }
    return "?";
}

const std::vector<PredictionRule>& prediction_rules() {
    using T = Target;
    static const std::vector<PredictionRule> rules = {
        // Contractible cycles around B.
        {"first:no-antisaddle(a>=1)", T::first, [](const Facts& f) { return f.p.a >= 1.0; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"first:b>=-c", T::first, [](const Facts& f) { return f.p.b >= -f.p.c; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"first:c<0,b<=phi", T::first,
         [](const Facts& f) { return f.p.c < 0.0 && (is(f.rel.phi, Relation::below) || is(f.rel.phi, Relation::on)); },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"first:c<0,hopf<=b<-c", T::first,
         [](const Facts& f) { return f.p.c < 0.0 && (is(f.rel.hopf, Relation::above) || is(f.rel.hopf, Relation::on)); },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"first:c<0,phi<b<hopf", T::first,
         [](const Facts& f) {
             return f.p.c < 0.0 && is(f.rel.phi, Relation::above) && is(f.rel.hopf, Relation::below);
         },
         [](const Facts&) { return std::vector<int>{1}; }},

        // Second kind, y > 0.
        {"pos:a=b=0,c>0", T::second_positive,
         [](const Facts& f) { return f.p.a == 0.0 && f.p.b == 0.0 && f.p.c > 0.0; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"pos:b=0,0<a<1,c>0", T::second_positive,
         [](const Facts& f) {
             return f.p.b == 0.0 && f.p.a > 0.0 && f.p.a < 1.0 && f.p.c > 0.0 && decided(f.rel.psi1);
         },
         [](const Facts& f) { return by_side(f.rel.psi1, {0}, {1}); }},
        {"pos:definite-sign,a>1", T::second_positive, [](const Facts& f) { return f.sign.holds && f.p.a > 1.0; },
         [](const Facts&) { return std::vector<int>{1}; }},
        {"pos:definite-sign", T::second_positive, [](const Facts& f) { return f.sign.holds && decided(f.rel.psi1); },
         [](const Facts& f) { return by_side(f.rel.psi1, {1}, {0}); }},
        {"pos:indefinite,c>0", T::second_positive,
         [](const Facts& f) { return !f.sign.holds && f.p.b > 0.0 && f.p.c > 0.0 && decided(f.rel.psi1); },
         [](const Facts& f) { return by_side(f.rel.psi1, {1}, {0, 2}); }},
        {"pos:indefinite,c<0", T::second_positive,
         [](const Facts& f) { return !f.sign.holds && f.p.b > 0.0 && f.p.c < 0.0 && decided(f.rel.psi1); },
         [](const Facts& f) { return by_side(f.rel.psi1, {1}, {0}); }},

        // Second kind, y < 0.
        {"neg:a=b=0,c>0", T::second_negative,
         [](const Facts& f) { return f.p.a == 0.0 && f.p.b == 0.0 && f.p.c > 0.0; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"neg:definite-sign", T::second_negative, [](const Facts& f) { return f.sign.holds; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"neg:indefinite,c>0", T::second_negative,
         [](const Facts& f) { return !f.sign.holds && f.p.b > 0.0 && f.p.c > 0.0; },
         [](const Facts&) { return std::vector<int>{0}; }},
        {"neg:indefinite,c<0", T::second_negative,
         [](const Facts& f) { return !f.sign.holds && f.p.b > 0.0 && f.p.c < 0.0 && decided(f.rel.psi2); },
         [](const Facts& f) { return by_side(f.rel.psi2, {1}, {0}); }},
    };
    return rules;
}

std::string Prediction::source() const {
    std::string s;
    for (const auto* t : {&first, &second_positive, &second_negative}) {
        if (!*t) continue;
        if (!s.empty()) s += ";";
        s += (*t)->rule;
    }
    return s;
}

Prediction predict(const Facts& facts) {
    Prediction out;
    for (const auto& rule : prediction_rules()) {
        auto& slot = rule.target == Target::first             ? out.first
                     : rule.target == Target::second_positive ? out.second_positive
                                                              : out.second_negative;
        if (slot || !rule.applies(facts)) continue;
        slot = TargetPrediction{rule.id, rule.counts(facts)};
    }
    return out;
}

CycleCensus census(const Params& p, const CensusConfig& cfg) {
    CycleCensus cen;
    cen.params = p;
    if (p.b_zero_extension()) cen.flags.push_back("b0-extension");
    cen.zero = zero_stability(p);
    cen.sign = sign_criterion(p);

    const Relations rel = relations_at(p, cfg.probes);
    if (p.a > 1.0) {
        cen.infinity = infinity_stability(p, cfg.probes);
    } else {
        auto judge = [](double gap, bool positive_means_unstable) {
            if (!(std::abs(gap) >= kProbeTolerance)) return InfinityStability::undetermined;
            return (gap > 0.0) == positive_means_unstable ? InfinityStability::unstable : InfinityStability::stable;
        };
        cen.infinity.gap_plus = rel.gap_psi1;
        cen.infinity.plus = judge(rel.gap_psi1, true);
        if (p.a == 1.0) {
            cen.infinity.gap_minus = std::numeric_limits<double>::infinity();
            cen.infinity.minus = InfinityStability::unstable;
        } else {
            cen.infinity.gap_minus = -rel.gap_psi2;
            cen.infinity.minus = judge(-rel.gap_psi2, true);
        }
    }

    if (p.a < 1.0) {
        auto fk = find_first_kind_cycles(p, cfg.cycles);
        cen.first = std::move(fk.cycles);
        for (auto& w : fk.warnings) cen.flags.push_back("first-kind:" + w);
    }
    auto pos = find_second_kind_cycles(p, SignRegion::positive, cfg.cycles);
    auto neg = find_second_kind_cycles(p, SignRegion::negative, cfg.cycles);
    cen.second_pos = std::move(pos.cycles);
    cen.second_neg = std::move(neg.cycles);
    for (auto& w : pos.warnings) cen.flags.push_back("positive:" + w);
    for (auto& w : neg.warnings) cen.flags.push_back("negative:" + w);
    cen.i = static_cast<int>(cen.first.size());
    cen.j = cen.j_pos() + cen.j_neg();
    cen.label = classify_region(p, rel);

    if (rel.near_curve) {
        cen.near_bifurcation = true;
        cen.flags.push_back("near-bifurcation");
    } else {
        cen.predicted = predict(Facts{p, cen.sign, rel});
        if (cen.predicted.any()) {
            auto ok = [](const std::optional<TargetPrediction>& t, int n) {
                return !t || std::find(t->allowed.begin(), t->allowed.end(), n) != t->allowed.end();
            };
            cen.agreement = ok(cen.predicted.first, cen.i) && ok(cen.predicted.second_positive, cen.j_pos()) &&
                            ok(cen.predicted.second_negative, cen.j_neg());
        }
    }
    for (const auto& cyc : cen.first)
        if (cyc.multiplicity_estimate == 2) cen.flags.push_back("semistable-first");
    for (const auto* list : {&cen.second_pos, &cen.second_neg})
        for (const auto& cyc : *list)
            if (cyc.multiplicity_estimate == 2) cen.flags.push_back("semistable-second");
    if (cen.j > 2 || cen.i + cen.j > 2) cen.flags.push_back("bound-violation");
    return cen;
}

std::array<double, kPhaseSamples> phase_samples(const Params& p, double y0, const IntegratorConfig& cfg) {
    const auto orbit = abel_orbit(p, 0.0, y0, cfg);
    if (orbit.status() != Terminal::completed) throw ResolutionError("cycle orbit does not close a period");
    std::array<double, kPhaseSamples> out{};
    for (int k = 0; k < kPhaseSamples; ++k) out[k] = orbit(kTwoPi * k / kPhaseSamples)[0];
    return out;
}

namespace {

struct Tracker {
    const IntegratorConfig& cfg;

    double G(const Params& p, double y) const {
        IntegratorConfig gc = cfg;
        gc.keep_dense = false;
        const auto d = poincare_displacement(p, 0.0, y, gc);
        if (d.escaped) throw std::domain_error("orbit escaped while tracking");
        return d.value;
    }

    /// Extremum of sigma*G on [lo, hi]: returns (y*, sigma*G(y*)).
    std::pair<double, double> extremum(const Params& p, double lo, double hi, double sigma) const {
        std::uintmax_t iters = 200;
        const auto m = boost::math::tools::brent_find_minima([&](double y) { return -sigma * G(p, y); }, lo, hi, 45,
                                                             iters);
        return {m.first, -m.second};
    }

    /// Root of G between inner (where sigma*G > 0) and a point obtained by
    /// stepping outward from guess until sigma*G < 0.
    std::optional<double> root_outward(const Params& p, double inner, double guess, double sigma) const {
        double outer = guess;
        double g_out = G(p, outer);
        for (int it = 0; it < 60 && sigma * g_out > 0.0; ++it) {
            outer = inner + 2.0 * (outer - inner);
            if (outer <= 0.0) return std::nullopt;
            g_out = G(p, outer);
        }
        if (sigma * g_out > 0.0) return std::nullopt;
        const double g_in = G(p, inner);
        double lo = std::min(inner, outer), hi = std::max(inner, outer);
        double glo = lo == inner ? g_in : g_out, ghi = lo == inner ? g_out : g_in;
        if (glo == 0.0) return lo;
        if (ghi == 0.0) return hi;
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            [&](double y) { return G(p, y); }, lo, hi, glo, ghi,
            [](double l, double h) { return std::abs(h - l) <= kRootTolerance * std::max(1.0, std::abs(l)); },
            iters);
        return 0.5 * (r.first + r.second);
    }

    /// Root near guess by symmetric bracket growth.
    std::optional<double> root_near(const Params& p, double guess) const {
        const double g0 = G(p, guess);
        if (g0 == 0.0) return guess;
        for (double w = 1e-4 * std::abs(guess); w < 0.5 * std::abs(guess); w *= 2.0) {
            for (double other : {guess - w, guess + w}) {
                if ((other > 0.0) != (guess > 0.0)) continue;
                const double go = G(p, other);
                if ((go > 0.0) == (g0 > 0.0)) continue;
                double lo = std::min(guess, other), hi = std::max(guess, other);
                double glo = lo == guess ? g0 : go, ghi = lo == guess ? go : g0;
                std::uintmax_t iters = 200;
                const auto r = boost::math::tools::toms748_solve(
                    [&](double y) { return G(p, y); }, lo, hi, glo, ghi,
                    [](double l, double h) { return std::abs(h - l) <= kRootTolerance * std::max(1.0, std::abs(l)); },
                    iters);
                return 0.5 * (r.first + r.second);
            }
        }
        return std::nullopt;
    }

    BranchPoint point(const Params& p, double y0) const {
        BranchPoint bp;
        bp.b = p.b;
        bp.y0 = y0;
        const auto orbit = abel_orbit(p, 0.0, y0, cfg);
        bp.g_prime = displacement_derivative(p, orbit);
        for (int k = 0; k < kPhaseSamples; ++k) bp.phase[k] = orbit(kTwoPi * k / kPhaseSamples)[0];
        return bp;
    }
};

void check_properties(ContinuationRecord& rec) {
    std::vector<const BranchPoint*> all;
    for (const auto& bp : rec.stable_branch) all.push_back(&bp);
    for (const auto& bp : rec.unstable_branch) all.push_back(&bp);
    for (std::size_t u = 0; u < all.size(); ++u) {
        for (std::size_t v = u + 1; v < all.size(); ++v) {
            if (all[u]->b == all[v]->b) continue;
            int pos = 0, neg = 0;
            for (int k = 0; k < kPhaseSamples; ++k) {
                const double d = all[u]->phase[k] - all[v]->phase[k];
                if (d > 0.0) ++pos;
                if (d < 0.0) ++neg;
            }
            if (pos != kPhaseSamples && neg != kPhaseSamples) rec.no_intersection = false;
        }
    }
    // Each branch moves one way in y at every phase; stable and unstable
    // branches move in opposite directions.
    auto direction = [](std::vector<BranchPoint> br) {
        std::sort(br.begin(), br.end(), [](const auto& l, const auto& r) { return l.b < r.b; });
        int dir = 0;
        for (std::size_t n = 1; n < br.size(); ++n)
            for (int k = 0; k < kPhaseSamples; ++k) {
                const double d = br[n].phase[k] - br[n - 1].phase[k];
                const int s = d > 0.0 ? 1 : d < 0.0 ? -1 : 2;
                if (s == 2 || (dir != 0 && s != dir)) return 2;
                dir = s;
            }
        return dir;
    };
    const int ds = direction(rec.stable_branch), du = direction(rec.unstable_branch);
    rec.monotone = ds != 2 && du != 2 && (ds == 0 || du == 0 || ds == -du);
}

}  // namespace

ContinuationRecord continuation_in_b(const Params& p0, int direction, double db, const IntegratorConfig& cfg,
                                     const ContinuationOptions& opt) {
    if (direction != 1 && direction != -1) throw DomainError("direction must be +1 or -1");
    if (!(db > 0.0)) throw DomainError("db must be positive");
    ContinuationRecord rec;
    rec.last_good_b = p0.b;
    const Tracker tr{cfg};
    const auto start = find_second_kind_cycles(p0, SignRegion::positive, cfg);
    auto cycles = start.cycles;
    rec.counts.emplace_back(p0.b, static_cast<int>(cycles.size()));
    if (cycles.empty()) return rec;
    if (cycles.size() > 2) throw ContinuationGap("more than two cycles at the start point", p0.b);

    auto store = [&](const Params& p, double y, bool stable) {
        (stable ? rec.stable_branch : rec.unstable_branch).push_back(tr.point(p, y));
    };

    if (cycles.size() == 1) {
        double y = cycles[0].y0;
        const bool stable = cycles[0].g_prime < 0.0;
        store(p0, y, stable);
        for (int step = 1; step <= opt.max_steps; ++step) {
            Params p = p0;
            p.b = p0.b + direction * step * db;
            if (p.b <= 0.0 || (direction > 0 ? p.b > opt.b_end : p.b < opt.b_end)) break;
            const auto next = tr.root_near(p, y);
            if (!next) throw ContinuationGap("branch lost without a fold", rec.last_good_b);
            y = *next;
            store(p, y, stable);
            rec.counts.emplace_back(p.b, 1);
            rec.last_good_b = p.b;
        }
        check_properties(rec);
        return rec;
    }

    std::sort(cycles.begin(), cycles.end(), [](const auto& l, const auto& r) { return l.y0 < r.y0; });
    double y_lo = cycles[0].y0, y_hi = cycles[1].y0;
    const bool lo_stable = cycles[0].g_prime < 0.0;
    if (lo_stable == (cycles[1].g_prime < 0.0))
        throw ContinuationGap("cycle pair does not alternate in stability", p0.b);
    // Sign of G strictly between the two cycles.
    const double sigma = lo_stable ? -1.0 : 1.0;
    store(p0, y_lo, lo_stable);
    store(p0, y_hi, !lo_stable);

    double b_prev = p0.b;
    for (int step = 1; step <= opt.max_steps; ++step) {
        Params p = p0;
        p.b = p0.b + direction * step * db;
        if (p.b <= 0.0 || (direction > 0 ? p.b > opt.b_end : p.b < opt.b_end)) break;
        const auto [y_star, e] = tr.extremum(p, y_lo, y_hi, sigma);
        if (e <= 0.0) {
            // Fold between b_prev and p.b.
            double b_in = b_prev, b_out = p.b;
            double y_fold = y_star;
            while (std::abs(b_out - b_in) > opt.fold_tol) {
                Params q = p0;
                q.b = 0.5 * (b_in + b_out);
                const auto [ym, em] = tr.extremum(q, y_lo, y_hi, sigma);
                if (em > 0.0) {
                    b_in = q.b;
                    y_fold = ym;
                } else {
                    b_out = q.b;
                }
            }
            Params q = p0;
            q.b = b_in;
            rec.fold_b = b_in;
            rec.fold_cycle = make_second_kind_cycle(q, y_fold, cfg, true);
            rec.counts.emplace_back(b_in, 1);
            const auto after = find_second_kind_cycles(p, SignRegion::positive, cfg);
            rec.counts.emplace_back(p.b, static_cast<int>(after.cycles.size()));
            break;
        }
        const auto lo = tr.root_outward(p, y_star, y_lo, sigma);
        const auto hi = tr.root_outward(p, y_star, y_hi, sigma);
        if (!lo || !hi) throw ContinuationGap("branch lost without a fold", rec.last_good_b);
        y_lo = *lo;
        y_hi = *hi;
        store(p, y_lo, lo_stable);
        store(p, y_hi, !lo_stable);
        rec.counts.emplace_back(p.b, 2);
        rec.last_good_b = p.b;
        b_prev = p.b;
    }
    check_properties(rec);
    return rec;
}

std::vector<double> GridAxis::values() const {
    std::vector<double> v;
    if (n == 1) return {lo};
    for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
    return v;
}

GridAxis GridAxis::parse(const std::string& spec) {
    std::stringstream ss(spec);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw DomainError("grid spec must be lo:hi:n, got '" + spec + "'");
    GridAxis g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        g.n = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw DomainError("grid spec must be lo:hi:n, got '" + spec + "'");
    }
    if (g.n < 1 || g.hi < g.lo)
        throw DomainError("grid spec needs n >= 1 and lo <= hi");
    return g;
}

ScanRow to_row(const CycleCensus& cen) {
    ScanRow r;
    r.a = cen.params.a;
    r.b = cen.params.b;
    r.c = cen.params.c;
    r.label = cen.label.label;
    r.i = cen.i;
    r.j = cen.j;
    r.j_pos = cen.j_pos();
    r.j_neg = cen.j_neg();
    r.agreement = cen.agreement;
    r.flags = cen.flags;
    return r;
}

std::vector<ScanRow> scan(double c, const GridAxis& a_axis, const GridAxis& b_axis, const CensusConfig& cfg,
                          int jobs) {
    const auto as = a_axis.values();
    const auto bs = b_axis.values();
    std::vector<ScanRow> rows(as.size() * bs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            const double a = as[k / bs.size()];
            const double b = bs[k % bs.size()];
            ScanRow& row = rows[k];
            row.a = a;
            row.b = b;
            row.c = c;
            try {
                row = to_row(census(Params::make(a, b, c), cfg));
            } catch (const DomainError& e) {
                row.label = "invalid";
                row.flags.push_back(std::string("invalid:") + e.what());
            } catch (const std::exception& e) {
                row.label = "error";
                row.flags.push_back(std::string("error:") + e.what());
            }
        }
    };
    const int n = std::max(1, jobs);
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    return rows;
}

}  // namespace josephson
