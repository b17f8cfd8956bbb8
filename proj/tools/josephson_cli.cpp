// josephson: census, scan, curve, zero-stability and example41 subcommands.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "josephson/census.hpp"
#include "josephson/dataset.hpp"

using namespace josephson;

namespace {

struct PointArgs {
    std::optional<double> a, b, c;
    std::optional<double> alpha, beta, gamma;

    void add(CLI::App* cmd) {
        auto* oa = cmd->add_option("--a", a, "a (direct parameterization)");
        auto* ob = cmd->add_option("--b", b, "b >= 0");
        auto* oc = cmd->add_option("--c", c, "c");
        auto* pa = cmd->add_option("--alpha", alpha, "alpha (physical parameterization)");
        auto* pb = cmd->add_option("--beta", beta, "beta > 0");
        auto* pc = cmd->add_option("--gamma", gamma, "gamma");
        for (auto* o : {oa, ob, oc})
            for (auto* q : {pa, pb, pc}) o->excludes(q);
    }

    Params resolve() const {
        const bool direct = a || b || c;
        const bool physical = alpha || beta || gamma;
        if (direct && !(a && b && c)) throw DomainError("--a, --b and --c must be given together");
        if (physical && !(alpha && beta && gamma))
            throw DomainError("--alpha, --beta and --gamma must be given together");
        if (!direct && !physical) throw DomainError("give --a --b --c or --alpha --beta --gamma");
        return direct ? Params::make(*a, *b, *c) : from_physical(*alpha, *beta, *gamma);
    }
};

struct Common {
    std::optional<double> rel_tol, abs_tol;
    std::string out;
    std::string format = "csv";
    int jobs = 1;

    void add(CLI::App* cmd, bool with_output) {
        cmd->add_option("--rel-tol", rel_tol, "integrator relative tolerance");
        cmd->add_option("--abs-tol", abs_tol, "integrator absolute tolerance");
        cmd->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json", "text"}));
        if (with_output) {
            cmd->add_option("--out", out, "output path (stdout if omitted)");
            cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        }
    }

    CensusConfig config() const {
        CensusConfig cfg;
        for (auto* ic : {&cfg.cycles, &cfg.probes}) {
            if (rel_tol) ic->rel_tol = *rel_tol;
            if (abs_tol) ic->abs_tol = *abs_tol;
            ic->validate();
        }
        return cfg;
    }
};

// Writes through a temporary buffer so an unwritable path fails before
// any work is lost to a half-written file.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

std::string counts(const std::optional<TargetPrediction>& t) {
    if (!t) return "-";
    std::string s = "{";
    for (std::size_t k = 0; k < t->allowed.size(); ++k) s += (k ? "," : "") + std::to_string(t->allowed[k]);
    return s + "} by " + t->rule;
}

void print_cycles(std::ostream& os, const char* title, const std::vector<LimitCycle>& list) {
    for (const auto& cyc : list) {
        os << "  " << title << "  x0=" << format_number(cyc.x0) << "  y0=" << format_number(cyc.y0)
           << "  G'=" << format_number(cyc.g_prime) << "  " << to_string(cyc.stability);
        if (cyc.multiplicity_estimate == 2) os << "  (multiplicity 2, G''=" << format_number(cyc.g_second) << ")";
        os << '\n';
    }
}

std::string census_text(const CycleCensus& cen, double seconds) {
    std::ostringstream os;
    const auto& p = cen.params;
    os << "(a, b, c) = (" << format_number(p.a) << ", " << format_number(p.b) << ", " << format_number(p.c)
       << ")\n";
    os << "configuration (i, j) = (" << cen.i << ", " << cen.j << ")  [j+ = " << cen.j_pos()
       << ", j- = " << cen.j_neg() << "]\n";
    print_cycles(os, "first-kind      ", cen.first);
    print_cycles(os, "second-kind y>0 ", cen.second_pos);
    print_cycles(os, "second-kind y<0 ", cen.second_neg);
    os << "region: " << cen.label.label << (cen.label.boundary ? " (boundary)" : "") << '\n';
    os << "zero: upper " << to_string(cen.zero.upper) << ", lower " << to_string(cen.zero.lower)
       << (cen.zero.degenerate ? " (degenerate)" : "") << '\n';
    os << "infinity: +" << to_string(cen.infinity.plus) << ", -" << to_string(cen.infinity.minus) << '\n';
    os << "definite sign: " << (cen.sign.holds ? to_string(cen.sign.condition) : "no") << '\n';
    if (cen.near_bifurcation) {
        os << "prediction: omitted (near a bifurcation curve)\n";
    } else {
        os << "prediction: first " << counts(cen.predicted.first) << "; y>0 " << counts(cen.predicted.second_positive)
           << "; y<0 " << counts(cen.predicted.second_negative) << '\n';
    }
    os << "agreement: " << (cen.agreement ? (*cen.agreement ? "yes" : "NO") : "n/a") << '\n';
    if (!cen.flags.empty()) {
        os << "flags:";
        for (const auto& f : cen.flags) os << ' ' << f;
        os << '\n';
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "time: %.3f s\n", seconds);
    os << buf;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limit cycles of the Josephson equation on the cylinder"};
    app.require_subcommand(1);

    PointArgs census_pt;
    Common census_common;
    census_common.format = "text";
    auto* census_cmd = app.add_subcommand("census", "count and classify the limit cycles at one point");
    census_pt.add(census_cmd);
    census_common.add(census_cmd, false);
    census_cmd->add_option("--out", census_common.out, "output path (stdout if omitted)");

    double scan_c = 0.0;
    std::string scan_a, scan_b;
    Common scan_common;
    auto* scan_cmd = app.add_subcommand("scan", "census on an a x b grid at fixed c");
    scan_cmd->add_option("--c", scan_c, "c")->required();
    scan_cmd->add_option("--a", scan_a, "a grid lo:hi:n")->required();
    scan_cmd->add_option("--b", scan_b, "b grid lo:hi:n")->required();
    scan_common.add(scan_cmd, true);

    std::string curve_name;
    double curve_c = 0.0;
    std::string curve_a = "0:0.99:12";
    Common curve_common;
    auto* curve_cmd = app.add_subcommand("curve", "sample phi, psi1 or psi2 along an a grid");
    curve_cmd->add_option("name", curve_name, "phi|psi1|psi2")->required()->check(
        CLI::IsMember({"phi", "psi1", "psi2"}));
    curve_cmd->add_option("--c", curve_c, "c")->required();
    curve_cmd->add_option("--a", curve_a, "a grid lo:hi:n");
    curve_common.add(curve_cmd, true);

    PointArgs zero_pt;
    auto* zero_cmd = app.add_subcommand("zero-stability", "coefficients of G near y = 0 and stability of y = 0");
    zero_pt.add(zero_cmd);

    Common ex_common;
    auto* ex_cmd = app.add_subcommand("example41", "reproduce the (1,1) census at (0.5, 0.75, -1)");
    ex_common.add(ex_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*census_cmd) {
            const Params p = census_pt.resolve();
            const auto cfg = census_common.config();
            const auto t0 = std::chrono::steady_clock::now();
            const auto cen = census(p, cfg);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (census_common.format == "json")
                emit(census_common.out, census_json(cen) + "\n");
            else if (census_common.format == "csv") {
                std::ostringstream os;
                write_rows(os, {to_row(cen)}, Format::csv);
                emit(census_common.out, os.str());
            } else
                emit(census_common.out, census_text(cen, secs));
            return 0;
        }
        if (*scan_cmd) {
            const auto a_axis = GridAxis::parse(scan_a);
            const auto b_axis = GridAxis::parse(scan_b);
            const auto fmt = parse_format(scan_common.format);
            const auto cfg = scan_common.config();
            if (!scan_common.out.empty() && scan_common.out != "-") {
                std::ofstream probe(scan_common.out, std::ios::app);
                if (!probe) throw std::runtime_error("cannot open '" + scan_common.out + "' for writing");
            }
            const auto rows = scan(scan_c, a_axis, b_axis, cfg, scan_common.jobs);
            std::ostringstream os;
            write_rows(os, rows, fmt);
            emit(scan_common.out, os.str());
            return 0;
        }
        if (*curve_cmd) {
            const auto curve = *parse_curve(curve_name);
            const auto axis = GridAxis::parse(curve_a);
            const auto fmt = parse_format(curve_common.format);
            const auto cfg = curve_common.config();
            const auto samples = bifurcation_curve(curve, curve_c, axis.values(), cfg.probes);
            const auto k = derived_constants(curve_c, cfg.probes);
            const double a_last = axis.values().back();
            const double lead = -5.0 * curve_c * std::sqrt(2.0 * (1.0 - a_last)) / 7.0;
            std::ostringstream os;
            write_curve(os, samples, k, lead, fmt);
            emit(curve_common.out, os.str());
            return 0;
        }
        if (*zero_cmd) {
            const Params p = zero_pt.resolve();
            const auto z = zero_coefficients(p);
            const auto zp = zero_coefficients_printed(p);
            const auto st = zero_stability(p);
            std::cout << "G2 = " << format_number(z.G2) << "\nG3 = " << format_number(z.G3)
                      << "\nG4 = " << format_number(z.G4) << '\n';
            std::cout << "legacy closed forms: G3 = " << format_number(zp.G3) << ", G4 = " << format_number(zp.G4) << '\n';
            std::cout << "upper (y>0): " << to_string(st.upper) << "\nlower (y<0): " << to_string(st.lower)
                      << (st.degenerate ? "\ndegenerate: leading coefficients vanish" : "") << '\n';
            return 0;
        }
        if (*ex_cmd) {
            const Params p = Params::make(0.5, 0.75, -1.0);
            const auto cfg = ex_common.config();
            const auto t0 = std::chrono::steady_clock::now();
            const auto cen = census(p, cfg);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << census_text(cen, secs);
            bool ok = cen.i == 1 && cen.j == 1;
            for (const auto* list : {&cen.first, &cen.second_pos, &cen.second_neg})
                for (const auto& cyc : *list) ok = ok && cyc.g_prime < 0.0;
            std::cout << (ok ? "reproduced: (1,1), both stable\n" : "NOT reproduced\n");
            return ok ? 0 : 1;
        }
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
