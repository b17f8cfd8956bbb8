#include "josephson/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace josephson {

namespace {

using nlohmann::ordered_json;

// JSON numbers go through the same 12-digit text so both formats agree.
ordered_json number(double v) {
    if (!std::isfinite(v)) return format_number(v);
    return ordered_json::parse(format_number(v));
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += sep;
        s += p;
    }
    return s;
}

// Flags can carry exception text; keep CSV cells single-field.
std::string csv_cell(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

ordered_json optional_number(const std::optional<double>& v) { return v ? number(*v) : ordered_json(); }

std::string optional_text(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw DomainError("format must be csv or json, got '" + name + "'");
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_rows(std::ostream& os, const std::vector<ScanRow>& rows, Format fmt) {
    if (fmt == Format::csv) {
        os << kScanHeader << '\n';
        for (const auto& r : rows) {
            os << format_number(r.a) << ',' << format_number(r.b) << ',' << format_number(r.c) << ','
               << csv_cell(r.label) << ',' << r.i << ',' << r.j << ',' << r.j_pos << ',' << r.j_neg << ','
               << (r.agreement ? (*r.agreement ? "true" : "false") : "") << ',' << csv_cell(join(r.flags, ';'))
               << '\n';
        }
        return;
    }
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json o;
        o["a"] = number(r.a);
        o["b"] = number(r.b);
        o["c"] = number(r.c);
        o["label"] = r.label;
        o["i"] = r.i;
        o["j"] = r.j;
        o["j_pos"] = r.j_pos;
        o["j_neg"] = r.j_neg;
        o["agreement"] = r.agreement ? ordered_json(*r.agreement) : ordered_json();
        o["flags"] = join(r.flags, ';');
        arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
}

void write_curve(std::ostream& os, const std::vector<CurveSample>& samples, const DerivedConstants& k,
                 double leading_order_phi, Format fmt) {
    if (fmt == Format::csv) {
        os << kCurveHeader << '\n';
        for (const auto& s : samples) {
            os << to_string(s.curve) << ',' << format_number(s.a) << ',' << format_number(s.c) << ','
               << (s.found ? format_number(s.b) : "") << ',' << (s.found ? "true" : "not-found") << ','
               << format_number(s.gap) << '\n';
        }
        os << "# c=" << format_number(k.c) << '\n';
        os << "# a_lower_star=" << optional_text(k.a_lower_star) << '\n';
        os << "# a_upper_star=" << optional_text(k.a_upper_star) << '\n';
        os << "# a_bar=" << optional_text(k.a_bar) << '\n';
        os << "# a_tilde=" << optional_text(k.a_tilde) << '\n';
        os << "# phi_leading_order_at_last_a=" << format_number(leading_order_phi) << '\n';
        return;
    }
    ordered_json rows = ordered_json::array();
    for (const auto& s : samples) {
        ordered_json o;
        o["curve"] = to_string(s.curve);
        o["a"] = number(s.a);
        o["c"] = number(s.c);
        o["b"] = s.found ? number(s.b) : ordered_json();
        o["found"] = s.found;
        o["gap"] = number(s.gap);
        rows.push_back(std::move(o));
    }
    ordered_json out;
    out["samples"] = rows;
    out["constants"] = {{"c", number(k.c)},
                        {"a_lower_star", optional_number(k.a_lower_star)},
                        {"a_upper_star", optional_number(k.a_upper_star)},
                        {"a_bar", optional_number(k.a_bar)},
                        {"a_tilde", optional_number(k.a_tilde)},
                        {"phi_leading_order_at_last_a", number(leading_order_phi)}};
    os << out.dump(2) << '\n';
}

std::string census_json(const CycleCensus& cen) {
    auto cycles = [](const std::vector<LimitCycle>& list) {
        ordered_json arr = ordered_json::array();
        for (const auto& cyc : list) {
            ordered_json o;
            o["kind"] = to_string(cyc.kind);
            o["x0"] = number(cyc.x0);
            o["y0"] = number(cyc.y0);
            o["g_prime"] = number(cyc.g_prime);
            o["g_second"] = std::isnan(cyc.g_second) ? ordered_json() : number(cyc.g_second);
            o["stability"] = to_string(cyc.stability);
            o["multiplicity_estimate"] = cyc.multiplicity_estimate;
            arr.push_back(std::move(o));
        }
        return arr;
    };
    auto target = [](const std::optional<TargetPrediction>& t) {
        if (!t) return ordered_json();
        return ordered_json{{"rule", t->rule}, {"allowed", t->allowed}};
    };
    ordered_json o;
    o["a"] = number(cen.params.a);
    o["b"] = number(cen.params.b);
    o["c"] = number(cen.params.c);
    o["label"] = cen.label.label;
    o["boundary"] = cen.label.boundary;
    o["i"] = cen.i;
    o["j"] = cen.j;
    o["j_pos"] = cen.j_pos();
    o["j_neg"] = cen.j_neg();
    o["first_kind"] = cycles(cen.first);
    o["second_kind_positive"] = cycles(cen.second_pos);
    o["second_kind_negative"] = cycles(cen.second_neg);
    o["prediction"] = {{"first", target(cen.predicted.first)},
                       {"second_positive", target(cen.predicted.second_positive)},
                       {"second_negative", target(cen.predicted.second_negative)}};
    o["near_bifurcation"] = cen.near_bifurcation;
    o["agreement"] = cen.agreement ? ordered_json(*cen.agreement) : ordered_json();
    o["zero"] = {{"degenerate", cen.zero.degenerate},
                 {"upper", to_string(cen.zero.upper)},
                 {"lower", to_string(cen.zero.lower)}};
    o["infinity"] = {{"plus", to_string(cen.infinity.plus)},
                     {"minus", to_string(cen.infinity.minus)},
                     {"gap_plus", number(cen.infinity.gap_plus)},
                     {"gap_minus", number(cen.infinity.gap_minus)}};
    o["sign_criterion"] = {{"holds", cen.sign.holds}, {"condition", to_string(cen.sign.condition)}};
    o["flags"] = join(cen.flags, ';');
    return o.dump(2);
}

}  // namespace josephson
