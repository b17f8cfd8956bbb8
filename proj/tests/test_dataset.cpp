#include <doctest.h>

#include <json.hpp>
#include <limits>
#include <sstream>

#include "josephson/dataset.hpp"

using namespace josephson;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out{""};
    for (char ch : s) {
        if (ch == sep)
            out.emplace_back();
        else
            out.back() += ch;
    }
    return out;
}

std::vector<ScanRow> sample_rows() {
    ScanRow r1;
    r1.a = 0.5;
    r1.b = 0.75;
    r1.c = -1.0;
    r1.label = "S3";
    r1.i = r1.j = r1.j_pos = 1;
    r1.agreement = true;
    ScanRow r2;
    r2.a = 1.0 / 3.0;
    r2.b = 0.1;
    r2.c = -1.0;
    r2.label = "HL";
    r2.flags = {"near-bifurcation", "b0-extension"};
    return {r1, r2};
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(parse_format("json") == Format::json);
    CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("csv rows") {
    std::ostringstream os;
    write_rows(os, sample_rows(), Format::csv);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == kScanHeader);
    std::getline(in, line);
    CHECK(line == "0.5,0.75,-1,S3,1,1,1,0,true,");
    std::getline(in, line);
    // Undecided agreement is an empty cell; flags are ';'-joined.
    CHECK(line == "0.333333333333,0.1,-1,HL,0,0,0,0,,near-bifurcation;b0-extension");
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("csv and json carry the same values") {
    const auto rows = sample_rows();
    std::ostringstream csv, js;
    write_rows(csv, rows, Format::csv);
    write_rows(js, rows, Format::json);
    const auto arr = nlohmann::json::parse(js.str());
    REQUIRE(arr.size() == rows.size());
    auto lines = split(csv.str(), '\n');
    const auto header = split(lines[0], ',');
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto cells = split(lines[k + 1], ',');
        REQUIRE(cells.size() == header.size());
        for (std::size_t f = 0; f < header.size(); ++f) {
            const auto& v = arr[k].at(header[f]);
            std::string as_text;
            if (v.is_null())
                as_text = "";
            else if (v.is_string())
                as_text = v.get<std::string>();
            else if (v.is_boolean())
                as_text = v.get<bool>() ? "true" : "false";
            else if (v.is_number_integer())
                as_text = std::to_string(v.get<long>());
            else
                as_text = format_number(v.get<double>());
            CHECK_MESSAGE(as_text == cells[f], header[f]);
        }
    }
}

TEST_CASE("csv cells with separators are quoted") {
    ScanRow r;
    r.label = "error";
    r.flags = {"error:bad, worse"};
    std::ostringstream os;
    write_rows(os, {r}, Format::csv);
    CHECK(os.str().find("\"error:bad, worse\"") != std::string::npos);
}

TEST_CASE("curve output with constants footer") {
    CurveSample s1{Curve::phi, 0.97, -0.1, 0.0101, kGapTolerance, true, 1e-9};
    CurveSample s2{Curve::phi, 0.99, -0.1, 0.0, kGapTolerance, false, 0.2};
    DerivedConstants k;
    k.c = -0.1;
    k.a_tilde = 0.5;
    std::ostringstream csv;
    write_curve(csv, {s1, s2}, k, 0.0101, Format::csv);
    const auto lines = split(csv.str(), '\n');
    CHECK(lines[0] == kCurveHeader);
    CHECK(lines[1] == "phi,0.97,-0.1,0.0101,true,1e-09");
    CHECK(lines[2] == "phi,0.99,-0.1,,not-found,0.2");
    CHECK(lines[3] == "# c=-0.1");
    CHECK(lines[4] == "# a_lower_star=");
    CHECK(lines[7] == "# a_tilde=0.5");
    CHECK(lines[8] == "# phi_leading_order_at_last_a=0.0101");

    std::ostringstream js;
    write_curve(js, {s1, s2}, k, 0.0101, Format::json);
    const auto o = nlohmann::json::parse(js.str());
    CHECK(o["samples"].size() == 2);
    CHECK(o["samples"][1]["b"].is_null());
    CHECK(o["constants"]["a_tilde"] == 0.5);
    CHECK(o["constants"]["a_bar"].is_null());
}

TEST_CASE("census report as json") {
    const auto o = nlohmann::json::parse(census_json(census({0.5, 0.75, -1.0})));
    CHECK(o["label"] == "S3");
    CHECK(o["i"] == 1);
    CHECK(o["j_pos"] == 1);
    CHECK(o["first_kind"].size() == 1);
    CHECK(o["first_kind"][0]["stability"] == "stable");
    CHECK(o["agreement"] == true);
    CHECK(o["prediction"]["first"]["rule"] == "first:c<0,phi<b<hopf");
}
