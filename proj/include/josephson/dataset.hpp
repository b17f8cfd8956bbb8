// CSV/JSON emission of scan rows and curve samples.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "josephson/census.hpp"

namespace josephson {

enum class Format { csv, json };
Format parse_format(const std::string& name);

inline constexpr const char* kScanHeader = "a,b,c,label,i,j,j_pos,j_neg,agreement,flags";
inline constexpr const char* kCurveHeader = "curve,a,c,b,found,gap";

/// %.12g, the precision used in every emitted file.
std::string format_number(double v);

void write_rows(std::ostream& os, const std::vector<ScanRow>& rows, Format fmt);
void write_curve(std::ostream& os, const std::vector<CurveSample>& samples, const DerivedConstants& k,
                 double leading_order_phi, Format fmt);

/// Full per-point report (cycles, prediction, stability at 0 and infinity).
std::string census_json(const CycleCensus& cen);

}  // namespace josephson
