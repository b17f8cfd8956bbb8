// Per-point cycle census, region labels, prediction table, continuation in
// b and grid scans.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "josephson/abel.hpp"
#include "josephson/lienard.hpp"

namespace josephson {

/// Position of b relative to a curve value at fixed (a, c).
enum class Relation { below, on, above };

struct Relations {
    std::optional<Relation> phi;
    std::optional<Relation> psi1;
    std::optional<Relation> psi2;
    std::optional<Relation> hopf;
    /// Signed gaps the relations came from (NaN when not computed).
    double gap_phi = std::numeric_limits<double>::quiet_NaN();
    double gap_psi1 = std::numeric_limits<double>::quiet_NaN();
    double gap_psi2 = std::numeric_limits<double>::quiet_NaN();
    bool near_curve = false;
};

inline constexpr double kNearBand = 10.0 * kGapTolerance;

/// Relations from connection gaps evaluated at p itself.
Relations relations_at(const Params& p, const IntegratorConfig& cfg = IntegratorConfig::scan());

/// Curve values precomputed at (a, c), as produced by bifurcation_curve.
struct CurveSet {
    std::optional<CurveSample> phi;
    std::optional<CurveSample> psi1;
    std::optional<CurveSample> psi2;
};

class NeedsCurvesError : public std::runtime_error {
public:
    explicit NeedsCurvesError(const std::string& missing)
        : std::runtime_error("needs curve(s): " + missing), missing_(missing) {}
    const std::string& missing() const noexcept { return missing_; }

private:
    std::string missing_;
};

struct RegionLabel {
    std::string label;
    bool boundary = false;
};

RegionLabel classify_region(const Params& p, const Relations& rel);
/// Throws NeedsCurvesError when a curve the label depends on is absent.
RegionLabel classify_region(const Params& p, const CurveSet& curves);

enum class Target { first, second_positive, second_negative };
std::string to_string(Target t);

struct Facts {
    Params p;
    SignCriterion sign;
    Relations rel;
};

struct PredictionRule {
    std::string id;
    Target target;
    std::function<bool(const Facts&)> applies;
    std::function<std::vector<int>(const Facts&)> counts;
};

/// Ordered rule table; the first applicable rule per target wins.
const std::vector<PredictionRule>& prediction_rules();

struct TargetPrediction {
    std::string rule;
    std::vector<int> allowed;
};

struct Prediction {
    std::optional<TargetPrediction> first;
    std::optional<TargetPrediction> second_positive;
    std::optional<TargetPrediction> second_negative;
    bool any() const { return first || second_positive || second_negative; }
    std::string source() const;
};

Prediction predict(const Facts& facts);

struct CycleCensus {
    Params params;
    std::vector<LimitCycle> first;
    std::vector<LimitCycle> second_pos;
    std::vector<LimitCycle> second_neg;
    int i = 0;
    int j = 0;
    RegionLabel label;
    Prediction predicted;
    bool near_bifurcation = false;
    std::optional<bool> agreement;
    ZeroStability zero;
    InfinityReport infinity;
    SignCriterion sign;
    std::vector<std::string> flags;

    int j_pos() const { return static_cast<int>(second_pos.size()); }
    int j_neg() const { return static_cast<int>(second_neg.size()); }
};

struct CensusConfig {
    IntegratorConfig cycles = IntegratorConfig::location();
    IntegratorConfig probes = IntegratorConfig::scan();
};

CycleCensus census(const Params& p, const CensusConfig& cfg = {});

class ContinuationGap : public std::runtime_error {
public:
    ContinuationGap(const std::string& what, double last_good_b)
        : std::runtime_error(what), last_good_b_(last_good_b) {}
    double last_good_b() const noexcept { return last_good_b_; }

private:
    double last_good_b_;
};

inline constexpr int kPhaseSamples = 16;

struct BranchPoint {
    double b = 0.0;
    double y0 = 0.0;
    double g_prime = 0.0;
    std::array<double, kPhaseSamples> phase{};
};

struct ContinuationRecord {
    /// Index 0: stable branch, 1: unstable branch (positive region).
    std::vector<BranchPoint> stable_branch;
    std::vector<BranchPoint> unstable_branch;
    std::optional<double> fold_b;
    std::optional<LimitCycle> fold_cycle;
    /// (b, positive second-kind count) observed along the run.
    std::vector<std::pair<double, int>> counts;
    bool no_intersection = true;
    bool monotone = true;
    double last_good_b = 0.0;
};

struct ContinuationOptions {
    double b_end = std::numeric_limits<double>::infinity();
    int max_steps = 2000;
    double fold_tol = 1e-9;
};

/// Follows the positive-region second-kind cycles of the census at p0 as b
/// moves by db per step (direction +1 or -1).
ContinuationRecord continuation_in_b(const Params& p0, int direction, double db,
                                     const IntegratorConfig& cfg = IntegratorConfig::location(),
                                     const ContinuationOptions& opt = {});

/// Values of the cycle through (0, y0) at x = 2 pi k / 16.
std::array<double, kPhaseSamples> phase_samples(const Params& p, double y0,
                                                const IntegratorConfig& cfg = IntegratorConfig::location());

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
    std::vector<double> values() const;
    /// Parses "lo:hi:n" (inclusive endpoints).
    static GridAxis parse(const std::string& spec);
};

struct ScanRow {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    std::string label;
    int i = 0;
    int j = 0;
    int j_pos = 0;
    int j_neg = 0;
    std::optional<bool> agreement;
    std::vector<std::string> flags;
};

ScanRow to_row(const CycleCensus& cen);

/// Census on the a x b grid at fixed c; rows ordered a-major. Per-point
/// failures are recorded in the row.
std::vector<ScanRow> scan(double c, const GridAxis& a_axis, const GridAxis& b_axis, const CensusConfig& cfg = {},
                          int jobs = 1);

}  // namespace josephson
