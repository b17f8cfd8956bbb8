// Adaptive Dormand-Prince 8(5,3) integration with 7th-order dense output,
// event location and escape (blow-up) detection.
//
// The coefficients are those of Hairer and Wanner's DOP853. The stepper is
// a template over the state dimension so that the scalar Abel equation and
// the planar Lienard system share the same code path.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace josephson {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Right-hand side dstate/dx = field(x, state).
template <std::size_t N>
using Field = std::function<Vec<N>(double, const Vec<N>&)>;

template <std::size_t N>
using EventFunction = std::function<double(double, const Vec<N>&)>;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.25;
    double escape_bound = 1e6;
    double max_x_span = 200.0;
    /// Keep per-step interpolation coefficients so the trajectory can be
    /// evaluated anywhere. Scans that only need the end point turn it off.
    bool keep_dense = true;

    void validate() const;

    /// Tolerances used when locating cycles.
    static IntegratorConfig location() { return {}; }
    /// Tolerances used on parameter scans.
    static IntegratorConfig scan() {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-8;
        cfg.abs_tol = 1e-8;
        return cfg;
    }
};

inline constexpr double kMinStep = 1e-12;

class StiffnessError : public std::runtime_error {
public:
    explicit StiffnessError(double x)
        : std::runtime_error("step size underflow (< 1e-12) at x = " + std::to_string(x)), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void IntegratorConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(rel_tol) || !positive(abs_tol) || !positive(max_step) || !positive(escape_bound) ||
        !positive(max_x_span))
        throw ConfigError("integrator settings must be finite and strictly positive");
    if (rel_tol > 1e-3 || abs_tol > 1e-3)
        throw ConfigError("rel_tol and abs_tol must not exceed 1e-3");
}

enum class Terminal { completed, escaped, event };
enum class Crossing { any, rising, falling };

template <std::size_t N>
struct Event {
    EventFunction<N> fn;
    Crossing direction = Crossing::any;
};

template <std::size_t N>
class Trajectory {
public:
    struct Sample {
        double x;
        Vec<N> state;
    };

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    double x_begin() const { return samples_.front().x; }
    double x_end() const { return samples_.back().x; }
    const Vec<N>& front() const { return samples_.front().state; }
    const Vec<N>& back() const { return samples_.back().state; }

    Terminal status() const noexcept { return status_; }
    /// x where integration stopped (escape or event); x_end() otherwise.
    double x_stop() const noexcept { return x_stop_; }
    /// Index of the event that fired, -1 when none did.
    int event_index() const noexcept { return event_index_; }
    bool has_dense() const noexcept { return !segments_.empty() || samples_.size() == 1; }

    /// Dense evaluation on [x_begin, x_end].
    Vec<N> operator()(double x) const {
        if (segments_.empty()) {
            if (samples_.size() == 1 && x == samples_.front().x) return samples_.front().state;
            throw std::logic_error("trajectory was integrated without dense output");
        }
        const double lo = std::min(x_begin(), x_end());
        const double hi = std::max(x_begin(), x_end());
        const double slack = 1e-12 * std::max(1.0, std::abs(hi));
        if (x < lo - slack || x > hi + slack) throw std::out_of_range("dense evaluation outside trajectory");
        auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                                   [](double v, const Segment& s) { return v < s.x0; });
        if (it != segments_.begin()) --it;
        return it->eval(x);
    }

    struct Segment {
        double x0;
        double h;
        std::array<Vec<N>, 8> rc;

        Vec<N> eval(double x) const {
            const double s = (x - x0) / h;
            const double s1 = 1.0 - s;
            Vec<N> out;
            for (std::size_t i = 0; i < N; ++i)
                out[i] = rc[0][i] +
                         s * (rc[1][i] +
                              s1 * (rc[2][i] +
                                    s * (rc[3][i] +
                                         s1 * (rc[4][i] + s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
            return out;
        }
    };

    const std::vector<Segment>& segments() const noexcept { return segments_; }

private:
    template <std::size_t M>
    friend class Dop853;

    std::vector<Sample> samples_;
    std::vector<Segment> segments_;
    Terminal status_ = Terminal::completed;
    double x_stop_ = 0.0;
    int event_index_ = -1;
};

namespace detail {

template <std::size_t N>
double norm(const Vec<N>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

}  // namespace detail

template <std::size_t N>
class Dop853 {
public:
    Dop853(const Field<N>& field, const IntegratorConfig& cfg) : f_(field), cfg_(cfg) { cfg_.validate(); }

    Trajectory<N> run(double x0, const Vec<N>& y0, double x1, std::span<const Event<N>> events) {
        if (!(x1 > x0)) throw std::invalid_argument("integration requires x1 > x0");
        Trajectory<N> traj;
        traj.samples_.push_back({x0, y0});
        traj.x_stop_ = x1;

        std::vector<double> ev_prev(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) ev_prev[e] = events[e].fn(x0, y0);

        double x = x0;
        Vec<N> y = y0;
        Vec<N> k1 = f_(x, y);
        const double hmax = std::min(cfg_.max_step, x1 - x0);
        double h = initial_step(x, y, k1, hmax);
        double facold = 1e-4;
        bool reject = false;
        long steps = 0;

        while (true) {
            bool last = false;
            if (x + 1.01 * h >= x1) {
                h = x1 - x;
                last = true;
            } else if (h < kMinStep) {
                throw StiffnessError(x);
            }
            if (++steps > kMaxSteps) throw StiffnessError(x);

            const double err = attempt(x, y, k1, h);
            const double fac11 = std::pow(err, 0.125);
            if (err <= 1.0) {
                facold = std::max(err, 1e-4);
                (void)facold;
                stage_[12] = f_(x + h, ynew_);
                const double xnew = last ? x1 : x + h;

                bool dense_ready = false;
                if (cfg_.keep_dense) {
                    traj.segments_.push_back(make_segment(x, y, h));
                    dense_ready = true;
                }

                // Event detection on the accepted step.
                int fired = -1;
                double x_fire = xnew;
                Vec<N> y_fire = ynew_;
                for (std::size_t e = 0; e < events.size(); ++e) {
                    const double cur = events[e].fn(xnew, ynew_);
                    if (crosses(ev_prev[e], cur, events[e].direction)) {
                        if (!dense_ready) {
                            scratch_segment_ = make_segment(x, y, h);
                            dense_ready = true;
                        }
                        const auto& seg = cfg_.keep_dense ? traj.segments_.back() : scratch_segment_;
                        const double xe = locate(seg, events[e], x, xnew, ev_prev[e], cur);
                        if (fired < 0 || xe < x_fire) {
                            fired = static_cast<int>(e);
                            x_fire = xe;
                            y_fire = seg.eval(xe);
                        }
                    }
                    ev_prev[e] = cur;
                }
                if (fired >= 0) {
                    traj.samples_.push_back({x_fire, y_fire});
                    traj.status_ = Terminal::event;
                    traj.x_stop_ = x_fire;
                    traj.event_index_ = fired;
                    return traj;
                }

                x = xnew;
                y = ynew_;
                k1 = stage_[12];
                traj.samples_.push_back({x, y});

                if (!std::isfinite(detail::norm(y)) || detail::norm(y) > cfg_.escape_bound) {
                    traj.status_ = Terminal::escaped;
                    traj.x_stop_ = x;
                    return traj;
                }
                if (last) {
                    traj.status_ = Terminal::completed;
                    traj.x_stop_ = x;
                    return traj;
                }

                double fac = std::clamp(fac11 / kSafe, 1.0 / 6.0, 3.0);
                double hnew = h / fac;
                hnew = std::min(hnew, hmax);
                if (reject) hnew = std::min(hnew, h);
                reject = false;
                h = hnew;
            } else {
                if (!std::isfinite(err)) {
                    h *= 0.1;
                } else {
                    h = h / std::min(3.0, fac11 / kSafe);
                }
                reject = true;
                if (h < kMinStep) throw StiffnessError(x);
            }
        }
    }

private:
    static constexpr double kSafe = 0.9;
    static constexpr long kMaxSteps = 2'000'000;

    static bool crosses(double prev, double cur, Crossing dir) {
        const bool up = prev < 0.0 && cur >= 0.0;
        const bool down = prev > 0.0 && cur <= 0.0;
        switch (dir) {
            case Crossing::rising: return up;
            case Crossing::falling: return down;
            default: return up || down;
        }
    }

    double locate(const typename Trajectory<N>::Segment& seg, const Event<N>& ev, double lo, double hi,
                  double flo, double fhi) const {
        if (fhi == 0.0) return hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double fm = ev.fn(mid, seg.eval(mid));
            if (std::abs(fm) < 1e-3 * cfg_.abs_tol && hi - lo < 1e-9) return mid;
            if ((flo < 0.0) == (fm < 0.0) && fm != 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        return std::abs(flo) < std::abs(fhi) ? lo : hi;
    }

    double initial_step(double x, const Vec<N>& y, const Vec<N>& k1, double hmax) {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, hmax);
        Vec<N> y1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h * k1[i];
        const Vec<N> k2 = f_(x + h, y1);
        double der2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.125);
        return std::max(std::min({100.0 * h, h1, hmax}), 10.0 * kMinStep);
    }

    Vec<N> combo(const Vec<N>& y, double h, std::initializer_list<std::pair<double, int>> terms) const {
        Vec<N> out = y;
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (auto [coef, k] : terms) acc += coef * stage_[k][i];
            out[i] += h * acc;
        }
        return out;
    }

    /// One DOP853 step. Returns the scaled error norm; the 8th-order
    /// solution is left in ynew_.
    double attempt(double x, const Vec<N>& y, const Vec<N>& k1, double h) {
        constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                         c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                         c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                         c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                         c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
        constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                         b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                         b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                         b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
        constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                         a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                         a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                         a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                         a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                         a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                         a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                         a76 = -1.7578125E-2, a81 = 3.70920001185047927108779319836E-2,
                         a84 = 1.70383925712239993810214054705E-1, a85 = 1.07262030446373284651809199168E-1,
                         a86 = -1.53194377486244017527936158236E-2, a87 = 8.27378916381402288758473766002E-3,
                         a91 = 6.24110958716075717114429577812E-1, a94 = -3.36089262944694129406857109825E0,
                         a95 = -8.68219346841726006818189891453E-1, a96 = 2.75920996994467083049415600797E1,
                         a97 = 2.01540675504778934086186788979E1, a98 = -4.34898841810699588477366255144E1,
                         a101 = 4.77662536438264365890433908527E-1, a104 = -2.48811461997166764192642586468E0,
                         a105 = -5.90290826836842996371446475743E-1, a106 = 2.12300514481811942347288949897E1,
                         a107 = 1.52792336328824235832596922938E1, a108 = -3.32882109689848629194453265587E1,
                         a109 = -2.03312017085086261358222928593E-2, a111 = -9.3714243008598732571704021658E-1,
                         a114 = 5.18637242884406370830023853209E0, a115 = 1.09143734899672957818500254654E0,
                         a116 = -8.14978701074692612513997267357E0, a117 = -1.85200656599969598641566180701E1,
                         a118 = 2.27394870993505042818970056734E1, a119 = 2.49360555267965238987089396762E0,
                         a1110 = -3.0467644718982195003823669022E0, a121 = 2.27331014751653820792359768449E0,
                         a124 = -1.05344954667372501984066689879E1, a125 = -2.00087205822486249909675718444E0,
                         a126 = -1.79589318631187989172765950534E1, a127 = 2.79488845294199600508499808837E1,
                         a128 = -2.85899827713502369474065508674E0, a129 = -8.87285693353062954433549289258E0,
                         a1210 = 1.23605671757943030647266201528E1, a1211 = 6.43392746015763530355970484046E-1;
        constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                         bhh3 = 0.220588235294117647058823529412E-01;
        constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                         er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                         er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                         er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

        // stage_[k] holds stage k+1.
        stage_[0] = k1;
        stage_[1] = f_(x + c2 * h, combo(y, h, {{a21, 0}}));
        stage_[2] = f_(x + c3 * h, combo(y, h, {{a31, 0}, {a32, 1}}));
        stage_[3] = f_(x + c4 * h, combo(y, h, {{a41, 0}, {a43, 2}}));
        stage_[4] = f_(x + c5 * h, combo(y, h, {{a51, 0}, {a53, 2}, {a54, 3}}));
        stage_[5] = f_(x + c6 * h, combo(y, h, {{a61, 0}, {a64, 3}, {a65, 4}}));
        stage_[6] = f_(x + c7 * h, combo(y, h, {{a71, 0}, {a74, 3}, {a75, 4}, {a76, 5}}));
        stage_[7] = f_(x + c8 * h, combo(y, h, {{a81, 0}, {a84, 3}, {a85, 4}, {a86, 5}, {a87, 6}}));
        stage_[8] = f_(x + c9 * h, combo(y, h, {{a91, 0}, {a94, 3}, {a95, 4}, {a96, 5}, {a97, 6}, {a98, 7}}));
        stage_[9] = f_(x + c10 * h,
                       combo(y, h, {{a101, 0}, {a104, 3}, {a105, 4}, {a106, 5}, {a107, 6}, {a108, 7}, {a109, 8}}));
        stage_[10] = f_(x + c11 * h, combo(y, h,
                                           {{a111, 0}, {a114, 3}, {a115, 4}, {a116, 5}, {a117, 6}, {a118, 7},
                                            {a119, 8}, {a1110, 9}}));
        stage_[11] = f_(x + h, combo(y, h,
                                     {{a121, 0}, {a124, 3}, {a125, 4}, {a126, 5}, {a127, 6}, {a128, 7},
                                      {a129, 8}, {a1210, 9}, {a1211, 10}}));

        double err = 0.0, err2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double kb = b1 * stage_[0][i] + b6 * stage_[5][i] + b7 * stage_[6][i] + b8 * stage_[7][i] +
                              b9 * stage_[8][i] + b10 * stage_[9][i] + b11 * stage_[10][i] + b12 * stage_[11][i];
            kb_[i] = kb;
            ynew_[i] = y[i] + h * kb;
            const double sk = 1.0 / (cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i])));
            double q = (kb - bhh1 * stage_[0][i] - bhh2 * stage_[8][i] - bhh3 * stage_[11][i]) * sk;
            err2 += q * q;
            q = (er1 * stage_[0][i] + er6 * stage_[5][i] + er7 * stage_[6][i] + er8 * stage_[7][i] +
                 er9 * stage_[8][i] + er10 * stage_[9][i] + er11 * stage_[10][i] + er12 * stage_[11][i]) *
                sk;
            err += q * q;
        }
        const double deno = err + 0.01 * err2;
        const double n = static_cast<double>(N);
        return std::abs(h) * err * std::sqrt(1.0 / (deno <= 0.0 ? n : deno * n));
    }

    /// Interpolation coefficients for the step just accepted; needs
    /// stage_[12] = f(x+h, ynew).
    typename Trajectory<N>::Segment make_segment(double x, const Vec<N>& y, double h) {
        constexpr double c14 = 0.1E+00, c15 = 0.2E+00, c16 = 0.777777777777777777777777777778E+00;
        constexpr double a141 = 5.61675022830479523392909219681E-2, a147 = 2.53500210216624811088794765333E-1,
                         a148 = -2.46239037470802489917441475441E-1, a149 = -1.24191423263816360469010140626E-1,
                         a1410 = 1.5329179827876569731206322685E-1, a1411 = 8.20105229563468988491666602057E-3,
                         a1412 = 7.56789766054569976138603589584E-3, a1413 = -8.298E-3;
        constexpr double a151 = 3.18346481635021405060768473261E-2, a156 = 2.83009096723667755288322961402E-2,
                         a157 = 5.35419883074385676223797384372E-2, a158 = -5.49237485713909884646569340306E-2,
                         a1511 = -1.08347328697249322858509316994E-4, a1512 = 3.82571090835658412954920192323E-4,
                         a1513 = -3.40465008687404560802977114492E-4, a1514 = 1.41312443674632500278074618366E-1;
        constexpr double a161 = -4.28896301583791923408573538692E-1, a166 = -4.69762141536116384314449447206E0,
                         a167 = 7.68342119606259904184240953878E0, a168 = 4.06898981839711007970213554331E0,
                         a169 = 3.56727187455281109270669543021E-1, a1613 = -1.39902416515901462129418009734E-3,
                         a1614 = 2.9475147891527723389556272149E0, a1615 = -9.15095847217987001081870187138E0;
        constexpr double d41 = -0.84289382761090128651353491142E+01, d46 = 0.56671495351937776962531783590E+00,
                         d47 = -0.30689499459498916912797304727E+01, d48 = 0.23846676565120698287728149680E+01,
                         d49 = 0.21170345824450282767155149946E+01, d410 = -0.87139158377797299206789907490E+00,
                         d411 = 0.22404374302607882758541771650E+01, d412 = 0.63157877876946881815570249290E+00,
                         d413 = -0.88990336451333310820698117400E-01, d414 = 0.18148505520854727256656404962E+02,
                         d415 = -0.91946323924783554000451984436E+01, d416 = -0.44360363875948939664310572000E+01;
        constexpr double d51 = 0.10427508642579134603413151009E+02, d56 = 0.24228349177525818288430175319E+03,
                         d57 = 0.16520045171727028198505394887E+03, d58 = -0.37454675472269020279518312152E+03,
                         d59 = -0.22113666853125306036270938578E+02, d510 = 0.77334326684722638389603898808E+01,
                         d511 = -0.30674084731089398182061213626E+02, d512 = -0.93321305264302278729567221706E+01,
                         d513 = 0.15697238121770843886131091075E+02, d514 = -0.31139403219565177677282850411E+02,
                         d515 = -0.93529243588444783865713862664E+01, d516 = 0.35816841486394083752465898540E+02;
        constexpr double d61 = 0.19985053242002433820987653617E+02, d66 = -0.38703730874935176555105901742E+03,
                         d67 = -0.18917813819516756882830838328E+03, d68 = 0.52780815920542364900561016686E+03,
                         d69 = -0.11573902539959630126141871134E+02, d610 = 0.68812326946963000169666922661E+01,
                         d611 = -0.10006050966910838403183860980E+01, d612 = 0.77771377980534432092869265740E+00,
                         d613 = -0.27782057523535084065932004339E+01, d614 = -0.60196695231264120758267380846E+02,
                         d615 = 0.84320405506677161018159903784E+02, d616 = 0.11992291136182789328035130030E+02;
        constexpr double d71 = -0.25693933462703749003312586129E+02, d76 = -0.15418974869023643374053993627E+03,
                         d77 = -0.23152937917604549567536039109E+03, d78 = 0.35763911791061412378285349910E+03,
                         d79 = 0.93405324183624310003907691704E+02, d710 = -0.37458323136451633156875139351E+02,
                         d711 = 0.10409964950896230045147246184E+03, d712 = 0.29840293426660503123344363579E+02,
                         d713 = -0.43533456590011143754432175058E+02, d714 = 0.96324553959188282948394950600E+02,
                         d715 = -0.39177261675615439165231486172E+02, d716 = -0.14972683625798562581422125276E+03;

        typename Trajectory<N>::Segment seg;
        seg.x0 = x;
        seg.h = h;
        const auto& s = stage_;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = ynew_[i] - y[i];
            const double bspl = h * s[0][i] - ydiff;
            seg.rc[0][i] = y[i];
            seg.rc[1][i] = ydiff;
            seg.rc[2][i] = bspl;
            seg.rc[3][i] = ydiff - h * s[12][i] - bspl;
            seg.rc[4][i] = d41 * s[0][i] + d46 * s[5][i] + d47 * s[6][i] + d48 * s[7][i] + d49 * s[8][i] +
                           d410 * s[9][i] + d411 * s[10][i] + d412 * s[11][i];
            seg.rc[5][i] = d51 * s[0][i] + d56 * s[5][i] + d57 * s[6][i] + d58 * s[7][i] + d59 * s[8][i] +
                           d510 * s[9][i] + d511 * s[10][i] + d512 * s[11][i];
            seg.rc[6][i] = d61 * s[0][i] + d66 * s[5][i] + d67 * s[6][i] + d68 * s[7][i] + d69 * s[8][i] +
                           d610 * s[9][i] + d611 * s[10][i] + d612 * s[11][i];
            seg.rc[7][i] = d71 * s[0][i] + d76 * s[5][i] + d77 * s[6][i] + d78 * s[7][i] + d79 * s[8][i] +
                           d710 * s[9][i] + d711 * s[10][i] + d712 * s[11][i];
        }
        stage_[13] = f_(x + c14 * h, combo(y, h,
                                           {{a141, 0}, {a147, 6}, {a148, 7}, {a149, 8}, {a1410, 9}, {a1411, 10},
                                            {a1412, 11}, {a1413, 12}}));
        stage_[14] = f_(x + c15 * h, combo(y, h,
                                           {{a151, 0}, {a156, 5}, {a157, 6}, {a158, 7}, {a1511, 10}, {a1512, 11},
                                            {a1513, 12}, {a1514, 13}}));
        stage_[15] = f_(x + c16 * h, combo(y, h,
                                           {{a161, 0}, {a166, 5}, {a167, 6}, {a168, 7}, {a169, 8}, {a1613, 12},
                                            {a1614, 13}, {a1615, 14}}));
        for (std::size_t i = 0; i < N; ++i) {
            seg.rc[4][i] = h * (seg.rc[4][i] + d413 * s[12][i] + d414 * s[13][i] + d415 * s[14][i] + d416 * s[15][i]);
            seg.rc[5][i] = h * (seg.rc[5][i] + d513 * s[12][i] + d514 * s[13][i] + d515 * s[14][i] + d516 * s[15][i]);
            seg.rc[6][i] = h * (seg.rc[6][i] + d613 * s[12][i] + d614 * s[13][i] + d615 * s[14][i] + d616 * s[15][i]);
            seg.rc[7][i] = h * (seg.rc[7][i] + d713 * s[12][i] + d714 * s[13][i] + d715 * s[14][i] + d716 * s[15][i]);
        }
        return seg;
    }

    const Field<N>& f_;
    IntegratorConfig cfg_;
    std::array<Vec<N>, 16> stage_{};
    Vec<N> ynew_{};
    Vec<N> kb_{};
    typename Trajectory<N>::Segment scratch_segment_{};
};

/// Integrates state' = field(x, state) from x0 to x1 (x1 > x0).
template <std::size_t N>
Trajectory<N> integrate(const Field<N>& field, double x0, const Vec<N>& state0, double x1,
                        const IntegratorConfig& cfg) {
    Dop853<N> stepper(field, cfg);
    return stepper.run(x0, state0, x1, {});
}

/// Integrates until one of the events changes sign (with the requested
/// direction) or the span x0 + cfg.max_x_span is exhausted.
template <std::size_t N>
Trajectory<N> integrate_with_events(const Field<N>& field, double x0, const Vec<N>& state0,
                                    std::span<const Event<N>> events, const IntegratorConfig& cfg,
                                    std::optional<double> x_end = std::nullopt) {
    Dop853<N> stepper(field, cfg);
    return stepper.run(x0, state0, x_end.value_or(x0 + cfg.max_x_span), events);
}

template <std::size_t N>
Trajectory<N> integrate_with_event(const Field<N>& field, double x0, const Vec<N>& state0,
                                   const EventFunction<N>& event, const IntegratorConfig& cfg,
                                   Crossing direction = Crossing::any) {
    const Event<N> ev{event, direction};
    return integrate_with_events<N>(field, x0, state0, std::span<const Event<N>>(&ev, 1), cfg);
}

}  // namespace josephson
