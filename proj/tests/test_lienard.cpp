#include <doctest.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "josephson/lienard.hpp"

using namespace josephson;
namespace odeint = boost::numeric::odeint;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("physical parameters map and invert") {
    const Params p = from_physical(0.5, 1.7777778, -1.3333333);
    CHECK(p.a == doctest::Approx(0.5));
    CHECK(p.b == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(p.c == doctest::Approx(-1.0).epsilon(1e-7));
    // beta = 1/b^2, gamma = c/b.
    for (const Params q : {Params{0.3, 0.4, 1.1}, Params{1.5, 2.0, -0.7}}) {
        const Params r = from_physical(q.a, 1.0 / (q.b * q.b), q.c / q.b);
        CHECK(r.a == doctest::Approx(q.a));
        CHECK(r.b == doctest::Approx(q.b));
        CHECK(r.c == doctest::Approx(q.c));
    }
    CHECK_THROWS_AS(from_physical(0.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(from_physical(-0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("planar system reproduces the physical equation in rescaled time") {
    // beta Phi'' + (1 + gamma cos Phi) Phi' + sin Phi = alpha, tau = t / sqrt(beta),
    // x = Phi, y = dPhi/dtau.
    const double alpha = 0.4, beta = 2.5, gamma = -0.8;
    const Params p = from_physical(alpha, beta, gamma);
    using State = std::array<double, 2>;
    State s{0.3, 0.2};  // Phi, dPhi/dt
    const double T = 6.0;
    odeint::integrate_adaptive(
        odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-12, 1e-12),
        [&](const State& u, State& d, double) {
            d[0] = u[1];
            d[1] = (alpha - std::sin(u[0]) - (1 + gamma * std::cos(u[0])) * u[1]) / beta;
        },
        s, 0.0, T * std::sqrt(beta), 1e-3);
    IntegratorConfig cfg;
    const auto tr = integrate<2>(planar_field(p), 0.0, {0.3, 0.2 * std::sqrt(beta)}, T, cfg);
    CHECK(tr.back()[0] == doctest::Approx(s[0]).epsilon(1e-9));
    CHECK(tr.back()[1] == doctest::Approx(s[1] * std::sqrt(beta)).epsilon(1e-9));
}

TEST_CASE("jacobian against numerical differentiation") {
    const Params p{0.4, 0.7, -1.2};
    const auto F = planar_field(p);
    for (const auto& [x, y] : {std::pair{0.3, 0.5}, std::pair{-2.0, -1.0}, std::pair{4.0, 2.5}}) {
        const auto J = planar_jacobian(p, x, y);
        const double h = 1e-6;
        for (int col = 0; col < 2; ++col) {
            Vec<2> up{x, y}, dn{x, y};
            up[col] += h;
            dn[col] -= h;
            const auto fu = F(0.0, up), fd = F(0.0, dn);
            for (int row = 0; row < 2; ++row)
                CHECK(J[row][col] == doctest::Approx((fu[row] - fd[row]) / (2 * h)).epsilon(1e-7));
        }
    }
}

TEST_CASE("equilibria and their linearisation") {
    const Params p{0.5, 0.75, -1.0};
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 3);
    CHECK(eqs[0].x == doctest::Approx(-pi - std::asin(0.5)));
    CHECK(eqs[1].x == doctest::Approx(std::asin(0.5)));
    CHECK(eqs[2].x == doctest::Approx(pi - std::asin(0.5)));
    CHECK(eqs[0].kind == EquilibriumKind::saddle);
    CHECK(eqs[1].kind == EquilibriumKind::antisaddle);
    CHECK(eqs[2].kind == EquilibriumKind::saddle);
    for (const auto& e : eqs) {
        const auto J = planar_jacobian(p, e.x, 0.0);
        const double tr = J[0][0] + J[1][1], det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        for (const auto& lam : e.eigenvalues) CHECK(std::abs(lam * lam - tr * lam + det) < 1e-12);
        if (e.kind != EquilibriumKind::saddle) continue;
        for (int k = 0; k < 2; ++k) {
            const auto& v = e.eigenvectors[k];
            const double lam = e.eigenvalues[k].real();
            CHECK((k == 0 ? lam > 0.0 : lam < 0.0));
            CHECK(J[0][0] * v[0] + J[0][1] * v[1] == doctest::Approx(lam * v[0]));
            CHECK(J[1][0] * v[0] + J[1][1] * v[1] == doctest::Approx(lam * v[1]));
        }
    }
    CHECK(equilibria({1.0, 0.5, -1.0}).size() == 1);
    CHECK(equilibria({1.0, 0.5, -1.0})[0].kind == EquilibriumKind::saddle_node);
    CHECK(equilibria({1.5, 0.5, -1.0}).empty());
}

TEST_CASE("trace at the anti-saddle changes sign at the Hopf level") {
    const double a = 0.5, c = -1.0;
    const double H = Params{a, 0.0, c}.hopf_b();
    CHECK(H == doctest::Approx(std::sqrt(0.75)));
    auto trace = [&](double b) {
        const Params p{a, b, c};
        const auto J = planar_jacobian(p, std::asin(a), 0.0);
        return J[0][0] + J[1][1];
    };
    CHECK(trace(H - 1e-3) > 0.0);
    CHECK(trace(H + 1e-3) < 0.0);
    CHECK(std::abs(trace(H)) < 1e-12);
}

TEST_CASE("manifold branches leave along the eigenvector") {
    const Params p{0.5, 0.75, -1.0};
    const auto eqs = equilibria(p);
    const auto tr = saddle_manifold(p, eqs[0], Branch::unstable_upper);
    REQUIRE(tr.samples().size() > 2);
    CHECK(tr.samples()[1].state[1] > 0.0);
    const auto low = saddle_manifold(p, eqs[0], Branch::unstable_lower);
    CHECK(low.samples()[1].state[1] < 0.0);
}

TEST_CASE("connection gaps: symmetry at a = 0 and curve sides") {
    // (x, y) -> (-x, -y) at a = 0 swaps the two saddle connections.
    for (const Params p : {Params{0.0, 0.3, -1.0}, Params{0.0, 0.8, 0.5}}) {
        const double up = connection_gap(p, ConnectionKind::upper_saddle_connection).gap;
        const double low = connection_gap(p, ConnectionKind::lower_saddle_connection).gap;
        CHECK(low == doctest::Approx(-up).epsilon(1e-6));
    }
    const auto s = locate_curve(Curve::psi1, 0.5, -1.0);
    REQUIRE(s.found);
    CHECK(curve_side(Curve::psi1, {0.5, s.b - 1e-3, -1.0}) > 0.0);
    CHECK(curve_side(Curve::psi1, {0.5, s.b + 1e-3, -1.0}) < 0.0);
}

TEST_CASE("located curve values") {
    // Frozen from bisection on the manifold gaps at location tolerance.
    CHECK(locate_curve(Curve::phi, 0.5, -1.0).b == doctest::Approx(0.54801).epsilon(1e-4));
    CHECK(locate_curve(Curve::psi1, 0.5, -1.0).b == doctest::Approx(0.78665).epsilon(1e-4));
    CHECK_FALSE(locate_curve(Curve::psi2, 0.5, -1.0).found);
    CHECK(locate_curve(Curve::psi1, 1.0, -1.0).b == doctest::Approx(1.802433).epsilon(1e-5));
    CHECK(locate_curve(Curve::psi1, 1.0, 0.0).b == doctest::Approx(1.193046).epsilon(1e-5));
    CHECK(locate_curve(Curve::psi1, 1.0, 1.0).b == doctest::Approx(0.713623).epsilon(1e-5));
    // Ordering below the Hopf level for c < 0: psi2 < phi < H.
    const auto phi = locate_curve(Curve::phi, 0.2, -1.0);
    const auto psi2 = locate_curve(Curve::psi2, 0.2, -1.0);
    REQUIRE((phi.found && psi2.found));
    CHECK(psi2.b < phi.b);
    CHECK(phi.b < Params{0.2, 0.0, -1.0}.hopf_b());
    CHECK_THROWS_AS(bifurcation_curve(Curve::phi, 0.5, {0.1}), DomainError);
    CHECK_THROWS_AS(bifurcation_curve(Curve::psi2, -1.0, {1.0}), DomainError);
}

TEST_CASE("saddle-node gap changes sign at psi1(1, c)") {
    const double b = locate_curve(Curve::psi1, 1.0, -1.0).b;
    CHECK(saddle_node_gap({1.0, b - 0.02, -1.0}) > 0.0);
    CHECK(saddle_node_gap({1.0, b + 0.02, -1.0}) < 0.0);
}

TEST_CASE("derived constants") {
    const auto k = derived_constants(-1.0);
    REQUIRE((k.a_lower_star && k.a_upper_star && k.a_tilde));
    CHECK(*k.a_lower_star == doctest::Approx(0.384671).epsilon(1e-5));
    CHECK(*k.a_upper_star == doctest::Approx(0.546258).epsilon(1e-5));
    CHECK(*k.a_tilde == doctest::Approx(0.680591).epsilon(1e-5));
    const auto kp = derived_constants(1.0);
    REQUIRE(kp.a_bar);
    CHECK(*kp.a_bar == doctest::Approx(0.885451).epsilon(1e-5));
}

TEST_CASE("infinity stability on sample rows") {
    const auto s3 = infinity_stability({0.5, 0.75, -1.0});
    CHECK(s3.plus == InfinityStability::unstable);
    CHECK(s3.minus == InfinityStability::unstable);
    const auto s5 = infinity_stability({0.5, 1.0, 1.0});
    CHECK(s5.plus == InfinityStability::stable);
    CHECK(s5.minus == InfinityStability::unstable);
    const auto s7 = infinity_stability({2.0, 0.3, 1.0});
    CHECK(s7.plus == InfinityStability::unstable);
    CHECK(s7.minus == InfinityStability::unstable);
}

TEST_CASE("first-kind cycle at the golden point") {
    const Params p{0.5, 0.75, -1.0};
    const auto fk = find_first_kind_cycles(p);
    REQUIRE(fk.cycles.size() == 1);
    const auto& c = fk.cycles[0];
    CHECK(c.y0 == doctest::Approx(0.95845951).epsilon(1e-7));
    CHECK(c.g_prime < 0.0);
    const auto r = first_return(p, c.y0);
    REQUIRE(r);
    CHECK(*r == doctest::Approx(c.y0).epsilon(1e-9));
    // The return map is increasing: orbits of a planar flow cannot cross.
    double prev = -1.0;
    for (double y = 0.1; y < fk.y_top; y += 0.1) {
        const auto ry = first_return(p, y);
        REQUIRE(ry);
        CHECK(*ry > prev);
        prev = *ry;
    }
    // No first-kind cycles where b >= -c or a >= 1.
    CHECK(find_first_kind_cycles({0.5, 1.2, -1.0}).cycles.empty());
    CHECK(find_first_kind_cycles({1.5, 0.2, -1.0}).cycles.empty());
}
