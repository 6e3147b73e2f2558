#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "csk/errors.hpp"
#include "csk/hamiltonian.hpp"
#include "csk/kernels.hpp"
#include "csk/odesolve.hpp"

using namespace csk;

namespace {

ProblemParams critical(int N, double g) { return {N, g, (N + 2 * g) / (N - 2 * g)}; }
ProblemParams midpoint(int N, double g) {
    ProblemParams pp{N, g, 2.0};
    pp.p = 0.5 * (pp.p_min() + pp.p_max());
    return pp;
}

GridFunction bubble(const ProblemParams& pp, std::size_t n = 321) {
    const double e = 0.5 * (pp.N - 2 * pp.gamma);
    const double lam = std::pow(std::tgamma(0.5 * pp.N + pp.gamma) / std::tgamma(0.5 * pp.N - pp.gamma) /
                                    A_constant(pp),
                                1 / (pp.p - 1));
    auto g = make_grid(-8, 8, n);
    g.decay_plus = g.decay_minus = e;
    for (std::size_t i = 0; i < n; ++i) g.values[i] = lam * std::pow(std::cosh(g.t(i)), -e);
    return g;
}

GridFunction bump_on_one(double amp) {
    auto g = make_grid(-8, 8, 321);
    g.decay_plus = g.decay_minus = 2;
    g.limit_plus = g.limit_minus = 1;
    for (std::size_t i = 0; i < g.n(); ++i) g.values[i] = 1 + amp * std::exp(-g.t(i) * g.t(i)) * (1 + 0.3 * g.t(i));
    return g;
}

// fourth-order centered difference
double derivative(const GridFunction& H, std::size_t i) {
    const auto& y = H.values;
    return (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * H.h());
}

}  // namespace

TEST_CASE("special defining function") {
    for (auto pp : {midpoint(3, 0.5), midpoint(3, 0.25), midpoint(4, 0.75), critical(3, 0.5)}) {
        CAPTURE(pp.gamma);
        const double a = rho_star_alpha(pp);
        CHECK(rho_star(pp, 2) == doctest::Approx(std::pow(a, -2 / (pp.N - 2 * pp.gamma))).epsilon(1e-12));
        for (double r : {1e-3, 1e-4, 1e-6}) {
            const double ratio = rho_star(pp, r) / r;
            CHECK(ratio >= 0.9);
            CHECK(ratio <= 1.1);
        }
        CHECK(std::abs(rho_star(pp, 1e-8) / 1e-8 - 1) < std::abs(rho_star(pp, 1e-3) / 1e-3 - 1));

        auto d = defining_function(pp, 2000);
        CHECK(d.rho_star_0 == doctest::Approx(rho_star(pp, 2)).epsilon(1e-12));
        for (std::size_t i = 1; i < d.rho.size(); ++i) CHECK(d.rho_star[i] > d.rho_star[i - 1]);
        for (double r : {0.05, 0.7, 1.3, 1.9}) CHECK(d.inverse(rho_star(pp, r)) == doctest::Approx(r).epsilon(1e-6));

        // derivative against a difference quotient
        for (double r : {0.01, 0.5, 1.5}) {
            const double e = 1e-6;
            const double fd = (rho_star(pp, r + e) - rho_star(pp, r - e)) / (2 * e);
            CHECK(rho_star_prime(pp, r) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("profile Neumann coefficient is the conjugated symbol") {
    for (auto pp : {midpoint(3, 0.5), midpoint(4, 0.75), ProblemParams{3, 0.25, 1.3}}) {
        for (double xi : {0.0, 0.7, 3.0, 12.0}) {
            const cplx s = d_gamma(pp.gamma) * neumann_coefficient(pp, xi);
            const cplx t = theta(pp, make_mode(0, pp.N), cplx(xi, -q0(pp)));
            CHECK(std::abs(s - t) < 1e-10 * std::abs(t));
        }
        CHECK(d_gamma(pp.gamma) * neumann_coefficient(pp, 0).real() == doctest::Approx(A_constant(pp)).epsilon(1e-12));
    }
}

TEST_CASE("multiplier") {
    auto pp = midpoint(3, 0.5);
    SUBCASE("equals 1 at xi = 0") {
        for (double r : {1e-6, 0.2, 1.0, 1.9}) {
            auto m = extension_multiplier(pp, 0, r);
            CHECK(std::abs(m.value - 1.0) < 1e-13);
            CHECK(std::abs(m.deriv) < 1e-10);
        }
    }
    SUBCASE("tends to 1 at rho = 0 and is continuous across the series switch") {
        for (double xi : {0.5, 4.0, 20.0}) {
            CHECK(std::abs(extension_multiplier(pp, xi, 1e-12).value - 1.0) < 1e-5);
            // x = (4 rho/(4 + rho^2))^2 = 0.1 at rho = 0.16016...
            const double r = 2 * (2 - std::sqrt(4 - 0.1)) / std::sqrt(0.1);
            auto a = extension_multiplier(pp, xi, r * (1 - 1e-12));
            auto b = extension_multiplier(pp, xi, r * (1 + 1e-12));
            CHECK(std::abs(a.value - b.value) < 1e-8);
            CHECK(std::abs(a.deriv - b.deriv) < 1e-7 * (1 + std::abs(a.deriv)));
        }
    }
    SUBCASE("derivative against a difference quotient") {
        for (double xi : {0.5, 4.0}) {
            for (double r : {0.05, 0.8, 1.6}) {
                const double e = 1e-6;
                const cplx fd =
                    (extension_multiplier(pp, xi, r + e).value - extension_multiplier(pp, xi, r - e).value) / (2 * e);
                CHECK(std::abs(extension_multiplier(pp, xi, r).deriv - fd) < 1e-6 * (1 + std::abs(fd)));
            }
        }
    }
}

TEST_CASE("extension traces") {
    for (auto pp : {critical(3, 0.5), critical(3, 0.25), critical(4, 0.75), midpoint(3, 0.5)}) {
        CAPTURE(pp.gamma);
        CAPTURE(pp.p);
        const auto v = pp.p == critical(pp.N, pp.gamma).p ? bubble(pp) : bump_on_one(0.2);
        auto f = extension_field(pp, v, 96);
        Operator op(make_kernel(pp, make_mode(0, pp.N), true), v.h());
        const auto pv = op.apply(v);
        double dir = 0, neu = 0, scale = 0;
        for (std::size_t i = 0; i < v.n(); ++i) {
            dir = std::max(dir, std::abs(f.trace_V[i] - v.values[i]));
            if (std::abs(v.t(i)) > 6) continue;
            neu = std::max(neu, std::abs(f.neumann[i] - pv[i]));
            scale = std::max(scale, std::abs(pv[i]));
        }
        CHECK(dir < 1e-4);
        CHECK(neu < 1e-3 * scale);
    }
}

TEST_CASE("constant solution") {
    for (auto pp : {midpoint(3, 0.5), critical(3, 0.5), midpoint(4, 0.75)}) {
        auto v = make_grid(-8, 8, 321);
        std::fill(v.values.begin(), v.values.end(), 1.0);
        v.decay_plus = v.decay_minus = 1;
        v.limit_plus = v.limit_minus = 1;
        auto f = extension_field(pp, v, 64);
        for (double x : f.V) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
        for (double x : f.V_t) CHECK(std::abs(x) < 1e-14);
        for (double x : f.V_rs) CHECK(std::abs(x) < 1e-14);
        auto H = hamiltonian_trace(pp, f, v);
        const double dt = -d_gamma(pp.gamma) / (2 * pp.gamma);
        const double expect = A_constant(pp) / dt * (1 / (pp.p + 1) - 0.5);
        for (double x : H.values) CHECK(x == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("displayed weight identities") {
    auto pp = midpoint(3, 0.5);
    auto f = extension_field(pp, bump_on_one(0.1), 32);
    for (std::size_t q = 0; q < f.n_rho(); ++q) {
        const double r = f.rho[q], k = f.rho_star[q] / r;
        CHECK(f.e1[q] * k * k == doctest::Approx(f.e_star[q]).epsilon(1e-14));
        CHECK(f.e2[q] * std::pow(1 + r * r / 4, 2) * k * k == doctest::Approx(f.e_star[q]).epsilon(1e-14));
    }
}

TEST_CASE("critical exponent: H is constant along the bubble") {
    for (auto pp : {critical(3, 0.5), critical(3, 0.25), critical(4, 0.75)}) {
        CAPTURE(pp.gamma);
        const auto v = bubble(pp);
        auto f = extension_field(pp, v, 96);
        auto H = hamiltonian_trace(pp, f, v);
        const double scale = hamiltonian_scale(pp, f);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < v.n(); ++i) {
            if (std::abs(v.t(i)) > 6) continue;
            lo = std::min(lo, H.values[i]);
            hi = std::max(hi, H.values[i]);
        }
        CHECK((hi - lo) / scale < 1e-5);
        // homoclinic orbit: the level of the limit v -> 0
        CHECK(std::abs(H.values[v.n() / 2]) / scale < 1e-5);

        SUBCASE("quadrature refinement") {
            auto f2 = extension_field(pp, v, 192);
            auto H2 = hamiltonian_trace(pp, f2, v);
            for (std::size_t i = 0; i < v.n(); i += 20) CHECK(std::abs(H2.values[i] - H.values[i]) < 1e-7);
        }
        SUBCASE("the displayed weights are not conserved") {
            auto Hp = hamiltonian_trace(pp, f, v, HamiltonianWeights::Displayed);
            CHECK(std::abs(Hp.values[v.n() / 2] - Hp.values[v.n() / 2 + 60]) / scale > 1e-3);
        }
    }
}

TEST_CASE("derivative identity for arbitrary profiles") {
    // dH/dt = (A v^p - P~v) v'/d~ - 2 Q0 int Qt (d_t V)^2, checked by differencing H
    for (auto pp : {midpoint(3, 0.5), ProblemParams{3, 0.25, 1.25}, critical(3, 0.5)}) {
        CAPTURE(pp.p);
        const auto v = bump_on_one(0.3);
        auto f = extension_field(pp, v, 96);
        auto H = hamiltonian_trace(pp, f, v);
        auto rate = hamiltonian_rate_identity(pp, f);
        double err = 0, scale = 0;
        for (std::size_t i = 2; i + 2 < v.n(); ++i) {
            if (std::abs(v.t(i)) > 6) continue;
            err = std::max(err, std::abs(derivative(H, i) - rate.values[i]));
            scale = std::max(scale, std::abs(rate.values[i]));
        }
        CHECK(err < 1e-4 * scale);
    }
}

TEST_CASE("subcritical: monotone along solved profiles") {
    ProblemParams pp{3, 0.5, 1.6};
    auto g = make_grid(-8, 8, 321);
    const auto [rp, rm] = linearized_tail_rates(pp);
    g.decay_plus = rp;
    g.decay_minus = rm;
    g.limit_plus = g.limit_minus = 1;
    for (std::size_t i = 0; i < g.n(); ++i) g.values[i] = 1 + 0.1 * std::exp(-g.t(i) * g.t(i));
    auto sol = newton_profile(pp, g, 1e-8);
    auto f = extension_field(pp, sol.grid, 96);
    auto H = hamiltonian_trace(pp, f, sol.grid);
    double hmax = 0;
    for (double x : H.values) hmax = std::max(hmax, std::abs(x));
    for (std::size_t i = 2; i + 2 < H.n(); ++i) CHECK(derivative(H, i) <= 1e-6 * hmax);
    for (double x : hamiltonian_rate(pp, f).values) CHECK(x <= 0);
}

TEST_CASE("extension errors") {
    auto pp = midpoint(3, 0.5);
    auto v = bump_on_one(0.1);
    auto bare = v;
    bare.decay_plus = std::nan("");
    CHECK_THROWS_AS(extension_field(pp, bare, 64), TailUndeclared);
    auto grow = v;
    grow.decay_minus = -1;
    CHECK_THROWS_AS(extension_field(pp, grow, 64), DecayMismatch);
    auto coarse = make_grid(-8, 8, 41);
    coarse.decay_plus = coarse.decay_minus = 1;
    CHECK_THROWS_AS(extension_field(pp, coarse, 64), GridTooCoarse);
    CHECK_THROWS_AS(rho_star(pp, 2.5), DomainError);
}
