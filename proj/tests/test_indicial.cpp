#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "csk/errors.hpp"
#include "csk/indicial.hpp"

using namespace csk;
using std::numbers::pi;

TEST_CASE("kappa = 0 ladder is the closed form") {
    for (auto [N, g] : {std::pair{3, 0.5}, {4, 0.3}}) {
        ProblemParams pp{N, g};
        for (int l : {0, 1, 3}) {
            auto m = make_mode(l, N);
            const double B = half_params(N, g, m).B;
            auto tab = find_poles(pp, m, 0.0, 11);
            REQUIRE(tab.entries.size() == 11);
            CHECK(tab.regime == Regime::Stable);
            for (int j = 0; j <= 10; ++j) {
                const auto& e = tab.entries[j];
                CHECK(e.axis == PoleAxis::Imaginary);
                CHECK(std::abs(e.sigma - 2 * (B + j)) < 1e-10);
                CHECK(std::abs(theta(pp, m, e.z())) < 1e-12);
            }
        }
    }
}

TEST_CASE("kappa = 0 residues from the Gamma residues") {
    ProblemParams pp{5, 0.35};
    auto m = make_mode(2, 5);
    const auto h = half_params(5, 0.35, m);
    auto tab = find_poles(pp, m, 0.0, 8);
    for (int j = 0; j < 8; ++j) {
        // theta'(i sigma_j) = 4^g Gamma(g - j) Gamma(A + B + j) / Gamma(2B + j) * (i/2) / Res_{-j} Gamma
        const double mag = std::pow(4.0, 0.35) * std::tgamma(0.35 - j) * std::tgamma(h.A + h.B + j) /
                           std::tgamma(2 * h.B + j) / gamma_residue(j);
        const cplx ref = 1.0 / (cplx(0, 0.5) * mag);
        CHECK(std::abs(tab.entries[j].residue - ref) < 1e-10 * std::abs(ref));
    }
}

TEST_CASE("residue against a finite-difference derivative") {
    ProblemParams pp{3, 0.5};
    auto m = make_mode(0, 3);
    for (double kap : {0.0, 0.3}) {
        auto tab = find_poles(pp, m, kap, 3);
        for (const auto& e : tab.entries) {
            const double h = 1e-6;
            const cplx z = e.z();
            const cplx d = (theta(pp, m, z + h) - theta(pp, m, z - h)) / (2 * h);
            CHECK(std::abs(e.residue - 1.0 / d) < 1e-8);
        }
    }
}

TEST_CASE("located poles satisfy their equation and wind once") {
    std::mt19937_64 rng(1);
    for (auto [N, g, kap] : {std::tuple{3, 0.5, 0.2}, {4, 0.75, 2.5}, {2, 0.2, 0.9}, {6, 0.9, 10.0}}) {
        ProblemParams pp{N, g};
        for (int l : {0, 1, 2}) {
            auto m = make_mode(l, N);
            auto tab = find_poles(pp, m, kap, 6);
            for (const auto& e : tab.entries) {
                CHECK(std::abs(theta(pp, m, e.z()) - kap) < 1e-9 * std::max(1.0, kap));
                if (e.axis != PoleAxis::Real) CHECK(winding_around(pp, m, kap, e.z(), 1e-3) == 1);
            }
        }
    }
}

TEST_CASE("argument principle count matches the table in random windows") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 0.9), tw(5.0, 30.0);
    std::uniform_int_distribution<int> jj(0, 7);
    for (int trial = 0; trial < 5; ++trial) {
        ProblemParams pp{3 + trial % 3, 0.2 + 0.15 * trial};
        auto m = make_mode(trial % 2, pp.N);
        const double kap = 0.4 * (trial + 1);
        const auto h = half_params(pp.N, pp.gamma, m);
        const int J = jj(rng);
        const double top = 2 * (h.B + J) + 2 * pp.gamma * u(rng);
        auto tab = find_poles(pp, m, kap, 12);
        int in_table = 0;
        for (const auto& e : tab.entries)
            if (e.sigma > 1e-4 && e.sigma < top) in_table += (e.tau > 0 ? 2 : 1);
        const double T = tw(rng);
        CHECK(zero_count(pp, m, kap, -T, T, 1e-4, top) == in_table);
        CHECK(zero_count(pp, m, kap, 0.01, T, 1e-4, top) == 0);
    }
}

TEST_CASE("first pole in stable and unstable regimes") {
    for (auto [N, g] : {std::pair{3, 0.5}, {4, 0.75}}) {
        const double p1 = p_one(N, g);
        ProblemParams pp{N, g};
        pp.p = 0.5 * (pp.p_min() + p1);
        auto m0 = make_mode(0, N);
        auto tab = find_poles(pp, m0, pp.p * A_constant(pp), 4);
        CHECK(tab.regime == Regime::Stable);
        CHECK(tab.entries[0].axis == PoleAxis::Imaginary);
        CHECK(tab.entries[0].sigma > 0);
        CHECK(tab.entries[0].sigma < q0(pp));

        pp.p = 0.5 * (p1 + pp.p_max());
        tab = find_poles(pp, m0, pp.p * A_constant(pp), 4);
        CHECK(tab.regime == Regime::Unstable);
        CHECK(tab.entries[0].axis == PoleAxis::Real);
        CHECK(tab.entries[0].tau > 0);
        CHECK(tab.entries[0].sigma == 0.0);
        // residues of the +-tau pair
        const double tau = tab.entries[0].tau;
        const cplx rp = 1.0 / theta_prime(pp, m0, tau), rm = 1.0 / theta_prime(pp, m0, -tau);
        CHECK(std::abs(rp + std::conj(rm)) < 1e-10 * std::abs(rp));
        CHECK(std::abs(tab.entries[0].residue - rp) < 1e-12 * std::abs(rp));
    }
}

TEST_CASE("residue decay at large index") {
    // leading behaviour -i sin(pi g) / (pi j^{2g}) in the half-variable normalization
    for (double g : {0.5, 0.3}) {
        ProblemParams pp{3, g};
        auto m = make_mode(0, 3);
        const double kap = 0.5 * hardy_constant(3, g);
        auto tab = find_poles(pp, m, kap, 201);
        const cplx r = tab.entries[200].residue * (std::pow(4.0, g) / 2.0);
        const cplx scaled = r * std::pow(200.0, 2 * g) * pi / std::sin(pi * g);
        CHECK(std::abs(scaled.real()) < 1e-10);
        CHECK(std::abs(scaled.imag() + 1.0) < 0.02);
    }
}

TEST_CASE("indicial roots") {
    for (auto [N, g, p] : {std::tuple{3, 0.5, 1.55}, {3, 0.5, 1.9}, {4, 0.75, 2.1}, {5, 0.3, 1.2}}) {
        ProblemParams pp{N, g, p};
        auto m1 = make_mode(1, N);
        auto r = indicial_roots(pp, m1, Location::Origin);
        CHECK(std::abs(r.gamma_minus - (-2 * g / (p - 1) - 1)) < 1e-9);
        CHECK(std::abs(r.gamma_plus.real() + r.gamma_minus.real() + (N - 2 * g)) < 1e-12);

        double prev = -1e9;
        for (int l = 0; l < 5; ++l) {
            auto m = make_mode(l, N);
            auto ri = indicial_roots(pp, m, Location::Infinity);
            const double ref = -(N - 2 * g) / 2.0 + 1 - g + std::sqrt((N / 2.0 - 1) * (N / 2.0 - 1) + m.mu);
            CHECK(std::abs(ri.gamma_plus - ref) < 1e-14);
            CHECK(ri.gamma_plus.real() > prev);
            prev = ri.gamma_plus.real();
        }
        if (p < p_one(N, g)) {
            auto r0 = indicial_roots(pp, make_mode(0, N), Location::Origin);
            CHECK(std::abs(r0.gamma_minus.imag()) == 0.0);
            CHECK(-2 * g / (p - 1) < r0.gamma_minus.real());
            CHECK(r0.gamma_minus.real() < -(N - 2 * g) / 2.0);
            CHECK(-(N - 2 * g) / 2.0 < r0.gamma_plus.real());
        } else {
            auto r0 = indicial_roots(pp, make_mode(0, N), Location::Origin);
            CHECK(std::abs(r0.gamma_minus.real() + (N - 2 * g) / 2.0) < 1e-14);
            CHECK(r0.gamma_plus.imag() > 0);
        }
    }
}

TEST_CASE("degenerate and invalid inputs") {
    ProblemParams pp{3, 0.5};
    auto m = make_mode(0, 3);
    CHECK_THROWS_AS(find_poles(pp, m, hardy_constant(3, 0.5), 2), DegeneratePole);
    CHECK_THROWS_AS(find_poles(pp, m, -1.0, 2), DomainError);
    CHECK_THROWS_AS(find_poles(pp, m, 0.1, 0), DomainError);
}
