#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "csk/errors.hpp"
#include "csk/greens.hpp"
#include "csk/kernels.hpp"
#include "csk/quadrature.hpp"

using namespace csk;
using std::numbers::pi;

namespace {

// Direct Fourier inversion of 1/(theta - kappa) over xi in [-200, 200].
// The slowly decaying part sum_j kappa^j u^{-(j+1)g}, u = xi^2 + a^2, is
// transformed exactly; the u^{-1-g} tail of the rest is fitted at the cutoff.
double fourier_oracle(const ProblemParams& pp, const ModeIndex& mode, double kappa, double t) {
    const double g = pp.gamma;
    const double a = 2 * half_params(pp.N, g, mode).A;
    const int J = static_cast<int>(std::ceil(1 / g));
    auto expansion = [&](double xi) {
        const double u = xi * xi + a * a;
        double s = 0;
        for (int j = 0; j <= J; ++j) s += std::pow(kappa, j) * std::pow(u, -(j + 1) * g);
        return s;
    };
    auto rest = [&](double xi) { return 1 / (theta(pp, mode, xi).real() - kappa) - expansion(xi); };
    const double X = 200;
    const double C = rest(X) * std::pow(X * X + a * a, 1 + g);
    auto transform = [&](double e) {  // int e^{i xi t} u^{-e} d xi
        return 2 * std::sqrt(pi) / std::tgamma(e) * std::pow(std::abs(t) / (2 * a), e - 0.5) *
               boost::math::cyl_bessel_k(std::abs(e - 0.5), a * std::abs(t));
    };
    double v = C * transform(1 + g);
    for (int j = 0; j <= J; ++j) v += std::pow(kappa, j) * transform((j + 1) * g);
    auto f = [&](double xi) { return (rest(xi) - C * std::pow(xi * xi + a * a, -1 - g)) * std::cos(xi * t); };
    double I = 0;
    for (double x = 0; x < X; x += 1) I += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x, x + 1, 0);
    return v + 2 * I;
}

GridFunction bump(double t0, double t1, double h, double c, double r) {
    GridFunction v = make_grid(t0, t1, static_cast<std::size_t>(std::lround((t1 - t0) / h)) + 1);
    for (std::size_t i = 0; i < v.n(); ++i) {
        const double x = (v.t(i) - c) / r;
        v.values[i] = std::abs(x) < 1 ? std::exp(1 - 1 / (1 - x * x)) : 0.0;
    }
    v.decay_plus = v.decay_minus = 60;
    return v;
}

// (P_m - kappa) w through the cylinder operator.
std::vector<double> defect(const ProblemParams& pp, const ModeIndex& mode, double kappa, const GridFunction& w) {
    Operator op(make_kernel(pp, mode, false), w.h());
    auto out = op.apply(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= kappa * w.values[i];
    return out;
}

template <class F>
double fit_slope(F f, double x0, double x1, int n = 21) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = x0 + (x1 - x0) * i / (n - 1), y = f(x);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("series agrees with direct Fourier inversion") {
    for (auto [N, g] : {std::pair{3, 0.5}, {3, 0.25}, {4, 0.75}}) {
        const ProblemParams pp{N, g};
        const auto mode = make_mode(0, N);
        for (double kappa : {0.0, 0.5 * hardy_constant(N, g)}) {
            const auto s = green_series(pp, mode, kappa);
            for (double t : {0.5, 1.0, 2.0}) {
                const double ref = fourier_oracle(pp, mode, kappa, t);
                CAPTURE(N);
                CAPTURE(g);
                CAPTURE(kappa);
                CAPTURE(t);
                CHECK(std::abs(green_eval(s, t) - ref) < 1e-6);
                CHECK(std::abs(green_fourier(s, t) - ref) < 1e-6);
            }
        }
    }
}

TEST_CASE("higher modes: series and Fourier forms agree") {
    const ProblemParams pp{3, 0.4};
    for (int l = 1; l <= 3; ++l) {
        const auto mode = make_mode(l, 3);
        const auto s = green_series(pp, mode, 0.5 * hardy_constant(3, 0.4));
        for (double t : {0.5, 0.8, 1.5}) CHECK(std::abs(green_eval(s, t) - green_fourier(s, t)) < 1e-7);
        CHECK(std::abs(green_eval(s, 1.0) - fourier_oracle(pp, mode, s.kappa(), 1.0)) < 1e-6);
    }
}

TEST_CASE("evenness and positivity of the leading coefficient") {
    for (auto [N, g] : {std::pair{3, 0.5}, {2, 0.3}, {5, 0.8}}) {
        const ProblemParams pp{N, g};
        for (int l : {0, 2}) {
            const auto s = green_series(pp, make_mode(l, N), 0.7 * hardy_constant(N, g));
            CHECK(s.regime == Regime::Stable);
            CHECK(s.terms.front().d > 0);
            for (double t : {0.5, 0.9, 1.7, 4.0}) CHECK(green_eval(s, t) == green_eval(s, -t));
            for (double t : {0.01, 0.2}) CHECK(green_fourier(s, t) == green_fourier(s, -t));
        }
    }
}

TEST_CASE("small-t blow-up exponent") {
    // G = c |t|^{2g-1} + bounded, plus kappa^n |t|^{2(n+1)g-1} corrections;
    // differencing removes the bounded part.
    for (double g : {0.2, 0.3, 0.4}) {
        const ProblemParams pp{3, g};
        const double c = 2 * std::tgamma(1 - 2 * g) * std::sin(pi * g);  // transform of |xi|^{-2g}
        for (double kappa : {0.0, 0.5 * hardy_constant(3, g)}) {
            const auto s = green_series(pp, make_mode(0, 3), kappa);
            auto diff = [&](double t) { return green_value(s, t) - green_value(s, 2 * t); };
            CAPTURE(g);
            CAPTURE(kappa);
            if (kappa == 0) {
                const double slope = fit_slope([&](double x) { return std::log(diff(std::exp(x))); },
                                               std::log(1e-3), std::log(1e-2));
                CHECK(std::abs(slope / (2 * g - 1) - 1) < 0.05);
            }
            const double t = 1e-8;
            CHECK(diff(t) * std::pow(t, 1 - 2 * g) / (1 - std::pow(2.0, 2 * g - 1)) ==
                  doctest::Approx(c).epsilon(1e-2));
            CHECK(green_value(s, 1e-3) > 0);
        }
    }
}

TEST_CASE("contour shift") {
    const ProblemParams pp{3, 0.5};
    const auto mode = make_mode(0, 3);
    const double kappa = 0.5 * hardy_constant(3, 0.5);
    const auto s = green_series(pp, mode, kappa);

    SUBCASE("J = -1 is the unshifted function") {
        const auto u = green_shifted(pp, mode, kappa, -1);
        for (double t : {-3.0, -1.0, 0.6, 2.0}) CHECK(green_eval(u, t) == green_eval(s, t));
    }
    SUBCASE("decay rate of the shifted function") {
        for (int J : {0, 1}) {
            const auto sh = green_shifted(pp, mode, kappa, J);
            const double rate = -fit_slope([&](double t) { return std::log(std::abs(green_eval(sh, t))); }, 3, 5);
            CAPTURE(J);
            CHECK(std::abs(rate / sh.terms[J + 1].sigma - 1) < 0.03);
        }
    }
    SUBCASE("negative side carries the moved residues") {
        const int J = 2;
        const auto sh = green_shifted(pp, mode, kappa, J);
        for (double t : {-0.7, -1.5, -3.0}) {
            double extra = 0;
            for (int j = 0; j <= J; ++j) {
                const auto& e = s.poles.entries[j];
                const cplx r = 1.0 / theta_prime(pp, mode, e.z());
                extra += -2 * pi * r.imag() * std::exp(-e.sigma * t);
            }
            CHECK(std::abs(green_eval(sh, t) - (green_eval(s, t) - extra)) < 1e-10 * std::abs(extra));
        }
        for (double t : {0.6, 1.3})
            CHECK(std::abs(green_fourier(sh, t) - green_eval(sh, t)) < 1e-7);
    }
    SUBCASE("windows") {
        CHECK(window_for(s, 0.5 * s.terms[0].sigma) == -1);
        CHECK(window_for(s, 0.5 * (s.terms[1].sigma + s.terms[2].sigma)) == 1);
        CHECK_THROWS_AS(window_for(s, s.terms[1].sigma), WindowError);
    }
}

TEST_CASE("symbol-side identity") {
    const ProblemParams pp{3, 0.35};
    const auto mode = make_mode(1, 3);
    const double kappa = 0.4 * hardy_constant(3, 0.35);
    const auto s = green_series(pp, mode, kappa);
    // nodes of int_0^inf G(t) cos(xi t) dt: tanh-sinh on (0, 1/2], Gauss-Legendre beyond
    std::vector<double> t, w;
    const auto ts = tanh_sinh(1.0 / 32, 1e-200);
    for (std::size_t i = 0; i < ts.x.size(); ++i) {
        t.push_back(0.5 * ts.x[i]);
        w.push_back(0.5 * ts.w[i]);
    }
    for (double x = 0.5; x < 40; x += 0.25) {
        const auto q = gauss_legendre(16, x, x + 0.25);
        t.insert(t.end(), q.x.begin(), q.x.end());
        w.insert(w.end(), q.w.begin(), q.w.end());
    }
    std::vector<double> G(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) G[i] = green_value(s, t[i]);
    for (int k = 0; k < 30; ++k) {
        const double xi = 0.2 * k;
        double I = 0;
        for (std::size_t i = 0; i < t.size(); ++i) I += w[i] * G[i] * std::cos(xi * t[i]);
        const double ghat = I / pi;  // (1/2pi) int G e^{-i xi t} dt
        CAPTURE(xi);
        CHECK(std::abs((theta(pp, mode, xi).real() - kappa) * ghat - 1) < 1e-5);
    }
}

TEST_CASE("round trip through the operator, modes 0-3") {
    const ProblemParams pp{3, 0.5};
    const double kappa = 0.5 * hardy_constant(3, 0.5);
    const auto h = bump(-12, 12, 0.025, 0.3, 2.5);
    for (int l = 0; l <= 3; ++l) {
        const auto mode = make_mode(l, 3);
        const auto w = solve_mode(green_series(pp, mode, kappa), h);
        const auto d = defect(pp, mode, kappa, w);
        double err = 0;
        for (std::size_t i = 0; i < h.n(); ++i)
            if (std::abs(h.t(i)) <= 6) err = std::max(err, std::abs(d[i] - h.values[i]));
        CAPTURE(l);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("windowed Fourier mode is divided by the symbol") {
    const ProblemParams pp{4, 0.6};
    const auto mode = make_mode(0, 4);
    const double kappa = 0.5 * hardy_constant(4, 0.6), xi0 = 1.3, L = 30;
    // flat-topped window, so envelope derivatives are negligible for |t| <= 10
    GridFunction h = make_grid(-60, 60, 2401);
    for (std::size_t i = 0; i < h.n(); ++i) h.values[i] = std::cos(xi0 * h.t(i)) * std::exp(-std::pow(h.t(i) / L, 8));
    h.decay_plus = h.decay_minus = 5;
    const auto w = solve_mode(green_series(pp, mode, kappa), h);
    const double m = 1 / (theta(pp, mode, xi0).real() - kappa);
    double err = 0;
    for (std::size_t i = 0; i < h.n(); ++i)
        if (std::abs(h.t(i)) <= 10) err = std::max(err, std::abs(w.values[i] - m * h.values[i]));
    CHECK(err < 1e-3 * m);
}

TEST_CASE("multipole limit of the shifted solution") {
    const ProblemParams pp{3, 0.5};
    const auto mode = make_mode(0, 3);
    const auto s = green_shifted(pp, mode, 0.0, 0);
    const auto h = bump(-25, 10, 0.05, 0.5, 1.0);
    const auto w = solve_mode(s, h);
    const double s0 = s.terms[0].sigma;
    double moment = 0;
    for (std::size_t i = 0; i < h.n(); ++i) moment += h.h() * std::exp(s0 * h.t(i)) * h.values[i];
    const double limit = -s.terms[0].d / (2 * pi) * moment;
    for (double t : {-15.0, -20.0}) {
        const auto i = static_cast<std::size_t>(std::lround((t - h.t_min) / h.h()));
        CHECK(std::abs(w.values[i] * std::exp(s0 * t) / limit - 1) < 0.01);
    }
    CHECK(w.decay_minus == doctest::Approx(-s0));
}

TEST_CASE("homogeneous solutions leave the defect unchanged") {
    const ProblemParams pp{3, 0.5};
    const auto mode = make_mode(0, 3);
    const double kappa = 0.5 * hardy_constant(3, 0.5);
    const auto s = green_series(pp, mode, kappa);
    const auto h = bump(-10, 10, 0.025, 0, 2);
    const auto w = solve_mode(s, h);
    const auto d0 = defect(pp, mode, kappa, w);
    for (int j : {0, 1}) {
        for (double sign : {1.0, -1.0}) {
            const double sg = s.terms[j].sigma;
            if (sg >= 2 * half_params(3, 0.5, mode).A) continue;  // outside the kernel's reach
            GridFunction v = w;
            for (std::size_t i = 0; i < v.n(); ++i) v.values[i] += 0.1 * std::exp(-sign * sg * v.t(i));
            v.decay_plus = sign * sg;
            v.decay_minus = -sign * sg;
            const auto d = defect(pp, mode, kappa, v);
            double err = 0;
            for (std::size_t i = 0; i < v.n(); ++i)
                if (std::abs(v.t(i)) <= 5)
                    err = std::max(err, std::abs(d[i] - d0[i]) / (0.1 * std::exp(-sign * sg * v.t(i))));
            CAPTURE(j);
            CAPTURE(sign);
            CHECK(err < 1e-4);
        }
    }
}

TEST_CASE("unstable regime: real poles and the one-sided term") {
    const ProblemParams pp{3, 0.5};
    const auto mode = make_mode(0, 3);
    const double kappa = 1.15 * hardy_constant(3, 0.5);
    const auto s = green_series(pp, mode, kappa);
    REQUIRE(s.regime == Regime::Unstable);
    CHECK(s.terms[0].axis == PoleAxis::Real);
    CHECK(s.terms[0].d == doctest::Approx(4 * pi / theta_prime(pp, mode, s.terms[0].tau).real()));
    for (double t : {0.6, 1.0, 2.0, -0.6, -1.0, -2.0}) CHECK(std::abs(green_eval(s, t) - green_fourier(s, t)) < 1e-7);
    // the one-sided term vanishes for t > 0
    CHECK(std::abs(green_eval(s, 3.0) - green_eval(s, -3.0) - s.terms[0].d * std::sin(s.terms[0].tau * 3.0)) < 1e-12);

    const auto h = bump(-30, 12, 0.025, 0, 2);
    const auto w = solve_mode(s, h);
    const auto d = defect(pp, mode, kappa, w);
    double err = 0;
    for (std::size_t i = 0; i < h.n(); ++i)
        if (std::abs(h.t(i)) <= 4) err = std::max(err, std::abs(d[i] - h.values[i]));
    CHECK(err < 1e-4);
    CHECK_THROWS_AS(green_shifted(pp, mode, kappa, 0), BeyondFirstUnstableWindow);
}

TEST_CASE("hypotheses and truncation are enforced") {
    const ProblemParams pp{3, 0.5};
    const auto mode = make_mode(0, 3);
    const auto s = green_series(pp, mode, 0.3);
    CHECK_THROWS_AS(green_eval(s, 0.01), TruncationError);
    CHECK_THROWS_AS(green_fourier(s, 0.0), SingularityError);
    auto h = bump(-5, 5, 0.05, 0, 1);
    h.decay_plus = -0.1;
    CHECK_THROWS_AS(solve_mode(s, h), DecayMismatch);
    h.decay_plus = 1;
    h.decay_minus = std::nan("");
    CHECK_THROWS_AS(solve_mode(s, h), TailUndeclared);
    const auto sh = green_shifted(pp, mode, 0.3, 1);
    h.decay_minus = 1;
    h.decay_plus = 0.5 * (sh.terms[0].sigma);
    CHECK_THROWS_AS(solve_mode(sh, h), DecayMismatch);
    auto coarse = make_grid(-5, 5, 101);
    coarse.decay_plus = coarse.decay_minus = 1;
    CHECK_THROWS_AS(solve_mode(s, coarse), GridTooCoarse);
}
