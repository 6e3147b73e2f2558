#include "acceptance_suite.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "csk/errors.hpp"
#include "csk/greens.hpp"
#include "csk/hamiltonian.hpp"
#include "csk/indicial.hpp"
#include "csk/kernels.hpp"
#include "csk/odesolve.hpp"
#include "csk/symbols.hpp"

namespace csk::acceptance {

namespace {

using std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

ProblemParams critical(int N, double g) { return {N, g, (N + 2 * g) / (N - 2 * g)}; }

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

Result hardy() {
    Result r{1, "Hardy-constant identity", false, false, {}};
    std::mt19937 rng(20240501);
    std::uniform_int_distribution<int> dn(2, 8);
    std::uniform_real_distribution<double> dg(0.02, 0.98);
    double worst = std::abs(theta(ProblemParams{3, 0.5}, make_mode(0, 3), 0.0).real() / (2 / pi) - 1);
    for (int i = 0; i < 20; ++i) {
        const int N = dn(rng);
        const double g = dg(rng);
        const double t = theta(ProblemParams{N, g}, make_mode(0, N), 0.0).real();
        worst = std::max(worst, std::abs(t / hardy_constant(N, g) - 1));
    }
    r.pass = worst < 1e-12;
    r.detail = fmt("max relative error %.2e over 20 random (N, gamma) and (3, 1/2)", worst);
    return r;
}

Result normalization() {
    Result r{2, "Normalization apply_op(1) = A", false, false, {}};
    // the constant is fixed at the reference triple; the other four are tests
    const ProblemParams ref{3, 0.5, 1.75};
    const std::vector<ProblemParams> tests{{3, 0.5, 1.6}, {3, 0.5, 1.95}, {4, 0.3, 1.2}, {5, 0.75, 1.6}};
    auto rel = [](const ProblemParams& pp) {
        GridFunction one = make_grid(-5, 5, 201);
        one.values.assign(one.n(), 1.0);
        one.decay_plus = one.decay_minus = 1.0;
        one.limit_plus = one.limit_minus = 1.0;
        return std::abs(apply_op(pp, make_mode(0, pp.N), one, 0.0) / A_constant(pp) - 1);
    };
    const double at_ref = rel(ref);
    double worst = 0;
    for (const auto& pp : tests) worst = std::max(worst, rel(pp));
    r.pass = at_ref < 1e-6 && worst < 1e-6;
    r.detail = fmt("reference %.2e, worst of four tests %.2e", at_ref, worst);
    return r;
}

Result ladder() {
    Result r{3, "kappa = 0 pole ladder", false, false, {}};
    double worst = 0;
    for (auto [N, g] : {std::pair{3, 0.5}, {4, 0.3}, {5, 0.75}}) {
        ProblemParams pp{N, g};
        for (int l : {0, 1, 3}) {
            const auto m = make_mode(l, N);
            const double B = half_params(N, g, m).B;
            const auto tab = find_poles(pp, m, 0.0, 11);
            for (int j = 0; j <= 10; ++j) worst = std::max(worst, std::abs(tab.entries.at(j).sigma - 2 * (B + j)));
        }
    }
    r.pass = worst < 1e-10;
    r.detail = fmt("max |sigma_j - 2(B_m + j)| = %.2e for m in {0,1,3}, j <= 10", worst);
    return r;
}

Result indicial_m1() {
    Result r{4, "m = 1 indicial root", false, false, {}};
    double worst = 0;
    int stable = 0;
    for (auto [N, g, p] : {std::tuple{3, 0.5, 1.55}, {3, 0.5, 1.9}, {4, 0.75, 2.1}, {5, 0.3, 1.2}, {4, 0.75, 1.65}}) {
        ProblemParams pp{N, g, p};
        const auto rep = indicial_roots(pp, make_mode(1, N), Location::Origin);
        worst = std::max(worst, std::abs(rep.gamma_minus - (-2 * g / (p - 1) - 1)));
        stable += p < p_one(N, g);
    }
    r.pass = worst < 1e-8 && stable > 0 && stable < 5;
    r.detail = fmt("max error %.2e; %.0f stable and ", worst, stable) + std::to_string(5 - stable) + " unstable triples";
    return r;
}

Result classification() {
    Result r{5, "Stability classification", false, false, {}};
    int wrong = 0, total = 0;
    for (auto [N, g] : {std::pair{3, 0.5}, {4, 0.75}}) {
        ProblemParams pp{N, g};
        const double lo = pp.p_min(), hi = pp.p_max();
        for (int i = 0; i < 20; ++i) {
            pp.p = lo + (hi - lo) * (i + 0.5) / 20;
            const auto tab = find_poles(pp, make_mode(0, N), pp.p * A_constant(pp), 2);
            const bool real = tab.entries.at(0).axis == PoleAxis::Real;
            wrong += real != (pp.p > p_one(N, g));
            ++total;
        }
    }
    r.pass = wrong == 0;
    r.detail = std::to_string(wrong) + " misclassified of " + std::to_string(total);
    return r;
}

// Direct Fourier inversion of 1/(theta - kappa); the slowly decaying part of
// the expansion in u = xi^2 + a^2 is transformed exactly through Bessel K.
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
    auto transform = [&](double e) {
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

Result green_oracle() {
    Result r{6, "Green's function oracle", false, false, {}};
    double worst = 0;
    for (auto [N, g] : {std::pair{3, 0.5}, {4, 0.3}}) {
        const ProblemParams pp{N, g};
        const auto m = make_mode(0, N);
        for (double kappa : {0.0, 0.5 * hardy_constant(N, g)}) {
            const auto s = green_series(pp, m, kappa);
            for (double t : {0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(green_eval(s, t) - fourier_oracle(pp, m, kappa, t)));
        }
    }
    r.pass = worst < 1e-6;
    r.detail = fmt("max |series - quadrature| = %.2e", worst);
    return r;
}

Result kernel_exponents() {
    Result r{7, "Kernel asymptotics", false, false, {}};
    double worst = 0;
    for (auto [N, g, p] : {std::tuple{3, 0.5, 1.8}, {4, 0.3, 1.25}, {5, 0.75, 1.6}}) {
        ProblemParams pp{N, g, p};
        const double s0 =
            fit_slope([&](double x) { return std::log(kernel_k0(pp, std::exp(x))); }, std::log(1e-3), std::log(1e-2));
        const double sm = fit_slope([&](double x) { return std::log(kernel_k0(pp, -x)); }, 8, 12);
        const double sp = fit_slope([&](double x) { return std::log(kernel_k0(pp, x)); }, 8, 12);
        worst = std::max({worst, std::abs(s0 / (-(1 + 2 * g)) - 1), std::abs(sm / (-(N - 2 * g / (p - 1))) - 1),
                          std::abs(sp / (-2 * p * g / (p - 1)) - 1)});
    }
    r.pass = worst < 0.03;
    r.detail = fmt("max relative deviation of fitted exponents %.2e", worst);
    return r;
}

Result residue_asymptotics() {
    Result r{8, "Residue asymptotics", false, false, {}};
    const double g = 0.5;
    ProblemParams pp{3, g};
    const auto tab = find_poles(pp, make_mode(0, 3), 0.5 * hardy_constant(3, g), 201);
    // residue in the half-variable normalization of the asymptotic formula
    const cplx res = tab.entries.at(200).residue * (std::pow(4.0, g) / 2.0);
    const double base = std::abs(res) * std::pow(200.0, 2 * g) * pi / std::sin(pi * g);
    const double ratio = base / std::exp(2 * g);
    r.pass = ratio >= 0.9 && ratio <= 1.1;
    r.expected_failure = true;
    r.detail = fmt("ratio %.4f at j = 200 (without the e^{2 gamma} factor: %.4f)", ratio, base);
    return r;
}

GridFunction bubble(const ProblemParams& pp) {
    const double e = 0.5 * (pp.N - 2 * pp.gamma);
    const double lam = std::pow(std::tgamma(0.5 * pp.N + pp.gamma) / std::tgamma(0.5 * pp.N - pp.gamma) /
                                    A_constant(pp),
                                1 / (pp.p - 1));
    auto g = make_grid(-8, 8, 321);
    g.decay_plus = g.decay_minus = e;
    for (std::size_t i = 0; i < g.n(); ++i) g.values[i] = lam * std::pow(std::cosh(g.t(i)), -e);
    return g;
}

double fd(const GridFunction& H, std::size_t i) {
    const auto& y = H.values;
    return (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * H.h());
}

Result hamiltonian_law() {
    Result r{9, "Hamiltonian law", false, false, {}};
    ProblemParams sub{3, 0.5, 1.6};

    auto one = make_grid(-8, 8, 321);
    one.values.assign(one.n(), 1.0);
    one.decay_plus = one.decay_minus = 1;
    one.limit_plus = one.limit_minus = 1;
    const auto H1 = hamiltonian_trace(sub, extension_field(sub, one, 64), one);
    double spread1 = 0;
    for (double x : H1.values) spread1 = std::max(spread1, std::abs(x - H1.values[0]));
    const bool ok1 = spread1 <= 1e-14 * std::abs(H1.values[0]);

    auto start = make_grid(-8, 8, 321);
    const auto [rp, rm] = linearized_tail_rates(sub);
    start.decay_plus = rp;
    start.decay_minus = rm;
    start.limit_plus = start.limit_minus = 1;
    for (std::size_t i = 0; i < start.n(); ++i) start.values[i] = 1 + 0.1 * std::exp(-start.t(i) * start.t(i));
    const auto sol = newton_profile(sub, start, 1e-8);
    const auto H2 = hamiltonian_trace(sub, extension_field(sub, sol.grid, 96), sol.grid);
    double hmax = 0, worst_rate = -1e300;
    for (double x : H2.values) hmax = std::max(hmax, std::abs(x));
    for (std::size_t i = 2; i + 2 < H2.n(); ++i) worst_rate = std::max(worst_rate, fd(H2, i));
    const bool ok2 = worst_rate <= 1e-6 * hmax;

    double spread3 = 0;
    for (auto pp : {critical(3, 0.5), critical(3, 0.25), critical(4, 0.75)}) {
        const auto v = bubble(pp);
        const auto f = extension_field(pp, v, 96);
        const auto H = hamiltonian_trace(pp, f, v);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < v.n(); ++i) {
            if (std::abs(v.t(i)) > 6) continue;
            lo = std::min(lo, H.values[i]);
            hi = std::max(hi, H.values[i]);
        }
        spread3 = std::max(spread3, (hi - lo) / hamiltonian_scale(pp, f));
    }
    const bool ok3 = spread3 < 1e-5;

    r.pass = ok1 && ok2 && ok3;
    r.detail = fmt("v = 1 spread %.1e; subcritical max dH/dt / max|H| %.1e; ", spread1, worst_rate / hmax) +
               fmt("critical relative spread %.1e", spread3);
    return r;
}

Result ball() {
    Result r{10, "Ball solver oracle", false, false, {}};
    const int N = 3;
    const double g = 0.5;
    BallGreen coarse(N, g, 40), fine(N, g, 80);
    const std::vector<double> zero(coarse.r().size(), 0.0);
    const auto u = coarse.apply(zero, [](double, double) { return 1.0; });
    double torsion = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        torsion = std::max(torsion, std::abs(u[i] - torsion_profile(N, g, coarse.r()[i])));

    const ProblemParams pp{N, g, 1.8};
    bool monotone = true, bounded = true;
    double drift = 0;
    std::vector<double> prev;
    for (double lam : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const auto s = picard_ball(coarse, pp, lam);
        if (!prev.empty())
            for (std::size_t i = 0; i < s.w.size(); ++i) monotone = monotone && prev[i] <= s.w[i];
        prev = s.w;
        const auto a = uniform_bound_check(s, pp);
        const auto b = uniform_bound_check(picard_ball(fine, pp, lam), pp);
        bounded = bounded && a.holds && b.holds && std::isfinite(a.c0);
        drift = std::max(drift, std::abs(b.c0 / a.c0 - 1));
    }
    r.pass = torsion < 1e-5 && monotone && bounded && drift < 0.2;
    r.detail = fmt("torsion L-inf error %.2e; C0 refinement drift %.3f; ", torsion, drift) +
               (monotone ? "branch monotone" : "branch NOT monotone") + (bounded ? "" : "; bound violated");
    return r;
}

Result round_trip() {
    Result r{11, "Round trip apply_op after solve_mode", false, false, {}};
    const ProblemParams pp{3, 0.5};
    const double kappa = 0.5 * hardy_constant(3, 0.5);
    GridFunction h = make_grid(-12, 12, 961);
    for (std::size_t i = 0; i < h.n(); ++i) {
        const double x = (h.t(i) - 0.3) / 2.5;
        h.values[i] = std::abs(x) < 1 ? std::exp(1 - 1 / (1 - x * x)) : 0.0;
    }
    h.decay_plus = h.decay_minus = 60;
    double worst = 0;
    for (int l = 0; l <= 3; ++l) {
        const auto mode = make_mode(l, 3);
        const auto w = solve_mode(green_series(pp, mode, kappa), h);
        Operator op(make_kernel(pp, mode, false), w.h());
        const auto out = op.apply(w);
        for (std::size_t i = 0; i < h.n(); ++i)
            if (std::abs(h.t(i)) <= 6) worst = std::max(worst, std::abs(out[i] - kappa * w.values[i] - h.values[i]));
    }
    r.pass = worst < 1e-4;
    r.detail = fmt("max defect %.2e over modes 0-3 at kappa = Lambda/2", worst);
    return r;
}

Result stirling() {
    Result r{12, "Stirling growth", false, false, {}};
    double worst = 0;
    for (double g : {0.25, 0.5, 0.75}) {
        const double t = std::abs(theta(ProblemParams{3, g}, make_mode(0, 3), 1e4)) / std::pow(1e4, 2 * g);
        worst = std::max(worst, std::abs(t - 1));
    }
    r.pass = worst < 0.005;
    r.detail = fmt("max | |theta|/xi^{2 gamma} - 1 | = %.2e at xi = 1e4", worst);
    return r;
}

}  // namespace

Result run(int id) {
    static const std::vector<Result (*)()> table{hardy,        normalization,   ladder,         indicial_m1,
                                                 classification, green_oracle,  kernel_exponents, residue_asymptotics,
                                                 hamiltonian_law, ball,          round_trip,     stirling};
    if (id < 1 || id > kCriteria) throw DomainError("criterion must be in 1.." + std::to_string(kCriteria));
    try {
        return table[id - 1]();
    } catch (const std::exception& e) {
        Result r{id, "criterion " + std::to_string(id), false, false, {}};
        r.detail = std::string("threw ") + e.what();
        return r;
    }
}

std::vector<Result> run_all(const std::function<void(const Result&)>& report) {
    std::vector<Result> out;
    for (int id = 1; id <= kCriteria; ++id) {
        out.push_back(run(id));
        if (report) report(out.back());
    }
    return out;
}

std::string format(const Result& r) {
    std::string s = (r.pass ? "PASS " : "FAIL ") + std::string(r.id < 10 ? " " : "") + std::to_string(r.id) + "  " +
                    r.name + ": " + r.detail;
    if (!r.pass && r.expected_failure) s += " [expected, see README]";
    return s;
}

bool acceptable(const std::vector<Result>& results) {
    for (const auto& r : results)
        if (!r.pass && !r.expected_failure) return false;
    return true;
}

}  // namespace csk::acceptance
