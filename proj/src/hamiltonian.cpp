#include "csk/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

// Boost 1.74's pchip calls isnan unqualified
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <unsupported/Eigen/FFT>

#include "csk/errors.hpp"
#include "csk/quadrature.hpp"

namespace csk {

namespace {

// Direct power series of 2F1 for 0 <= z <= 0.9. Used instead of the general
// routine because its connection formulas cancel badly at large |a|, |b|.
cplx series(cplx a, cplx b, cplx c, double z) {
    cplx term = 1, sum = 1;
    for (int n = 0; n < 200000; ++n) {
        term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && n > std::abs(a * b) * z + 4) return sum;
    }
    throw NonConvergence("2F1 series in the extension profile");
}

struct Profile {
    cplx value;  // F(a, b; N/2; tau^2) / alpha(zeta)
    cplx deriv;  // d/d rho
};

// Scattering profile at complex frequency zeta, Dirichlet coefficient 1 after the
// factor (4 rho/(4 + rho^2))^{N/2 - gamma}, which is left out.
Profile profile(int N, double g, cplx zeta, double rho) {
    const double c = 0.5 * N;
    const cplx iz = cplx(0, 1) * zeta;
    const cplx a = 0.25 * N - 0.5 * g + 0.5 * iz;
    const cplx b = 0.25 * N - 0.5 * g - 0.5 * iz;
    const double y = 4 * rho / (4 + rho * rho);
    const double x = y * y;  // 1 - tau^2
    const double dx = 2 * y * 4 * (4 - rho * rho) / ((4 + rho * rho) * (4 + rho * rho));
    if (x >= 0.1) {
        const double t2 = 1 - x;
        const cplx inv_alpha =
            std::exp(ln_gamma(c - a) + ln_gamma(c - b) - ln_gamma(cplx(c)) - ln_gamma(cplx(g)));
        const cplx f = series(a, b, c, t2);
        const cplx fp = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, t2);
        return {inv_alpha * f, -inv_alpha * fp * dx};
    }
    // connection form near rho = 0: F(a,b;1-g;x) + S x^g F(c-a,c-b;1+g;x)
    cplx S = std::tgamma(-g) / std::tgamma(g) * std::exp(ln_gamma(c - a) + ln_gamma(c - b)) * rgamma(a) * rgamma(b);
    const cplx f1 = series(a, b, 1 - g, x);
    const cplx f1p = a * b / (1 - g) * series(a + 1.0, b + 1.0, 2 - g, x);
    const cplx f2 = series(c - a, c - b, 1 + g, x);
    const cplx f2p = (c - a) * (c - b) / (1 + g) * series(c - a + 1.0, c - b + 1.0, 2 + g, x);
    const double xg = std::pow(x, g);
    const cplx value = f1 + S * xg * f2;
    const cplx dvdx = f1p + S * (g * xg / x * f2 + xg * f2p);
    return {value, dvdx * dx};
}

cplx zeta_of(const ProblemParams& pp, double xi) { return {xi, -q0(pp)}; }

}  // namespace

double rho_star_alpha(const ProblemParams& pp) {
    pp.validate(true);
    const double g = pp.gamma, s = g / (pp.p - 1);
    return std::tgamma(0.5 * pp.N) * std::tgamma(g) / (std::tgamma(g + s) * std::tgamma(0.5 * pp.N - s));
}

double rho_star(const ProblemParams& pp, double rho) {
    if (!(rho > 0 && rho <= 2)) throw DomainError("rho must lie in (0, 2]");
    const auto pr = profile(pp.N, pp.gamma, zeta_of(pp, 0), rho);
    return 4 * rho / (4 + rho * rho) * std::pow(pr.value.real(), 2 / (pp.N - 2 * pp.gamma));
}

double rho_star_prime(const ProblemParams& pp, double rho) {
    if (!(rho > 0 && rho <= 2)) throw DomainError("rho must lie in (0, 2]");
    const double k = 2 / (pp.N - 2 * pp.gamma);
    const auto pr = profile(pp.N, pp.gamma, zeta_of(pp, 0), rho);
    const double y = 4 * rho / (4 + rho * rho), dy = 4 * (4 - rho * rho) / ((4 + rho * rho) * (4 + rho * rho));
    const double f = pr.value.real();
    return dy * std::pow(f, k) + y * k * std::pow(f, k - 1) * pr.deriv.real();
}

DefiningFunction defining_function(const ProblemParams& pp, int n) {
    pp.validate(true);
    if (n < 16) throw DomainError("defining_function needs at least 16 nodes");
    DefiningFunction d;
    d.params = pp;
    d.alpha_norm = rho_star_alpha(pp);
    d.rho_star_0 = std::pow(d.alpha_norm, -2 / (pp.N - 2 * pp.gamma));
    for (int i = 1; i <= n; ++i) {
        const double r = 2.0 * i / n;
        d.rho.push_back(r);
        d.rho_star.push_back(rho_star(pp, r));
    }
    return d;
}

double DefiningFunction::inverse(double s) const {
    if (!(s > 0 && s <= rho_star_0 * (1 + 1e-12))) throw DomainError("rho* outside (0, rho*_0]");
    if (s <= rho_star.front()) return s * rho.front() / rho_star.front();
    std::vector<double> x = rho_star, y = rho;
    boost::math::interpolators::pchip<std::vector<double>> ip(std::move(x), std::move(y));
    return ip(std::min(s, rho_star.back()));
}

cplx neumann_coefficient(const ProblemParams& pp, double xi) {
    const double c = 0.5 * pp.N, g = pp.gamma;
    const cplx iz = cplx(0, 1) * zeta_of(pp, xi);
    const cplx a = 0.25 * pp.N - 0.5 * g + 0.5 * iz, b = 0.25 * pp.N - 0.5 * g - 0.5 * iz;
    return std::tgamma(-g) / std::tgamma(g) * std::exp(ln_gamma(c - a) + ln_gamma(c - b)) * rgamma(a) * rgamma(b);
}

ExtensionMultiplier extension_multiplier(const ProblemParams& pp, double xi, double rho) {
    const auto p = profile(pp.N, pp.gamma, zeta_of(pp, xi), rho);
    const auto p0 = profile(pp.N, pp.gamma, zeta_of(pp, 0), rho);
    return {p.value / p0.value, (p.deriv * p0.value - p.value * p0.deriv) / (p0.value * p0.value)};
}

ExtensionField extension_field(const ProblemParams& pp, const GridFunction& v, int n_tau) {
    pp.validate(true);
    v.validate();
    if (!v.tails_declared()) throw TailUndeclared("extension_field needs declared tails");
    if (!(v.decay_plus > 0 && v.decay_minus > 0)) throw DecayMismatch("extension_field needs decaying tails");
    if (v.limit_plus != v.limit_minus) throw DomainError("extension_field needs equal limits at both ends");
    if (v.h() > 0.1) throw GridTooCoarse("grid spacing exceeds 0.1");
    if (n_tau < 16) throw DomainError("n_tau must be at least 16");
    {
        const cplx z = zeta_of(pp, 0);
        const double re = 0.25 * pp.N + 0.5 * pp.gamma + 0.5 * z.imag();
        if (re <= 0 && std::abs(re - std::round(re)) < 1e-12)
            throw FrequencyPoleCollision("xi - i Q0 hits a pole of the profile");
    }

    ExtensionField f;
    f.params = pp;
    f.v = v;
    const std::size_t n = v.n();
    const double L = v.limit_plus, h = v.h(), g = pp.gamma, N = pp.N;

    // window: pad with the tail model until it has decayed to 1e-16
    const double slow = std::min(v.decay_plus, v.decay_minus);
    std::size_t M = 1;
    while (M < n + 2 * static_cast<std::size_t>(std::ceil(37 / slow / h))) M *= 2;
    const long pad = static_cast<long>((M - n) / 2);
    std::vector<cplx> x(M), X;
    for (std::size_t j = 0; j < M; ++j) x[j] = v.extended(static_cast<long>(j) - pad) - L;
    Eigen::FFT<double> fft;
    fft.fwd(X, x);
    std::vector<double> xi(M);
    double vmax = 0;
    for (std::size_t k = 0; k < M; ++k) {
        const long kk = k <= M / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(M);
        xi[k] = 2 * M_PI * kk / (M * h);
        vmax = std::max(vmax, std::abs(X[k]));
    }
    std::vector<char> active(M);
    for (std::size_t k = 0; k < M; ++k) active[k] = std::abs(X[k]) > 1e-17 * vmax;

    // rho nodes
    const auto ts = tanh_sinh(6.4 / n_tau, 1e-15);
    for (std::size_t q = 0; q < ts.x.size(); ++q) {
        f.rho.push_back(2 * ts.x[q]);
        f.weight.push_back(2 * ts.w[q]);
    }
    const std::size_t nq = f.rho.size();
    // corrections to the traces are O(rho^{2 gamma}) and O(rho^{2 - 2 gamma})
    f.trace_rho = std::min(std::pow(1e-7, 1 / (2 * g)), std::pow(1e-7, 1 / (2 - 2 * g)));

    auto synth = [&](const std::vector<cplx>& spec, std::vector<double>& out, std::size_t off) {
        std::vector<cplx> y;
        fft.inv(y, spec);
        for (std::size_t i = 0; i < n; ++i) out[off + i] = y[pad + i].real();
    };
    const double k_exp = 2 / (N - 2 * g);
    f.rho_star.resize(nq);
    f.rho_star_prime.resize(nq);
    f.e_star.resize(nq);
    f.e1.resize(nq);
    f.e2.resize(nq);
    f.flux.resize(nq);
    f.inertia.resize(nq);
    f.V.assign(nq * n, 0.0);
    f.V_t.assign(nq * n, 0.0);
    f.V_rs.assign(nq * n, 0.0);
    bool failed = false;
    std::string what;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t q = 0; q < nq + 1; ++q) {
        try {
            const bool trace = q == nq;
            const double r = trace ? f.trace_rho : f.rho[q];
            const auto p0 = profile(pp.N, g, zeta_of(pp, 0), r);
            const double y = 4 * r / (4 + r * r), dy = 4 * (4 - r * r) / ((4 + r * r) * (4 + r * r));
            const double F0 = p0.value.real();
            const double rs = y * std::pow(F0, k_exp);
            const double rsp = dy * std::pow(F0, k_exp) + y * k_exp * std::pow(F0, k_exp - 1) * p0.deriv.real();

            std::vector<cplx> sV(M), sT(M), sR(M);
            for (std::size_t k = 0; k < M; ++k) {
                if (!active[k]) continue;
                const auto p = profile(pp.N, g, zeta_of(pp, xi[k]), r);
                const cplx m = p.value / p0.value;
                const cplx dm = (p.deriv * p0.value - p.value * p0.deriv) / (p0.value * p0.value);
                sV[k] = X[k] * m;
                sT[k] = X[k] * m * cplx(0, xi[k]);
                sR[k] = X[k] * dm / rsp;
            }
            if (trace) {
                std::vector<double> tv(n), tr(n);
                f.trace_V_t.resize(n);
                synth(sV, tv, 0);
                synth(sR, tr, 0);
                synth(sT, f.trace_V_t, 0);
                f.trace_V.resize(n);
                f.neumann.resize(n);
                const double dt = -d_gamma(g) / (2 * g);
                for (std::size_t i = 0; i < n; ++i) {
                    f.trace_V[i] = tv[i] + L;
                    f.neumann[i] = -dt * std::pow(rs, 1 - 2 * g) * tr[i] + A_constant(pp) * v.values[i];
                }
                continue;
            }
            synth(sV, f.V, q * n);
            synth(sT, f.V_t, q * n);
            synth(sR, f.V_rs, q * n);
            for (std::size_t i = 0; i < n; ++i) f.V[q * n + i] += L;

            const double B = (1 + r * r / 4) * std::pow(1 - r * r / 4, N - 1);
            f.rho_star[q] = rs;
            f.rho_star_prime[q] = rsp;
            f.e_star[q] = (rs / r) * (rs / r) * B;
            f.e1[q] = B;
            f.e2[q] = B / ((1 + r * r / 4) * (1 + r * r / 4));
            // P = sqrt(g+) (V^0)^2 g^{rho rho}, Qt = sqrt(g+) (V^0)^2 g^{tt}
            f.flux[q] = std::pow(r, 1 - N) * B * std::pow(rs, N - 2 * g);
            f.inertia[q] = f.flux[q] / ((1 + r * r / 4) * (1 + r * r / 4));
        } catch (const std::exception& e) {
#pragma omp critical
            {
                failed = true;
                what = e.what();
            }
        }
    }
    if (failed) throw QuadratureFailure("extension profile: " + what);
    return f;
}

GridFunction hamiltonian_trace(const ProblemParams& pp, const ExtensionField& f, const GridFunction& v,
                               HamiltonianWeights w) {
    if (v.n() != f.n_t()) throw DomainError("profile and field grids differ");
    const double A = A_constant(pp), dt = -d_gamma(pp.gamma) / (2 * pp.gamma);
    GridFunction H = v;
    H.limit_plus = H.limit_minus = A / dt * (-0.5 + 1 / (pp.p + 1)) * std::pow(v.limit_plus, 2);
    const std::size_t n = f.n_t();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = v.values[i];
        double bulk = 0;
        for (std::size_t q = 0; q < f.n_rho(); ++q) {
            const double vr = f.V_rs[q * n + i], vt = f.V_t[q * n + i];
            if (w == HamiltonianWeights::Volume) {
                // d rho V = rho*' d rho* V
                const double drho = f.rho_star_prime[q] * vr;
                bulk += f.weight[q] * (-f.flux[q] * drho * drho + f.inertia[q] * vt * vt);
            } else {
                // d rho* = rho*' d rho
                const double s = std::pow(f.rho_star[q], 1 - 2 * pp.gamma) * f.rho_star_prime[q];
                bulk += f.weight[q] * s * (-f.e1[q] * vr * vr + f.e2[q] * vt * vt);
            }
        }
        H.values[i] = A / dt * (-0.5 * x * x + std::pow(x, pp.p + 1) / (pp.p + 1)) + 0.5 * bulk;
    }
    return H;
}

GridFunction hamiltonian_rate_identity(const ProblemParams& pp, const ExtensionField& f) {
    auto r = hamiltonian_rate(pp, f);
    const double A = A_constant(pp), dt = -d_gamma(pp.gamma) / (2 * pp.gamma);
    for (std::size_t i = 0; i < f.n_t(); ++i)
        r.values[i] += (A * std::pow(f.v.values[i], pp.p) - f.neumann[i]) * f.trace_V_t[i] / dt;
    return r;
}

GridFunction hamiltonian_rate(const ProblemParams& pp, const ExtensionField& f) {
    GridFunction r = f.v;
    r.limit_plus = r.limit_minus = 0;
    const std::size_t n = f.n_t();
    const double Q0 = q0(pp);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t q = 0; q < f.n_rho(); ++q) {
            const double vt = f.V_t[q * n + i];
            s += f.weight[q] * f.inertia[q] * vt * vt;
        }
        r.values[i] = -2 * Q0 * s;
    }
    return r;
}

double hamiltonian_scale(const ProblemParams& pp, const ExtensionField& f) {
    const double A = A_constant(pp), dt = -d_gamma(pp.gamma) / (2 * pp.gamma);
    const std::size_t n = f.n_t();
    double scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.v.values[i];
        double b1 = 0, b2 = 0;
        for (std::size_t q = 0; q < f.n_rho(); ++q) {
            const double drho = f.rho_star_prime[q] * f.V_rs[q * n + i], vt = f.V_t[q * n + i];
            b1 += f.weight[q] * f.flux[q] * drho * drho;
            b2 += f.weight[q] * f.inertia[q] * vt * vt;
        }
        const double h1 = A / dt * (-0.5 * x * x + std::pow(x, pp.p + 1) / (pp.p + 1));
        scale = std::max({scale, std::abs(h1), 0.5 * b1, 0.5 * b2});
    }
    return scale;
}

}  // namespace csk
