#include "csk/symbols.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "csk/errors.hpp"

namespace csk {

namespace {

constexpr double kPoleTol = 1e-10;

void check_numerator_arg(cplx a) {
    if (a.real() > 0.5) return;
    const double n = std::round(a.real());
    if (n <= 0 && std::abs(a - n) < kPoleTol) {
        std::ostringstream os;
        os << "symbol evaluated at a pole (Gamma argument " << a << ")";
        throw PoleError(os.str());
    }
}

double binom(double n, double k) {
    if (k < 0 || n < k) return 0.0;
    return std::round(std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)));
}

double bernoulli_poly(int n, double x) {
    switch (n) {
        case 3: return x * x * x - 1.5 * x * x + 0.5 * x;
        case 5: return std::pow(x, 5) - 2.5 * std::pow(x, 4) + 5.0 / 3 * x * x * x - x / 6;
        case 7:
            return std::pow(x, 7) - 3.5 * std::pow(x, 6) + 3.5 * std::pow(x, 5) - 7.0 / 6 * x * x * x + x / 6;
    }
    throw DomainError("unsupported Bernoulli polynomial order");
}

using Series = std::array<double, 4>;

Series mul(const Series& a, const Series& b) {
    Series r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; i + j < 4; ++j) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace

void ProblemParams::validate(bool need_p) const {
    if (N < 2) throw DomainError("N must be >= 2");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    if (!(N > 2.0 * gamma)) throw DomainError("N must exceed 2 gamma");
    if (k < 0) throw DomainError("k must be >= 0");
    if (k > 0 && !(k < (N + k - 2.0 * gamma) / 2.0)) throw DomainError("k too large for N and gamma");
    if (need_p || has_p()) {
        if (!has_p()) throw DomainError("p is required");
        if (!(p > p_min() && p <= p_max() * (1 + 1e-15))) {
            std::ostringstream os;
            os << "p = " << p << " outside (" << p_min() << ", " << p_max() << "]";
            throw DomainError(os.str());
        }
    }
}

double ProblemParams::p_min() const { return N / (N - 2.0 * gamma); }
double ProblemParams::p_max() const { return (N + 2.0 * gamma) / (N - 2.0 * gamma); }

ModeIndex make_mode(int degree, int N) {
    if (degree < 0) throw DomainError("mode degree must be >= 0");
    return {degree, static_cast<double>(degree) * (degree + N - 2)};
}

ModeIndex mode_from_multiplicity(long m, int N) {
    if (m < 0) throw DomainError("mode index must be >= 0");
    long seen = 0;
    for (int l = 0;; ++l) {
        const long mult = static_cast<long>(binom(l + N - 1, N - 1) - binom(l + N - 3, N - 1));
        seen += mult;
        if (m < seen) return make_mode(l, N);
    }
}

SymbolHalfParams half_params(int N, double gamma, const ModeIndex& mode) {
    const double r = std::sqrt((0.5 * N - 1.0) * (0.5 * N - 1.0) + mode.mu);
    const double A = 0.5 + 0.5 * gamma + 0.5 * r;
    return {A, A - gamma};
}

void theta_and_prime(const ProblemParams& pp, const ModeIndex& mode, cplx z, cplx& value, cplx& deriv) {
    const auto h = half_params(pp.N, pp.gamma, mode);
    const cplx iz2 = cplx(0, 0.5) * z;
    const cplx a1 = h.A + iz2, a2 = h.A - iz2;
    check_numerator_arg(a1);
    check_numerator_arg(a2);
    const auto r1 = scaled_rgamma(h.B + iz2);
    const auto r2 = scaled_rgamma(h.B - iz2);
    const cplx scale = std::exp(2.0 * pp.gamma * std::log(2.0) + ln_gamma(a1) + ln_gamma(a2) + r1.log_scale +
                                r2.log_scale);
    value = scale * r1.value * r2.value;
    const cplx half_i(0, 0.5);
    deriv = half_i * scale *
            ((digamma(a1) - digamma(a2)) * r1.value * r2.value + r1.deriv * r2.value - r1.value * r2.deriv);
}

cplx theta(const ProblemParams& pp, const ModeIndex& mode, cplx z) {
    cplx v, d;
    theta_and_prime(pp, mode, z, v, d);
    return v;
}

cplx theta_prime(const ProblemParams& pp, const ModeIndex& mode, cplx z) {
    cplx v, d;
    theta_and_prime(pp, mode, z, v, d);
    return d;
}

double q0(const ProblemParams& pp) {
    pp.validate(true);
    return 2.0 * pp.gamma / (pp.p - 1.0) - 0.5 * (pp.N - 2.0 * pp.gamma);
}

cplx theta_tilde(const ProblemParams& pp, const ModeIndex& mode, double xi) {
    return theta(pp, mode, cplx(xi, -q0(pp)));
}

// log theta = 2g log xi + sum_n e_n xi^{-2n}; then re-expand in w = 1/u.
std::array<double, 4> theta_expansion(int N, double gamma, const ModeIndex& mode, double a) {
    const auto h = half_params(N, gamma, mode);
    const double a2 = a * a;
    std::array<double, 4> e{};
    for (int n = 1; n <= 3; ++n) {
        const double D = bernoulli_poly(2 * n + 1, h.A) - bernoulli_poly(2 * n + 1, h.B);
        e[n] = -2 * D * std::pow(-1.0, n) * std::pow(4.0, n) / (2.0 * n * (2 * n + 1));
    }
    const Series y{0, 1, a2, a2 * a2};  // xi^{-2} = w / (1 - a^2 w)
    Series S{}, yp{1, 0, 0, 0};
    for (int n = 1; n <= 3; ++n) {
        yp = mul(yp, y);
        for (int i = 0; i < 4; ++i) S[i] += e[n] * yp[i];
    }
    Series E{1, 0, 0, 0}, term{1, 0, 0, 0};
    for (int n = 1; n <= 3; ++n) {
        term = mul(term, S);
        for (int i = 0; i < 4; ++i) {
            term[i] /= n;
            E[i] += term[i];
        }
    }
    Series P{};  // (1 - a^2 w)^g
    double binom = 1;
    for (int k = 0; k < 4; ++k) {
        P[k] = binom * std::pow(-a2, k);
        binom *= (gamma - k) / (k + 1);
    }
    return mul(P, E);
}

double hardy_constant(int N, double gamma) {
    ProblemParams{N, gamma}.validate();
    return std::exp(2.0 * gamma * std::log(2.0) +
                    2.0 * (std::lgamma(0.25 * (N + 2.0 * gamma)) - std::lgamma(0.25 * (N - 2.0 * gamma))));
}

double lambda_of_alpha(int N, double gamma, double alpha) {
    const double g1 = 0.25 * (N + 2 * gamma + 2 * alpha), g2 = 0.25 * (N + 2 * gamma - 2 * alpha);
    const double g3 = 0.25 * (N - 2 * gamma - 2 * alpha), g4 = 0.25 * (N - 2 * gamma + 2 * alpha);
    for (double g : {g1, g2})
        if (g <= 0 && std::abs(g - std::round(g)) < kPoleTol) throw PoleError("lambda_of_alpha at a pole");
    const cplx v = std::pow(4.0, gamma) * gamma_fn(g1) * gamma_fn(g2) * rgamma(g3) * rgamma(g4);
    return v.real();
}

double A_constant(const ProblemParams& pp) {
    pp.validate(true);
    return lambda_of_alpha(pp.N, pp.gamma, 0.5 * (pp.N - 2.0 * pp.gamma) - 2.0 * pp.gamma / (pp.p - 1.0));
}

double d_gamma(double gamma) {
    if (!(gamma > 0 && gamma < 1)) throw DomainError("gamma must lie in (0,1)");
    return std::pow(4.0, gamma) * std::tgamma(gamma) / std::tgamma(-gamma);
}

double d_tilde_gamma(double gamma) { return -d_gamma(gamma) / (2.0 * gamma); }

double p_one(int N, double gamma) {
    ProblemParams pp{N, gamma};
    pp.validate();
    const double lam = hardy_constant(N, gamma);
    auto f = [&](double p) {
        pp.p = p;
        return p * A_constant(pp) - lam;
    };
    double lo = pp.p_min() * (1 + 1e-12), hi = pp.p_max();
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0 && fhi > 0)) throw BracketError("p A(p) - Lambda has no sign change on the admissible range");
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace csk
