#include "csk/specialfn.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "csk/errors.hpp"

namespace csk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = 0.57721566490153286061;
constexpr double kPoleTol = 1e-12;

// Lanczos g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool near_nonpositive_integer(cplx z, double tol) {
    if (std::abs(z.imag()) > tol || z.real() > tol) return false;
    return std::abs(z.real() - std::round(z.real())) <= tol;
}

// sin(pi z) and cos(pi z) with the real part reduced first, so that values
// next to integers keep relative accuracy.
cplx sin_pi(cplx z) {
    const double n = std::round(z.real());
    const cplx f(z.real() - n, z.imag());
    const cplx s = std::sin(kPi * f);
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

cplx cos_pi(cplx z) {
    const double n = std::round(z.real());
    const cplx f(z.real() - n, z.imag());
    const cplx c = std::cos(kPi * f);
    return (static_cast<long long>(n) % 2 == 0) ? c : -c;
}

// log sin(pi z), without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
    if (std::abs(z.imag()) < 20.0) return std::log(sin_pi(z));
    if (z.imag() > 0) {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        const cplx e = std::exp(cplx(0, 2 * kPi) * z);
        return cplx(0, -kPi) * z + std::log(cplx(0, 0.5)) + std::log(1.0 - e);
    }
    return std::conj(log_sin_pi(std::conj(z)));
}

cplx lanczos_ln_gamma(cplx z) {
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
    const cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx pi_cot_pi(cplx z) {
    if (std::abs(z.imag()) < 20.0) return kPi * cos_pi(z) / sin_pi(z);
    return z.imag() > 0 ? cplx(0, -kPi) : cplx(0, kPi);
}

cplx series_2f1(cplx a, cplx b, cplx c, cplx z, const SeriesControl& ctl) {
    cplx term = 1.0, sum = 1.0;
    int small = 0;
    for (int n = 0; n < ctl.max_terms; ++n) {
        term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= std::max(ctl.abs_tol, ctl.rel_tol * std::abs(sum))) {
            if (++small >= 2) return sum;
        } else {
            small = 0;
        }
    }
    throw NonConvergence("2F1 power series exhausted max_terms");
}

bool is_nonpositive_int(cplx a) { return near_nonpositive_integer(a, 1e-14); }

// Product of Gammas in the numerator over Gammas in the denominator; a
// denominator pole makes the whole ratio vanish.
template <std::size_t P, std::size_t Q>
cplx gamma_ratio(const std::array<cplx, P>& num, const std::array<cplx, Q>& den) {
    cplx lg = 0.0;
    for (const auto& d : den) {
        if (near_nonpositive_integer(d, kPoleTol)) return 0.0;
        lg -= ln_gamma(d);
    }
    for (const auto& n : num) lg += ln_gamma(n);
    return std::exp(lg);
}

// A&S 15.3.10 / 15.3.12 with c = a + b - m, m >= 0.
cplx log_case(cplx a, cplx b, int m, cplx omz, const SeriesControl& ctl) {
    const cplx c = a + b - double(m);
    cplx first = 0.0;
    if (m > 0) {
        const cplx pref = gamma_ratio<2, 2>({cplx(m), c}, {a, b}) * std::pow(omz, -double(m));
        cplx term = 1.0, acc = 1.0;
        for (int n = 1; n < m; ++n) {
            term *= (a - double(m) + double(n - 1)) * (b - double(m) + double(n - 1)) /
                    (double(n) * (1.0 - double(m) + double(n - 1))) * omz;
            acc += term;
        }
        first = pref * acc;
    }
    cplx pref2 = rgamma(a - double(m)) * rgamma(b - double(m));
    if (pref2 == 0.0) return first;
    pref2 *= gamma_fn(c);
    if (m % 2 != 0) pref2 = -pref2;

    const cplx lomz = std::log(omz);
    double factn = 1.0;  // n!
    double factnm = 1.0;  // (n+m)!
    for (int k = 1; k <= m; ++k) factnm *= k;
    cplx poch = 1.0;  // (a)_n (b)_n
    double psi_n1 = -kEuler;  // psi(n+1)
    double psi_nm1 = -kEuler;  // psi(n+m+1)
    for (int k = 1; k <= m; ++k) psi_nm1 += 1.0 / k;
    cplx psi_a = digamma(a), psi_b = digamma(b);
    cplx pw = 1.0;
    cplx sum = 0.0;
    int small = 0;
    for (int n = 0; n < ctl.max_terms; ++n) {
        const cplx term = poch / (factn * factnm) * pw * (lomz - psi_n1 - psi_nm1 + psi_a + psi_b);
        sum += term;
        if (std::abs(term) <= std::max(ctl.abs_tol, ctl.rel_tol * std::abs(sum))) {
            if (++small >= 2) return first - pref2 * sum;
        } else {
            small = 0;
        }
        poch *= (a + double(n)) * (b + double(n));
        psi_a += 1.0 / (a + double(n));
        psi_b += 1.0 / (b + double(n));
        factn *= double(n + 1);
        factnm *= double(n + m + 1);
        psi_n1 += 1.0 / double(n + 1);
        psi_nm1 += 1.0 / double(n + m + 1);
        pw *= omz;
    }
    throw NonConvergence("2F1 logarithmic series exhausted max_terms");
}

}  // namespace

void SeriesControl::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0) || max_terms < 1)
        throw DomainError("SeriesControl requires abs_tol > 0, rel_tol > 0, max_terms >= 1");
}

cplx ln_gamma(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("ln_gamma of non-finite argument");
    if (near_nonpositive_integer(z, kPoleTol)) throw PoleError("Gamma pole at z = " + std::to_string(z.real()));
    if (z.real() >= 0.5) return lanczos_ln_gamma(z);
    if (z.real() > -200.0) {
        // Upward recurrence keeps the principal branch.
        const int n = static_cast<int>(std::ceil(0.5 - z.real()));
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) acc += std::log(z + double(k));
        return lanczos_ln_gamma(z + double(n)) - acc;
    }
    return std::log(kPi) - log_sin_pi(z) - lanczos_ln_gamma(1.0 - z);
}

cplx gamma_fn(cplx z) {
    if (z.imag() == 0.0 && z.real() < 0.5) {
        if (near_nonpositive_integer(z, kPoleTol)) throw PoleError("Gamma pole");
        return kPi / (sin_pi(z) * std::exp(lanczos_ln_gamma(1.0 - z)));
    }
    return std::exp(ln_gamma(z));
}

cplx rgamma(cplx z) {
    if (z.real() < 0.5 && std::abs(z.imag()) <= 1.0) {
        return std::exp(lanczos_ln_gamma(1.0 - z)) * sin_pi(z) / kPi;
    }
    return std::exp(-ln_gamma(z));
}

cplx digamma(cplx z) {
    if (near_nonpositive_integer(z, kPoleTol)) throw PoleError("digamma pole");
    if (z.real() < 0.5) return digamma(1.0 - z) - pi_cot_pi(z);
    cplx acc = 0.0;
    while (z.real() <= 10.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    const cplx iz2 = 1.0 / (z * z);
    // Bernoulli tail: B2k / (2k z^{2k}), k = 1..6.
    const cplx tail =
        iz2 * (1.0 / 12 - iz2 * (1.0 / 120 - iz2 * (1.0 / 252 - iz2 * (1.0 / 240 - iz2 * (1.0 / 132 - iz2 * (691.0 / 32760))))));
    return acc + std::log(z) - 0.5 / z - tail;
}

cplx beta_fn(cplx a, cplx b) { return std::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)); }

double gamma_residue(int j) {
    if (j < 0) throw DomainError("gamma_residue requires j >= 0");
    double r = 1.0;
    for (int k = 1; k <= j; ++k) r /= -double(k);
    return r;
}

ScaledRGamma scaled_rgamma(cplx w) {
    if (w.real() < 0.5 && std::abs(w.imag()) <= 1.0) {
        const cplx s = sin_pi(w);
        return {lanczos_ln_gamma(1.0 - w) - std::log(kPi), s, -digamma(1.0 - w) * s + kPi * cos_pi(w)};
    }
    return {-ln_gamma(w), 1.0, -digamma(w)};
}

cplx hyp2f1_near_one(cplx a, cplx b, cplx c, cplx omz, const SeriesControl& ctl) {
    ctl.validate();
    if (is_nonpositive_int(c)) throw DomainError("2F1 with c a non-positive integer");
    if (omz == 0.0) {
        if ((c - a - b).real() <= 0) throw DomainError("2F1 diverges at z = 1");
        return gamma_ratio<2, 2>({c, c - a - b}, {c - a, c - b});
    }
    const cplx s = c - a - b;
    const double m = std::round(s.real());
    if (std::abs(s.imag()) < 1e-10 && std::abs(s.real() - m) < 1e-10) {
        if (m > 0) {
            // Euler transform moves the integer offset to -m.
            return std::pow(omz, s) * log_case(c - a, c - b, static_cast<int>(m), omz, ctl);
        }
        return log_case(a, b, static_cast<int>(-m), omz, ctl);
    }
    const cplx g1 = gamma_ratio<2, 2>({c, s}, {c - a, c - b});
    const cplx g2 = gamma_ratio<2, 2>({c, -s}, {a, b});
    cplx r = 0.0;
    if (g1 != 0.0) r += g1 * series_2f1(a, b, 1.0 - s, omz, ctl);
    if (g2 != 0.0) r += g2 * std::pow(omz, s) * series_2f1(c - a, c - b, 1.0 + s, omz, ctl);
    return r;
}

cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const SeriesControl& ctl) {
    ctl.validate();
    if (is_nonpositive_int(c)) throw DomainError("2F1 with c a non-positive integer");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("2F1 at non-finite z");
    if (z == 0.0) return 1.0;
    if (is_nonpositive_int(a) || is_nonpositive_int(b)) {
        // Terminating series: a polynomial in z.
        SeriesControl poly = ctl;
        poly.abs_tol = 0.0 + 1e-300;
        poly.rel_tol = 1e-300;
        return series_2f1(a, b, c, z, poly);
    }
    const double az = std::abs(z);
    if (az <= 0.5) return series_2f1(a, b, c, z, ctl);
    const cplx w = z / (z - 1.0);
    if (std::abs(w) <= 0.5) return std::pow(1.0 - z, -a) * series_2f1(a, c - b, c, w, ctl);
    const cplx omz = 1.0 - z;
    if (std::abs(omz) <= 0.5) return hyp2f1_near_one(a, b, c, omz, ctl);
    const cplx omw = 1.0 / omz;
    if (std::abs(omw) <= 0.5) return std::pow(omz, -a) * hyp2f1_near_one(a, c - b, c, omw, ctl);
    if (az <= 0.95) return series_2f1(a, b, c, z, ctl);
    throw DomainError("2F1 argument outside the supported region");
}

double hyp2f1(double a, double b, double c, double z) {
    if (z >= 1.0) throw DomainError("real 2F1 requires z < 1");
    return hyp2f1(cplx(a), cplx(b), cplx(c), cplx(z)).real();
}

}  // namespace csk
