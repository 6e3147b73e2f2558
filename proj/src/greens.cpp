#include "csk/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "csk/errors.hpp"
#include "csk/quadrature.hpp"

namespace csk {

namespace {

using std::numbers::pi;
using Series = std::array<double, 4>;

constexpr double kTailTol = 1e-12;

Series mul(const Series& a, const Series& b) {
    Series r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; i + j < 4; ++j) r[i + j] += a[i] * b[j];
    return r;
}

// (b0 + b1 w + b2 w^2 + b3 w^3)^alpha to order w^3.
Series power(const Series& b, double alpha) {
    Series x{0, b[1] / b[0], b[2] / b[0], b[3] / b[0]};
    Series r{1, 0, 0, 0}, xp{1, 0, 0, 0};
    double c = 1;
    for (int k = 1; k < 4; ++k) {
        c *= (alpha - k + 1) / k;
        xp = mul(xp, x);
        for (int i = 0; i < 4; ++i) r[i] += c * xp[i];
    }
    const double s = std::pow(b[0], alpha);
    for (double& v : r) v *= s;
    return r;
}

// int e^{i xi t} (xi^2 + a^2)^{-e} d xi.
double bessel_potential(double e, double a, double t) {
    t = std::abs(t);
    const double x = a * t, nu = e - 0.5, anu = std::abs(nu);
    const double pre = 2 * std::sqrt(pi) / std::tgamma(e);
    if (x >= 1e-4) return pre * std::pow(t / (2 * a), nu) * std::cyl_bessel_k(anu, x);
    if (anu < 1e-12) return pre * std::cyl_bessel_k(0.0, x);
    if (anu < 1) {
        const double f = pi / (2 * std::sin(pi * anu));
        if (nu < 0) return pre * f * (std::pow(t / 2, -2 * anu) / std::tgamma(1 - anu) - std::pow(a, 2 * anu) / std::tgamma(1 + anu));
        return pre * f * (std::pow(a, -2 * anu) / std::tgamma(1 - anu) - std::pow(t / 2, 2 * anu) / std::tgamma(1 + anu));
    }
    return std::sqrt(pi) * std::tgamma(e - 0.5) / std::tgamma(e) * std::pow(a, 1 - 2 * e);
}

double term_value(const GreenTerm& g, double t) {
    const double decay = std::exp(-g.sigma * t);
    if (g.axis == PoleAxis::Imaginary) return g.d * decay;
    return decay * (g.d * std::cos(g.tau * t) + g.dp * std::sin(g.tau * t));
}

int first_series_term(const GreenSeries& s) { return s.regime == Regime::Unstable ? 1 : 0; }

}  // namespace

// Fourier inversion of 1/(theta - kappa) with the large-xi expansion, the
// first pole and, when unstable, the real poles subtracted in closed form.
class GreenNearField {
public:
    GreenNearField(const ProblemParams& pp, const ModeIndex& mode, double kappa, const std::vector<GreenTerm>& terms,
                   Regime regime) {
        const auto hp = half_params(pp.N, pp.gamma, mode);
        const double g = pp.gamma;
        a_ = std::max({2 * hp.A, std::pow(2 * kappa, 0.5 / g), 1.0});
        const auto b = theta_expansion(pp.N, g, mode, a_);
        const int nmax = kappa > 0 ? static_cast<int>(std::ceil(3 / g)) + 1 : 1;
        for (int n = 1; n <= nmax; ++n) {
            const auto c = power(b, -n);
            for (int k = 0; k < 4; ++k) {
                const double e = n * g + k;
                if (e < 3 + g) powers_.push_back({std::pow(kappa, n - 1) * c[k], e});
            }
        }
        if (regime == Regime::Stable) {
            pole_d_ = terms.front().d;
            pole_sigma_ = terms.front().sigma;
        } else {
            tau0_ = terms.front().tau;
            unstable_c_ = terms.front().d / (4 * pi);  // 1/theta'(tau0)
        }
        b_ = pole_sigma_ + 1;

        auto remainder = [&](double xi) {
            const double u = xi * xi + a_ * a_;
            double r = 1.0 / (theta(pp, mode, xi).real() - kappa);
            for (const auto& p : powers_) r -= p.c * std::pow(u, -p.e);
            if (pole_d_ != 0) {
                const double s2 = pole_sigma_ * pole_sigma_;
                r -= pole_sigma_ * pole_d_ / pi * (1 / (xi * xi + s2) - 1 / (xi * xi + b_ * b_));
            }
            if (unstable_c_ != 0)
                r -= unstable_c_ * 2 * tau0_ * (1 / (xi * xi - tau0_ * tau0_) - 1 / (xi * xi + b_ * b_));
            return r;
        };
        auto panels = [&](double lo, double hi, double width) {
            for (double x = lo; x < hi - 1e-12; x += width) {
                const auto q = gauss_legendre(16, x, x + width);
                for (std::size_t i = 0; i < q.x.size(); ++i) {
                    xi_.push_back(q.x[i]);
                    wr_.push_back(2 * q.w[i] * remainder(q.x[i]));
                }
            }
        };
        panels(0, 50, 0.25);
        panels(50, 250, 0.5);
        half_count_ = xi_.size();
        panels(250, 500, 0.5);

        const double probe = 0.25;
        double full = 0, half = 0;
        for (std::size_t i = 0; i < xi_.size(); ++i) {
            const double v = wr_[i] * std::cos(xi_[i] * probe);
            full += v;
            if (i < half_count_) half += v;
        }
        if (std::abs(full - half) > 1e-6) {
            std::ostringstream os;
            os << "Green's function remainder changes by " << std::abs(full - half) << " when the cutoff is halved";
            throw QuadratureFailure(os.str());
        }
    }

    double operator()(double t) const {
        double v = 0;
        for (const auto& p : powers_) v += p.c * bessel_potential(p.e, a_, t);
        const double at = std::abs(t);
        if (pole_d_ != 0) v += pole_d_ * (std::exp(-pole_sigma_ * at) - pole_sigma_ / b_ * std::exp(-b_ * at));
        if (unstable_c_ != 0) {
            if (t < 0) v += 4 * pi * unstable_c_ * std::sin(tau0_ * t);
            v -= 2 * pi * tau0_ * unstable_c_ / b_ * std::exp(-b_ * at);
        }
        for (std::size_t i = 0; i < xi_.size(); ++i) v += wr_[i] * std::cos(xi_[i] * t);
        return v;
    }

private:
    struct Power {
        double c, e;
    };
    std::vector<Power> powers_;
    double a_ = 1;
    double b_ = 0;
    double pole_d_ = 0, pole_sigma_ = 0;
    double unstable_c_ = 0, tau0_ = 0;
    std::vector<double> xi_, wr_;
    std::size_t half_count_ = 0;
};

double GreenSeries::rate_plus() const {
    if (window >= 0) return terms[window + 1].sigma;
    return terms[first_series_term(*this)].sigma;
}

double GreenSeries::rate_minus() const {
    if (window >= 0) return -terms[window].sigma;
    return regime == Regime::Unstable ? 0.0 : terms.front().sigma;
}

namespace {

std::vector<GreenTerm> make_terms(const PoleTable& tab) {
    std::vector<GreenTerm> out;
    for (const auto& e : tab.entries) {
        GreenTerm g{e.sigma, e.tau, 0, 0, e.axis};
        if (e.axis == PoleAxis::Imaginary) {
            g.d = -2 * pi * e.residue.imag();
        } else if (e.axis == PoleAxis::OffAxis) {
            g.d = -4 * pi * e.residue.imag();
            g.dp = -4 * pi * e.residue.real();
        } else {
            g.d = 4 * pi * e.residue.real();
        }
        out.push_back(g);
    }
    return out;
}

double tail_bound(const GreenTerm& last, double t) {
    const double q = std::exp(-2 * t);
    return (std::abs(last.d) + std::abs(last.dp)) * std::exp(-last.sigma * t) * q / (1 - q);
}

}  // namespace

GreenSeries green_series(const ProblemParams& pp, const ModeIndex& mode, double kappa, double t_min) {
    pp.validate();
    if (!(t_min > 0)) throw DomainError("t_min must be positive");
    int count = 24;
    for (;;) {
        auto tab = find_poles(pp, mode, kappa, count);
        auto terms = make_terms(tab);
        if (tail_bound(terms.back(), t_min) < kTailTol) {
            GreenSeries s;
            s.regime = tab.regime;
            s.poles = std::move(tab);
            s.terms = std::move(terms);
            s.j_max = count - 1;
            s.t_min = t_min;
            auto near = std::make_shared<GreenNearField>(pp, mode, kappa, s.terms, s.regime);
            s.near = near;
            return s;
        }
        if (count > 4096) throw TruncationError("series tail bound not reached with 4096 poles");
        count *= 2;
    }
}

GreenSeries green_shifted(const ProblemParams& pp, const ModeIndex& mode, double kappa, int J) {
    if (J < -1) throw DomainError("window index must be >= -1");
    auto s = green_series(pp, mode, kappa);
    if (J >= 0 && s.regime == Regime::Unstable)
        throw BeyondFirstUnstableWindow("shifted Green's functions are implemented for the stable regime only");
    if (J + 1 > s.j_max) throw DomainError("window index beyond the retained poles");
    s.window = J;
    return s;
}

int window_for(const GreenSeries& s, double delta) {
    for (std::size_t j = 0; j < s.terms.size(); ++j) {
        const double sg = s.terms[j].sigma;
        if (std::abs(delta - sg) <= 1e-12 * std::max(1.0, sg)) {
            std::ostringstream os;
            os << "decay rate " << delta << " coincides with the pole height sigma_" << j;
            throw WindowError(os.str());
        }
        if (delta < sg) return static_cast<int>(j) - 1;
    }
    throw WindowError("decay rate beyond the retained poles");
}

namespace {

double apply_window(const GreenSeries& s, double t, double base) {
    for (int j = 0; j <= s.window; ++j) base -= term_value(s.terms[j], t);
    return base;
}

}  // namespace

double green_eval(const GreenSeries& s, double t) {
    const double at = std::abs(t);
    if (at == 0 || tail_bound(s.terms.back(), at) >= kTailTol) {
        std::ostringstream os;
        os << "residue series tail bound fails at |t| = " << at;
        throw TruncationError(os.str());
    }
    const int j0 = first_series_term(s);
    if (s.window >= 0 && t > 0) {
        double v = 0;
        for (int j = static_cast<int>(s.terms.size()) - 1; j > s.window; --j) v += term_value(s.terms[j], t);
        return v;
    }
    double v = 0;
    for (int j = static_cast<int>(s.terms.size()) - 1; j >= j0; --j) v += term_value(s.terms[j], at);
    if (j0 == 1 && t < 0) v += s.terms[0].d * std::sin(s.terms[0].tau * t);
    return apply_window(s, t, v);
}

double green_fourier(const GreenSeries& s, double t) {
    if (t == 0) throw SingularityError("Green's function evaluated at t = 0");
    return apply_window(s, t, (*s.near)(t));
}

double green_value(const GreenSeries& s, double t) {
    return std::abs(t) >= s.t_min ? green_eval(s, t) : green_fourier(s, t);
}

GridFunction solve_mode(const GreenSeries& s, const GridFunction& h) {
    h.validate();
    if (!h.tails_declared()) throw TailUndeclared("decay exponents of the right-hand side are not declared");
    const double hh = h.h();
    if (hh > 0.05) throw GridTooCoarse("grid spacing exceeds 0.05");
    // a nonzero limit does not decay at all
    const double delta = h.limit_plus != 0 ? std::min(h.decay_plus, 0.0) : h.decay_plus;
    const double delta0 = h.limit_minus != 0 ? std::min(h.decay_minus, 0.0) : h.decay_minus;
    std::ostringstream why;
    if (s.window >= 0) {
        if (!(delta > s.terms[s.window].sigma) || !(s.terms[s.window + 1].sigma + delta0 > 0))
            why << "shifted form needs delta > sigma_J and sigma_{J+1} + delta0 > 0";
    } else if (s.regime == Regime::Unstable) {
        if (!(delta > 0 && delta0 > 0)) why << "unstable regime needs delta > 0 and delta0 > 0";
    } else if (!(delta > 0 && delta0 >= 0)) {
        why << "stable regime needs delta > 0 and delta0 >= 0";
    }
    if (!why.str().empty()) {
        why << " (delta = " << delta << ", delta0 = " << delta0 << ")";
        throw DecayMismatch(why.str());
    }

    const long n = static_cast<long>(h.n());
    const double rp = s.rate_plus() + delta0, rm = s.rate_minus() + delta;
    const long rplus = n - 1 + static_cast<long>(std::ceil(37.0 / rp / hh));
    const long rminus = n - 1 + static_cast<long>(std::ceil(37.0 / rm / hh));
    if (rplus + rminus > 4000000) throw DecayMismatch("combined decay too slow for the convolution range");

    // V_k = int G(s) phi(k - s/h) ds over cells [m, m+1] in units of h.
    const long m0 = -rminus - 2, m1 = rplus + 1;
    const long ncell = m1 - m0 + 1;
    std::vector<std::array<double, 4>> cell(ncell);
    const auto gl = gauss_legendre(8);
    const auto ts = tanh_sinh(1.0 / 32, 1e-200);
    auto cardinal = [](double u) {
        const double a = std::abs(u);
        if (a <= 1) return 0.5 * (a + 1) * (a - 1) * (a - 2);
        if (a <= 2) return -(a - 1) * (a - 2) * (a - 3) / 6;
        return 0.0;
    };
#pragma omp parallel for schedule(dynamic, 64)
    for (long c = 0; c < ncell; ++c) {
        const long m = m0 + c;
        std::array<double, 4> acc{};
        auto add = [&](double u, double w) {
            const double g = w * green_value(s, u * hh);
            for (int q = 0; q < 4; ++q) acc[q] += g * cardinal(m - 1 + q - u);
        };
        if (m == 0) {
            for (std::size_t i = 0; i < ts.x.size(); ++i) add(ts.x[i], ts.w[i] * hh);
        } else if (m == -1) {
            for (std::size_t i = 0; i < ts.x.size(); ++i) add(-ts.x[i], ts.w[i] * hh);
        } else {
            for (std::size_t i = 0; i < gl.x.size(); ++i) add(m + 0.5 + 0.5 * gl.x[i], 0.5 * gl.w[i] * hh);
        }
        cell[c] = acc;
    }
    std::vector<double> V(rplus + rminus + 1, 0.0);  // V[k + rminus]
    for (long c = 0; c < ncell; ++c) {
        const long m = m0 + c;
        for (int q = 0; q < 4; ++q) {
            const long k = m - 1 + q;
            if (k >= -rminus && k <= rplus) V[k + rminus] += cell[c][q];
        }
    }

    // ext[j + rplus] = h_j for j in [-rplus, n - 1 + rminus]
    std::vector<double> ext(n + rplus + rminus);
    for (long j = -rplus; j < n + rminus; ++j) ext[j + rplus] = h.extended(j);
    GridFunction w = h;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        double acc = 0;
        for (long k = -rminus; k <= rplus; ++k) acc += V[k + rminus] * ext[i - k + rplus];
        w.values[i] = acc / (2 * pi);
    }

    w.limit_plus = w.limit_minus = 0;
    if (s.window >= 0) {
        w.decay_plus = std::min(s.rate_plus(), delta);
        w.decay_minus = s.rate_minus();
    } else if (s.regime == Regime::Unstable) {
        w.decay_plus = std::min(s.rate_plus(), delta);
        w.decay_minus = 0;
    } else {
        const double sym = theta(s.params(), s.mode(), 0.0).real() - s.kappa();
        w.decay_plus = std::min(s.rate_plus(), delta);
        w.decay_minus = std::min(s.rate_minus(), delta0);
        w.limit_plus = h.limit_plus / sym;
        w.limit_minus = h.limit_minus / sym;
        if (w.decay_plus <= 0) w.decay_plus = s.rate_plus();
        if (w.decay_minus <= 0) w.decay_minus = s.rate_minus();
    }
    return w;
}

}  // namespace csk
