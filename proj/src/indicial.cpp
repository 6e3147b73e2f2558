#include "csk/indicial.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "csk/errors.hpp"

namespace csk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Resolvent {
    const ProblemParams& pp;
    const ModeIndex& mode;
    double kappa;
    cplx operator()(cplx z) const { return theta(pp, mode, z) - kappa; }
};

// Change of arg(g) along a straight segment, refined until every step turns
// by less than a quarter radian.
class ArgWalker {
public:
    explicit ArgWalker(const Resolvent& g) : g_(g) {}

    void segment(cplx a, cplx b, int pieces) {
        cplx za = a, ga = g_(a);
        for (int k = 1; k <= pieces; ++k) {
            const cplx zb = a + (b - a) * (static_cast<double>(k) / pieces);
            const cplx gb = g_(zb);
            refine(za, zb, ga, gb, 0);
            za = zb;
            ga = gb;
        }
    }
    double total() const { return total_; }

private:
    void refine(cplx a, cplx b, cplx ga, cplx gb, int depth) {
        const double d = std::arg(gb / ga);
        if (std::abs(d) < 0.25) {
            total_ += d;
            return;
        }
        if (depth > 40) throw MissedPoleError("contour passes through a zero of theta - kappa");
        const cplx m = 0.5 * (a + b);
        const cplx gm = g_(m);
        refine(a, m, ga, gm, depth + 1);
        refine(m, b, gm, gb, depth + 1);
    }

    const Resolvent& g_;
    double total_ = 0;
};

int pieces_for(double len) { return std::max(16, static_cast<int>(std::ceil(len / 0.2))); }

int winding_of_rectangle(const Resolvent& g, double x0, double x1, double y0, double y1) {
    ArgWalker w(g);
    w.segment({x0, y0}, {x1, y0}, pieces_for(x1 - x0));
    w.segment({x1, y0}, {x1, y1}, pieces_for(y1 - y0));
    w.segment({x1, y1}, {x0, y1}, pieces_for(x1 - x0));
    w.segment({x0, y1}, {x0, y0}, pieces_for(y1 - y0));
    const double wn = w.total() / kTwoPi;
    if (std::abs(wn - std::round(wn)) > 0.05) throw NonConvergence("argument principle did not close");
    return static_cast<int>(std::lround(wn));
}

template <class F>
double bracket_root(F f, double lo, double hi, double flo, double fhi) {
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50),
                                               iters);
    return 0.5 * (r.first + r.second);
}

// Zero of theta(i sigma) - kappa on the imaginary axis with index j.
double axis_root(const ProblemParams& pp, const ModeIndex& mode, double kappa, int j) {
    const auto h = half_params(pp.N, pp.gamma, mode);
    if (kappa == 0.0) return 2.0 * (h.B + j);
    auto f = [&](double s) { return theta(pp, mode, cplx(0, s)).real() - kappa; };
    double lo = 0.0, hi = 2.0 * (h.B + j);
    double flo = 0.0;
    if (j == 0) {
        flo = f(lo);
    } else {
        // theta -> +infinity at the pole on the left; step towards it until positive
        const double pole = 2.0 * (h.A + j - 1);
        for (double off = 1e-3 * (hi - pole); off > 1e-9; off *= 1e-2) {
            lo = pole + off;
            flo = f(lo);
            if (flo > 0) break;
        }
    }
    const double fhi = -kappa;
    if (!(flo > 0)) {
        std::ostringstream os;
        os << "no sign change for pole " << j << " on the imaginary axis";
        throw NonConvergence(os.str());
    }
    return bracket_root(f, lo, hi, flo, fhi);
}

cplx newton_refine(const ProblemParams& pp, const ModeIndex& mode, double kappa, cplx z) {
    for (int it = 0; it < 60; ++it) {
        cplx v, d;
        theta_and_prime(pp, mode, z, v, d);
        const cplx step = (v - kappa) / d;
        z -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) return z;
    }
    throw NonConvergence("Newton refinement of an off-axis pole");
}

void locate_in(const Resolvent& g, const ProblemParams& pp, const ModeIndex& mode, double kappa, double x0,
               double x1, double y0, double y1, int expect, std::vector<cplx>& out) {
    if (expect <= 0) return;
    if (std::max(x1 - x0, y1 - y0) < 0.05) {
        cplx z = newton_refine(pp, mode, kappa, {0.5 * (x0 + x1), 0.5 * (y0 + y1)});
        out.push_back(z);
        return;
    }
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    const double box[4][4] = {{x0, xm, y0, ym}, {xm, x1, y0, ym}, {x0, xm, ym, y1}, {xm, x1, ym, y1}};
    for (const auto& b : box) {
        const int c = winding_of_rectangle(g, b[0], b[1], b[2], b[3]);
        locate_in(g, pp, mode, kappa, b[0], b[1], b[2], b[3], c, out);
    }
}

}  // namespace

Regime classify(const ProblemParams& pp, const ModeIndex& mode, double kappa) {
    const double t0 = theta(pp, mode, 0.0).real();
    if (std::abs(kappa - t0) <= 1e-14 * t0) throw DegeneratePole("kappa equals theta(0): double root at the origin");
    return kappa < t0 ? Regime::Stable : Regime::Unstable;
}

int zero_count(const ProblemParams& pp, const ModeIndex& mode, double kappa, double x0, double x1, double y0,
               double y1) {
    Resolvent g{pp, mode, kappa};
    int count = winding_of_rectangle(g, x0, x1, y0, y1);
    if (x0 < 0 && x1 > 0) {
        const double A = half_params(pp.N, pp.gamma, mode).A;
        for (int n = 0; 2 * (A + n) < y1; ++n)
            if (2 * (A + n) > y0) ++count;
    }
    return count;
}

int winding_around(const ProblemParams& pp, const ModeIndex& mode, double kappa, cplx center, double radius) {
    Resolvent g{pp, mode, kappa};
    ArgWalker w(g);
    const int n = 64;
    for (int k = 0; k < n; ++k) {
        const cplx a = center + radius * std::polar(1.0, kTwoPi * k / n);
        const cplx b = center + radius * std::polar(1.0, kTwoPi * (k + 1) / n);
        w.segment(a, b, 1);
    }
    return static_cast<int>(std::lround(w.total() / kTwoPi));
}

double real_root(const ProblemParams& pp, const ModeIndex& mode, double kappa) {
    if (classify(pp, mode, kappa) != Regime::Unstable) throw DomainError("real root exists only for kappa > theta(0)");
    auto f = [&](double x) { return theta(pp, mode, x).real() - kappa; };
    double hi = 1.0, fhi = f(hi);
    while (fhi <= 0) {
        hi *= 2;
        fhi = f(hi);
        if (hi > 1e12) throw BracketError("theta(xi) never reaches kappa");
    }
    return bracket_root(f, 0.0, hi, f(0.0), fhi);
}

cplx residue_at(const ProblemParams& pp, const ModeIndex& mode, double kappa, const PoleEntry& pole) {
    const cplx z = pole.z();
    const cplx d = theta_prime(pp, mode, z);
    if (std::abs(d) < 1e-12) throw DegeneratePole("vanishing derivative at a pole of the resolvent");
    (void)kappa;
    return 1.0 / d;
}

PoleTable find_poles(const ProblemParams& pp, const ModeIndex& mode, double kappa, int count, int certify_up_to) {
    pp.validate();
    if (!(kappa >= 0) || !std::isfinite(kappa)) throw DomainError("kappa must be finite and >= 0");
    if (count < 1) throw DomainError("count must be >= 1");
    PoleTable tab{pp, mode, kappa, {}, classify(pp, mode, kappa)};
    const auto h = half_params(pp.N, pp.gamma, mode);
    const bool stable = tab.regime == Regime::Stable;
    const int j0 = stable ? 0 : 1;

    std::vector<PoleEntry> found;
    if (!stable) found.push_back({real_root(pp, mode, kappa), 0.0, {}, 0, PoleAxis::Real});

    // Certified window: every zero with sigma below the negative gap above sigma_Jc.
    const int Jc = std::max(1, std::min(certify_up_to, count + 1));
    const double top = 2.0 * (h.B + Jc) + pp.gamma;
    double eps = 1e-3;
    std::vector<double> axis;
    for (int j = j0; j <= Jc; ++j) axis.push_back(axis_root(pp, mode, kappa, j));
    if (stable) eps = std::min(eps, 0.5 * axis.front());
    const double T = std::min(400.0, std::max(top, 4.0 + 4.0 * std::pow(kappa, 0.5 / pp.gamma)));
    const int total = zero_count(pp, mode, kappa, -T, T, eps, top);
    const int expected = static_cast<int>(axis.size());
    if (total < expected || (total - expected) % 2 != 0) {
        std::ostringstream os;
        os << "argument principle counts " << total << " zeros, axis search found " << expected;
        throw MissedPoleError(os.str());
    }
    if (total > expected) {
        Resolvent g{pp, mode, kappa};
        const double x0 = 1e-3;
        const int right = winding_of_rectangle(g, x0, T, eps, top);
        std::vector<cplx> off;
        locate_in(g, pp, mode, kappa, x0, T, eps, top, right, off);
        if (2 * static_cast<int>(off.size()) != total - expected)
            throw MissedPoleError("off-axis zeros counted but not all located");
        for (cplx z : off) found.push_back({z.real(), z.imag(), {}, 0, PoleAxis::OffAxis});
    }
    for (double s : axis) found.push_back({0.0, s, {}, 0, PoleAxis::Imaginary});
    for (int j = Jc + 1; static_cast<int>(found.size()) < count; ++j)
        found.push_back({0.0, axis_root(pp, mode, kappa, j), {}, 0, PoleAxis::Imaginary});

    std::sort(found.begin(), found.end(), [](const PoleEntry& a, const PoleEntry& b) { return a.sigma < b.sigma; });
    found.resize(count);
    for (int i = 0; i < count; ++i) {
        found[i].index = i;
        found[i].residue = residue_at(pp, mode, kappa, found[i]);
    }
    tab.entries = std::move(found);
    return tab;
}

IndicialReport indicial_roots(const ProblemParams& pp, const ModeIndex& mode, Location where) {
    pp.validate(true);
    const double c = -0.5 * (pp.N - 2.0 * pp.gamma);
    if (where == Location::Infinity) {
        const double s = 2.0 * half_params(pp.N, pp.gamma, mode).B;
        return {c - s, c + s, where, mode};
    }
    const double kappa = pp.p * A_constant(pp);
    const auto tab = find_poles(pp, mode, kappa, 1);
    const auto& e = tab.entries.front();
    const cplx delta(e.sigma, e.tau);  // theta(i delta) = kappa
    return {c - delta, c + delta, where, mode};
}

}  // namespace csk
