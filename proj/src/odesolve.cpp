#include "csk/odesolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "csk/errors.hpp"
#include "csk/indicial.hpp"
#include "csk/kernels.hpp"
#include "csk/quadrature.hpp"

namespace csk {

std::pair<double, double> linearized_tail_rates(const ProblemParams& pp) {
    const auto mode = make_mode(0, pp.N);
    const auto roots = indicial_roots(pp, mode, Location::Origin);
    const double c = -0.5 * (pp.N - 2.0 * pp.gamma);
    const double q = q0(pp);
    // e^{-(Q0 + sigma_j) t} decays at +inf for every pole; at -inf the decaying
    // modes are e^{(sigma_j - Q0) t} with sigma_j > Q0
    const double plus = q + (roots.gamma_plus - c).real();
    const auto tab = find_poles(pp, mode, pp.p * A_constant(pp), 6);
    for (const auto& e : tab.entries)
        if (e.sigma > q + 1e-9) return {plus, e.sigma - q};
    throw NonConvergence("no decaying linearized mode at -inf among the first poles");
}

namespace {

struct Pinning {
    int count;
    double factor_plus, factor_minus;
};

// Interior rows: P~v - A v^p. Pinned rows: the tail law (v_i - L) = e^{-delta h}(v_{i-+1} - L).
Eigen::VectorXd residual_vector(const ProblemParams& pp, const GridFunction& v, const std::vector<double>& pv,
                                const Pinning& pin) {
    const long n = static_cast<long>(v.n());
    const double A = A_constant(pp);
    Eigen::VectorXd f(n);
    for (long i = 0; i < n; ++i) f[i] = pv[i] - A * std::pow(v.values[i], pp.p);
    for (int k = 0; k < pin.count; ++k) {
        const long i = k;
        f[i] = (v.values[i] - v.limit_minus) - pin.factor_minus * (v.values[i + 1] - v.limit_minus);
        const long j = n - 1 - k;
        f[j] = (v.values[j] - v.limit_plus) - pin.factor_plus * (v.values[j - 1] - v.limit_plus);
    }
    return f;
}

double interior_norm(const Eigen::VectorXd& f, int pinned) {
    double r = 0;
    for (long i = pinned; i < f.size() - pinned; ++i) r = std::max(r, std::abs(f[i]));
    return r;
}

}  // namespace

double profile_residual(const ProblemParams& pp, const GridFunction& v, int pinned) {
    Operator op(make_kernel(pp, make_mode(0, pp.N), true), v.h());
    const auto pv = op.apply(v);
    const double A = A_constant(pp);
    double r = 0;
    for (std::size_t i = pinned; i + pinned < v.n(); ++i)
        r = std::max(r, std::abs(pv[i] - A * std::pow(v.values[i], pp.p)));
    return r;
}

RadialProfile newton_profile(const ProblemParams& pp, const GridFunction& initial, double tol,
                             const NewtonOptions& opt) {
    pp.validate(true);
    initial.validate();
    if (!initial.tails_declared()) throw TailUndeclared("newton_profile needs declared tails");
    if (!(tol >= 1e-8)) throw DomainError("tol must be at least 1e-8");
    const long n = static_cast<long>(initial.n());
    if (n > 400) throw DomainError("newton_profile: n must not exceed 400");
    for (double x : initial.values)
        if (!(x > 0)) throw NonPositiveIterate("initial profile must be positive");

    Operator op(make_kernel(pp, make_mode(0, pp.N), true), initial.h());
    const double A = A_constant(pp);
    const Pinning pin{opt.pinned, std::exp(-initial.decay_plus * initial.h()),
                      std::exp(-initial.decay_minus * initial.h())};

    // The operator is affine in the samples: P~v = L v + b, b from the tail limits.
    Eigen::MatrixXd L(n, n);
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < n; ++j) {
        GridFunction e = initial;
        e.limit_plus = e.limit_minus = 0;
        std::fill(e.values.begin(), e.values.end(), 0.0);
        e.values[j] = 1;
        const auto col = op.apply(e);
        for (long i = 0; i < n; ++i) L(i, j) = col[i];
    }
    GridFunction v = initial;
    auto eval = [&](const GridFunction& g) { return residual_vector(pp, g, op.apply(g), pin); };

    RadialProfile out{initial, pp, false, 0, 0, {}};
    Eigen::VectorXd f = eval(v);
    double norm = interior_norm(f, opt.pinned);
    out.history.push_back(norm);
    for (int it = 0; it < opt.max_iterations && norm > tol; ++it) {
        Eigen::MatrixXd J = L;
        for (long i = 0; i < n; ++i) J(i, i) -= pp.p * A * std::pow(v.values[i], pp.p - 1);
        for (int k = 0; k < opt.pinned; ++k) {
            J.row(k).setZero();
            J(k, k) = 1;
            J(k, k + 1) = -pin.factor_minus;
            const long j = n - 1 - k;
            J.row(j).setZero();
            J(j, j) = 1;
            J(j, j - 1) = -pin.factor_plus;
        }
        const Eigen::VectorXd dv = J.partialPivLu().solve(-f);
        if (!dv.allFinite()) throw NewtonDivergence("singular Jacobian");

        double alpha = 1;
        bool positive_seen = false;
        for (int ls = 0;; ++ls) {
            if (ls == 40) {
                if (!positive_seen) throw NonPositiveIterate("line search cannot keep the iterate positive");
                std::ostringstream os;
                os << "no residual decrease at iteration " << it << " (residual " << norm << ")";
                throw NewtonDivergence(os.str());
            }
            GridFunction trial = v;
            bool ok = true;
            for (long i = 0; i < n; ++i) {
                trial.values[i] += alpha * dv[i];
                ok = ok && trial.values[i] > 0;
            }
            if (ok) {
                positive_seen = true;
                const Eigen::VectorXd ft = eval(trial);
                const double nt = std::max(interior_norm(ft, opt.pinned), ft.head(opt.pinned).cwiseAbs().maxCoeff());
                const double n0 = std::max(norm, f.head(opt.pinned).cwiseAbs().maxCoeff());
                if (nt <= (1 - 1e-4 * alpha) * n0 || nt <= tol) {
                    v = std::move(trial);
                    f = ft;
                    break;
                }
            }
            alpha *= 0.5;
        }
        norm = interior_norm(f, opt.pinned);
        out.history.push_back(norm);
        out.iterations = it + 1;
    }
    out.grid = v;
    out.residual_norm = norm;
    out.converged = norm <= tol;
    if (!out.converged) throw NewtonDivergence("no convergence within the iteration limit");
    return out;
}

// ---------------------------------------------------------------------------
// Ball problem

namespace {

double sphere_area(int k) {  // |S^k|
    return 2 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

}  // namespace

double torsion_profile(int N, double gamma, double r) {
    if (r >= 1) return 0;
    const double c = std::pow(2.0, -2 * gamma) * std::tgamma(0.5 * N) /
                     (std::tgamma(0.5 * (N + 2 * gamma)) * std::tgamma(1 + gamma));
    return c * std::pow(1 - r * r, gamma);
}

double ball_green_constant(int N, double gamma) {
    const double g = std::tgamma(gamma);
    return std::tgamma(0.5 * N) / (std::pow(2.0, 2 * gamma) * std::pow(M_PI, 0.5 * N) * g * g);
}

BallGreen::BallGreen(int N, double gamma, int n_r, int n_ang) : N_(N), gamma_(gamma) {
    if (N < 2) throw DomainError("ball problem needs N >= 2");
    if (!(gamma > 0 && gamma < 1)) throw DomainError("gamma must lie in (0, 1)");
    if (n_r < 8) throw DomainError("n_r must be at least 8");
    if (n_ang == 0) n_ang = 12;
    if (n_ang < 4) throw DomainError("n_ang must be at least 4");
    gl_ = gauss_legendre(n_ang);

    r_.resize(n_r + 1);
    for (int i = 0; i <= n_r; ++i) r_[i] = static_cast<double>(i) / n_r;

    const auto ts = tanh_sinh(1.0 / 8, 1e-15);
    rho_.assign(n_r, {});
    weight_.assign(n_r, {});
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_r; ++i) {
        const double r = r_[i];
        auto& x = rho_[i];
        auto& w = weight_[i];
        auto add = [&](double rho, double wt) {
            const double k = shell_kernel(r, rho);
            if (!std::isfinite(k)) {
#pragma omp atomic write
                failed = true;
            }
            x.push_back(rho);
            w.push_back(wt * std::pow(rho, N - 1) * k);
        };
        // pieces [0, r] and [r, 1]; tanh-sinh absorbs the endpoint singularities
        for (std::size_t q = 0; q < ts.x.size(); ++q) {
            if (r > 0) add(r * ts.x[q], r * ts.w[q]);
            add(r + (1 - r) * ts.x[q], (1 - r) * ts.w[q]);
        }
    }
    if (failed) throw QuadratureFailure("non-finite ball Green kernel");

    // C fixed by the torsion function at the centre
    double t0 = 0;
    for (std::size_t q = 0; q < rho_[0].size(); ++q) t0 += weight_[0][q];
    C_ = torsion_profile(N, gamma, 0) / t0;
    for (auto& w : weight_)
        for (double& x : w) x *= C_;
}

double BallGreen::shell_kernel(double r, double rho) const {
    const double a = gamma_, b = 0.5 * N_ - gamma_;
    const double full = boost::math::beta(a, b);
    auto inner = [&](double r0) {  // int_0^{r0} s^{gamma-1} (1+s)^{-N/2} ds
        if (r0 <= 0) return 0.0;
        if (r0 <= 1) return boost::math::beta(a, b, r0 / (1 + r0));
        return full - boost::math::beta(b, a, 1 / (1 + r0));
    };
    const double m = (1 - r * r) * (1 - rho * rho);
    if (r == 0 || rho == 0) {
        const double d = std::max(r, rho);
        return sphere_area(N_ - 1) * std::pow(d, 2 * a - N_) * inner(m / (d * d));
    }
    auto integrand = [&](double th) {
        const double s = std::sin(0.5 * th);
        const double d2 = (r - rho) * (r - rho) + 4 * r * rho * s * s;
        return std::pow(std::sin(th), N_ - 2) * std::pow(d2, a - 0.5 * N_) * inner(m / d2);
    };
    // graded panels towards theta = 0, where the integrand peaks on the scale |r - rho| / sqrt(r rho)
    const double tc = std::abs(r - rho) / std::sqrt(r * rho);
    std::vector<double> cuts{0.0};
    if (tc < M_PI / 4) {
        for (double c = std::max(tc, 1e-14); c < M_PI / 2; c *= 2) cuts.push_back(c);
    }
    cuts.push_back(M_PI / 2);
    cuts.push_back(M_PI);
    double sum = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1], hw = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t q = 0; q < gl_.x.size(); ++q) sum += hw * gl_.w[q] * integrand(mid + hw * gl_.x[q]);
    }
    return sphere_area(N_ - 2) * sum;
}

double BallGreen::interpolate(const std::vector<double>& w, double rho) const {
    // linear in w/(1-r^2)^gamma, which is positive-weighted and so keeps T monotone
    const int n = static_cast<int>(r_.size()) - 1;
    const double u = rho * n;
    int i = std::min(static_cast<int>(u), n - 1);
    const double f = u - i;
    double p0 = phi_at(w, i);
    double p1 = i + 1 < n ? phi_at(w, i + 1) : 2 * phi_at(w, n - 1) - phi_at(w, n - 2);
    return std::pow(std::max(0.0, 1 - rho * rho), gamma_) * ((1 - f) * p0 + f * p1);
}

double BallGreen::phi_at(const std::vector<double>& w, int i) const {
    return w[i] / std::pow(1 - r_[i] * r_[i], gamma_);
}

std::vector<double> BallGreen::apply(const std::vector<double>& w,
                                     const std::function<double(double, double)>& source) const {
    const int n = static_cast<int>(r_.size()) - 1;
    std::vector<double> out(n + 1, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t q = 0; q < rho_[i].size(); ++q) {
            const double rho = rho_[i][q];
            s += weight_[i][q] * source(rho, interpolate(w, rho));
        }
        out[i] = s;
    }
    return out;
}

BallSolution picard_ball(const BallGreen& g, const ProblemParams& pp, double lambda, int max_iterations) {
    pp.validate(true);
    if (pp.N != g.N() || pp.gamma != g.gamma()) throw DomainError("BallGreen built for different (N, gamma)");
    if (!(lambda > 0)) throw DomainError("lambda must be positive");
    const double beta = pp.p * (pp.N - 2 * pp.gamma) - (pp.N + 2 * pp.gamma);
    if (!(beta > -2 * pp.gamma && beta < 0)) throw DomainError("beta must lie in (-2 gamma, 0)");
    const double A = A_constant(pp);
    auto source = [&](double rho, double w) { return lambda * A * std::pow(rho, beta) * std::pow(1 + w, pp.p); };

    BallSolution sol;
    sol.lambda = lambda;
    sol.r = g.r();
    sol.w.assign(sol.r.size(), 0.0);
    for (int k = 1; k <= max_iterations; ++k) {
        auto next = g.apply(sol.w, source);
        double d = 0, sup = 0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            d = std::max(d, std::abs(next[i] - sol.w[i]));
            sup = std::max(sup, next[i]);
        }
        if (!std::isfinite(sup) || sup > 1e8) {
            std::ostringstream os;
            os << "Picard iterates blow up at lambda = " << lambda;
            throw NoConvergence(os.str());
        }
        sol.w = std::move(next);
        sol.iterations = k;
        sol.sup_norm = sup;
        sol.defect = d;
        if (d < 1e-8) return sol;
    }
    std::ostringstream os;
    os << "Picard iteration did not converge in " << max_iterations << " steps at lambda = " << lambda;
    throw NoConvergence(os.str());
}

BallSolution picard_ball(const ProblemParams& pp, double lambda, int n_r, int n_ang, int max_iterations) {
    pp.validate(true);
    return picard_ball(BallGreen(pp.N, pp.gamma, n_r, n_ang), pp, lambda, max_iterations);
}

UniformBoundReport uniform_bound_check(const BallSolution& sol, const ProblemParams& pp) {
    UniformBoundReport rep;
    rep.exponent = (pp.p * (pp.N - 2 * pp.gamma) - pp.N) / (pp.p - 1);
    for (std::size_t i = 1; i < sol.r.size() && sol.r[i] <= 0.5 + 1e-12; ++i)
        rep.c0 = std::max(rep.c0, sol.w[i] * std::pow(sol.r[i], rep.exponent));
    // least-squares slope of log w against log r on the first four positive nodes
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = 4;
    for (int i = 1; i <= m; ++i) {
        const double x = std::log(sol.r[i]), y = std::log(sol.w[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    rep.local_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.holds = std::isfinite(rep.c0) && rep.c0 > 0 && rep.local_exponent >= -rep.exponent;
    return rep;
}

RadialSamples kelvin_transform(const RadialSamples& w, int N, double gamma) {
    RadialSamples out;
    for (std::size_t k = w.r.size(); k-- > 0;) {
        const double r = w.r[k];
        if (!(r > 0)) continue;
        const double s = 1 / r;
        out.r.push_back(s);
        out.value.push_back(std::pow(s, -(N - 2 * gamma)) * w.value[k]);
    }
    return out;
}

}  // namespace csk
