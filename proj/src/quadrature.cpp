#include "csk/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "csk/errors.hpp"
#include "csk/specialfn.hpp"

namespace csk {

QuadRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1 || alpha <= -1 || beta <= -1) throw DomainError("gauss_jacobi needs n >= 1, alpha, beta > -1");
    const double ab = alpha + beta;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        J(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double kk = k + 1.0;
            const double t = 2.0 * kk + ab;
            double num = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab);
            double den = t * t * (t + 1.0) * (t - 1.0);
            if (kk == 1.0) {
                // The generic expression is 0/0 when alpha + beta = -1.
                num = 4.0 * (1.0 + alpha) * (1.0 + beta);
                den = (2.0 + ab) * (2.0 + ab) * (3.0 + ab);
            }
            J(k, k + 1) = J(k + 1, k) = std::sqrt(num / den);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::exp(std::log(2.0) * (ab + 1.0) + ln_gamma(alpha + 1.0).real() +
                                ln_gamma(beta + 1.0).real() - ln_gamma(ab + 2.0).real());
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v0 * v0;
    }
    return r;
}

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadRule gauss_legendre(int n, double a, double b) {
    QuadRule r = gauss_legendre(n);
    const double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = m + h * r.x[i];
        r.w[i] *= h;
    }
    return r;
}

TanhSinhRule tanh_sinh(double step, double cutoff) {
    constexpr double hp = 0.5 * std::numbers::pi;
    TanhSinhRule r;
    for (int k = 0;; ++k) {
        bool any = false;
        for (int sgn : {1, -1}) {
            if (k == 0 && sgn < 0) continue;
            const double t = sgn * k * step;
            const double u = hp * std::sinh(t);
            // x = (1 + tanh u)/2, 1 - x = (1 - tanh u)/2 = 1/(1 + e^{2u})
            const double e = std::exp(-2.0 * std::abs(u));
            const double small = e / (1.0 + e);
            const double x = (u >= 0) ? 1.0 - small : small;
            const double xc = (u >= 0) ? small : 1.0 - small;
            const double ch = std::cosh(u);
            const double w = step * hp * std::cosh(t) / (2.0 * ch * ch);
            if (small < cutoff || w < cutoff || !std::isfinite(w)) continue;
            r.x.push_back(x);
            r.xc.push_back(xc);
            r.w.push_back(w);
            any = true;
        }
        if (!any && k > 0) break;
    }
    return r;
}

}  // namespace csk
