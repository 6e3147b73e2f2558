#pragma once

#include <complex>

namespace csk {

using cplx = std::complex<double>;

struct SeriesControl {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_terms = 10000;
    void validate() const;
};

/// Principal branch of log Gamma. Throws PoleError at non-positive integers.
cplx ln_gamma(cplx z);
cplx gamma_fn(cplx z);
/// 1/Gamma(z); entire, zero at non-positive integers.
cplx rgamma(cplx z);
cplx digamma(cplx z);
cplx beta_fn(cplx a, cplx b);

/// (-1)^j / j!, the residue of Gamma at -j.
double gamma_residue(int j);

/// Gauss hypergeometric 2F1(a,b;c;z).
cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const SeriesControl& ctl = {});

/// 2F1 at z = 1 - omz, with omz supplied directly so that points very close
/// to z = 1 keep their relative accuracy.
cplx hyp2f1_near_one(cplx a, cplx b, cplx c, cplx omz, const SeriesControl& ctl = {});

double hyp2f1(double a, double b, double c, double z);

/// Scaled reciprocal Gamma: 1/Gamma(w) = exp(log_scale) * value and
/// d/dw [1/Gamma(w)] = exp(log_scale) * deriv. Stays finite and accurate next
/// to the zeros of 1/Gamma.
struct ScaledRGamma {
    cplx log_scale;
    cplx value;
    cplx deriv;
};
ScaledRGamma scaled_rgamma(cplx w);

}  // namespace csk
