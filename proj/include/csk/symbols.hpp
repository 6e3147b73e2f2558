#pragma once

#include <array>
#include <limits>

#include "csk/specialfn.hpp"

namespace csk {

struct ProblemParams {
    int N = 3;
    double gamma = 0.5;
    double p = std::numeric_limits<double>::quiet_NaN();
    int k = 0;  // singular set dimension, carried as metadata

    bool has_p() const { return p == p; }
    /// Throws DomainError naming the offending field.
    void validate(bool need_p = false) const;
    double p_min() const;  // N/(N-2 gamma), excluded
    double p_max() const;  // (N+2 gamma)/(N-2 gamma), included
};

/// Spherical-harmonic degree l with eigenvalue l(l+N-2) on S^{N-1}.
struct ModeIndex {
    int degree = 0;
    double mu = 0.0;
};
ModeIndex make_mode(int degree, int N);
/// Degree of the m-th eigenvalue when eigenvalues are listed with multiplicity
/// (m = 0 is the constant, m = 1..N the linear harmonics, and so on).
ModeIndex mode_from_multiplicity(long m, int N);

struct SymbolHalfParams {
    double A;
    double B;
};
SymbolHalfParams half_params(int N, double gamma, const ModeIndex& mode);

/// Mode-m symbol of P_gamma on the cylinder, meromorphic in z.
cplx theta(const ProblemParams& pp, const ModeIndex& mode, cplx z);
/// d theta / dz, analytic through the digamma function.
cplx theta_prime(const ProblemParams& pp, const ModeIndex& mode, cplx z);
/// Value and derivative together, computed with one set of Gamma evaluations.
void theta_and_prime(const ProblemParams& pp, const ModeIndex& mode, cplx z, cplx& value, cplx& deriv);

double q0(const ProblemParams& pp);
/// Symbol of the conjugated operator: theta(xi - i Q0).
cplx theta_tilde(const ProblemParams& pp, const ModeIndex& mode, double xi);

/// Large-|xi| expansion theta(xi) = u^g (b_0 + b_1/u + b_2/u^2 + b_3/u^3) + O(u^{g-4})
/// with u = xi^2 + a^2, from the Stirling series of the Gamma ratio.
std::array<double, 4> theta_expansion(int N, double gamma, const ModeIndex& mode, double a);

double hardy_constant(int N, double gamma);
double lambda_of_alpha(int N, double gamma, double alpha);
double A_constant(const ProblemParams& pp);
double d_gamma(double gamma);
double d_tilde_gamma(double gamma);
double p_one(int N, double gamma);

}  // namespace csk
