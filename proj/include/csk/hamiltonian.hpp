#pragma once

#include <vector>

#include "csk/grid.hpp"
#include "csk/specialfn.hpp"
#include "csk/symbols.hpp"

namespace csk {

/// alpha = Gamma(N/2) Gamma(gamma) / (Gamma(gamma + gamma/(p-1)) Gamma(N/2 - gamma/(p-1))).
double rho_star_alpha(const ProblemParams& pp);

/// Special defining function rho*(rho), rho in (0, 2].
double rho_star(const ProblemParams& pp, double rho);
double rho_star_prime(const ProblemParams& pp, double rho);

struct DefiningFunction {
    ProblemParams params;
    std::vector<double> rho;
    std::vector<double> rho_star;
    double rho_star_0 = 0;
    double alpha_norm = 0;

    /// rho as a function of rho*, by monotone cubic interpolation of the samples.
    double inverse(double s) const;
};
DefiningFunction defining_function(const ProblemParams& pp, int n = 2000);

/// Mode-0 extension profile of the conjugated problem at frequency xi,
/// normalized so that it tends to 1 at rho = 0 (Dirichlet coefficient 1)
/// and divided by the xi = 0 profile. value = V*-multiplier, deriv = d/d rho.
struct ExtensionMultiplier {
    cplx value;
    cplx deriv;
};
ExtensionMultiplier extension_multiplier(const ProblemParams& pp, double xi, double rho);

/// Neumann coefficient S(xi - i Q0) of the profile; d_gamma S = theta(xi - i Q0).
cplx neumann_coefficient(const ProblemParams& pp, double xi);

struct ExtensionField {
    ProblemParams params;
    GridFunction v;
    // rho nodes on (0, 2) with tanh-sinh weights for d rho
    std::vector<double> rho, rho_star, rho_star_prime, weight;
    // the displayed weights e*, e*_1, e*_2
    std::vector<double> e_star, e1, e2;
    // energy densities per d rho: P (d_rho V)^2 and Qt (d_t V)^2
    std::vector<double> flux, inertia;
    // node q, time i at q * n_t + i
    std::vector<double> V, V_t, V_rs;
    // boundary layer node for the traces
    double trace_rho = 0;
    std::vector<double> trace_V, trace_V_t;
    std::vector<double> neumann;  // -d~ (rho*)^{1-2 gamma} d_{rho*} V* + A v, i.e. P~v

    std::size_t n_t() const { return v.n(); }
    std::size_t n_rho() const { return rho.size(); }
    double at(std::size_t q, std::size_t i) const { return V[q * n_t() + i]; }
};

/// Extension V* of v for mode 0 (hypergeometric Fourier multiplier). n_tau sets
/// the number of rho nodes.
ExtensionField extension_field(const ProblemParams& pp, const GridFunction& v, int n_tau = 96);

enum class HamiltonianWeights { Volume, Displayed };

/// H(t) = (A/d~)(-v^2/2 + v^{p+1}/(p+1)) + (1/2) int [-(flux) (d_rho V)^2 + (inertia) (d_t V)^2] d rho.
/// Displayed uses (rho*)^{1-2 gamma} e*_1, e*_2 in d rho* instead.
GridFunction hamiltonian_trace(const ProblemParams& pp, const ExtensionField& f, const GridFunction& v,
                               HamiltonianWeights w = HamiltonianWeights::Volume);

/// dH/dt along solutions: -2 Q0 int inertia (d_t V)^2 d rho (<= 0 for Q0 >= 0).
GridFunction hamiltonian_rate(const ProblemParams& pp, const ExtensionField& f);

/// dH/dt for any profile: (A v^p - P~v) v' / d~ - 2 Q0 int inertia (d_t V)^2 d rho.
GridFunction hamiltonian_rate_identity(const ProblemParams& pp, const ExtensionField& f);

/// Energy scale for relative statements about H: max over t of |H_1| and the
/// two bulk terms taken separately.
double hamiltonian_scale(const ProblemParams& pp, const ExtensionField& f);

}  // namespace csk
