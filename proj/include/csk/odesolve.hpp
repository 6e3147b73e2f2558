#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "csk/grid.hpp"
#include "csk/quadrature.hpp"
#include "csk/symbols.hpp"

namespace csk {

struct RadialProfile {
    GridFunction grid;
    ProblemParams params;
    bool converged = false;
    double residual_norm = 0;
    int iterations = 0;
    std::vector<double> history;  // interior residual after each step, starting with the initial one
};

struct NewtonOptions {
    int max_iterations = 40;
    int pinned = 2;  // rows at each end replaced by the declared tail law
};

/// Exponential rates (plus, minus) of perturbations of v = 1 that decay at
/// both ends, from the indicial roots at the origin.
std::pair<double, double> linearized_tail_rates(const ProblemParams& pp);

/// max |P~v - A v^p| over the unpinned rows.
double profile_residual(const ProblemParams& pp, const GridFunction& v, int pinned = 2);

/// Damped Newton for P~_0 v = A v^p on the grid of `initial`.
RadialProfile newton_profile(const ProblemParams& pp, const GridFunction& initial, double tol,
                             const NewtonOptions& opt = {});

struct BallSolution {
    double lambda = 0;
    std::vector<double> r;  // uniform on [0, 1]
    std::vector<double> w;
    int iterations = 0;
    double sup_norm = 0;
    double defect = 0;
};

/// Radial Green's-function quadrature for the unit ball:
/// (T g)(r_i) = int_{B_1} G(x, y) g(|y|) dy, |x| = r_i.
class BallGreen {
public:
    BallGreen(int N, double gamma, int n_r, int n_ang = 0);

    int N() const { return N_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& r() const { return r_; }
    /// Normalizing constant of G, fixed by the torsion function at the centre.
    double constant() const { return C_; }

    /// Applies the integral operator to the source s(rho, w(rho)), where w is
    /// given by its node values and interpolated linearly in w/(1-r^2)^gamma.
    std::vector<double> apply(const std::vector<double>& w,
                              const std::function<double(double rho, double w)>& source) const;

    /// G with unit constant, integrated over the sphere of radius rho.
    double shell_kernel(double r, double rho) const;

private:
    double interpolate(const std::vector<double>& w, double rho) const;
    double phi_at(const std::vector<double>& w, int i) const;

    int N_;
    double gamma_;
    double C_ = 1;
    QuadRule gl_;
    std::vector<double> r_;
    // per target node i: quadrature nodes rho and weights including G, rho^{N-1} and C
    std::vector<std::vector<double>> rho_, weight_;
};

/// Closed-form solution of (-Delta)^gamma u = 1 in B_1, u = 0 outside.
double torsion_profile(int N, double gamma, double r);

/// Reference constant of the Dirichlet Green's function of the ball.
double ball_green_constant(int N, double gamma);

/// Minimal solution of (-Delta)^gamma w = lambda A |x|^beta (1 + w)^p by
/// Picard iteration from w = 0.
BallSolution picard_ball(const ProblemParams& pp, double lambda, int n_r, int n_ang = 0,
                         int max_iterations = 500);
BallSolution picard_ball(const BallGreen& g, const ProblemParams& pp, double lambda, int max_iterations = 500);

struct UniformBoundReport {
    double exponent = 0;        // (p(N-2gamma) - N)/(p-1)
    double c0 = 0;              // smallest C0 with w <= C0 r^{-exponent} on (0, 1/2]
    double local_exponent = 0;  // fitted slope of log w near r = 0
    bool holds = false;
};
UniformBoundReport uniform_bound_check(const BallSolution& sol, const ProblemParams& pp);

struct RadialSamples {
    std::vector<double> r;
    std::vector<double> value;
};
/// u(s) = s^{-(N-2gamma)} w(1/s) at s = 1/r_i, returned in increasing s.
/// Samples at r = 0 are dropped.
RadialSamples kelvin_transform(const RadialSamples& w, int N, double gamma);

}  // namespace csk
