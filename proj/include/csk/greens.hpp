#pragma once

#include <memory>
#include <vector>

#include "csk/grid.hpp"
#include "csk/indicial.hpp"

namespace csk {

/// One pole (pair) of the resolvent as it enters the Green's function:
/// e^{-sigma |t|} (d cos(tau |t|) + dp sin(tau |t|)).
/// For the real pole of the unstable regime, d multiplies sin(tau t) on t < 0.
struct GreenTerm {
    double sigma = 0;
    double tau = 0;
    double d = 0;
    double dp = 0;
    PoleAxis axis = PoleAxis::Imaginary;
};

class GreenNearField;

/// G(t) = int e^{i xi t} / (theta_m(xi) - kappa) d xi as a residue series,
/// optionally with the first window + 1 poles moved across the contour.
struct GreenSeries {
    PoleTable poles;
    std::vector<GreenTerm> terms;
    int window = -1;  // J; -1 is the unshifted function
    int j_max = 0;    // index of the last retained term
    double t_min = 0.5;
    Regime regime = Regime::Stable;
    std::shared_ptr<const GreenNearField> near;

    const ProblemParams& params() const { return poles.params; }
    const ModeIndex& mode() const { return poles.mode; }
    double kappa() const { return poles.kappa; }
    /// Exponential rate of G for t -> +inf and of G(-t) for t -> +inf.
    /// Negative values mean growth.
    double rate_plus() const;
    double rate_minus() const;
};

/// Series truncated so that the tail is below 1e-12 for |t| >= t_min.
GreenSeries green_series(const ProblemParams& pp, const ModeIndex& mode, double kappa, double t_min = 0.5);

/// Contour moved above the poles 0..J. J = -1 gives green_series.
GreenSeries green_shifted(const ProblemParams& pp, const ModeIndex& mode, double kappa, int J);

/// Window index J with sigma_J < delta < sigma_{J+1}; WindowError on a collision.
int window_for(const GreenSeries& s, double delta);

/// Residue series at t. TruncationError where the tail bound fails.
double green_eval(const GreenSeries& s, double t);

/// Fourier form, valid for every t != 0 (used below t_min).
double green_fourier(const GreenSeries& s, double t);

/// Series for |t| >= t_min, Fourier form below.
double green_value(const GreenSeries& s, double t);

/// w = (1/2pi) int G(t - t') h(t') dt', a particular solution of (P_m - kappa) w = h.
GridFunction solve_mode(const GreenSeries& s, const GridFunction& h);

}  // namespace csk
