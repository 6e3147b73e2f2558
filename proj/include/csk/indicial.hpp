#pragma once

#include <vector>

#include "csk/symbols.hpp"

namespace csk {

enum class PoleAxis { Imaginary, Real, OffAxis };
enum class Regime { Stable, Unstable };

/// A zero tau + i sigma of theta - kappa in the closed upper half plane.
/// Entries with tau > 0 stand for the pair +-tau + i sigma; the residue
/// stored is the one at +tau, the mirror residue is -conj(residue).
struct PoleEntry {
    double tau = 0;
    double sigma = 0;
    cplx residue;
    int index = 0;
    PoleAxis axis = PoleAxis::Imaginary;

    cplx z() const { return {tau, sigma}; }
};

struct PoleTable {
    ProblemParams params;
    ModeIndex mode;
    double kappa = 0;
    std::vector<PoleEntry> entries;  // increasing sigma
    Regime regime = Regime::Stable;
};

Regime classify(const ProblemParams& pp, const ModeIndex& mode, double kappa);

/// First `count` zeros of theta - kappa in the upper half plane. Zeros
/// below sigma = 2(B + certify_up_to) are certified by an argument principle
/// count; higher ones come from the bracketed ladder on the imaginary axis.
PoleTable find_poles(const ProblemParams& pp, const ModeIndex& mode, double kappa, int count,
                     int certify_up_to = 16);

/// 1 / (d theta / dz) at the pole.
cplx residue_at(const ProblemParams& pp, const ModeIndex& mode, double kappa, const PoleEntry& pole);

/// Number of zeros of theta - kappa inside the rectangle [x0,x1] x [y0,y1],
/// from the winding number plus the known poles of theta.
int zero_count(const ProblemParams& pp, const ModeIndex& mode, double kappa, double x0, double x1, double y0,
               double y1);

/// Winding number of theta - kappa around a circle.
int winding_around(const ProblemParams& pp, const ModeIndex& mode, double kappa, cplx center, double radius);

/// Positive real root of theta(xi) = kappa (unstable regime only).
double real_root(const ProblemParams& pp, const ModeIndex& mode, double kappa);

enum class Location { Origin, Infinity };

struct IndicialReport {
    cplx gamma_minus;
    cplx gamma_plus;
    Location location;
    ModeIndex mode;
};

IndicialReport indicial_roots(const ProblemParams& pp, const ModeIndex& mode, Location where);

}  // namespace csk
