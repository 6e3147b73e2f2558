#pragma once

#include <memory>
#include <vector>

#include "csk/grid.hpp"
#include "csk/symbols.hpp"

namespace csk {

enum class KernelForm { ClosedForm0, FourierNumeric };

/// Even convolution kernel K(s), s > 0, of one mode.
class EvenKernel {
public:
    virtual ~EvenKernel() = default;
    /// K(s) * s^{1 + 2 gamma}, bounded as s -> 0.
    virtual double scaled(double s) const = 0;
    /// K(s) * exp(lambda s), safe when both factors are extreme.
    virtual double tilted(double s, double lambda) const = 0;
    /// Exponential decay rate of K at infinity.
    virtual double rate() const = 0;
    virtual double gamma() const = 0;
};

struct KernelSpec {
    ProblemParams params;
    ModeIndex mode;
    KernelForm form = KernelForm::ClosedForm0;
    double shift = 0;  // Q0 for the conjugated operator, 0 for P_m itself
    std::shared_ptr<const EvenKernel> even;

    /// exp(-shift t) K(|t|). SingularityError at t = 0.
    double operator()(double t) const;
    double decay_plus() const { return even->rate() + shift; }
    double decay_minus() const { return even->rate() - shift; }
};

/// Normalization of the closed-form mode-0 kernel, fixed so that the
/// conjugated operator maps 1 to A at the midpoint of the admissible p range.
double kernel_constant(int N, double gamma);

/// Kernel of the conjugated operator (conjugated = true, needs p) or of
/// P_m on the cylinder (conjugated = false). Mode 0 defaults to the closed
/// form, other modes to Fourier inversion.
KernelSpec make_kernel(const ProblemParams& pp, const ModeIndex& mode, bool conjugated = true);
KernelSpec make_kernel(const ProblemParams& pp, const ModeIndex& mode, bool conjugated, KernelForm form);

double kernel_k0(const ProblemParams& pp, double t);
double kernel_km(const ProblemParams& pp, const ModeIndex& mode, double t);

/// Zeroth-order coefficient: theta_m(0) - 2 int_0^inf K (cosh(shift s) - 1) ds.
double mode_constant(const KernelSpec& k);

/// The non-local operator on a uniform grid with spacing h, stored as a
/// translation-invariant stencil acting on the tail-extended samples.
class Operator {
public:
    Operator(KernelSpec kernel, double h);

    const KernelSpec& kernel() const { return kernel_; }
    double h() const { return h_; }
    double constant() const { return constant_; }
    long reach() const { return reach_; }
    /// Coefficient of v_{i-k}; k in [-reach, reach].
    double stencil(long k) const { return stencil_[k + reach_]; }

    double apply_at(const GridFunction& v, std::size_t i) const;
    std::vector<double> apply(const GridFunction& v) const;
    std::vector<double> apply_serial(const GridFunction& v) const;

private:
    void check(const GridFunction& v) const;
    std::vector<double> extend(const GridFunction& v) const;

    KernelSpec kernel_;
    double h_;
    double constant_;
    long reach_;
    std::vector<double> stencil_;
};

/// P~_m v at the grid node t (t must coincide with a node).
double apply_op(const ProblemParams& pp, const ModeIndex& mode, const GridFunction& v, double t);

}  // namespace csk
