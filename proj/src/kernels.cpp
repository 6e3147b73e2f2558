#include "csk/kernels.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <array>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "csk/errors.hpp"
#include "csk/quadrature.hpp"

namespace csk {

namespace {

using std::numbers::pi;

// e^{-2 A s} 2F1(2A, 1+g; A+B; e^{-2s}) e^{lambda s}, the unnormalized mode kernel.
class ClosedFormKernel final : public EvenKernel {
public:
    ClosedFormKernel(int N, double g, double c) : g_(g), c_(c) {
        const auto hp = half_params(N, g, make_mode(0, N));
        a_ = 2 * hp.A;
        cc_ = hp.A + hp.B;
    }
    double unit(double s, double lambda) const {
        double f;
        if (s < 0.35)
            f = hyp2f1_near_one(a_, 1 + g_, cc_, -std::expm1(-2 * s)).real();
        else
            f = hyp2f1(a_, 1 + g_, cc_, std::exp(-2 * s));
        return std::exp(-(a_ - lambda) * s) * f;
    }
    double scaled(double s) const override {
        s = std::max(s, 1e-12);  // constant to the last digit below this
        return c_ * std::pow(s, 1 + 2 * g_) * unit(s, 0);
    }
    double tilted(double s, double lambda) const override { return c_ * unit(s, lambda); }
    double rate() const override { return a_; }
    double gamma() const override { return g_; }

private:
    double g_, c_, a_, cc_;
};

// Inverse Fourier transform of theta_m, computed as the transform of a sum of
// Bessel-potential terms b_k (xi^2 + a^2)^{g-k} plus an absolutely integrable
// remainder, then cached on a logarithmic grid.
class FourierKernel final : public EvenKernel {
public:
    static constexpr double kCutoff = 500.0;
    static constexpr int kCacheSize = 512;
    static constexpr double kCacheLo = 1e-4;

    FourierKernel(int N, double g, const ModeIndex& mode) : g_(g), pp_{N, g}, mode_(mode) {
        const auto hp = half_params(N, g, mode);
        a_ = 2 * hp.A;
        b_tail_ = 1 + g;
        c_tail_ = hp.A + hp.B;
        b_ = theta_expansion(N, g, mode, a_);
        nodes();
        s_cut_ = 1.0;
        self_check();
        if (!load_cache()) {
            build_cache();
            save_cache();
        }
        spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(
            cache_.data(), cache_.size(), std::log(kCacheLo), log_step());
        k_cut_ = scaled(s_cut_) * std::pow(s_cut_, -1 - 2 * g_) / tail_factor(s_cut_);
    }

    // Evaluation without the cache, with the remainder integral truncated at xi_max.
    double direct_scaled(double s, double xi_max = kCutoff) const {
        s = std::max(s, 1e-12);
        double sum = 0;
        for (int k = 0; k < 4; ++k) {
            const double nu = k - g_ - 0.5;
            const double lg = std::log(2 * std::sqrt(pi)) - std::lgamma(k - g_) - nu * std::log(2 * a_) +
                              (k + g_ + 0.5) * std::log(s);
            const double sgn = (k == 0) ? -1.0 : 1.0;  // sign of Gamma(k - g)
            sum += b_[k] * sgn * std::exp(lg) * std::cyl_bessel_k(std::abs(nu), a_ * s);
        }
        double rem = 0;
        if (s < kCacheLo && xi_max >= kCutoff) {
            rem = m0_ - 0.5 * s * s * m2_;
        } else {
            for (std::size_t q = 0; q < xi_.size() && xi_[q] < xi_max; ++q) rem += wr_[q] * std::cos(xi_[q] * s);
            rem *= 2;
        }
        return -(sum + std::pow(s, 1 + 2 * g_) * rem) / (2 * pi);
    }

    double scaled(double s) const override {
        if (s < kCacheLo) return direct_scaled(s);
        if (s > s_cut_) return tilted(s, 0) * std::pow(s, 1 + 2 * g_);
        return spline_(std::log(s));
    }
    double tilted(double s, double lambda) const override {
        if (s > s_cut_) return k_cut_ * tail_factor(s) * std::exp(-a_ * (s - s_cut_) + lambda * s);
        return scaled(s) * std::pow(s, -1 - 2 * g_) * std::exp(lambda * s);
    }
    double rate() const override { return a_; }
    double gamma() const override { return g_; }

    const std::array<double, 4>& coeffs() const { return b_; }
    double shift_a() const { return a_; }

private:
    // Beyond s_cut the residue expansion e^{-2As} 2F1(2A, 1+g; A+B; e^{-2s})
    // carries the kernel; only its amplitude is taken from the quadrature.
    double tail_factor(double s) const { return hyp2f1(a_, b_tail_, c_tail_, std::exp(-2 * s)); }

    double log_step() const { return std::log(s_cut_ / kCacheLo) / (kCacheSize - 1); }

    double remainder(double xi) const {
        const double u = xi * xi + a_ * a_;
        double lead = 0;
        for (int k = 0; k < 4; ++k) lead += b_[k] * std::pow(u, g_ - k);
        return theta(pp_, mode_, xi).real() - lead;
    }

    void nodes() {
        const auto rule = gauss_legendre(16);
        auto panel = [&](double lo, double hi) {
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.x[q];
                xi_.push_back(x);
                wr_.push_back(0.5 * (hi - lo) * rule.w[q]);
            }
        };
        for (double x = 0; x < 50; x += 0.25) panel(x, x + 0.25);
        for (double x = 50; x < kCutoff; x += 0.5) panel(x, x + 0.5);
        m0_ = m2_ = 0;
        for (std::size_t q = 0; q < xi_.size(); ++q) {
            wr_[q] *= remainder(xi_[q]);
            m0_ += 2 * wr_[q];
            m2_ += 2 * wr_[q] * xi_[q] * xi_[q];
        }
    }

    void self_check() const {
        for (double s : {1e-3, 0.1, 1.0}) {
            const double full = direct_scaled(s), half = direct_scaled(s, 0.5 * kCutoff);
            if (std::abs(full - half) > 1e-6 * std::abs(full)) {
                std::ostringstream os;
                os << "Fourier kernel changes by " << std::abs(full - half) / std::abs(full)
                   << " when the cutoff is halved at s = " << s;
                throw QuadratureFailure(os.str());
            }
        }
    }

    void build_cache() {
        cache_.resize(kCacheSize);
        const double l0 = std::log(kCacheLo), dl = log_step();
#pragma omp parallel for schedule(static)
        for (int i = 0; i < kCacheSize; ++i) cache_[i] = direct_scaled(std::exp(l0 + dl * i));
    }

    std::string cache_path() const {
        const char* dir = std::getenv("CSK_CACHE_DIR");
        if (!dir || !*dir) return {};
        char name[128];
        std::snprintf(name, sizeof name, "/kernel_v1_N%d_g%.17g_l%d.txt", pp_.N, g_, mode_.degree);
        return std::string(dir) + name;
    }

    bool load_cache() {
        const auto path = cache_path();
        if (path.empty()) return false;
        std::ifstream in(path);
        if (!in) return false;
        std::string tag;
        int N = 0, l = 0, n = 0;
        double g = 0, sc = 0;
        if (!(in >> tag >> N >> g >> l >> sc >> n) || tag != "csk-kernel-cache-v1" || N != pp_.N || g != g_ ||
            l != mode_.degree || sc != s_cut_ || n != kCacheSize)
            return false;
        std::vector<double> vals(n);
        for (auto& v : vals) {
            double s;
            if (!(in >> s >> v)) return false;
        }
        cache_ = std::move(vals);
        return true;
    }

    void save_cache() const {
        const auto path = cache_path();
        if (path.empty()) return;
        std::ofstream out(path);
        if (!out) return;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g %d %.17g %d\n", g_, mode_.degree, s_cut_, kCacheSize);
        out << "csk-kernel-cache-v1 " << pp_.N << ' ' << buf;
        const double l0 = std::log(kCacheLo), dl = log_step();
        for (int i = 0; i < kCacheSize; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", std::exp(l0 + dl * i), cache_[i]);
            out << buf;
        }
    }

    double g_;
    ProblemParams pp_;
    ModeIndex mode_;
    double a_ = 0;
    std::array<double, 4> b_{};
    std::vector<double> xi_, wr_;
    double m0_ = 0, m2_ = 0;
    double s_cut_ = 0, k_cut_ = 0;
    double b_tail_ = 0, c_tail_ = 0;
    std::vector<double> cache_;
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

std::mutex g_cache_mutex;

std::shared_ptr<const EvenKernel> fourier_kernel(int N, double g, const ModeIndex& mode) {
    static std::map<std::tuple<int, double, int>, std::shared_ptr<const EvenKernel>> cache;
    const auto key = std::make_tuple(N, g, mode.degree);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto k = std::make_shared<const FourierKernel>(N, g, mode);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    return cache.emplace(key, k).first->second;
}

// int_0^inf K(s) (cosh(lambda s) - 1) ds for the kernel k.
double cosh_moment(const EvenKernel& k, double lambda) {
    if (lambda == 0) return 0;
    const double g = k.gamma();
    auto near = [&](double s) {
        if (s < 1e-100) return 0.0;
        const double sh = std::sinh(0.5 * lambda * s);
        return k.scaled(s) * std::pow(s, -1 - 2 * g) * 2 * sh * sh;
    };
    auto far = [&](double s) {
        return 0.5 * (k.tilted(s, std::abs(lambda)) + k.tilted(s, -std::abs(lambda))) - k.tilted(s, 0);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    return ts.integrate(near, 0.0, 1.0) + es.integrate(far, 1.0, std::numeric_limits<double>::infinity());
}

double closed_form_unit_constant(int N, double g) {
    ProblemParams pp{N, g};
    pp.validate();
    pp.p = 0.5 * (pp.p_min() + pp.p_max());
    const double J = cosh_moment(ClosedFormKernel(N, g, 1.0), q0(pp));
    return (hardy_constant(N, g) - A_constant(pp)) / (2 * J);
}

// Cubic Lagrange cardinal function of the four-point interpolation rule.
double cardinal(double u) {
    const double a = std::abs(u);
    if (a <= 1) return 0.5 * (a + 1) * (a - 1) * (a - 2);
    if (a <= 2) return -(a - 1) * (a - 2) * (a - 3) / 6;
    return 0;
}

}  // namespace

double KernelSpec::operator()(double t) const {
    if (t == 0) throw SingularityError("kernel is singular at t = 0");
    return even->tilted(std::abs(t), -shift * t / std::abs(t));
}

double kernel_constant(int N, double gamma) {
    static std::map<std::pair<int, double>, double> memo;
    const auto key = std::make_pair(N, gamma);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    const double c = closed_form_unit_constant(N, gamma);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    memo[key] = c;
    return c;
}

KernelSpec make_kernel(const ProblemParams& pp, const ModeIndex& mode, bool conjugated, KernelForm form) {
    pp.validate(conjugated);
    if (form == KernelForm::ClosedForm0 && mode.degree != 0)
        throw DomainError("the closed form is available for mode 0 only");
    KernelSpec k{pp, mode, form, conjugated ? q0(pp) : 0.0, nullptr};
    if (form == KernelForm::ClosedForm0)
        k.even = std::make_shared<const ClosedFormKernel>(pp.N, pp.gamma, kernel_constant(pp.N, pp.gamma));
    else
        k.even = fourier_kernel(pp.N, pp.gamma, mode);
    return k;
}

KernelSpec make_kernel(const ProblemParams& pp, const ModeIndex& mode, bool conjugated) {
    return make_kernel(pp, mode, conjugated, mode.degree == 0 ? KernelForm::ClosedForm0 : KernelForm::FourierNumeric);
}

double kernel_k0(const ProblemParams& pp, double t) { return make_kernel(pp, make_mode(0, pp.N), true)(t); }

double kernel_km(const ProblemParams& pp, const ModeIndex& mode, double t) {
    return make_kernel(pp, mode, true, KernelForm::FourierNumeric)(t);
}

double mode_constant(const KernelSpec& k) {
    return theta(k.params, k.mode, 0.0).real() - 2 * cosh_moment(*k.even, k.shift);
}

Operator::Operator(KernelSpec kernel, double h) : kernel_(std::move(kernel)), h_(h) {
    if (!(h > 0)) throw DomainError("grid spacing must be positive");
    if (h > 0.05) throw GridTooCoarse("grid spacing exceeds 0.05");
    constant_ = mode_constant(kernel_);
    const double slow = std::min(kernel_.decay_plus(), kernel_.decay_minus());
    if (!(slow > 0)) throw DomainError("kernel does not decay on both sides");
    const long cells = static_cast<long>(std::ceil(40.0 / slow / h));
    reach_ = cells + 3;
    stencil_.assign(2 * reach_ + 1, 0.0);
    auto S = [&](long k) -> double& { return stencil_[k + reach_]; };

    // far field: v(t - s) by cubic interpolation, |s| >= 2h
    std::vector<double> wp(reach_ + 1, 0.0), wm(reach_ + 1, 0.0);
    const auto rule = gauss_legendre(8);
    for (long m = 2; m < cells; ++m) {
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            const double u = m + 0.5 + 0.5 * rule.x[q];
            const double s = u * h, w = 0.5 * h * rule.w[q];
            const double kp = w * kernel_(s), km = w * kernel_(-s);
            for (long k = m - 1; k <= m + 2; ++k) {
                const double phi = cardinal(k - u);
                wp[k] += kp * phi;
                wm[k] += km * phi;
            }
        }
    }
    double total = 0;
    for (long k = 1; k <= reach_; ++k) {
        S(k) -= wp[k];
        S(-k) -= wm[k];
        total += wp[k] + wm[k];
    }

    // near field: quartic through v_{i-2..i+2}, moments of the kernel
    const double g = kernel_.even->gamma(), lam = kernel_.shift;
    boost::math::quadrature::tanh_sinh<double> ts;
    std::array<double, 5> mu{};
    for (int k = 1; k <= 4; ++k) {
        auto f = [&](double s) {
            if (s < 1e-100) return 0.0;
            const double w = (k % 2) ? 2 * std::sinh(lam * s) : 2 * std::cosh(lam * s);
            return kernel_.even->scaled(s) * std::pow(s, k - 1 - 2 * g) * w;
        };
        mu[k] = ts.integrate(f, 0.0, 2 * h);
    }
    Eigen::Matrix<double, 5, 5> V;
    for (int j = -2; j <= 2; ++j)
        for (int k = 0; k <= 4; ++k) V(j + 2, k) = std::pow(j * h, k);
    const Eigen::Matrix<double, 5, 5> D = V.inverse();  // a = D v
    for (int j = -2; j <= 2; ++j) {
        double nw = 0;
        for (int k = 1; k <= 4; ++k) nw -= mu[k] * D(k, j + 2);
        S(-j) += nw;
    }
    S(0) += constant_ + total;
}

void Operator::check(const GridFunction& v) const {
    v.validate();
    if (std::abs(v.h() - h_) > 1e-9 * h_) throw DomainError("grid spacing differs from the operator's");
    if (!v.tails_declared()) throw TailUndeclared("decay exponents of the grid function are not declared");
}

std::vector<double> Operator::extend(const GridFunction& v) const {
    std::vector<double> ext(v.n() + 2 * reach_);
    for (long j = -reach_; j < static_cast<long>(v.n()) + reach_; ++j) ext[j + reach_] = v.extended(j);
    return ext;
}

double Operator::apply_at(const GridFunction& v, std::size_t i) const {
    check(v);
    double acc = 0;
    for (long k = -reach_; k <= reach_; ++k) acc += stencil(k) * v.extended(static_cast<long>(i) - k);
    return acc;
}

std::vector<double> Operator::apply(const GridFunction& v) const {
    check(v);
    const auto ext = extend(v);
    const long n = static_cast<long>(v.n());
    std::vector<double> out(n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        double acc = 0;
        const double* e = ext.data() + i + reach_;  // e[-k] = ext(i - k)
        for (long k = -reach_; k <= reach_; ++k) acc += stencil_[k + reach_] * e[-k];
        out[i] = acc;
    }
    return out;
}

std::vector<double> Operator::apply_serial(const GridFunction& v) const {
    check(v);
    const auto ext = extend(v);
    std::vector<double> out(v.n());
    for (std::size_t i = 0; i < v.n(); ++i) {
        double acc = 0;
        for (long k = -reach_; k <= reach_; ++k) acc += stencil(k) * ext[i + reach_ - k];
        out[i] = acc;
    }
    return out;
}

double apply_op(const ProblemParams& pp, const ModeIndex& mode, const GridFunction& v, double t) {
    v.validate();
    const double x = (t - v.t_min) / v.h();
    const long i = std::lround(x);
    if (i < 0 || i >= static_cast<long>(v.n()) || std::abs(x - i) > 1e-9)
        throw DomainError("apply_op evaluates at grid nodes only");
    return Operator(make_kernel(pp, mode, true), v.h()).apply_at(v, static_cast<std::size_t>(i));
}

}  // namespace csk
