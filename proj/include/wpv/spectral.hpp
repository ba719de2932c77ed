#pragma once

#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpv {

constexpr double kQuadRelTol = 1e-9;   // declared tolerance of reported integrals
constexpr double kQuadAbsFloor = 1e-12;

namespace detail {

template <class F>
double gk(F&& f, double a, double b, double tol = 1e-12, unsigned depth = 12) {
    if (!(b > a)) return 0.0;
    double err = 0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol, &err);
}

// Composite fixed-order Gauss-Legendre; used where the integrand is only piecewise smooth
// (it goes through the interpolant), which defeats adaptive error estimates.
template <class F>
double gauss_panels(F&& f, double a, double b, int panels) {
    if (!(b > a)) return 0.0;
    const double w = (b - a) / panels;
    double s = 0;
    for (int i = 0; i < panels; ++i)
        s += boost::math::quadrature::gauss<double, 20>::integrate(f, a + i * w, a + (i + 1) * w);
    return s;
}

inline double bump(double x) {
    const double d = 0.25 - x * x;
    return d > 0 ? std::exp(-1.0 / d) : 0.0;
}

inline double bump_prime(double x) {
    const double d = 0.25 - x * x;
    return d > 0 ? std::exp(-1.0 / d) * (-2.0 * x / (d * d)) : 0.0;
}

// g*g and its first two derivatives at x >= 0, by direct quadrature of the convolution.
inline double conv(double x, int order) {
    if (x >= 1.0) return 0.0;
    const double lo = std::max(-0.5, x - 0.5), hi = std::min(0.5, x + 0.5);
    auto f = [&](double t) {
        switch (order) {
            case 0: return bump(t) * bump(x - t);
            case 1: return bump(t) * bump_prime(x - t);
            default: return bump_prime(t) * bump_prime(x - t);
        }
    };
    // split at the kinks of the integrand's support to keep the rule smooth
    const double mid = 0.5 * (lo + hi);
    return gk(f, lo, mid, 1e-13, 8) + gk(f, mid, hi, 1e-13, 8);
}

// Normalized so that f1(0) = 1. Values come from a quintic Hermite interpolant of the
// convolution; the far tail (f1 < 1e-80) is evaluated directly because the interpolant
// loses relative accuracy there.
// For x near 1 the support of the convolution integrand is a short interval around x/2
// and a single 30-point rule is accurate to a few ulps of relative error.
inline double conv_tail(double x, int order) {
    if (x >= 1.0) return 0.0;
    auto f = [&](double t) {
        return order == 0 ? bump(t) * bump(x - t) : bump(t) * bump_prime(x - t);
    };
    return boost::math::quadrature::gauss<double, 30>::integrate(f, x - 0.5, 0.5);
}

struct F1Data {
    static constexpr double kTail = 0.97;
    double h = 0;
    double scale = 1;
    double second_at_zero = 0;
    double integral = 0;
    std::unique_ptr<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>> interp;

    explicit F1Data(int nodes) {
        if (nodes < 16) throw std::invalid_argument("TestFunction: grid too coarse");
        h = 1.0 / (nodes - 1);
        scale = conv(0.0, 0);
        std::vector<double> y(static_cast<std::size_t>(nodes)), dy(y.size()), d2y(y.size());
        for (int i = 0; i < nodes; ++i) {
            const double x = i * h;
            y[static_cast<std::size_t>(i)] = conv(x, 0) / scale;
            dy[static_cast<std::size_t>(i)] = conv(x, 1) / scale;
            d2y[static_cast<std::size_t>(i)] = conv(x, 2) / scale;
        }
        second_at_zero = d2y[0];
        interp = std::make_unique<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>>(
            std::move(y), std::move(dy), std::move(d2y), 0.0, h);
        integral = 2.0 * gauss_panels([this](double x) { return value(x); }, 0.0, 1.0, 200);
    }

    double value(double x) const {
        x = std::abs(x);
        if (x >= 1.0) return 0.0;
        if (x >= kTail) return conv_tail(x, 0) / scale;
        return (*interp)(x);
    }
    double prime(double x) const {
        const double ax = std::abs(x);
        if (ax >= 1.0) return 0.0;
        const double v = ax >= kTail ? conv_tail(ax, 1) / scale : interp->prime(ax);
        return x < 0 ? -v : v;
    }
};

inline const F1Data& f1_data() {
    static const F1Data data(4001);
    return data;
}

}  // namespace detail

struct F1Report {
    bool support_ok = false;
    bool even_ok = false;
    bool fourier_real_ok = false;
    bool fourier_imag_ok = false;
    bool monotone_ok = false;
    double min_fourier_real = 0;
    double min_fourier_imag = 0;
    double max_increase = 0;  // largest f(x_{i+1}) - f(x_i) on the monotonicity grid
    int grid_points = 0;
    bool ok() const { return support_ok && even_ok && fourier_real_ok && fourier_imag_ok && monotone_ok; }
};

// f_T(x) = f_1(x/T) with f_1 = g*g, g(x) = exp(-1/(1/4-x^2)) on |x| < 1/2.
class TestFunction {
public:
    explicit TestFunction(double T = 1.0) : T_(T), d_(&detail::f1_data()) {
        if (!(T > 0)) throw std::invalid_argument("TestFunction: T must be positive");
    }

    double T() const { return T_; }
    double f1(double x) const { return d_->value(x); }
    double operator()(double x) const { return d_->value(x / T_); }
    double prime(double x) const { return d_->prime(x / T_) / T_; }
    double second_at_zero() const { return d_->second_at_zero / (T_ * T_); }
    double integral() const { return T_ * d_->integral; }

    // Fourier transform of g on the real line (g is even)
    static double g_hat(double r) {
        auto f = [r](double x) { return detail::bump(x) * std::cos(r * x); };
        const int pieces = 1 + static_cast<int>(std::abs(r) / 20.0);
        double s = 0;
        for (int i = 0; i < pieces; ++i) s += detail::gk(f, 0.5 * i / pieces, 0.5 * (i + 1) / pieces, 1e-12, 8);
        return 2.0 * s;
    }

    // hat f_T(r) = T |hat g(T r)|^2 / (g*g)(0)
    double fourier_real(double r) const {
        const double gh = g_hat(T_ * r);
        return T_ * gh * gh / d_->scale;
    }

    // Direct cosine transform of f_T, used to cross-check the convolution identity.
    double fourier_real_direct(double r) const {
        auto f = [&](double x) { return (*this)(x) * std::cos(r * x); };
        const int panels = 100 + static_cast<int>(4.0 * std::abs(r) * T_);
        return 2.0 * detail::gauss_panels(f, 0.0, T_, panels);
    }

    // hat f_T(i t) = int 2 cosh(t x) f_T(x) dx over [0, T]
    double fourier_imag(double t) const {
        if (t < 0) throw std::invalid_argument("fourier_imag: t must be >= 0");
        return detail::gauss_panels([&](double x) { return 2.0 * std::cosh(t * x) * (*this)(x); }, 0.0, T_, 200);
    }

    // Same value as the full-line integral of e^{tx} f_T(x).
    double fourier_imag_full_line(double t) const {
        return detail::gauss_panels([&](double x) { return std::exp(t * x) * (*this)(x); }, -T_, T_, 400);
    }

    F1Report verify(int grid = 10000) const {
        F1Report r;
        r.grid_points = grid;
        r.support_ok = f1(1.0001) == 0.0 && f1(-1.0001) == 0.0 && f1(0.0) > 0.0;
        r.even_ok = f1(0.3) == f1(-0.3) && prime(0.3) == -prime(-0.3);
        r.min_fourier_real = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 200; ++i) r.min_fourier_real = std::min(r.min_fourier_real, fourier_real(0.25 * i));
        r.fourier_real_ok = r.min_fourier_real >= -1e-10;
        r.min_fourier_imag = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 100; ++i) r.min_fourier_imag = std::min(r.min_fourier_imag, fourier_imag(0.05 * i));
        r.fourier_imag_ok = r.min_fourier_imag >= -1e-10;
        double prev = f1(0.0);
        r.max_increase = 0;
        for (int i = 1; i <= grid; ++i) {
            const double v = f1(1.05 * i / grid);
            r.max_increase = std::max(r.max_increase, v - prev);
            prev = v;
        }
        r.monotone_ok = r.max_increase <= 0.0;
        return r;
    }

    double normalization() const { return d_->scale; }

private:
    double T_;
    const detail::F1Data* d_;
};

inline TestFunction make_f1() {
    TestFunction f(1.0);
    F1Report r = f.verify();
    if (!r.ok()) throw std::runtime_error("make_f1: test function failed its property checks");
    return f;
}

// ---------------------------------------------------------------------------
// Abel transform pair

namespace detail {
// u with cosh u = cosh(base) + v^2, computed without cancellation near 0
inline double shifted_arccosh(double base, double v) {
    const double s = std::sinh(0.5 * base);
    return 2.0 * std::asinh(std::sqrt(s * s + 0.5 * v * v));
}

// int_0^{vmax} h(u(v)) dv with u(v) = shifted_arccosh(base, v) and u(vmax) = top. Panels are
// uniform in u and mapped to v, so the endpoint square-root singularity is absorbed while the
// resolution in u stays even for large top.
template <class H>
double abel_integral(double base, double top, H&& h, int panels) {
    const double cb = std::cosh(base);
    double total = 0, v_lo = 0;
    for (int i = 1; i <= panels; ++i) {
        const double u_hi = base + (top - base) * i / panels;
        const double v_hi = std::sqrt(std::max(0.0, std::cosh(u_hi) - cb));
        total += boost::math::quadrature::gauss<double, 20>::integrate(
            [&](double v) { return h(shifted_arccosh(base, v)); }, v_lo, v_hi);
        v_lo = v_hi;
    }
    return total;
}
}  // namespace detail

// k_T(rho) = -1/(sqrt2 pi) int_rho^inf f_T'(u)/sqrt(cosh u - cosh rho) du
inline double inverse_abel(const TestFunction& f, double rho, int panels = 40) {
    rho = std::abs(rho);
    const double T = f.T();
    if (rho >= T) return 0.0;
    auto h = [&](double u) {
        if (u < 1e-7) return 2.0 * f.second_at_zero();
        return 2.0 * f.prime(u) / std::sinh(u);
    };
    const double I = detail::abel_integral(rho, T, h, panels);
    return -I / (std::numbers::sqrt2 * std::numbers::pi);
}

struct KernelPair {
    TestFunction f;
    std::vector<double> rho;
    std::vector<double> k;

    double operator()(double r) const { return inverse_abel(f, r); }
};

inline KernelPair make_kernel(const TestFunction& f, int points = 201) {
    KernelPair kp{f, {}, {}};
    for (int i = 0; i < points; ++i) {
        const double r = f.T() * i / (points - 1);
        kp.rho.push_back(r);
        kp.k.push_back(inverse_abel(f, r));
    }
    return kp;
}

// f_T(u) = sqrt2 int_{|u|}^inf k_T(rho) sinh rho / sqrt(cosh rho - cosh u) d rho
inline double forward_abel(const KernelPair& kp, double u, int panels = 40) {
    u = std::abs(u);
    const double T = kp.f.T();
    if (u >= T) return 0.0;
    return 2.0 * std::numbers::sqrt2 * detail::abel_integral(u, T, [&](double r) { return kp(r); }, panels);
}

// (1/4pi) int r hat f_T(r) tanh(pi r) dr over the real line.
inline double k0_spectral(const TestFunction& f) {
    const double T = f.T();
    // substitute rho = T r: (1/(2 pi T)) int_0^inf rho |hat g(rho)|^2 tanh(pi rho / T) d rho
    auto integrand = [&](double rho) {
        const double gh = TestFunction::g_hat(rho);
        return rho * gh * gh * std::tanh(std::numbers::pi * rho / T);
    };
    double total = 0;
    for (int chunk = 0; chunk < 400; ++chunk) {
        const double part = detail::gk(integrand, 10.0 * chunk, 10.0 * (chunk + 1), 1e-11, 8);
        total += part;
        if (chunk > 3 && std::abs(part) < 1e-12 * std::abs(total)) break;
    }
    return total / (2.0 * std::numbers::pi * T * f.normalization());
}

struct AbelReport {
    double T = 0;
    double roundtrip_sup_error = 0;
    double f_sup = 0;
    double k_min = 0;
    double k0 = 0;
    double k0_spectral = 0;
    double k0_rel_error = 0;
    int grid_points = 0;
};

inline AbelReport abel_report(double T, int roundtrip_points = 61, int kernel_points = 201) {
    AbelReport r;
    r.T = T;
    TestFunction f(T);
    KernelPair kp = make_kernel(f, kernel_points);
    r.k_min = *std::min_element(kp.k.begin(), kp.k.end());
    r.k0 = kp.k.front();
    r.grid_points = roundtrip_points;
    for (int i = 0; i < roundtrip_points; ++i) {
        const double u = T * i / (roundtrip_points - 1);
        const double back = forward_abel(kp, u);
        r.f_sup = std::max(r.f_sup, f(u));
        r.roundtrip_sup_error = std::max(r.roundtrip_sup_error, std::abs(back - f(u)));
    }
    r.k0_spectral = k0_spectral(f);
    r.k0_rel_error = std::abs(r.k0 - r.k0_spectral) / std::abs(r.k0_spectral);
    return r;
}

// min over the grid of hat f_T(it) / (T e^{T(1-eps)t})
inline double lower_envelope(const TestFunction& f, double eps, const std::vector<double>& t_grid) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("lower_envelope: eps must be in (0,1)");
    double best = std::numeric_limits<double>::infinity();
    for (double t : t_grid) best = std::min(best, f.fourier_imag(t) / (f.T() * std::exp(f.T() * (1 - eps) * t)));
    return best;
}

// ---------------------------------------------------------------------------
// Spectral gap curves

struct GapPoint {
    double alpha = 0;
    double main = 0;
    double hide = 0;
    double cheeger = 0;
};

inline double cheeger_constant() {
    const double l2 = std::numbers::ln2;
    const double r = l2 / (l2 + 2.0 * std::numbers::pi);
    return 0.25 * r * r;
}

inline GapPoint gap_curve(double alpha) {
    if (!(alpha >= 0.0 && alpha < 0.5)) throw std::invalid_argument("gap_curve: alpha must lie in [0, 1/2)");
    GapPoint p;
    p.alpha = alpha;
    const double m = 1.0 / (6.0 * (1.0 - alpha));
    const double h = (1.0 + 2.0 * alpha) / 4.0;
    p.main = 0.25 - m * m;
    p.hide = 0.25 - h * h;
    p.cheeger = cheeger_constant();
    return p;
}

// Root of main(alpha) = hide(alpha), i.e. 6 alpha^2 - 3 alpha - 1 = 0, on the positive side.
inline double gap_crossing_root() { return (3.0 + std::sqrt(33.0)) / 12.0; }

}  // namespace wpv
