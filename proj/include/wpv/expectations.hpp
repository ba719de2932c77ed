#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "exactpi.hpp"
#include "intersections.hpp"
#include "spectral.hpp"
#include "volumes.hpp"

namespace wpv {

// ---------------------------------------------------------------------------
// Multicurve types and the integration engine

// A complement piece: genus, number of multicurve boundary slots, number of original cusps.
struct Piece {
    int genus = 0;
    int slots = 0;
    int cusps = 0;
    int euler() const { return 2 - 2 * genus - slots - cusps; }
};

struct MulticurveType {
    int g = 0, n = 0;
    std::vector<Piece> pieces;
    std::vector<std::array<int, 2>> wiring;  // per component: the pieces holding its two sides
    double c_gamma = 1.0;
    double orientation = 1.0;
    double orbit = 1.0;
    std::string label;

    int components() const { return static_cast<int>(wiring.size()); }

    void validate() const {
        if (!is_stable(g, n)) throw std::invalid_argument("MulticurveType: ambient surface is not stable");
        if (!(c_gamma > 0 && c_gamma <= 1)) throw std::invalid_argument("MulticurveType: C_Gamma must lie in (0,1]");
        if (wiring.empty() || wiring.size() > 3) throw std::invalid_argument("MulticurveType: need 1 to 3 components");
        int chi = 0, cusps = 0;
        std::vector<int> used(pieces.size(), 0);
        for (const auto& p : pieces) {
            if (p.genus < 0 || p.slots < 1 || p.cusps < 0 || !is_stable(p.genus, p.slots + p.cusps))
                throw std::invalid_argument("MulticurveType: unstable or slot-free piece");
            chi += p.euler();
            cusps += p.cusps;
        }
        for (const auto& w : wiring)
            for (int idx : w) {
                if (idx < 0 || idx >= static_cast<int>(pieces.size()))
                    throw std::invalid_argument("MulticurveType: wiring refers to a missing piece");
                ++used[static_cast<std::size_t>(idx)];
            }
        for (std::size_t i = 0; i < pieces.size(); ++i)
            if (used[i] != pieces[i].slots)
                throw std::invalid_argument("MulticurveType: piece " + std::to_string(i) + " has " +
                                            std::to_string(pieces[i].slots) + " slots but " + std::to_string(used[i]) +
                                            " wired sides");
        if (chi != 2 - 2 * g - n) throw std::invalid_argument("MulticurveType: Euler characteristics do not add up");
        if (cusps != n) throw std::invalid_argument("MulticurveType: cusp count does not match the ambient surface");
    }
};

enum class IntegrandTag { Zero, HTest, PolyExp, PerimeterWindow, BoxWindow };

struct IntegrandSpec {
    IntegrandTag tag = IntegrandTag::Zero;
    double T = 0;    // HTest horizon
    int k = 1;       // HTest iterate
    double ell = 0;  // window size
    int power = 0;   // PolyExp: x^power e^{rate x} on [0, ell]
    double rate = 0;

    static IntegrandSpec zero() { return {}; }
    static IntegrandSpec h_test(double T, int k = 1) { return {IntegrandTag::HTest, T, k, 0, 0, 0}; }
    static IntegrandSpec poly_exp(double ell, int power, double rate) {
        return {IntegrandTag::PolyExp, 0, 1, ell, power, rate};
    }
    static IntegrandSpec perimeter(double ell) { return {IntegrandTag::PerimeterWindow, 0, 1, ell, 0, 0}; }
    static IntegrandSpec box(double ell) { return {IntegrandTag::BoxWindow, 0, 1, ell, 0, 0}; }

    void validate(int components) const {
        switch (tag) {
            case IntegrandTag::Zero: return;
            case IntegrandTag::HTest:
            case IntegrandTag::PolyExp:
                if (components != 1) throw std::invalid_argument("IntegrandSpec: single-curve integrand on a multicurve");
                if (tag == IntegrandTag::HTest && (!(T > 0) || k < 1))
                    throw std::invalid_argument("IntegrandSpec: H needs T > 0 and k >= 1");
                if (tag == IntegrandTag::PolyExp && (!(ell > 0) || power < 0))
                    throw std::invalid_argument("IntegrandSpec: x^p e^{rx} needs ell > 0 and p >= 0");
                return;
            case IntegrandTag::PerimeterWindow:
            case IntegrandTag::BoxWindow:
                if (!(ell > 0)) throw std::invalid_argument("IntegrandSpec: window needs ell > 0");
                return;
        }
    }
};

// x / (2 sinh(k x / 2)) f_T(k x)
inline double h_kernel(const TestFunction& f, int k, double x) {
    if (x == 0) return f(0.0) / k;
    return x / (2.0 * std::sinh(0.5 * k * x)) * f(k * x);
}

namespace detail {

inline long double grade_ratio(const PiGraded& num, const PiGraded& den) {
    auto a = num.single_grade(), b = den.single_grade();
    if (!a || !b) throw std::invalid_argument("grade_ratio: expected single-grade values");
    const mpq_class q = num.coeff(*a) / den.coeff(*b);
    const long double pi2 = std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
    return PiGraded::to_ld(q) * std::pow(pi2, static_cast<long double>(*a - *b));
}

template <class F>
double gauss30(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

template <class F>
double gauss30_panels(F&& f, double a, double b, int panels) {
    if (!(b > a)) return 0.0;
    const double w = (b - a) / panels;
    double s = 0;
    for (int i = 0; i < panels; ++i) s += gauss30(f, a + i * w, a + (i + 1) * w);
    return s;
}

}  // namespace detail

struct QuadratureOptions {
    int panels_1d = 64;
    int panels_nd = 1;  // per dimension, 30 nodes each
};

// Precomputed volume factors of a multicurve type: one scaled polynomial per piece and the
// ratio prod V_piece / V_{g,n}.
class FamilyIntegrand {
public:
    FamilyIntegrand(const MulticurveType& type, MemoStore& store) : type_(type) {
        type.validate();
        PiGraded prod(1);
        for (const auto& p : type.pieces) {
            const BoundaryPolynomial bp = volume_polynomial(p.genus, p.slots + p.cusps, store, p.slots);
            const PiGraded c = bp.constant_term();
            polys_.emplace_back(bp, c);
            prod = prod * c;
        }
        const PiGraded total = volume(type.g, type.n, store);
        factor_ = static_cast<double>(detail::grade_ratio(prod, total));
        slot_of_.resize(type.pieces.size());
        for (int c = 0; c < type.components(); ++c)
            for (int idx : type.wiring[static_cast<std::size_t>(c)]) slot_of_[static_cast<std::size_t>(idx)].push_back(c);
    }

    // prod_i V_i(x on slots) / prod_i V_i(0) * prod_c x_c
    double density(const double* x) const {
        double v = 1.0;
        std::array<double, 6> buf{};
        for (std::size_t i = 0; i < polys_.size(); ++i) {
            const auto& comps = slot_of_[i];
            for (std::size_t s = 0; s < comps.size(); ++s) buf[s] = x[comps[s]];
            v *= polys_[i](buf.data());
        }
        for (int c = 0; c < type_.components(); ++c) v *= x[c];
        return v;
    }

    double prefactor() const { return type_.c_gamma * type_.orientation * type_.orbit * factor_; }
    double volume_ratio() const { return factor_; }
    const MulticurveType& type() const { return type_; }

private:
    MulticurveType type_;
    std::vector<ScaledPolynomial> polys_;
    std::vector<std::vector<int>> slot_of_;
    double factor_ = 0;
};

inline double expectation(const FamilyIntegrand& fam, const IntegrandSpec& F, const QuadratureOptions& q = {}) {
    const int k = fam.type().components();
    F.validate(k);
    double integral = 0;
    switch (F.tag) {
        case IntegrandTag::Zero: return 0.0;
        case IntegrandTag::HTest: {
            const TestFunction f(F.T);
            auto h = [&](double x) { return h_kernel(f, F.k, x) * fam.density(&x); };
            integral = detail::gauss30_panels(h, 0.0, F.T / F.k, q.panels_1d);
            break;
        }
        case IntegrandTag::PolyExp: {
            auto h = [&](double x) { return std::pow(x, F.power) * std::exp(F.rate * x) * fam.density(&x); };
            integral = detail::gauss30_panels(h, 0.0, F.ell, q.panels_1d);
            break;
        }
        case IntegrandTag::PerimeterWindow:
        case IntegrandTag::BoxWindow: {
            const bool simplex = F.tag == IntegrandTag::PerimeterWindow;
            const int panels = k == 1 ? q.panels_1d : q.panels_nd;
            std::array<double, 3> x{};
            std::function<double(int, double)> level = [&](int d, double budget) -> double {
                const double top = simplex ? budget : F.ell;
                auto inner = [&](double t) {
                    x[static_cast<std::size_t>(d)] = t;
                    return d + 1 == k ? fam.density(x.data()) : level(d + 1, budget - t);
                };
                return detail::gauss30_panels(inner, 0.0, top, panels);
            };
            integral = level(0, F.ell);
            break;
        }
    }
    return fam.prefactor() * integral;
}

inline double expectation(const MulticurveType& type, const IntegrandSpec& F, MemoStore& store,
                          const QuadratureOptions& q = {}) {
    if (F.tag == IntegrandTag::Zero) {
        type.validate();
        return 0.0;
    }
    return expectation(FamilyIntegrand(type, store), F, q);
}

// ---------------------------------------------------------------------------
// Standard families

inline MulticurveType nonseparating_type(int g, int n) {
    if (g < 1 || !is_stable(g - 1, n + 2)) throw std::invalid_argument("nonseparating_type: need g >= 1 and stable (g-1, n+2)");
    return {g, n, {{g - 1, 2, n}}, {{0, 0}}, 0.5, 2.0, 1.0, "non-separating simple curve"};
}

inline MulticurveType two_cusp_pants_type(int g, int n, int k = 1) {
    if (k < 1 || n < 2 * k) throw std::invalid_argument("two_cusp_pants_type: need n >= 2k");
    MulticurveType t;
    t.g = g;
    t.n = n;
    for (int i = 0; i < k; ++i) t.pieces.push_back({0, 1, 2});
    t.pieces.push_back({g, k, n - 2 * k});
    for (int i = 0; i < k; ++i) t.wiring.push_back({i, k});
    mpq_class orbits = 1;
    for (int i = 0; i < k; ++i) orbits *= binomial_q(n - 2 * i, 2);
    orbits /= mpq_class(factorial_z(k));
    t.orbit = orbits.get_d();
    t.label = "pants with two cusps";
    return t;
}

inline MulticurveType one_cusp_pants_type(int g, int n) {
    if (n < 1 || g < 1) throw std::invalid_argument("one_cusp_pants_type: need n >= 1, g >= 1");
    return {g, n, {{0, 2, 1}, {g - 1, 2, n - 1}}, {{0, 1}, {0, 1}}, 0.5, 1.0, static_cast<double>(n), "pants with one cusp"};
}

inline MulticurveType no_cusp_pants_type(int g, int n) {
    if (g < 2) throw std::invalid_argument("no_cusp_pants_type: need g >= 2");
    return {g, n, {{0, 3, 0}, {g - 2, 3, n}}, {{0, 1}, {0, 1}, {0, 1}}, 1.0 / 6.0, 1.0, 1.0, "pants without cusps"};
}

inline MulticurveType one_holed_torus_type(int g, int n) {
    if (g < 1 || !is_stable(g - 1, n + 1)) throw std::invalid_argument("one_holed_torus_type: need stable (g-1, n+1)");
    return {g, n, {{1, 1, 0}, {g - 1, 1, n}}, {{0, 1}}, 0.5, 1.0, 1.0, "one-holed torus"};
}

// ---------------------------------------------------------------------------
// Non-separating simple curves against the trace-formula kernel

// int_0^T f_T(x) x^p e^{x/2} dx
inline double exp_moment(const TestFunction& f, int p) {
    return detail::gauss30_panels([&](double x) { return f(x) * std::pow(x, p) * std::exp(0.5 * x); }, 0.0, f.T(), 64);
}

struct NsepReport {
    double expectation = 0;   // E[sum over non-separating simple curves of H]
    double termwise = 0;      // the same, monomial by monomial
    double fhat_half = 0;     // hat f_T(i/2)
    double lhs = 0;           // expectation - hat f_T(i/2)
    double main = 0;
    double residual = 0;
    double envelope = 0;      // 1 + (1+n) T^2/g + (1+n^3) T^6 e^{T/2}/g^2
};

inline NsepReport nsep_main_term(int g, int n, double T, MemoStore& store) {
    if (!(T > 0)) throw std::invalid_argument("nsep_main_term: T must be positive");
    const MulticurveType type = nonseparating_type(g, n);
    const FamilyIntegrand fam(type, store);
    const TestFunction f(T);
    NsepReport r;
    r.expectation = expectation(fam, IntegrandSpec::h_test(T));

    // V_{g-1,n+2}(x,x,0^n) collected by powers of x
    const BoundaryPolynomial bp = volume_polynomial(g - 1, n + 2, store, 2);
    const PiGraded base = volume(g, n, store);
    std::map<int, long double> coef;
    for (const auto& [a, c] : bp.coeffs) coef[a[0] + a[1]] += detail::grade_ratio(c, base);
    for (const auto& [j, c] : coef) {
        const double m = detail::gauss30_panels([&, j](double x) { return h_kernel(f, 1, x) * std::pow(x, 2 * j + 1); }, 0.0, T, 64);
        r.termwise += static_cast<double>(c) * m;
    }
    r.termwise *= type.c_gamma * type.orientation;

    r.fhat_half = f.fourier_imag(0.5);
    r.lhs = r.expectation - r.fhat_half;
    const double pi2g = std::numbers::pi * std::numbers::pi * g;
    r.main = ((1.0 - 0.5 * n) * exp_moment(f, 1) - 0.25 * exp_moment(f, 2)) / pi2g;
    r.residual = r.lhs - r.main;
    r.envelope = 1.0 + (1.0 + n) * T * T / g + (1.0 + n * n * n) * std::pow(T, 6) * std::exp(0.5 * T) / (double(g) * g);
    return r;
}

// Main term of the non-simple expectation, assembled from its parts:
// figure-eights t^2/4 - (1/2 + ln2) t, one-sided iterated eights (ln2 - 1/2) t, cusp-type n t/2.
struct NsMainParts {
    double figure_eight = 0;
    double one_sided = 0;
    double cusp = 0;
    double total = 0;
};

inline NsMainParts ns_main_term(int g, int n, double T) {
    const TestFunction f(T);
    const double m1 = exp_moment(f, 1), m2 = exp_moment(f, 2);
    const double pi2g = std::numbers::pi * std::numbers::pi * g;
    const double ln2 = std::numbers::ln2;
    NsMainParts p;
    p.figure_eight = (0.25 * m2 - (0.5 + ln2) * m1) / pi2g;
    p.one_sided = (ln2 - 0.5) * m1 / pi2g;
    p.cusp = 0.5 * n * m1 / pi2g;
    p.total = p.figure_eight + p.one_sided + p.cusp;
    return p;
}

// ---------------------------------------------------------------------------
// Exact cancellation in Q[x, n, ln2]

// exponent triple (x, n, lambda = ln 2) -> rational coefficient
using TriPoly = std::map<std::array<int, 3>, mpq_class>;

inline void tri_add(TriPoly& p, const TriPoly& q) {
    for (const auto& [e, c] : q) {
        p[e] += c;
        if (p[e] == 0) p.erase(e);
    }
}

inline std::string tri_to_string(const TriPoly& p) {
    if (p.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : p) {
        if (!s.empty()) s += " + ";
        s += "(" + c.get_str() + ")";
        if (e[0]) s += "*x^" + std::to_string(e[0]);
        if (e[1]) s += "*n^" + std::to_string(e[1]);
        if (e[2]) s += "*ln2^" + std::to_string(e[2]);
    }
    return s;
}

struct CancellationReport {
    TriPoly nsep, figure_eight, one_sided, cusp, sum, n_part_sum;
    bool zero = false;
    bool n_part_zero = false;
    mpq_class value_at_n;  // the sum evaluated at the requested n and x = 3
};

inline CancellationReport cancellation_check(const mpq_class& n = 0) {
    const mpq_class h(1, 2), q(1, 4);
    CancellationReport r;
    r.nsep = {{{1, 0, 0}, 1}, {{1, 1, 0}, -h}, {{2, 0, 0}, -q}};
    r.figure_eight = {{{2, 0, 0}, q}, {{1, 0, 0}, -h}, {{1, 0, 1}, -1}};
    r.one_sided = {{{1, 0, 1}, 1}, {{1, 0, 0}, -h}};
    r.cusp = {{{1, 1, 0}, h}};
    tri_add(r.sum, r.nsep);
    tri_add(r.sum, r.figure_eight);
    tri_add(r.sum, r.one_sided);
    tri_add(r.sum, r.cusp);
    r.zero = r.sum.empty();
    TriPoly np;
    for (const TriPoly* p : {&r.nsep, &r.cusp})
        for (const auto& [e, c] : *p)
            if (e[1] > 0) tri_add(np, {{e, c}});
    r.n_part_sum = np;
    r.n_part_zero = np.empty();
    mpq_class v = 0;
    for (const auto& [e, c] : r.sum) {
        if (e[2] > 0) throw std::logic_error("cancellation_check: ln2 survived in the sum");
        mpq_class t = c;
        for (int i = 0; i < e[0]; ++i) t *= 3;
        for (int i = 0; i < e[1]; ++i) t *= n;
        v += t;
    }
    r.value_at_n = v;
    return r;
}

// ---------------------------------------------------------------------------
// Figure-eight change of variables and the one-sided series

struct ReductionReport {
    double triple = 0;
    double single = 0;
    double residual = 0;
};

inline double figure_eight_bracket(double t) {
    const double s = std::sinh(0.25 * t);
    const double S = s * s;
    return 4 * S * std::log(S) - 4 * S + 4;
}

// Triple integral over {x,y,z >= 0 : L(x,y,z) <= T} of Hbar(L) sinh(x/2) sinh(y/2) sinh(z/2),
// Hbar(t) = t f_T(t) / (2 sinh(t/2)), against the reduced single integral.
inline ReductionReport figure_eight_reduction_check(double T, int panels = 2) {
    ReductionReport r;
    const double t0 = 2 * std::acosh(3.0);
    if (!(T > t0)) return r;
    const TestFunction f(T);
    auto hbar = [&](double t) { return t * f(t) / (2 * std::sinh(0.5 * t)); };
    const double C = std::cosh(0.5 * T);
    // with p = cosh(x/2), q = cosh(y/2), u = cosh(z/2): sinh(x/2) dx = 2 dp, and cosh(L/2) = 2pq + u
    auto over_u = [&](double a) {
        return detail::gauss30_panels([&](double u) { return 2.0 * hbar(2 * std::acosh(a + u)); }, 1.0, C - a, panels);
    };
    auto over_q = [&](double p) {
        return detail::gauss30_panels([&](double qq) { return 2.0 * over_u(2 * p * qq); }, 1.0, (C - 1) / (2 * p), panels);
    };
    r.triple = detail::gauss30_panels([&](double p) { return 2.0 * over_q(p); }, 1.0, (C - 1) / 2, panels);
    r.single = detail::gauss30_panels([&](double t) { return 0.5 * t * f(t) * figure_eight_bracket(t); }, t0, T, 8 * panels);
    r.residual = std::abs(r.triple - r.single);
    return r;
}

// sinh^3(y/2) / (sinh(ky/2) sinh((k+1)y/2)), written without overflow
inline double one_sided_integrand(int k, double y) {
    if (y <= 0) return 0.0;
    if (y < 1e-7) return y / (2.0 * k * (k + 1));
    const double a = -std::expm1(-y);
    const double b = -std::expm1(-k * y);
    const double c = -std::expm1(-(k + 1) * y);
    return std::exp(-(k - 1) * y) * a * a * a / (2 * b * c);
}

inline double one_sided_term(int k) {
    if (k < 2) throw std::invalid_argument("one_sided_term: k >= 2");
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([k](double y) { return one_sided_integrand(k, y); }, 1e-13);
}

// Same term by tanh-sinh after y = u / (1 - u).
inline double one_sided_term_mapped(int k) {
    if (k < 2) throw std::invalid_argument("one_sided_term_mapped: k >= 2");
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(
        [k](double u) {
            if (u >= 1) return 0.0;
            const double v = 1 - u;
            return one_sided_integrand(k, u / v) / (v * v);
        },
        0.0, 1.0, 1e-13);
}

struct SeriesReport {
    double partial = 0;
    double target = std::numbers::ln2 - 0.5;
    std::vector<double> partials;  // partials[i] = sum up to k = i + 2
};

inline SeriesReport one_sided_sum_identity(int K) {
    if (K < 2) throw std::invalid_argument("one_sided_sum_identity: K >= 2");
    SeriesReport r;
    double s = 0;
    for (int k = 2; k <= K; ++k) {
        s += one_sided_term(k);
        r.partials.push_back(s);
    }
    r.partial = s;
    return r;
}

// ---------------------------------------------------------------------------
// Short-boundary subsurfaces

struct SubsurfaceReport {
    double two_cusp = 0, one_cusp = 0, no_cusp = 0, torus = 0;
    double engine = 0;
    double main = 0;
    double residual = 0;
    double envelope = 0;  // (1 + n^3) ell^4 e^{ell/2} / g^2
};

// int_{x+y <= ell} sinh(x/2) sinh(y/2) and the three-variable analogue
inline double sinh_simplex(int dims, double ell) {
    std::array<double, 3> x{};
    std::function<double(int, double)> level = [&](int d, double budget) -> double {
        return detail::gauss30_panels(
            [&](double t) {
                x[static_cast<std::size_t>(d)] = t;
                return std::sinh(0.5 * t) * (d + 1 == dims ? 1.0 : level(d + 1, budget - t));
            },
            0.0, budget, 2);
    };
    return level(0, ell);
}

inline SubsurfaceReport expected_subsurface_count(int g, int n, double ell, MemoStore& store,
                                                  const QuadratureOptions& q = {}) {
    if (!(ell > 0)) throw std::invalid_argument("expected_subsurface_count: ell must be positive");
    SubsurfaceReport r;
    const IntegrandSpec win = IntegrandSpec::perimeter(ell);
    if (n >= 2) r.two_cusp = expectation(two_cusp_pants_type(g, n), win, store, q);
    if (n >= 1 && is_stable(g - 1, n + 1)) r.one_cusp = expectation(one_cusp_pants_type(g, n), win, store, q);
    if (g >= 2) r.no_cusp = expectation(no_cusp_pants_type(g, n), win, store, q);
    if (g >= 1 && is_stable(g - 1, n + 1)) r.torus = expectation(one_holed_torus_type(g, n), win, store, q);
    r.engine = r.two_cusp + r.one_cusp + r.no_cusp + r.torus;

    const BoundaryPolynomial v11 = volume_polynomial(1, 1, store);
    auto v11_at = [&](double x) { return poly_eval(v11, {x}); };
    const double torus_int =
        detail::gauss30_panels([&](double x) { return v11_at(x) * std::sinh(0.5 * x); }, 0.0, ell, 2);
    const double nn = n;
    r.main = (nn * (nn - 1) / 4 * (std::cosh(0.5 * ell) - 1) + nn / 4 * sinh_simplex(2, ell) +
              sinh_simplex(3, ell) / 6 + torus_int / 8) /
             (std::numbers::pi * std::numbers::pi * g);
    r.residual = r.engine - r.main;
    r.envelope = (1 + nn * nn * nn) * std::pow(ell, 4) * std::exp(0.5 * ell) / (double(g) * g);
    return r;
}

struct LeadingTypeReport {
    double engine = 0;
    double main = 0;
    double ratio = 0;
    double multinomial = 0;  // (1/k!) (n choose 2,...,2,n-2k)
};

inline LeadingTypeReport leading_type_count(int g, int n, double ell, int k, MemoStore& store,
                                            const QuadratureOptions& q = {}) {
    if (k < 1) throw std::invalid_argument("leading_type_count: k >= 1");
    if (n < 2 * k) throw std::invalid_argument("leading_type_count: need n >= 2k");
    if (!(ell > 0)) throw std::invalid_argument("leading_type_count: ell must be positive");
    const MulticurveType t = two_cusp_pants_type(g, n, k);
    LeadingTypeReport r;
    r.multinomial = t.orbit;
    r.engine = expectation(t, IntegrandSpec::box(ell), store, q);
    r.main = t.orbit * std::pow((std::cosh(0.5 * ell) - 1) / (2 * std::numbers::pi * std::numbers::pi * g), k);
    r.ratio = r.engine / r.main;
    return r;
}

// ---------------------------------------------------------------------------
// Inclusion-exclusion for the indicator of an empty set

struct InclusionExclusionReport {
    mpz_class truncated;   // 1 + sum_{k=1}^{j} (-1)^k C(k0, k)
    mpz_class indicator;   // 1 if k0 == 0 else 0
    mpz_class remainder;   // truncated - indicator
    mpz_class next_term;   // C(k0, j+1), the size of the first omitted term
    bool bonferroni_ok = false;  // |remainder| <= next_term
};

inline InclusionExclusionReport inclusion_exclusion_identity(long k0, long j) {
    if (k0 < 0 || j < 0) throw std::invalid_argument("inclusion_exclusion_identity: k0, j >= 0");
    auto binom = [](long a, long b) {
        mpz_class r;
        if (b < 0 || b > a) return mpz_class(0);
        mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
        return r;
    };
    InclusionExclusionReport r;
    r.truncated = 1;
    for (long k = 1; k <= j; ++k) r.truncated += (k % 2 ? -1 : 1) * binom(k0, k);
    r.indicator = k0 == 0 ? 1 : 0;
    r.remainder = r.truncated - r.indicator;
    r.next_term = binom(k0, j + 1);
    r.bonferroni_ok = abs(r.remainder) <= r.next_term;
    return r;
}

}  // namespace wpv
