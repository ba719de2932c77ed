#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exactpi.hpp"
#include "intersections.hpp"

namespace wpv {

using HighFloat = boost::multiprecision::mpfr_float_100;

inline HighFloat to_high(const mpq_class& q) {
    return HighFloat(boost::multiprecision::mpq_rational(q.get_mpq_t()));
}

inline HighFloat to_high(const PiGraded& p) {
    const HighFloat pi2 = boost::math::constants::pi<HighFloat>() * boost::math::constants::pi<HighFloat>();
    HighFloat s = 0;
    for (const auto& [m, q] : p.terms()) s += to_high(q) * pow(pi2, m);
    return s;
}

// 1 / prod_i 2^{2 a_i} (2 a_i + 1)!, the factor turning [tau_a] into the coefficient of x^{2a}.
inline mpq_class monomial_factor(const std::vector<int>& alpha) {
    mpz_class den = 1;
    for (int a : alpha) {
        den *= factorial_z(2 * a + 1);
        den <<= static_cast<mp_bitcnt_t>(2 * a);
    }
    return mpq_class(mpz_class(1), den);
}

namespace detail {
inline void exponent_vectors(int k, int maxsum, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= maxsum; ++v) {
        cur.push_back(v);
        exponent_vectors(k, maxsum - v, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

// V_{g,n}(x_1..x_k, 0, .., 0) as a polynomial in k variables; active < 0 means all n.
inline BoundaryPolynomial volume_polynomial(int g, int n, MemoStore& store, int active = -1) {
    if (!is_stable(g, n) || n < 1) throw std::invalid_argument("volume_polynomial: need stable (g,n) with n >= 1");
    const int k = active < 0 ? n : active;
    if (k > n) throw std::invalid_argument("volume_polynomial: more active variables than boundaries");
    BoundaryPolynomial p;
    p.n = k;
    std::vector<std::vector<int>> alphas;
    std::vector<int> cur;
    detail::exponent_vectors(k, dim_of(g, n), cur, alphas);
    for (const auto& a : alphas) {
        std::vector<int> d(a);
        d.resize(static_cast<std::size_t>(n), 0);
        TauIndex idx(g, d);
        mpq_class q = tau_rescaled(idx, store);
        if (q == 0) continue;
        p.coeffs.emplace(a, PiGraded(q * monomial_factor(a), idx.d0()));
    }
    return p;
}

// Floating polynomial V_{g,n}(x_1..x_k,0..)/scale with positive coefficients, for quadrature.
class ScaledPolynomial {
public:
    ScaledPolynomial() = default;

    ScaledPolynomial(const BoundaryPolynomial& p, const PiGraded& scale) : k_(p.n) {
        auto sg = scale.single_grade();
        if (!sg) throw std::invalid_argument("ScaledPolynomial: scale must be a single-grade element");
        const mpq_class sq = scale.coeff(*sg);
        const long double pi2 = std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
        for (const auto& [a, c] : p.coeffs) {
            auto cg = c.single_grade();
            if (!cg) throw std::invalid_argument("ScaledPolynomial: coefficient is not single-grade");
            mpq_class r = c.coeff(*cg) / sq;
            long double v = PiGraded::to_ld(r) * std::pow(pi2, static_cast<long double>(*cg - *sg));
            exps_.push_back(a);
            coef_.push_back(static_cast<double>(v));
            for (int e : a) maxdeg_ = std::max(maxdeg_, e);
        }
    }

    int vars() const { return k_; }
    std::size_t terms() const { return coef_.size(); }

    double operator()(const double* x) const {
        thread_local std::vector<double> pw;
        const std::size_t stride = static_cast<std::size_t>(maxdeg_) + 1;
        pw.assign(stride * static_cast<std::size_t>(k_), 1.0);
        for (int i = 0; i < k_; ++i) {
            const double x2 = x[i] * x[i];
            for (int e = 1; e <= maxdeg_; ++e)
                pw[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(e)] =
                    pw[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(e) - 1] * x2;
        }
        double s = 0;
        for (std::size_t t = 0; t < coef_.size(); ++t) {
            double m = coef_[t];
            for (int i = 0; i < k_; ++i) m *= pw[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(exps_[t][static_cast<std::size_t>(i)])];
            s += m;
        }
        return s;
    }
    double operator()(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != k_) throw std::invalid_argument("ScaledPolynomial: dimension mismatch");
        return (*this)(x.data());
    }

    const std::vector<std::vector<int>>& exponents() const { return exps_; }
    const std::vector<double>& coefficients() const { return coef_; }

private:
    int k_ = 0;
    int maxdeg_ = 0;
    std::vector<std::vector<int>> exps_;
    std::vector<double> coef_;
};

struct VolumeTable {
    std::map<std::pair<int, int>, BoundaryPolynomial> polys;
    std::string provenance;

    const BoundaryPolynomial& get(int g, int n, MemoStore& store) {
        auto key = std::make_pair(g, n);
        auto it = polys.find(key);
        if (it == polys.end()) it = polys.emplace(key, volume_polynomial(g, n, store)).first;
        return it->second;
    }
};

// ---------------------------------------------------------------------------
// Asymptotic ratios

struct AsymptoticReport {
    int g = 0, n = 0;
    double measured = 0;
    double predicted = 0;
    double residual = 0;
    double envelope = 0;
};

inline double c1_coefficient(int n) {
    const double ip2 = 1.0 / (std::numbers::pi * std::numbers::pi);
    return (0.5 - ip2) * n - 1.25 + 2.0 * ip2;
}

inline double r2_slope(int n) { return (3.0 - 2.0 * n) / (std::numbers::pi * std::numbers::pi); }

// V_{g,n+1} / (8 pi^2 g V_{g,n}), an exact rational.
inline mpq_class ratio_r1_exact(int g, int n, MemoStore& store) {
    PiGraded a = volume(g, n + 1, store), b = volume(g, n, store);
    return a.coeff(dim_of(g, n + 1)) / (mpq_class(8 * g) * b.coeff(dim_of(g, n)));
}

inline AsymptoticReport ratio_r1(int g, int n, MemoStore& store) {
    AsymptoticReport r{g, n, 0, 0, 0, 0};
    r.measured = ratio_r1_exact(g, n, store).get_d();
    r.predicted = 1.0 + c1_coefficient(n) / g;
    r.residual = std::abs(r.measured - r.predicted);
    r.envelope = (1.0 + n * n) / (static_cast<double>(g) * g);
    return r;
}

// V_{g-1,n+2} / V_{g,n} = q / pi^2 with q rational.
inline AsymptoticReport ratio_r2(int g, int n, MemoStore& store) {
    if (g < 1 || !is_stable(g - 1, n + 2)) throw std::invalid_argument("ratio_r2: need g >= 1");
    PiGraded a = volume(g - 1, n + 2, store), b = volume(g, n, store);
    mpq_class q = a.coeff(dim_of(g - 1, n + 2)) / b.coeff(dim_of(g, n));
    AsymptoticReport r{g, n, 0, 0, 0, 0};
    r.measured = static_cast<double>(PiGraded::to_ld(q) / (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>));
    r.predicted = 1.0 + r2_slope(n) / g;
    r.residual = std::abs(r.measured - r.predicted);
    r.envelope = (1.0 + n * n) / (static_cast<double>(g) * g);
    return r;
}

struct SlopeFit {
    int n = 0;
    std::vector<int> genera;
    std::vector<double> scaled;  // g (r(g) - 1)
    double slope = 0;            // extrapolated to 1/g -> 0
    double predicted = 0;
    double rel_error = 0;
};

// Polynomial extrapolation of g(r(g)-1) in h = 1/g to h = 0 through all sample points.
inline double richardson_at_zero(const std::vector<double>& h, const std::vector<double>& y) {
    const std::size_t m = h.size();
    std::vector<double> p(y);
    for (std::size_t lvl = 1; lvl < m; ++lvl)
        for (std::size_t i = 0; i + lvl < m; ++i)
            p[i] = (h[i + lvl] * p[i] - h[i] * p[i + 1]) / (h[i + lvl] - h[i]);
    return p[0];
}

enum class RatioKind { R1, R2 };

// gmin defaults to gmax - 2 (three points).
inline SlopeFit fit_slope(RatioKind kind, int n, int gmax, MemoStore& store, int gmin = -1) {
    if (gmax < 3) throw std::invalid_argument("fit_slope: need gmax >= 3");
    if (gmin < 0) gmin = gmax - 2;
    if (gmin < 2 || gmin >= gmax) throw std::invalid_argument("fit_slope: need 2 <= gmin < gmax");
    SlopeFit f;
    f.n = n;
    std::vector<double> h, y;
    for (int g = gmin; g <= gmax; ++g) {
        AsymptoticReport r = kind == RatioKind::R1 ? ratio_r1(g, n, store) : ratio_r2(g, n, store);
        f.genera.push_back(g);
        f.scaled.push_back(g * (r.measured - 1.0));
        h.push_back(1.0 / g);
        y.push_back(g * (r.measured - 1.0));
    }
    f.slope = richardson_at_zero(h, y);
    f.predicted = kind == RatioKind::R1 ? c1_coefficient(n) : r2_slope(n);
    f.rel_error = std::abs(f.slope - f.predicted) / std::abs(f.predicted);
    return f;
}

// ---------------------------------------------------------------------------
// Bounds

inline double bound_b0() {
    const double p2 = std::numbers::pi * std::numbers::pi;
    return p2 / 3.0 - p2 * p2 / 30.0;
}
inline double bound_b1() { return std::cosh(std::numbers::pi) - std::sinh(std::numbers::pi) / std::numbers::pi; }

inline double sinh_ratio(double t) {
    if (t == 0) return 1.0;
    const double h = t / 2;
    if (h < 1e-4) return 1.0 + h * h / 6.0 + h * h * h * h / 120.0;
    return std::sinh(h) / h;
}

struct ClassicalBoundsReport {
    int g = 0, n = 0;
    bool sandwich_applies = false;
    double sandwich_value = 0;  // 4 pi^2 (2g-2+n) V_{g,n} / V_{g,n+1}
    bool sandwich_ok = true;
    bool genus_shift_applies = false;  // V_{g-1,n+4} <= V_{g,n+2}
    bool genus_shift_ok = true;
    int samples = 0;
    int sample_violations = 0;  // V <= V(x) <= e^{|x|/2} V at random points
    bool ok() const { return sandwich_ok && genus_shift_ok && sample_violations == 0; }
};

// Number of free variables sampled for V(x): all of them when the polynomial is small.
inline int sampled_variables(int g, int n) {
    const int D = dim_of(g, n);
    double terms = 1;
    for (int i = 1; i <= n; ++i) terms = terms * (D + i) / i;
    return terms <= 60000 ? n : std::min(n, 2);
}

inline ClassicalBoundsReport classical_bounds(int g, int n, MemoStore& store, int samples = 20, std::uint64_t seed = 7) {
    ClassicalBoundsReport r;
    r.g = g;
    r.n = n;
    const long double pi2 = std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
    if (2 * g - 2 + n > 2 && n >= 0) {
        r.sandwich_applies = true;
        mpq_class q0 = volume(g, n, store).coeff(dim_of(g, n));
        mpq_class q1 = volume(g, n + 1, store).coeff(dim_of(g, n + 1));
        // 4 pi^2 (2g-2+n) V_{g,n}/V_{g,n+1} = 4 (2g-2+n) q0 / q1
        mpq_class v = mpq_class(4 * (2 * g - 2 + n)) * q0 / q1;
        r.sandwich_value = v.get_d();
        r.sandwich_ok = r.sandwich_value >= bound_b0() && r.sandwich_value <= bound_b1();
    }
    if (g >= 1 && n >= 0) {
        r.genus_shift_applies = true;
        mpq_class qa = volume(g - 1, n + 4, store).coeff(dim_of(g - 1, n + 4));
        mpq_class qb = volume(g, n + 2, store).coeff(dim_of(g, n + 2));
        // grades differ by one: compare qa with qb * pi^2
        r.genus_shift_ok = PiGraded::to_ld(qa) <= PiGraded::to_ld(qb) * pi2;
    }
    if (n >= 1 && samples > 0) {
        const int k = sampled_variables(g, n);
        BoundaryPolynomial p = volume_polynomial(g, n, store, k);
        PiGraded v0 = p.constant_term();
        ScaledPolynomial sp(p, v0);
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(1000 * g + n));
        std::uniform_real_distribution<double> U(0.0, 6.0);
        for (int s = 0; s < samples; ++s) {
            std::vector<double> x(static_cast<std::size_t>(k));
            double sum = 0;
            for (auto& xi : x) {
                xi = U(rng);
                sum += xi;
            }
            const double ratio = sp(x);
            ++r.samples;
            if (!(ratio >= 1.0 - 1e-12 && ratio <= std::exp(sum / 2) * (1 + 1e-12))) ++r.sample_violations;
        }
    }
    return r;
}

struct SinhBoundReport {
    int g = 0, n = 0;
    double ratio = 0;        // V(x)/V
    double sinh_product = 0;  // prod sinh(x_i/2)/(x_i/2)
    bool upper_ok = true;
    double c_needed = 0;     // smallest c making the lower bound hold at x (0 if no constraint)
};

// Upper bound check at a rational point in high precision; x has one entry per active variable.
inline SinhBoundReport sinh_bounds(int g, int n, const BoundaryPolynomial& p, const std::vector<mpq_class>& x) {
    SinhBoundReport r;
    r.g = g;
    r.n = n;
    HighFloat ratio = to_high(poly_eval_exact(p, x)) / to_high(p.constant_term());
    HighFloat prod = 1, sq = 0;
    for (const auto& xi : x) {
        HighFloat h = to_high(xi) / 2;
        sq += to_high(xi) * to_high(xi);
        if (h != 0) prod *= sinh(h) / h;
    }
    r.ratio = ratio.convert_to<double>();
    r.sinh_product = prod.convert_to<double>();
    r.upper_ok = ratio <= prod;
    if (sq > 0 && n > 0) {
        HighFloat c = (1 - ratio / prod) * HighFloat(g) / (HighFloat(n) * sq);
        r.c_needed = std::max(0.0, c.convert_to<double>());
    }
    return r;
}

inline SinhBoundReport sinh_bounds(int g, int n, const std::vector<double>& x, MemoStore& store) {
    BoundaryPolynomial p = volume_polynomial(g, n, store, static_cast<int>(x.size()));
    std::vector<mpq_class> xq;
    for (double v : x) xq.emplace_back(v);
    return sinh_bounds(g, n, p, xq);
}

// Exact coefficientwise certificate: [tau_a] <= V_{g,n} for every a, using a rational lower bound
// of pi^2. It implies the sinh upper bound everywhere on the non-negative orthant.
inline bool sinh_bound_certificate(int g, int n, MemoStore& store, int active = -1) {
    const mpq_class pi2_low(mpz_class("98696044010"), mpz_class("10000000000"));
    BoundaryPolynomial p = volume_polynomial(g, n, store, active);
    const mpq_class q0 = volume(g, n, store).coeff(dim_of(g, n));
    for (const auto& [a, c] : p.coeffs) {
        int total = 0;
        for (int e : a) total += e;
        auto grade = c.single_grade();
        if (!grade) return false;
        mpq_class bracket = c.coeff(*grade) / monomial_factor(a);
        mpq_class rhs = q0;
        for (int i = 0; i < total; ++i) rhs *= pi2_low;
        if (bracket > rhs) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// First-order correction in 1/g

inline double f1_correction(const std::vector<double>& x) {
    const double p2 = std::numbers::pi * std::numbers::pi;
    const std::size_t n = x.size();
    std::vector<double> S(n), C(n);
    for (std::size_t i = 0; i < n; ++i) {
        S[i] = sinh_ratio(x[i]);
        C[i] = std::cosh(x[i] / 2);
    }
    auto prod_except = [&](std::size_t a, std::size_t b) {
        double p = 1;
        for (std::size_t l = 0; l < n; ++l)
            if (l != a && l != b) p *= S[l];
        return p;
    };
    double single = 0, pair = 0;
    for (std::size_t i = 0; i < n; ++i)
        single += (C[i] + 1 - (x[i] * x[i] / 16 + 2) * S[i]) * prod_except(i, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pair += (C[i] * C[j] + 1 - 2 * S[i] * S[j]) * prod_except(i, j);
    return single / p2 - pair / (2 * p2);
}

// |V(x)/V - prod S - f^1/g| against the envelope (1+sum x)^4 e^{sum x / 2} / g^2.
inline AsymptoticReport expansion_check(int g, int n, const std::vector<double>& x, MemoStore& store) {
    if (static_cast<int>(x.size()) > n) throw std::invalid_argument("expansion_check: too many coordinates");
    BoundaryPolynomial p = volume_polynomial(g, n, store, static_cast<int>(x.size()));
    ScaledPolynomial sp(p, p.constant_term());
    std::vector<double> full(x);
    full.resize(static_cast<std::size_t>(n), 0.0);
    double prod = 1, sum = 0;
    for (double v : x) {
        prod *= sinh_ratio(v);
        sum += v;
    }
    AsymptoticReport r;
    r.g = g;
    r.n = n;
    r.measured = sp(x);
    r.predicted = prod + f1_correction(full) / g;
    r.residual = std::abs(r.measured - r.predicted);
    r.envelope = std::pow(1 + sum, 4) * std::exp(sum / 2) / (static_cast<double>(g) * g);
    return r;
}

}  // namespace wpv
