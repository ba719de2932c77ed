#include <gtest/gtest.h>

#include "support.hpp"

#include <wpv/expectations.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace wpv;
using wpv::testing::full_store;
using wpv::testing::small_store;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

long binom(long a, long b) {
    if (b < 0 || b > a) return 0;
    long r = 1;
    for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

}  // namespace

TEST(MulticurveTypes, StandardFamiliesValidate) {
    for (int g = 2; g <= 5; ++g)
        for (int n = 0; n <= 4; ++n) {
            EXPECT_NO_THROW(nonseparating_type(g, n).validate());
            EXPECT_NO_THROW(no_cusp_pants_type(g, n).validate());
            EXPECT_NO_THROW(one_holed_torus_type(g, n).validate());
            if (n >= 1) { EXPECT_NO_THROW(one_cusp_pants_type(g, n).validate()); }
            for (int k = 1; 2 * k <= n; ++k) EXPECT_NO_THROW(two_cusp_pants_type(g, n, k).validate());
        }
}

TEST(MulticurveTypes, RejectsInconsistentData) {
    auto t = nonseparating_type(3, 1);
    t.c_gamma = 0;
    EXPECT_THROW(t.validate(), std::invalid_argument);
    t = nonseparating_type(3, 1);
    t.pieces[0].genus = 1;
    EXPECT_THROW(t.validate(), std::invalid_argument);
    t = nonseparating_type(3, 1);
    t.wiring[0] = {0, 1};
    EXPECT_THROW(t.validate(), std::invalid_argument);
    t = one_holed_torus_type(3, 2);
    t.pieces[1].cusps = 1;
    EXPECT_THROW(t.validate(), std::invalid_argument);
    EXPECT_THROW(nonseparating_type(0, 3), std::invalid_argument);
    EXPECT_THROW(two_cusp_pants_type(3, 3, 2), std::invalid_argument);
    EXPECT_THROW(no_cusp_pants_type(1, 2), std::invalid_argument);
}

TEST(MulticurveTypes, OrbitCountOfDisjointCuspPairs) {
    // ways to pick k unordered disjoint pairs out of n cusps
    for (int n = 2; n <= 7; ++n)
        for (int k = 1; 2 * k <= n; ++k) {
            long ways = 1;
            for (int i = 0; i < k; ++i) ways *= binom(n - 2 * i, 2);
            for (int i = 2; i <= k; ++i) ways /= i;
            EXPECT_DOUBLE_EQ(two_cusp_pants_type(4, n, k).orbit, static_cast<double>(ways)) << n << " " << k;
        }
}

TEST(Integrands, SpecValidation) {
    EXPECT_THROW(IntegrandSpec::h_test(0.0).validate(1), std::invalid_argument);
    EXPECT_THROW(IntegrandSpec::h_test(2.0, 0).validate(1), std::invalid_argument);
    EXPECT_THROW(IntegrandSpec::h_test(2.0).validate(2), std::invalid_argument);
    EXPECT_THROW(IntegrandSpec::poly_exp(1.0, -1, 0).validate(1), std::invalid_argument);
    EXPECT_THROW(IntegrandSpec::box(0.0).validate(2), std::invalid_argument);
    EXPECT_NO_THROW(IntegrandSpec::perimeter(1.0).validate(3));
    EXPECT_EQ(expectation(nonseparating_type(3, 0), IntegrandSpec::zero(), small_store()), 0.0);
}

TEST(Integrands, KernelValues) {
    const TestFunction f(4.0);
    EXPECT_DOUBLE_EQ(h_kernel(f, 2, 0.0), f(0.0) / 2);
    for (double x : {0.3, 1.1, 1.9})
        EXPECT_NEAR(h_kernel(f, 2, x), x / (2 * std::sinh(x)) * f(2 * x), 1e-15);
    EXPECT_EQ(h_kernel(f, 1, 4.5), 0.0);
}

// On the once-punctured torus the complement of a non-separating curve is a pair of pants,
// so the density is x and the volume ratio is V_{0,3}/V_{1,1} = 12/pi^2.
TEST(FamilyIntegrand, OncePuncturedTorus) {
    const FamilyIntegrand fam(nonseparating_type(1, 1), small_store());
    EXPECT_NEAR(fam.volume_ratio(), 12 / kPi2, 1e-14);
    double x = 2.5;
    EXPECT_NEAR(fam.density(&x), 2.5, 1e-14);
    const double ell = 3.0;
    const double want = 0.5 * 2.0 * (12 / kPi2) * ell * ell / 2;
    EXPECT_NEAR(expectation(fam, IntegrandSpec::poly_exp(ell, 0, 0.0)), want, 1e-12 * want);
}

// Separating a closed genus-two surface into two one-holed tori:
// V_{1,1}^2 / V_{2,0} = (pi^2/12)^2 / (43 pi^6/2160) = 15 / (43 pi^2).
TEST(FamilyIntegrand, GenusTwoSeparatingCurve) {
    const FamilyIntegrand fam(one_holed_torus_type(2, 0), small_store());
    EXPECT_NEAR(fam.volume_ratio(), 15 / (43 * kPi2), 1e-14);
    double x = 2.0;
    const double v = (1 + x * x / (4 * kPi2));
    EXPECT_NEAR(fam.density(&x), x * v * v, 1e-13);
}

TEST(FamilyIntegrand, PolyExpMatchesDirectQuadrature) {
    auto& st = small_store();
    const FamilyIntegrand fam(nonseparating_type(3, 1), st);
    const auto p = volume_polynomial(2, 3, st, 2);
    const double c = p.constant_term().to_double();
    boost::math::quadrature::tanh_sinh<double> ts;
    const double ell = 2.0;
    const double direct = ts.integrate(
        [&](double x) { return x * x * std::exp(0.5 * x) * x * poly_eval(p, {x, x}) / c; }, 0.0, ell);
    const double want = 0.5 * 2.0 * fam.volume_ratio() * direct;
    EXPECT_NEAR(expectation(fam, IntegrandSpec::poly_exp(ell, 2, 0.5)), want, 1e-10 * want);
}

TEST(NonSeparating, EngineAgreesWithMonomialExpansion) {
    auto& st = full_store();
    for (int n = 0; n <= 3; ++n) {
        const auto r = nsep_main_term(10, n, 5.0, st);
        EXPECT_NEAR(r.expectation, r.termwise, 1e-10 * std::abs(r.termwise)) << n;
        EXPECT_NEAR(r.lhs, r.expectation - r.fhat_half, 1e-15);
    }
    EXPECT_THROW(nsep_main_term(10, 0, 0.0, st), std::invalid_argument);
}

TEST(NonSeparating, ResidualWithinEnvelope) {
    auto& st = full_store();
    for (int g : {10, 12, 14}) {
        const auto r = nsep_main_term(g, 1, 3.0, st);
        EXPECT_LT(std::abs(r.residual), r.envelope / g) << g;
    }
}

TEST(ExpMoment, MatchesTanhSinh) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double T : {1.0, 6.0})
        for (int p : {0, 1, 2}) {
            const TestFunction f(T);
            const double d = ts.integrate([&](double x) { return f(x) * std::pow(x, p) * std::exp(0.5 * x); }, 0.0, T);
            EXPECT_NEAR(exp_moment(f, p), d, 1e-10 * d);
        }
}

TEST(Cancellation, ExactSymbolicSumVanishes) {
    for (int n = 0; n <= 5; ++n) {
        const auto r = cancellation_check(n);
        EXPECT_TRUE(r.zero);
        EXPECT_TRUE(r.n_part_zero);
        EXPECT_EQ(r.value_at_n, 0);
        EXPECT_EQ(tri_to_string(r.sum), "0");
    }
}

TEST(Cancellation, NumericMainTermsCancel) {
    for (int n = 0; n <= 3; ++n)
        for (double T : {2.0, 5.0}) {
            const auto ns = ns_main_term(20, n, T);
            const TestFunction f(T);
            const double nsep = ((1.0 - 0.5 * n) * exp_moment(f, 1) - 0.25 * exp_moment(f, 2)) / (kPi2 * 20);
            EXPECT_NEAR(ns.total + nsep, 0.0, 1e-14 * std::abs(nsep) + 1e-16);
            EXPECT_NEAR(ns.total, ns.figure_eight + ns.one_sided + ns.cusp, 1e-16);
        }
}

TEST(OneSided, TermsAgreeAcrossQuadratures) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (int k : {2, 3, 5, 12}) {
        const double a = one_sided_term(k), b = one_sided_term_mapped(k);
        EXPECT_NEAR(a, b, 1e-10 * a) << k;
        // plain form, truncated where the integrand is negligible
        const double c = ts.integrate(
            [k](double y) {
                return std::pow(std::sinh(0.5 * y), 3) / (std::sinh(0.5 * k * y) * std::sinh(0.5 * (k + 1) * y));
            },
            1e-12, 80.0 / k);
        EXPECT_NEAR(a, c, 1e-8 * a) << k;
    }
    EXPECT_THROW(one_sided_term(1), std::invalid_argument);
    EXPECT_NEAR(one_sided_integrand(3, 1e-9), 1e-9 / 24, 1e-20);
}

TEST(OneSided, SeriesConvergesToLogTwoMinusHalf) {
    const auto r = one_sided_sum_identity(200);
    EXPECT_EQ(r.partials.size(), 199u);
    for (std::size_t i = 1; i < r.partials.size(); ++i) EXPECT_GT(r.partials[i], r.partials[i - 1]);
    EXPECT_LT(r.partial, std::numbers::ln2 - 0.5);
    EXPECT_NEAR(r.partial, std::numbers::ln2 - 0.5, 1e-6);
    EXPECT_LT(std::abs(r.partial - r.target), std::abs(r.partials[48] - r.target));
}

TEST(FigureEight, TripleIntegralReducesToSingle) {
    for (double T : {5.0, 7.0}) {
        const auto r = figure_eight_reduction_check(T, 3);
        EXPECT_GT(r.single, 0.0);
        EXPECT_LT(r.residual, 1e-5 * r.single) << T;
    }
    EXPECT_EQ(figure_eight_reduction_check(3.0).single, 0.0);
}

TEST(SinhSimplex, ClosedFormInTwoVariables) {
    for (double ell : {0.5, 2.0, 6.0}) {
        const double want = ell * std::sinh(0.5 * ell) - 4 * (std::cosh(0.5 * ell) - 1);
        EXPECT_NEAR(sinh_simplex(2, ell), want, 1e-12 * want) << ell;
    }
    // one variable: 2 (cosh(ell/2) - 1)
    EXPECT_NEAR(sinh_simplex(1, 3.0), 2 * (std::cosh(1.5) - 1), 1e-13);
}

TEST(Subsurfaces, LeadingTypeRatioNearOne) {
    auto& st = full_store();
    for (int g : {10, 14})
        for (int n : {2, 4}) {
            const double ell = 1.0;
            const auto r = leading_type_count(g, n, ell, 1, st);
            EXPECT_NEAR(r.ratio, 1.0, 5.0 * n * ell * ell / g) << g << " " << n;
            EXPECT_DOUBLE_EQ(r.multinomial, n * (n - 1) / 2.0);
        }
    EXPECT_THROW(leading_type_count(10, 3, 1.0, 2, st), std::invalid_argument);
    EXPECT_THROW(leading_type_count(10, 2, 0.0, 1, st), std::invalid_argument);
}

TEST(Subsurfaces, ExpectedCountCloseToMainTerm) {
    auto& st = full_store();
    for (int n : {0, 2}) {
        const auto r = expected_subsurface_count(12, n, 1.0, st);
        EXPECT_NEAR(r.engine, r.two_cusp + r.one_cusp + r.no_cusp + r.torus, 1e-15);
        EXPECT_LT(std::abs(r.residual), 10 * r.envelope) << n;
        if (n == 0) { EXPECT_EQ(r.two_cusp, 0.0); }
    }
}

TEST(InclusionExclusion, TruncatedSumsAndBonferroni) {
    for (long k0 = 0; k0 <= 14; ++k0)
        for (long j = 0; j <= 14; ++j) {
            long t = 1;
            for (long k = 1; k <= j; ++k) t += (k % 2 ? -1 : 1) * binom(k0, k);
            const auto r = inclusion_exclusion_identity(k0, j);
            EXPECT_EQ(r.truncated, t);
            EXPECT_EQ(r.indicator, k0 == 0 ? 1 : 0);
            EXPECT_TRUE(r.bonferroni_ok);
            // odd truncations undercount, even ones overcount
            if (r.remainder != 0) { EXPECT_EQ(sgn(r.remainder), j % 2 ? -1 : 1) << k0 << " " << j; }
            if (j >= k0) { EXPECT_EQ(r.remainder, 0); }
        }
    EXPECT_THROW(inclusion_exclusion_identity(-1, 2), std::invalid_argument);
}
