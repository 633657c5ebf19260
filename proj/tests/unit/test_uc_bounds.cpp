#include <gtest/gtest.h>

#include <cmath>

#include "freqlab/error.hpp"
#include "freqlab/uc_bounds.hpp"

using namespace freqlab;

namespace {

KTConstant kt_with_value(double v) {
    KTConstant k;
    k.value = v;
    return k;
}

}  // namespace

TEST(Constants, LambdaStarAndBacksubstitution) {
    const auto c = compute_constants(1.0, 0.1, 0.0, 1.0, kt_with_value(10.0));
    // The naive root loses digits to cancellation; compare relatively.
    EXPECT_NEAR(c.lambda_star / (0.5 * (-1.0 + std::sqrt(1.0 + 0.01 / 40.0))), 1.0, 1e-11);
    EXPECT_NEAR(c.lambda_star, 6.2496e-5, 1e-8);
    EXPECT_NEAR(c.backsubstitution, 0.5, 1e-10);
    EXPECT_NEAR(ball_prefactor_term(c.lambda_star, 0.1, 0.0, 1.0, 10.0), 0.5, 1e-10);
}

TEST(Constants, CPrimeAndGamma) {
    const auto c = compute_constants(1.0, 0.1, 0.0, 1.0, kt_with_value(3.0));
    EXPECT_NEAR(c.C_prime, 16.4, 1e-12);
    EXPECT_NEAR(c.gamma, 0.01 / 16.41, 1e-15);
}

TEST(Constants, GammaDecreasesWithM) {
    double prev = 1.0;
    for (double M : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const auto c = compute_constants(1.0, 0.1, M, 1.0, kt_with_value(3.0));
        EXPECT_LT(c.gamma, prev);
        prev = c.gamma;
    }
}

TEST(Constants, TinyLambdaStarStable) {
    const auto c = compute_constants(1.0, 1e-4, 0.0, 1.0, kt_with_value(1e3));
    EXPECT_GT(c.lambda_star, 0.0);
    EXPECT_NEAR(c.backsubstitution, 0.5, 1e-10);
}

TEST(ClosingConstant, SolvesEquation) {
    for (double q : {-3.0, 0.0, 2.0, 40.0}) {
        for (double S : {0.0, 0.1, 5.0}) {
            const double C = closing_constant(q, S);
            EXPECT_NEAR(std::log(C) + C * S, q, 1e-10 * std::max(1.0, std::abs(q)));
        }
    }
}

TEST(Theorem11, TrivialAndVanishing) {
    const auto c = compute_constants(0.25, 0.1, 0.0, 0.05, kt_with_value(5.0));
    const ObservationBall ball = make_ball(Domain::interval(0, 1), {0.5, 0.0}, 0.1);
    const auto z = verify_theorem_1_1(ObservedMasses{0.0, 0.0, 0.0}, ball, c);
    EXPECT_TRUE(z.trivial);
    const auto v = verify_theorem_1_1(ObservedMasses{1.0, 0.5, 0.0}, ball, c);
    EXPECT_TRUE(v.vanishing_candidate);
    EXPECT_TRUE(std::isinf(v.fitted_C));
}

TEST(Theorem11, ReferenceMarginMatchesFit) {
    const auto c = compute_constants(0.25, 0.1, 1.0, 0.05, kt_with_value(5.0));
    const ObservationBall ball = make_ball(Domain::interval(0, 1), {0.5, 0.0}, 0.1);
    const ObservedMasses m{1.0, 0.3, 1e-4};
    const auto rep = verify_theorem_1_1(m, ball, c);
    EXPECT_NEAR(verify_theorem_1_1(m, ball, c, rep.fitted_C).log_margin, 0.0, 1e-9);
    EXPECT_GT(verify_theorem_1_1(m, ball, c, 2 * rep.fitted_C).log_margin, 0.0);
    EXPECT_LT(verify_theorem_1_1(m, ball, c, 0.5 * rep.fitted_C).log_margin, 0.0);
}

TEST(Theorem11, ScaleInvariant) {
    const auto c = compute_constants(0.25, 0.1, 0.5, 0.05, kt_with_value(5.0));
    const ObservationBall ball = make_ball(Domain::interval(0, 1), {0.5, 0.0}, 0.1);
    const ObservedMasses m{1.0, 0.3, 1e-4};
    const double a2 = 64.0;
    const auto r1 = verify_theorem_1_1(m, ball, c);
    const auto r2 = verify_theorem_1_1(ObservedMasses{a2 * m.global0, a2 * m.terminal, a2 * m.obs}, ball, c);
    EXPECT_NEAR(r1.fitted_C, r2.fitted_C, 1e-12 * r1.fitted_C);
}

TEST(Theorem13, RequiresNonzeroData) {
    const auto c = compute_constants(0.25, 0.1, 0.0, 0.05, kt_with_value(5.0));
    try {
        verify_theorem_1_3(ObservedMasses{0.0, 0.0, 0.0}, c, 10.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroInitialData);
    }
    const auto rep = verify_theorem_1_3(ObservedMasses{1.0, 0.3, 1e-3}, c, 10.0);
    EXPECT_TRUE(std::isfinite(rep.fitted_C));
    EXPECT_GT(rep.fitted_C, 0.0);
}

TEST(GammaFit, RescaledCopiesGiveUnitSlope) {
    std::vector<UCReport> fam;
    for (double a : {0.1, 1.0, 3.0, 10.0, 100.0}) {
        UCReport r;
        r.lhs = a * 0.3;
        r.global0 = a;
        r.obs = a * 1e-3;
        fam.push_back(r);
    }
    const auto fit = empirical_gamma_fit(fam);
    EXPECT_NEAR(fit.raw_slope, 1.0, 1e-12);
    EXPECT_TRUE(fit.degenerate);
    fam.pop_back();
    EXPECT_THROW(empirical_gamma_fit(fam), Error);
}

TEST(Spread, MaxOverMin) {
    EXPECT_DOUBLE_EQ(refinement_spread({2.0, 4.0, 3.0}), 2.0);
    EXPECT_THROW(refinement_spread({}), Error);
}
