#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "freqlab/error.hpp"
#include "freqlab/linalg.hpp"
#include "freqlab/norms.hpp"
#include "freqlab/solver.hpp"

using namespace freqlab;
using std::numbers::pi;

namespace {

SolutionTrajectory heat(std::size_t points, std::size_t steps, double T, const CoefficientField& coef,
                        int mode = 1) {
    const Grid g = build_grid(Domain::interval(0.0, 1.0), {points});
    const Field u0 = make_initial_field(g, InitialData::eigenfunction(mode));
    return solve_trajectory(g, TimeGrid::make(T, steps), coef, u0);
}

}  // namespace

TEST(Solver, EigenfunctionDecayMatchesContinuum) {
    const auto tr = heat(513, 1000, 0.1, CoefficientField::zero(1));
    const double ratio = weighted_inner_product(tr.grid, tr.terminal(), tr.terminal()) /
                         weighted_inner_product(tr.grid, tr.initial(), tr.initial());
    EXPECT_NEAR(ratio / std::exp(-2.0 * pi * pi * 0.1), 1.0, 1e-3);
}

TEST(Solver, EigenfunctionFollowsAmplificationFactor) {
    const std::size_t n = 33, steps = 40;
    const auto tr = heat(n, steps, 0.05, CoefficientField::zero(1));
    const double h = tr.grid.spacing(0), dt = tr.time.dt();
    const double mu = (2.0 / (h * h)) * (1.0 - std::cos(pi * h));
    const double g = (1.0 - 0.5 * dt * mu) / (1.0 + 0.5 * dt * mu);
    for (std::size_t k : tr.grid.interior_nodes()) {
        EXPECT_NEAR(tr.terminal()[k], std::pow(g, steps) * tr.initial()[k], 1e-13);
    }
}

TEST(Solver, ZeroDataStaysZero) {
    const Grid g = build_grid(Domain::rectangle({0, 1}, {0, 1}), {9, 9});
    const auto coef = CoefficientField::constant({1.0, -1.0}, 0.5);
    const auto tr = solve_trajectory(g, TimeGrid::make(0.1, 10), coef, g.zeros());
    for (const auto& u : tr.u)
        for (double v : u) EXPECT_EQ(v, 0.0);
}

TEST(Solver, ConstantPotentialIsIntegratingFactor) {
    const double kappa = 2.0, T = 0.1;
    const auto base = heat(129, 400, T, CoefficientField::zero(1));
    const auto grown = heat(129, 400, T, CoefficientField::constant({0.0}, -kappa));
    // CN treats c exactly like a shift of the spectrum; compare with e^{kappa t}
    // up to the scheme's O(dt^2) error.
    for (std::size_t lvl : {100u, 400u}) {
        const double t = base.time.time(lvl);
        for (std::size_t k : base.grid.interior_nodes()) {
            const double want = std::exp(kappa * t) * base.u[lvl][k];
            EXPECT_NEAR(grown.u[lvl][k], want, 1e-6 * std::abs(want) + 1e-14);
        }
    }
}

TEST(Coefficients, FourierRandomHitsAmplitudeExactly) {
    const Grid g = build_grid(Domain::rectangle({0, 1}, {0, 1}), {17, 17});
    const TimeGrid t = TimeGrid::make(0.1, 20);
    const auto c = CoefficientField::fourier_random(g, t, 7, 2.5, 3);
    EXPECT_DOUBLE_EQ(c.M(), 2.5);
    EXPECT_DOUBLE_EQ(c.sample_sup(g, t), 2.5);
    EXPECT_GE(c.inequality_constant(), c.M());
    const auto again = CoefficientField::fourier_random(g, t, 7, 2.5, 3);
    EXPECT_EQ(again.b(0, {0.3, 0.7}, 0.05), c.b(0, {0.3, 0.7}, 0.05));
}

TEST(PdeResidual, ZeroTrajectoryHasNoSlack) {
    const Grid g = build_grid(Domain::interval(0.0, 1.0), {17});
    const auto tr = solve_trajectory(g, TimeGrid::make(0.1, 8), CoefficientField::zero(1), g.zeros());
    const auto r = pde_residual(tr, 3);
    for (double v : r.f) EXPECT_EQ(v, 0.0);
    for (double v : r.slack) EXPECT_EQ(v, 0.0);
}

TEST(PdeResidual, RandomCoefficientsRespectInequality) {
    const Grid g = build_grid(Domain::interval(0.0, 1.0), {129});
    const TimeGrid t = TimeGrid::make(0.1, 200);
    const auto coef = CoefficientField::fourier_random(g, t, 3, 4.0);
    InitialData d;
    d.kind = InitialData::Kind::FourierRandom;
    d.seed = 5;
    const auto tr = solve_trajectory(g, t, coef, make_initial_field(g, d));
    for (std::size_t k = 0; k < t.steps; ++k) EXPECT_GE(pde_residual(tr, k).worst_margin(), 0.0) << k;
}

TEST(PdeResidual, RectangleConstantDriftRespectsInequality) {
    const Grid g = build_grid(Domain::rectangle({0, 1}, {0, 1}), {33, 33});
    const TimeGrid t = TimeGrid::make(0.05, 50);
    const auto coef = CoefficientField::constant({1.5, -0.5}, 0.75);
    const auto tr = solve_trajectory(g, t, coef, make_initial_field(g, InitialData::eigenfunction(1)));
    for (std::size_t k = 0; k < t.steps; k += 7) EXPECT_GE(pde_residual(tr, k).worst_margin(), 0.0) << k;
}

TEST(SourceTerm, PureHeatConvergesAtSecondOrder) {
    double prev = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        const auto tr = heat(((32u) << l) + 1, 50u << l, 0.05, CoefficientField::zero(1));
        const Field f = source_term(tr, tr.time.steps / 2);
        const double err = l2_norm(tr.grid, f);
        if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 1.9);
        prev = err;
    }
}

TEST(GrowthAssumption, PureHeatRateIsZero) {
    EXPECT_EQ(check_growth_assumption(heat(65, 100, 0.05, CoefficientField::zero(1))), 0.0);
    const Grid g = build_grid(Domain::interval(0.0, 1.0), {17});
    const auto z = solve_trajectory(g, TimeGrid::make(0.1, 8), CoefficientField::zero(1), g.zeros());
    EXPECT_EQ(check_growth_assumption(z), 0.0);
}

TEST(GrowthAssumption, IntegratingFactorRateNearTwo) {
    // c = -kappa with M = kappa; ratio e^{2 kappa (T - t)} against the decay e^{-2 pi^2 (T - t)}.
    const double kappa = 30.0;
    const auto tr = heat(129, 400, 0.05, CoefficientField::constant({0.0}, -kappa));
    const double c = check_growth_assumption(tr);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 2.0 + 1e-3);
}

TEST(Assumption3, ConstantPotentialBoundedBySpectralGap) {
    const double M = 3.0;
    const auto tr = heat(129, 100, 0.05, CoefficientField::constant({0.0}, M), 2);
    const DirichletLaplacian lap(tr.grid);
    const double bound = 1.0 / std::sqrt(first_dirichlet_eigenvalue(tr.grid));
    for (std::size_t k = 1; k < tr.time.steps; k += 9) EXPECT_LE(check_assumption3(tr, k, lap), bound * (1 + 1e-3));
    const Grid g = build_grid(Domain::interval(0.0, 1.0), {17});
    const auto z = solve_trajectory(g, TimeGrid::make(0.1, 8), CoefficientField::zero(1), g.zeros());
    EXPECT_EQ(check_assumption3(z, 3, DirichletLaplacian(g)), 0.0);
}
