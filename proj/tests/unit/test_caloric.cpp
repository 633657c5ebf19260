#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "freqlab/caloric.hpp"
#include "freqlab/error.hpp"
#include "freqlab/solver.hpp"

using namespace freqlab;

TEST(Weight, CenterAtFinalTime) {
    const auto w = CaloricWeight::make(0.2, {0.0, 0.0}, 1.0, 1);
    EXPECT_NEAR(eval_weight(w, {0.0, 0.0}, 1.0), std::sqrt(5.0), 1e-15);
}

TEST(Weight, OffsetPoint) {
    const auto w = CaloricWeight::make(1.0, {0.0, 0.0}, 1.0, 1);
    EXPECT_NEAR(eval_weight(w, {2.0, 0.0}, 1.0), std::exp(-1.0), 1e-15);
    const auto w2 = CaloricWeight::make(1.0, {0.5, 0.5}, 1.0, 2);
    EXPECT_NEAR(eval_weight(w2, {0.5, 0.5}, 0.0), 0.5, 1e-15);
}

TEST(Weight, Gradient) {
    const auto w = CaloricWeight::make(0.25, {0.0, 0.0}, 1.0, 1);
    const Point at_center = eval_weight_gradient(w, {0.0, 0.0}, 0.75);
    EXPECT_EQ(at_center[0], 0.0);
    // tau = 1 - 0.75 + 0.25 = 0.5, x - x0 = 1: gradient = -G.
    const Point g = eval_weight_gradient(w, {1.0, 0.0}, 0.75);
    EXPECT_NEAR(g[0], -eval_weight(w, {1.0, 0.0}, 0.75), 1e-15);
}

TEST(Weight, RejectsBadParameters) {
    EXPECT_THROW(CaloricWeight::make(0.0, {0.0, 0.0}, 1.0, 1), Error);
    EXPECT_THROW(CaloricWeight::make(0.1, {0.0, 0.0}, -1.0, 1), Error);
    const auto w = CaloricWeight::make(0.1, {0.0, 0.0}, 1.0, 1);
    try {
        w.tau(1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TimeOutOfRange);
    }
}

TEST(HeatIdentity, RandomSamples) {
    std::mt19937_64 gen(1);
    for (std::size_t n : {1u, 2u}) {
        const auto w = CaloricWeight::make(0.03, {0.4, 0.6}, 0.2, n);
        for (int s = 0; s < 1000; ++s) {
            const Point x{uniform(gen), uniform(gen)};
            const double t = uniform(gen, 0.0, 0.2);
            const auto r = check_heat_identity(w, x, t);
            EXPECT_LE(std::abs(r.residual), 1e-12 * r.scale);
        }
    }
}

TEST(HeatIdentity, CenterIn2D) {
    const auto w = CaloricWeight::make(0.5, {0.3, 0.3}, 1.0, 2);
    const auto r = check_heat_identity(w, {0.3, 0.3}, 0.5);
    EXPECT_NEAR(r.dt_G, -r.laplacian_G, 1e-12 * std::abs(r.dt_G));
}

TEST(HeatIdentity, FiniteDifferenceOracleSecondOrder) {
    const auto w = CaloricWeight::make(0.05, {0.5, 0.5}, 0.3, 2);
    const Point x{0.62, 0.41};
    const double t = 0.1;
    auto fd = [&](double d) {
        const double dt = (eval_weight(w, x, t + d) - eval_weight(w, x, t - d)) / (2 * d);
        double lap = 0.0;
        for (std::size_t a = 0; a < 2; ++a) {
            Point p = x, m = x;
            p[a] += d;
            m[a] -= d;
            lap += (eval_weight(w, p, t) - 2 * eval_weight(w, x, t) + eval_weight(w, m, t)) / (d * d);
        }
        return std::abs(dt + lap);
    };
    const double r1 = fd(1e-2), r2 = fd(5e-3);
    EXPECT_GE(r1 / r2, 3.4);
    EXPECT_LE(r1 / r2, 4.6);
}
