#pragma once

// Explicit constants of the interpolation argument (lambda*, C', gamma) and the
// global-from-local estimates checked against fitted generic constants.

#include <functional>
#include <limits>
#include <vector>

#include "freqlab/frequency.hpp"
#include "freqlab/mesh.hpp"
#include "freqlab/solver.hpp"

namespace freqlab {

struct UCConstants {
    double m = 0.0;
    double r = 0.0;
    double lambda_star = 0.0;
    double C_prime = 0.0;
    double gamma = 0.0;
    KTConstant KT;
    double M = 0.0;
    double T = 0.0;
    /// 8 e^{M^2T} lambda* (lambda*/T + 1) K_T / r^2; equals 1/2 by construction.
    double backsubstitution = 0.0;
};

/// 8 e^{M^2T} lambda (lambda/T + 1) K_T / r^2.
double ball_prefactor_term(double lambda, double r, double M, double T, double KT);

UCConstants compute_constants(double m, double r, double M, double T, const KTConstant& KT);

struct UCReport {
    double lhs = 0.0;      ///< |u(T)|^2 over the domain (Theorem 1.3: |u(0)|^2)
    double global0 = 0.0;  ///< |u0|^2 over the domain
    double obs = 0.0;      ///< |u(T)|^2 over the observation ball
    double gamma = 0.0;
    double exponent_shape = 0.0;  ///< S in C exp(C S) (or its Theorem-1.3 analogue)
    double printed_shape = 0.0;   ///< shape as printed in the theorem statement
    double fitted_C = 0.0;        ///< minimal closing constant for exponent_shape
    double fitted_C_printed = 0.0;
    /// ln(bound with reference_C) - ln(lhs); NaN without a reference.
    double log_margin = std::numeric_limits<double>::quiet_NaN();
    bool trivial = false;              ///< u == 0, inequality reads 0 <= 0
    bool vanishing_candidate = false;  ///< obs underflows while lhs does not
};

struct ObservedMasses {
    double global0 = 0.0;
    double terminal = 0.0;
    double obs = 0.0;
};

ObservedMasses observed_masses(const Grid& grid, std::span<const double> u0, std::span<const double> uT,
                               const ObservationBall& ball);

/// Smallest C > 0 with ln C + C * S >= q (S >= 0).
double closing_constant(double q, double S);

UCReport verify_theorem_1_1(const ObservedMasses& masses, const ObservationBall& ball, const UCConstants& constants,
                            double reference_C = std::numeric_limits<double>::quiet_NaN());
UCReport verify_theorem_1_1(const SolutionTrajectory& traj, const ObservationBall& ball, const UCConstants& constants,
                            double reference_C = std::numeric_limits<double>::quiet_NaN());

UCReport verify_theorem_1_3(const ObservedMasses& masses, const UCConstants& constants, double zeta0,
                            double reference_C = std::numeric_limits<double>::quiet_NaN());
UCReport verify_theorem_1_3(const SolutionTrajectory& traj, const ObservationBall& ball, const UCConstants& constants,
                            double zeta0, double reference_C = std::numeric_limits<double>::quiet_NaN());

struct GammaFit {
    double raw_slope = 0.0;  ///< slope of ln(obs) against ln(lhs)
    double gamma_hat = 0.0;  ///< slope of ln(lhs/global0) against ln(obs/global0)
    double formula_gamma = 0.0;
    bool degenerate = false;  ///< normalized data have no spread; gamma_hat falls back to raw_slope
};

GammaFit empirical_gamma_fit(const std::vector<UCReport>& family);

/// max/min of positive values.
double refinement_spread(const std::vector<double>& values);

}  // namespace freqlab
