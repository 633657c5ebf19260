#pragma once

// Weighted mass H, weighted Dirichlet energy D, frequency N = 2D/H, the
// boundary term theta, the rescaled quantity Phi = (T-t+lambda) e^{-c0 M^2 t} N,
// and the lemma-level audits built on them.

#include <vector>

#include "freqlab/caloric.hpp"
#include "freqlab/mesh.hpp"
#include "freqlab/solver.hpp"

namespace freqlab {

inline constexpr double kDegenerateH = 1e-300;

struct LevelFrequency {
    double H = 0.0;
    double D = 0.0;
    double theta = 0.0;
    /// -sum (d_nu u)^2 d_nu G over the boundary.
    double theta_reduced = 0.0;
    /// Sum of the magnitudes of all boundary contributions to theta.
    double theta_scale = 0.0;
};

/// H, D and theta of one field against the weight frozen at time t.
LevelFrequency frequency_at(const Grid& grid, std::span<const double> u, const CaloricWeight& w, double t);

struct FrequencyTrace {
    CaloricWeight weight;
    double M = 0.0;
    double rate = 1.0;
    std::vector<double> times;
    std::vector<double> H;
    std::vector<double> D;
    std::vector<double> N;
    std::vector<double> theta;
    std::vector<double> theta_reduced;
    std::vector<double> theta_scale;
    std::vector<double> Phi;
};

/// Levels run in parallel; each level's sums are serial. Throws DegenerateH
/// when H < 1e-300 at any level.
FrequencyTrace compute_trace(const SolutionTrajectory& traj, const CaloricWeight& w, double M, double rate = 1.0);

namespace serial {
FrequencyTrace compute_trace(const SolutionTrajectory& traj, const CaloricWeight& w, double M, double rate = 1.0);
}

struct DHIdentity {
    double dH_dt = 0.0;
    double minus_2D = 0.0;
    double source = 0.0;  ///< 2 <u f, G>
    double residual = 0.0;
};

/// Relative residual of dH/dt = -2D + 2<u (u_t - lap u), G> at an interior level.
DHIdentity check_dH_identity(const SolutionTrajectory& traj, const CaloricWeight& w, std::size_t level);

struct MonotonicityFit {
    double rate = 1.0;
    /// Smallest C >= 0 with Phi(t_{k+1}) - Phi(t_k) <= C M^2 (T + lambda) dt_k.
    /// For M = 0 it is the largest positive increment of (T-t+lambda) N.
    double constant = 0.0;
    double max_increment = 0.0;
    double relative_increment = 0.0;  ///< max_increment / |Phi(0)|
};

MonotonicityFit fit_monotonicity_constant(const FrequencyTrace& trace, double M, double lambda, double T);

/// Same trace re-weighted with another integrating-factor rate.
std::vector<double> rescaled_frequency(const FrequencyTrace& trace, double rate);

struct KTConstant {
    double ratio_term = 0.0;     ///< 4 ln(|u0|^2 / |u(T)|^2)
    double geometry_term = 0.0;  ///< 2m/T
    double coeff_terms = 0.0;    ///< c1 M^2 T^2 + c2 M T
    double dim_term = 0.0;       ///< n/2
    double c1 = 0.0;
    double c2 = 0.0;
    double value = 0.0;
};

KTConstant compute_KT(const SolutionTrajectory& traj, double m, double M, double T, double c1, double c2);
KTConstant compute_KT(double initial_mass, double terminal_mass, std::size_t n, double m, double M, double T,
                      double c1, double c2);

/// H and D of the terminal field at weight parameter lambda (t = T).
LevelFrequency terminal_frequency(const Grid& grid, std::span<const double> uT, const CaloricWeight& w);

/// (lambda/T + 1) K_T - lambda e^{-M^2 T} N(T) - n/2.
double check_terminal_frequency_bound(double N_T, const KTConstant& KT, double lambda, double T, double M,
                                      std::size_t n);
double check_terminal_frequency_bound(const FrequencyTrace& trace, const KTConstant& KT, double lambda, double T,
                                      double M);

struct HardyResult {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of  int |x-x0|^2/(8 lambda) f^2 e  <=  2 lambda int |grad f|^2 e + n/2 int f^2 e,
/// e = exp(-|x-x0|^2 / (4 lambda)).
HardyResult check_hardy(const Grid& grid, std::span<const double> fld, double lambda, const Point& x0);

struct BallEstimate {
    double prefactor = 0.0;  ///< 1 - 8 e^{M^2T} lambda (lambda/T + 1) K_T / r^2
    double factor = 0.0;     ///< 8 e^{M^2T} lambda (lambda/T + 1) K_T
    double moment = 0.0;     ///< int |x-x0|^2 u(T)^2 e
    double ball_mass = 0.0;  ///< int_{B_r} u(T)^2 e
    double lhs = 0.0;
    double rhs = 0.0;
    bool applicable = false;
};

BallEstimate check_ball_estimate(const Grid& grid, std::span<const double> uT, const Point& x0, const KTConstant& KT,
                                 double r, double lambda, double M, double T);

}  // namespace freqlab
