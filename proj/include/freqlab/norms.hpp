#pragma once

// Discrete L2, H^1_0 and H^-1 norms built on the same Dirichlet Laplacian as
// the time stepper, the ratio zeta = |u|_2^2 / |u|_{H^-1}^2, the two energy
// identities, and the backward-uniqueness and multiplier audits.

#include <vector>

#include "freqlab/linalg.hpp"
#include "freqlab/mesh.hpp"
#include "freqlab/solver.hpp"

namespace freqlab {

/// sqrt(<fld, (-lap_h)^-1 fld>).
double hminus1_norm(const DirichletLaplacian& laplacian, std::span<const double> fld);
double hminus1_norm(const Grid& grid, std::span<const double> fld);

/// sqrt(<-lap_h u, u>), the gradient norm dual to hminus1_norm.
double h10_norm(const Grid& grid, std::span<const double> fld);

/// Extreme eigenvalues of -lap_h with Dirichlet conditions.
double first_dirichlet_eigenvalue(const Grid& grid);
double max_dirichlet_eigenvalue(const Grid& grid);

struct NormTrace {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<double> h10;
    std::vector<double> hm1;
    std::vector<double> zeta;
};

/// Levels are processed in parallel; each level's reductions run serially so
/// the result does not depend on the thread count.
NormTrace compute_norm_trace(const SolutionTrajectory& traj, const DirichletLaplacian& laplacian);

namespace serial {
NormTrace compute_norm_trace(const SolutionTrajectory& traj, const DirichletLaplacian& laplacian);
}

struct EnergyResiduals {
    double residual1 = 0.0;  ///< 1/2 d|u|^2 + |u|_{H1}^2 = <f,u>
    double residual2 = 0.0;  ///< 1/2 d|u|_{H-1}^2 + |u|^2 = <f,(-lap)^-1 u>
    double f_dot_u = 0.0;
    double l2_squared = 0.0;
};

EnergyResiduals check_energy_identities(const SolutionTrajectory& traj, std::size_t level,
                                        const DirichletLaplacian& laplacian);

/// M > 0: smallest c with zeta(t) <= exp(c M^2 t) zeta(0). M = 0: largest
/// positive increment of zeta between consecutive levels, relative to zeta(0).
double check_zeta_growth(const NormTrace& trace, double M, double T);

struct BackwardEstimate {
    double log_lhs = 0.0;  ///< ln |u(0)|_{H^-1}^2
    double log_rhs = 0.0;  ///< ln of the bound
    double margin = 0.0;   ///< log_rhs - log_lhs
    double exponent = 0.0; ///< 2 exp(c_exp M^2 T) (zeta(0) + c_lin M sqrt(zeta(0))) T
    double relative_slack() const { return exponent > 0.0 ? margin / exponent : 0.0; }
};

BackwardEstimate check_backward_estimate(const NormTrace& trace, double M, double T, double c_exp, double c_lin);

/// |h d_i g|_{H^-1} / (|h|_inf |g|_2).
double check_multiplier_bound(const DirichletLaplacian& laplacian, std::span<const double> h,
                              std::span<const double> g, std::size_t axis);

/// Closed-form constant for the multiplier bound: extent_i + 1/sqrt(mu_1).
double multiplier_reference_bound(const Grid& grid, std::size_t axis);

}  // namespace freqlab
