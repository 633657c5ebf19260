#pragma once

// Backward Gaussian weight
//     G(x,t) = (T - t + lambda)^(-n/2) exp(-|x - x0|^2 / (4 (T - t + lambda)))
// and its closed-form derivatives.

#include <cstddef>

#include "freqlab/mesh.hpp"

namespace freqlab {

struct CaloricWeight {
    double lambda = 1.0;
    Point x0{0.0, 0.0};
    double T = 1.0;
    std::size_t n = 1;

    /// Validates lambda >= 1e-12, T > 0 and 1 <= n <= kMaxDim.
    static CaloricWeight make(double lambda, const Point& x0, double T, std::size_t n);

    /// T - t + lambda; throws TimeOutOfRange outside [0, T].
    double tau(double t) const;
};

double eval_weight(const CaloricWeight& w, const Point& x, double t);
Point eval_weight_gradient(const CaloricWeight& w, const Point& x, double t);
double eval_weight_time_derivative(const CaloricWeight& w, const Point& x, double t);
/// Second derivative d_i d_j G.
double eval_weight_hessian(const CaloricWeight& w, const Point& x, double t, std::size_t i, std::size_t j);

struct HeatIdentityResidual {
    double dt_G = 0.0;
    double laplacian_G = 0.0;
    double residual = 0.0;
    /// Sum of magnitudes of the signed pieces entering dt_G and laplacian_G.
    double scale = 0.0;
};

/// dt G + lap G assembled from the closed-form time derivative and the
/// diagonal second derivatives.
HeatIdentityResidual check_heat_identity(const CaloricWeight& w, const Point& x, double t);

/// Weight sampled at every grid node at time t.
Field sample_weight(const Grid& grid, const CaloricWeight& w, double t);

}  // namespace freqlab
