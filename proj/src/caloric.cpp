#include "freqlab/caloric.hpp"

#include <cmath>

#include "freqlab/error.hpp"

namespace freqlab {

CaloricWeight CaloricWeight::make(double lambda, const Point& x0, double T, std::size_t n) {
    require(std::isfinite(lambda) && lambda >= 1e-12, ErrorCode::ValidationError, "lambda must be at least 1e-12");
    require(std::isfinite(T) && T > 0.0, ErrorCode::ValidationError, "final time must be positive");
    require(n >= 1 && n <= kMaxDim, ErrorCode::ValidationError, "weight dimension must be 1 or 2");
    return CaloricWeight{lambda, x0, T, n};
}

double CaloricWeight::tau(double t) const {
    require(t >= 0.0 && t <= T, ErrorCode::TimeOutOfRange, "time outside [0, T]");
    return T - t + lambda;
}

double eval_weight(const CaloricWeight& w, const Point& x, double t) {
    const double tau = w.tau(t);
    const double r2 = squared_distance(x, w.x0, w.n);
    return std::pow(tau, -0.5 * static_cast<double>(w.n)) * std::exp(-r2 / (4.0 * tau));
}

Point eval_weight_gradient(const CaloricWeight& w, const Point& x, double t) {
    const double tau = w.tau(t);
    const double G = eval_weight(w, x, t);
    Point g{0.0, 0.0};
    for (std::size_t i = 0; i < w.n; ++i) g[i] = -(x[i] - w.x0[i]) / (2.0 * tau) * G;
    return g;
}

double eval_weight_time_derivative(const CaloricWeight& w, const Point& x, double t) {
    const double tau = w.tau(t);
    const double r2 = squared_distance(x, w.x0, w.n);
    const double G = eval_weight(w, x, t);
    return (0.5 * static_cast<double>(w.n) / tau - r2 / (4.0 * tau * tau)) * G;
}

double eval_weight_hessian(const CaloricWeight& w, const Point& x, double t, std::size_t i, std::size_t j) {
    const double tau = w.tau(t);
    const double G = eval_weight(w, x, t);
    const double di = x[i] - w.x0[i];
    if (i == j) return (-1.0 / (2.0 * tau) + di * di / (4.0 * tau * tau)) * G;
    const double dj = x[j] - w.x0[j];
    return di * dj / (4.0 * tau * tau) * G;
}

HeatIdentityResidual check_heat_identity(const CaloricWeight& w, const Point& x, double t) {
    const double tau = w.tau(t);
    const double G = eval_weight(w, x, t);
    const double r2 = squared_distance(x, w.x0, w.n);
    HeatIdentityResidual out;
    out.dt_G = eval_weight_time_derivative(w, x, t);
    for (std::size_t i = 0; i < w.n; ++i) out.laplacian_G += eval_weight_hessian(w, x, t, i, i);
    out.residual = out.dt_G + out.laplacian_G;
    out.scale = (0.5 * static_cast<double>(w.n) / tau + r2 / (4.0 * tau * tau)) * G;
    return out;
}

Field sample_weight(const Grid& grid, const CaloricWeight& w, double t) {
    return grid.sample([&](const Point& x) { return eval_weight(w, x, t); });
}

}  // namespace freqlab
