#include "freqlab/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "freqlab/error.hpp"

namespace freqlab {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs, double tol) {
    const std::size_t n = diag.size();
    require(lower.size() == n && upper.size() == n && rhs.size() == n, ErrorCode::ShapeMismatch,
            "tridiagonal bands disagree in length");
    std::vector<double> c(n), d(n), x(n);
    double pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = diag[i] - lower[i] * c[i - 1];
        require(std::abs(pivot) > 1e-300 && std::isfinite(pivot), ErrorCode::LinearSolveFailure,
                "vanishing pivot in tridiagonal solve");
        c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / pivot;
    }
    for (std::size_t i = n; i-- > 0;) x[i] = d[i] - (i + 1 < n ? c[i] * x[i + 1] : 0.0);

    double rnorm = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = diag[i] * x[i] - rhs[i];
        if (i > 0) r += lower[i] * x[i - 1];
        if (i + 1 < n) r += upper[i] * x[i + 1];
        rnorm += r * r;
        bnorm += rhs[i] * rhs[i];
    }
    require(std::isfinite(rnorm) && std::sqrt(rnorm) <= tol * std::sqrt(bnorm) + 1e-300,
            ErrorCode::LinearSolveFailure, "tridiagonal residual above tolerance");
    return x;
}

std::vector<long> interior_numbering(const Grid& grid) {
    std::vector<long> num(grid.node_count(), -1);
    long k = 0;
    for (std::size_t node : grid.interior_nodes()) num[node] = k++;
    return num;
}

struct DirichletLaplacian::Impl {
    // 1-D: diagonal, off-diagonal of the SPD tridiagonal matrix.
    std::vector<double> diag, off;
    // 2-D: sparse Cholesky factorization.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool use_ldlt = false;
};

DirichletLaplacian::DirichletLaplacian(const Grid& grid)
    : grid_(std::make_shared<const Grid>(grid)), impl_(std::make_unique<Impl>()) {
    const std::size_t n = grid.interior_nodes().size();
    if (grid.dim() == 1) {
        const double h2 = grid.spacing(0) * grid.spacing(0);
        impl_->diag.assign(n, 2.0 / h2);
        impl_->off.assign(n, -1.0 / h2);
        return;
    }
    const auto num = interior_numbering(grid);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    for (std::size_t node : grid.interior_nodes()) {
        const long row = num[node];
        double d = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double inv_h2 = 1.0 / (grid.spacing(a) * grid.spacing(a));
            const std::size_t s = a == 0 ? 1 : grid.points(0);
            d += 2.0 * inv_h2;
            for (std::size_t nb : {node - s, node + s}) {
                if (num[nb] >= 0) trip.emplace_back(row, num[nb], -inv_h2);
            }
        }
        trip.emplace_back(row, row, d);
    }
    Eigen::SparseMatrix<double> A(static_cast<long>(n), static_cast<long>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(A);
    require(impl_->ldlt.info() == Eigen::Success, ErrorCode::LinearSolveFailure,
            "Dirichlet Laplacian factorization failed");
    impl_->use_ldlt = true;
}

DirichletLaplacian::~DirichletLaplacian() = default;
DirichletLaplacian::DirichletLaplacian(DirichletLaplacian&&) noexcept = default;
DirichletLaplacian& DirichletLaplacian::operator=(DirichletLaplacian&&) noexcept = default;

Field DirichletLaplacian::solve(std::span<const double> rhs) const {
    const Grid& grid = *grid_;
    check_shape(grid, rhs);
    const auto interior = grid.interior_nodes();
    const std::size_t n = interior.size();
    Field out(grid.node_count(), 0.0);
    if (!impl_->use_ldlt) {
        std::vector<double> b(n);
        for (std::size_t k = 0; k < n; ++k) b[k] = rhs[interior[k]];
        const auto x = solve_tridiagonal(impl_->off, impl_->diag, impl_->off, b, 1e-10);
        for (std::size_t k = 0; k < n; ++k) out[interior[k]] = x[k];
        return out;
    }
    Eigen::VectorXd b(static_cast<long>(n));
    for (std::size_t k = 0; k < n; ++k) b[static_cast<long>(k)] = rhs[interior[k]];
    const Eigen::VectorXd x = impl_->ldlt.solve(b);
    require(impl_->ldlt.info() == Eigen::Success, ErrorCode::LinearSolveFailure, "Dirichlet solve failed");
    for (std::size_t k = 0; k < n; ++k) out[interior[k]] = x[static_cast<long>(k)];
    return out;
}

}  // namespace freqlab
