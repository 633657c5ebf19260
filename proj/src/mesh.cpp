#include "freqlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freqlab/error.hpp"

namespace freqlab {

Domain Domain::interval(double lower, double upper) {
    return Domain{DomainKind::Interval, {AxisBounds{lower, upper}}};
}

Domain Domain::rectangle(AxisBounds x, AxisBounds y) {
    return Domain{DomainKind::Rectangle, {x, y}};
}

double Domain::measure() const {
    double v = 1.0;
    for (const auto& b : bounds) v *= b.upper - b.lower;
    return v;
}

bool Domain::contains(const Point& p) const {
    for (std::size_t a = 0; a < dim(); ++a) {
        if (p[a] < bounds[a].lower || p[a] > bounds[a].upper) return false;
    }
    return true;
}

double Domain::distance_to_boundary(const Point& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < dim(); ++a) {
        d = std::min({d, p[a] - bounds[a].lower, bounds[a].upper - p[a]});
    }
    return d;
}

double Domain::max_squared_distance(const Point& p) const {
    // The farthest point of a box is a corner; per axis pick the farther end.
    double s = 0.0;
    for (std::size_t a = 0; a < dim(); ++a) {
        const double d = std::max(std::abs(p[a] - bounds[a].lower), std::abs(bounds[a].upper - p[a]));
        s += d * d;
    }
    return s;
}

Point Grid::point(std::size_t node) const {
    Point p{0.0, 0.0};
    for (std::size_t a = 0; a < dim(); ++a) p[a] = coords_[node * kMaxDim + a];
    return p;
}

std::array<std::size_t, kMaxDim> Grid::multi_index(std::size_t node) const {
    return {node % points_[0], node / points_[0]};
}

Grid build_grid(const Domain& domain, std::span<const std::size_t> points_per_axis) {
    const std::size_t dim = domain.dim();
    require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidDomain, "domain must be 1-D or 2-D");
    require((domain.kind == DomainKind::Interval) == (dim == 1), ErrorCode::InvalidDomain,
            "domain kind does not match the number of axes");
    require(points_per_axis.size() == dim, ErrorCode::InvalidDomain,
            "points_per_axis must list one count per axis");
    for (std::size_t a = 0; a < dim; ++a) {
        const auto& b = domain.bounds[a];
        require(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower < b.upper,
                ErrorCode::InvalidDomain, "axis " + std::to_string(a) + " has degenerate bounds");
        require(points_per_axis[a] >= 3, ErrorCode::TooCoarse,
                "axis " + std::to_string(a) + " needs at least 3 points");
    }

    Grid g;
    g.domain_ = domain;
    for (std::size_t a = 0; a < dim; ++a) {
        g.points_[a] = points_per_axis[a];
        g.spacing_[a] = domain.extent(a) / static_cast<double>(points_per_axis[a] - 1);
    }
    const std::size_t n = g.points_[0] * g.points_[1];
    g.coords_.assign(n * kMaxDim, 0.0);
    g.cell_measure_.assign(n, 0.0);
    g.boundary_slot_.assign(n, -1);

    for (std::size_t node = 0; node < n; ++node) {
        const auto idx = g.multi_index(node);
        double measure = 1.0;
        Point normal{0.0, 0.0};
        int faces = 0;
        for (std::size_t a = 0; a < dim; ++a) {
            const std::size_t i = idx[a];
            const std::size_t last = g.points_[a] - 1;
            // Pin the far end exactly to the bound.
            g.coords_[node * kMaxDim + a] =
                i == last ? domain.bounds[a].upper : domain.bounds[a].lower + static_cast<double>(i) * g.spacing_[a];
            double w = g.spacing_[a];
            if (i == 0 || i == last) {
                w *= 0.5;
                normal[a] = i == 0 ? -1.0 : 1.0;
                ++faces;
            }
            measure *= w;
        }
        g.cell_measure_[node] = measure;
        if (faces == 0) {
            g.interior_.push_back(node);
            continue;
        }
        g.boundary_slot_[node] = static_cast<long>(g.boundary_.size());
        g.boundary_.push_back(node);
        double len = 0.0;
        for (double c : normal) len += c * c;
        len = std::sqrt(len);
        for (double& c : normal) c /= len;
        g.normals_.push_back(normal);

        double sw = 1.0;
        if (faces > 1) {
            sw = 0.0;
        } else {
            for (std::size_t a = 0; a < dim; ++a) {
                if (normal[a] == 0.0) sw *= g.spacing_[a];
            }
        }
        g.surface_weight_.push_back(sw);
    }
    return g;
}

Grid build_grid(const Domain& domain, std::initializer_list<std::size_t> points_per_axis) {
    const std::vector<std::size_t> pts(points_per_axis);
    return build_grid(domain, std::span<const std::size_t>(pts));
}

bool ObservationBall::contains(const Point& p, std::size_t dim) const {
    return squared_distance(p, center, dim) < radius * radius;
}

ObservationBall make_ball(const Domain& domain, const Point& center, double radius) {
    require(radius > 0.0, ErrorCode::InvalidGeometry, "observation radius must be positive");
    require(domain.contains(center), ErrorCode::InvalidGeometry, "observation ball not inside domain");
    require(radius <= domain.distance_to_boundary(center) * (1.0 + 1e-12), ErrorCode::InvalidGeometry,
            "observation ball not inside domain");
    return ObservationBall{center, radius, domain.max_squared_distance(center)};
}

double squared_distance(const Point& a, const Point& b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

void check_shape(const Grid& grid, std::span<const double> field) {
    require(field.size() == grid.node_count(), ErrorCode::ShapeMismatch,
            "field has " + std::to_string(field.size()) + " entries, grid has " +
                std::to_string(grid.node_count()) + " nodes");
}

void check_dirichlet(const Grid& grid, std::span<const double> field, double tol) {
    check_shape(grid, field);
    for (std::size_t node : grid.boundary_nodes()) {
        require(std::abs(field[node]) <= tol, ErrorCode::BoundaryViolation,
                "field is nonzero at boundary node " + std::to_string(node));
    }
}

namespace {

inline std::size_t stride(const Grid& grid, std::size_t axis) { return axis == 0 ? 1 : grid.points(0); }

inline double laplacian_at(const Grid& grid, std::span<const double> u, std::size_t node) {
    double acc = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const std::size_t s = stride(grid, a);
        const double h = grid.spacing(a);
        acc += (u[node + s] - 2.0 * u[node] + u[node - s]) / (h * h);
    }
    return acc;
}

inline double axis_derivative(const Grid& grid, std::span<const double> u, std::size_t node, std::size_t axis) {
    const std::size_t i = grid.multi_index(node)[axis];
    const std::size_t last = grid.points(axis) - 1;
    const std::size_t s = stride(grid, axis);
    const double h = grid.spacing(axis);
    if (i == 0) return (-3.0 * u[node] + 4.0 * u[node + s] - u[node + 2 * s]) / (2.0 * h);
    if (i == last) return (3.0 * u[node] - 4.0 * u[node - s] + u[node - 2 * s]) / (2.0 * h);
    return (u[node + s] - u[node - s]) / (2.0 * h);
}

}  // namespace

Field apply_laplacian(const Grid& grid, std::span<const double> field) {
    check_dirichlet(grid, field);
    Field out(grid.node_count(), 0.0);
    const auto interior = grid.interior_nodes();
    const long count = static_cast<long>(interior.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        const std::size_t node = interior[static_cast<std::size_t>(k)];
        out[node] = laplacian_at(grid, field, node);
    }
    return out;
}

namespace serial {

Field apply_laplacian(const Grid& grid, std::span<const double> field) {
    check_dirichlet(grid, field);
    Field out(grid.node_count(), 0.0);
    for (std::size_t node : grid.interior_nodes()) out[node] = laplacian_at(grid, field, node);
    return out;
}

}  // namespace serial

double weighted_inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g,
                              std::span<const double> w) {
    check_shape(grid, f);
    check_shape(grid, g);
    if (!w.empty()) check_shape(grid, w);
    const auto cm = grid.cell_measures();
    double acc = 0.0;
    if (w.empty()) {
        for (std::size_t k = 0; k < cm.size(); ++k) acc += f[k] * g[k] * cm[k];
    } else {
        for (std::size_t k = 0; k < cm.size(); ++k) acc += f[k] * g[k] * w[k] * cm[k];
    }
    return acc;
}

Field boundary_flux(const Grid& grid, std::span<const double> field) {
    check_dirichlet(grid, field);
    const auto bnodes = grid.boundary_nodes();
    Field flux(bnodes.size(), 0.0);
    for (std::size_t slot = 0; slot < bnodes.size(); ++slot) {
        const Point& nu = grid.outward_normal(slot);
        double d = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            if (nu[a] != 0.0) d += nu[a] * axis_derivative(grid, field, bnodes[slot], a);
        }
        flux[slot] = d;
    }
    return flux;
}

std::vector<Point> gradient(const Grid& grid, std::span<const double> field) {
    check_shape(grid, field);
    std::vector<Point> out(grid.node_count(), Point{0.0, 0.0});
    for (std::size_t node = 0; node < out.size(); ++node) {
        for (std::size_t a = 0; a < grid.dim(); ++a) out[node][a] = axis_derivative(grid, field, node, a);
    }
    return out;
}

Field partial_derivative(const Grid& grid, std::span<const double> field, std::size_t axis) {
    check_shape(grid, field);
    require(axis < grid.dim(), ErrorCode::IndexOutOfRange, "axis out of range");
    Field out(grid.node_count(), 0.0);
    const std::size_t s = stride(grid, axis);
    const double h = grid.spacing(axis);
    for (std::size_t node : grid.interior_nodes()) out[node] = (field[node + s] - field[node - s]) / (2.0 * h);
    return out;
}

double l2_norm(const Grid& grid, std::span<const double> field) {
    return std::sqrt(weighted_inner_product(grid, field, field));
}

double max_abs(std::span<const double> field) {
    double m = 0.0;
    for (double v : field) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace freqlab
