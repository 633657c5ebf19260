#pragma once

// Uniform tensor-product grids on intervals and rectangles with homogeneous
// Dirichlet data. Nodes are ordered lexicographically with axis 0 fastest.
// Quadrature is the nodal trapezoid rule, so cell measures halve on each
// boundary face the node touches.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace freqlab {

inline constexpr std::size_t kMaxDim = 2;

using Point = std::array<double, kMaxDim>;
using Field = std::vector<double>;

struct AxisBounds {
    double lower = 0.0;
    double upper = 1.0;
};

enum class DomainKind { Interval, Rectangle };

struct Domain {
    DomainKind kind = DomainKind::Interval;
    std::vector<AxisBounds> bounds;

    static Domain interval(double lower, double upper);
    static Domain rectangle(AxisBounds x, AxisBounds y);

    std::size_t dim() const { return bounds.size(); }
    double measure() const;
    double extent(std::size_t axis) const { return bounds[axis].upper - bounds[axis].lower; }
    bool contains(const Point& p) const;
    /// Distance from an interior point to the boundary.
    double distance_to_boundary(const Point& p) const;
    /// Largest squared distance from p to any point of the closed domain.
    double max_squared_distance(const Point& p) const;
};

class Grid {
public:
    const Domain& domain() const { return domain_; }
    std::size_t dim() const { return domain_.dim(); }
    std::size_t points(std::size_t axis) const { return points_[axis]; }
    double spacing(std::size_t axis) const { return spacing_[axis]; }
    std::size_t node_count() const { return cell_measure_.size(); }

    double coord(std::size_t node, std::size_t axis) const { return coords_[node * kMaxDim + axis]; }
    Point point(std::size_t node) const;

    std::size_t index(std::size_t i, std::size_t j = 0) const { return i + points_[0] * j; }
    std::array<std::size_t, kMaxDim> multi_index(std::size_t node) const;

    bool is_boundary(std::size_t node) const { return boundary_slot_[node] >= 0; }
    std::span<const std::size_t> interior_nodes() const { return interior_; }
    std::span<const std::size_t> boundary_nodes() const { return boundary_; }

    /// Position of a boundary node inside boundary_nodes(), or -1 for interior nodes.
    long boundary_slot(std::size_t node) const { return boundary_slot_[node]; }
    const Point& outward_normal(std::size_t slot) const { return normals_[slot]; }
    /// Surface quadrature weight; corners of rectangles carry zero weight.
    double surface_weight(std::size_t slot) const { return surface_weight_[slot]; }

    double cell_measure(std::size_t node) const { return cell_measure_[node]; }
    std::span<const double> cell_measures() const { return cell_measure_; }

    Field zeros() const { return Field(node_count(), 0.0); }

    template <class Fn>
    Field sample(Fn&& fn) const {
        Field out(node_count());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(point(k));
        return out;
    }

    /// Same as sample() but forces boundary entries to zero.
    template <class Fn>
    Field sample_dirichlet(Fn&& fn) const {
        Field out(node_count(), 0.0);
        for (std::size_t k : interior_) out[k] = fn(point(k));
        return out;
    }

private:
    friend Grid build_grid(const Domain& domain, std::span<const std::size_t> points_per_axis);

    Domain domain_;
    std::array<std::size_t, kMaxDim> points_{1, 1};
    std::array<double, kMaxDim> spacing_{0.0, 0.0};
    std::vector<double> coords_;
    std::vector<double> cell_measure_;
    std::vector<long> boundary_slot_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> boundary_;
    std::vector<Point> normals_;
    std::vector<double> surface_weight_;
};

Grid build_grid(const Domain& domain, std::span<const std::size_t> points_per_axis);
Grid build_grid(const Domain& domain, std::initializer_list<std::size_t> points_per_axis);

/// Ball B_r(x0) used for observation, together with m = sup |x - x0|^2 over the domain.
struct ObservationBall {
    Point center{0.0, 0.0};
    double radius = 0.0;
    double m = 0.0;

    bool contains(const Point& p, std::size_t dim) const;
};

ObservationBall make_ball(const Domain& domain, const Point& center, double radius);

double squared_distance(const Point& a, const Point& b, std::size_t dim);

/// Central-difference Dirichlet Laplacian; boundary entries are zero.
Field apply_laplacian(const Grid& grid, std::span<const double> field);

/// Sum of f*g*w*cell_measure over all nodes (w = 1 when empty).
double weighted_inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g,
                              std::span<const double> w = {});

/// Outward normal derivative at each boundary node, indexed by boundary slot.
Field boundary_flux(const Grid& grid, std::span<const double> field);

/// Gradient with central differences at interior positions of each axis and
/// one-sided second-order stencils at the two ends of the axis.
std::vector<Point> gradient(const Grid& grid, std::span<const double> field);

/// Central difference along one axis at interior nodes; zero on boundary nodes.
Field partial_derivative(const Grid& grid, std::span<const double> field, std::size_t axis);

/// Throws BoundaryViolation when any boundary entry exceeds tol in magnitude.
void check_dirichlet(const Grid& grid, std::span<const double> field, double tol = 1e-12);

void check_shape(const Grid& grid, std::span<const double> field);

double l2_norm(const Grid& grid, std::span<const double> field);
double max_abs(std::span<const double> field);

namespace serial {
// Reference kernels kept single-threaded for testing and benchmarking.
Field apply_laplacian(const Grid& grid, std::span<const double> field);
}  // namespace serial

}  // namespace freqlab
