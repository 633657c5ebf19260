#include <cmath>
#include <numbers>

#include "freqlab/error.hpp"
#include "freqlab/solver.hpp"

namespace freqlab {

TimeGrid TimeGrid::make(double T, std::size_t steps) {
    require(std::isfinite(T) && T > 0.0, ErrorCode::ValidationError, "final time must be positive");
    require(steps >= 1, ErrorCode::ValidationError, "time grid needs at least one step");
    return TimeGrid{T, steps};
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double CosineSeries::eval(const Point& xi, double s) const {
    double acc = offset;
    for (const auto& m : modes) {
        const double arg = std::numbers::pi * (m.k[0] * xi[0] + m.k[1] * xi[1]) + m.omega * s + m.phase;
        acc += m.amplitude * std::cos(arg);
    }
    return scale * acc;
}

CoefficientField CoefficientField::zero(std::size_t dim) {
    CoefficientField f;
    f.kind_ = Kind::Zero;
    f.b_.assign(dim, CosineSeries{});
    f.bounds_.assign(dim, AxisBounds{});
    f.finalize(nullptr, nullptr);
    return f;
}

CoefficientField CoefficientField::constant(std::vector<double> b, double c) {
    require(!b.empty() && b.size() <= kMaxDim, ErrorCode::ValidationError, "advection vector needs 1 or 2 entries");
    CoefficientField f;
    f.kind_ = Kind::Constant;
    for (double v : b) {
        require(std::isfinite(v), ErrorCode::ValidationError, "coefficient samples must be finite");
        f.b_.push_back(CosineSeries{v, {}, 1.0});
    }
    require(std::isfinite(c), ErrorCode::ValidationError, "coefficient samples must be finite");
    f.c_ = CosineSeries{c, {}, 1.0};
    f.bounds_.assign(b.size(), AxisBounds{});
    f.finalize(nullptr, nullptr);
    return f;
}

namespace {

CosineSeries random_series(std::mt19937_64& gen, std::size_t dim, int modes) {
    CosineSeries s;
    s.offset = uniform(gen, -1.0, 1.0);
    for (int j = 0; j < modes; ++j) {
        CosineSeries::Mode m;
        for (std::size_t a = 0; a < dim; ++a) m.k[a] = static_cast<int>(gen() % 4);
        m.omega = std::numbers::pi * static_cast<double>(gen() % 3);
        m.phase = uniform(gen, 0.0, 2.0 * std::numbers::pi);
        m.amplitude = uniform(gen, -1.0, 1.0) / (1.0 + j);
        s.modes.push_back(m);
    }
    return s;
}

template <class Fn>
double sup_over_samples(const Grid& grid, const TimeGrid& time, Fn&& fn) {
    double sup = 0.0;
    for (std::size_t half = 0; half <= 2 * time.steps; ++half) {
        const double t = half == 2 * time.steps ? time.T : 0.5 * static_cast<double>(half) * time.dt();
        for (std::size_t node = 0; node < grid.node_count(); ++node) sup = std::max(sup, std::abs(fn(grid.point(node), t)));
    }
    return sup;
}

}  // namespace

CoefficientField CoefficientField::fourier_random(const Grid& grid, const TimeGrid& time, std::uint64_t seed,
                                                  double amplitude, int modes) {
    require(std::isfinite(amplitude) && amplitude >= 0.0, ErrorCode::ValidationError,
            "coefficient amplitude must be nonnegative");
    CoefficientField f;
    f.kind_ = Kind::FourierRandom;
    f.bounds_ = grid.domain().bounds;
    f.T_ = time.T;
    std::mt19937_64 gen(seed);
    const std::size_t dim = grid.dim();
    for (std::size_t a = 0; a < dim; ++a) f.b_.push_back(random_series(gen, dim, modes));
    f.c_ = random_series(gen, dim, modes);

    auto normalize = [&](CosineSeries& s) {
        s.scale = 1.0;
        const double sup = sup_over_samples(grid, time, [&](const Point& x, double t) {
            return s.eval(f.normalized(x), t / f.T_);
        });
        s.scale = sup > 0.0 ? amplitude / sup : 0.0;
    };
    for (auto& s : f.b_) normalize(s);
    normalize(f.c_);
    f.finalize(&grid, &time);
    return f;
}

Point CoefficientField::normalized(const Point& x) const {
    Point xi{0.0, 0.0};
    for (std::size_t a = 0; a < bounds_.size(); ++a) {
        xi[a] = (x[a] - bounds_[a].lower) / (bounds_[a].upper - bounds_[a].lower);
    }
    return xi;
}

double CoefficientField::b(std::size_t axis, const Point& x, double t) const {
    const auto& s = b_[axis];
    if (s.is_constant()) return s.scale * s.offset;
    return s.eval(normalized(x), t / T_);
}

double CoefficientField::c(const Point& x, double t) const {
    if (c_.is_constant()) return c_.scale * c_.offset;
    return c_.eval(normalized(x), t / T_);
}

bool CoefficientField::has_advection() const {
    for (const auto& s : b_) {
        if (!s.is_constant() || s.offset != 0.0) return true;
    }
    return false;
}

bool CoefficientField::time_dependent() const {
    auto td = [](const CosineSeries& s) {
        for (const auto& m : s.modes) {
            if (m.omega != 0.0) return true;
        }
        return false;
    };
    for (const auto& s : b_) {
        if (td(s)) return true;
    }
    return td(c_);
}

double CoefficientField::sample_sup(const Grid& grid, const TimeGrid& time) const {
    double sup = sup_over_samples(grid, time, [&](const Point& x, double t) { return c(x, t); });
    for (std::size_t a = 0; a < dim(); ++a) {
        sup = std::max(sup, sup_over_samples(grid, time, [&](const Point& x, double t) { return b(a, x, t); }));
    }
    return sup;
}

void CoefficientField::finalize(const Grid* grid, const TimeGrid* time) {
    if (grid == nullptr) {
        // Constant coefficients: sup norms are the absolute values.
        M_ = std::abs(c_.scale * c_.offset);
        double bnorm2 = 0.0;
        for (const auto& s : b_) {
            const double v = s.scale * s.offset;
            M_ = std::max(M_, std::abs(v));
            bnorm2 += v * v;
        }
        M_ineq_ = std::max(std::abs(c_.scale * c_.offset), std::sqrt(bnorm2));
        return;
    }
    M_ = sample_sup(*grid, *time);
    double bsup = 0.0;
    for (std::size_t half = 0; half <= 2 * time->steps; ++half) {
        const double t = half == 2 * time->steps ? time->T : 0.5 * static_cast<double>(half) * time->dt();
        for (std::size_t node = 0; node < grid->node_count(); ++node) {
            double s2 = 0.0;
            for (std::size_t a = 0; a < dim(); ++a) {
                const double v = b(a, grid->point(node), t);
                s2 += v * v;
            }
            bsup = std::max(bsup, std::sqrt(s2));
        }
    }
    M_ineq_ = std::max(bsup, sup_over_samples(*grid, *time, [&](const Point& x, double t) { return c(x, t); }));
}

InitialData InitialData::eigenfunction(int k) {
    InitialData d;
    d.kind = Kind::SineSeries;
    d.sine_coefficients.assign(static_cast<std::size_t>(k), 0.0);
    d.sine_coefficients.back() = 1.0;
    return d;
}

InitialData InitialData::zero() {
    InitialData d;
    d.kind = Kind::Zero;
    return d;
}

Field make_initial_field(const Grid& grid, const InitialData& data) {
    const auto& dom = grid.domain();
    auto xi = [&](const Point& x, std::size_t a) {
        return (x[a] - dom.bounds[a].lower) / dom.extent(a);
    };
    const double pi = std::numbers::pi;
    switch (data.kind) {
        case InitialData::Kind::Zero:
            return grid.zeros();
        case InitialData::Kind::SineSeries:
            return grid.sample_dirichlet([&](const Point& x) {
                double v = 0.0;
                for (std::size_t j = 0; j < data.sine_coefficients.size(); ++j) {
                    v += data.sine_coefficients[j] * std::sin(static_cast<double>(j + 1) * pi * xi(x, 0));
                }
                if (grid.dim() > 1) v *= std::sin(data.transverse_mode * pi * xi(x, 1));
                return data.scale * v;
            });
        case InitialData::Kind::Bump: {
            require(data.bump_width > 0.0, ErrorCode::ValidationError, "bump width must be positive");
            require(dom.contains(data.bump_center) &&
                        dom.distance_to_boundary(data.bump_center) >= data.bump_width,
                    ErrorCode::ValidationError, "bump support must lie inside the domain");
            return grid.sample_dirichlet([&](const Point& x) {
                const double s2 = squared_distance(x, data.bump_center, grid.dim()) / (data.bump_width * data.bump_width);
                return s2 < 1.0 ? data.scale * std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
            });
        }
        case InitialData::Kind::FourierRandom: {
            require(data.random_modes >= 1, ErrorCode::ValidationError, "need at least one random mode");
            std::mt19937_64 gen(data.seed);
            const int K = data.random_modes;
            const int Ky = grid.dim() > 1 ? K : 1;
            std::vector<double> a(static_cast<std::size_t>(K * Ky));
            for (int j = 0; j < Ky; ++j) {
                for (int k = 0; k < K; ++k) {
                    a[static_cast<std::size_t>(j * K + k)] = uniform(gen, -1.0, 1.0) / ((k + 1.0) * (k + 1.0) * (j + 1.0) * (j + 1.0));
                }
            }
            return grid.sample_dirichlet([&](const Point& x) {
                double v = 0.0;
                for (int j = 0; j < Ky; ++j) {
                    const double sy = grid.dim() > 1 ? std::sin((j + 1) * pi * xi(x, 1)) : 1.0;
                    for (int k = 0; k < K; ++k) {
                        v += a[static_cast<std::size_t>(j * K + k)] * std::sin((k + 1) * pi * xi(x, 0)) * sy;
                    }
                }
                return data.scale * v;
            });
        }
    }
    return grid.zeros();
}

}  // namespace freqlab
