#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "pathatlas/linalg.hpp"
#include "pathatlas/regulated.hpp"

namespace pathatlas {

/// Smooth map between coordinate spaces, defined on an open set carrying a margin function.
///
/// Only `value` is mandatory. Without an analytic jacobian, central differences
/// with step 1e-5 * (1 + |x|) are used (second-order accurate). Bounds that are
/// not supplied analytically are estimated from a fixed sample of the ball and
/// inflated by a factor 2.
struct SmoothMap {
    int dim_in = 0;
    int dim_out = 0;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> analytic_jacobian;
    std::function<bool(const Vec&)> domain;
    /// Radius of a max-norm ball around x still inside the domain (0 outside).
    std::function<double(const Vec&)> domain_margin;
    /// Bound on the second derivative (as a bilinear map, max norms) over a ball.
    std::function<double(const Vec& center, double radius)> second_derivative_bound;

    Vec operator()(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    Mat finite_difference_jacobian(const Vec& x) const;
    bool contains(const Vec& x) const;
    double margin(const Vec& x) const;

    /// Bound on |f'| (operator norm) over the ball B(center, radius).
    double lipschitz_bound(const Vec& center, double radius) const;
    /// Bound on |f''| over the ball; exactly 0 for maps declared affine.
    double curvature_bound(const Vec& center, double radius) const;

    static SmoothMap identity(int dim);
    static SmoothMap affine(const Mat& a, const Vec& b);

    static double difference_step(const Vec& x) { return 1e-5 * (1.0 + max_norm(x)); }
};

/// Deterministic sample of the max-norm ball: center, axis points, corners and a Halton set.
std::vector<Vec> ball_sample(const Vec& center, double radius, int extra_points = 32);

/// Records or replays the number of cells used per top-derivative piece, so that
/// a composition can be re-evaluated on exactly the same grid.
struct CellPlan {
    std::vector<std::size_t> cells;
    std::size_t cursor = 0;
    bool replay = false;

    void rewind() {
        cursor = 0;
        replay = true;
    }
};

/// f composed with c.
///
/// Order 0: f is applied to every value, exactly. Order 1: the jet is f(c(t0))
/// and each piece of the top derivative is replaced by secant slopes on a grid
/// fine enough that the sup distance to f'(c) c' is at most tol, certified by
/// the curvature bound of f on balls covering the image. Affine pieces are
/// carried exactly. Throws DomainError when the image leaves dom(f) and
/// BudgetError when more than `max_cells` cells would be needed.
RegCurve compose_smooth(const SmoothMap& f, const RegCurve& c, double tol, CellPlan* plan = nullptr,
                        std::size_t max_cells = std::size_t{1} << 23);

}  // namespace pathatlas
