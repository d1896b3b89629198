#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pathatlas/errors.hpp"
#include "pathatlas/linalg.hpp"

namespace pathatlas {

/// Closed time interval [lo, hi] with lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo, double hi);

    double length() const { return hi - lo; }
    bool contains(double t) const { return lo <= t && t <= hi; }
    bool contains(const Interval& inner) const { return lo <= inner.lo && inner.hi <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Nondecreasing knot sequence t0 <= ... <= tn spanning an interval.
class Partition {
public:
    explicit Partition(std::vector<double> knots);

    Interval interval() const { return {knots_.front(), knots_.back()}; }
    const std::vector<double>& knots() const { return knots_; }
    std::size_t pieces() const { return knots_.size() - 1; }

    /// Same partition with repeated knots collapsed.
    Partition strict() const;

private:
    std::vector<double> knots_;
};

/// Piecewise-constant curve, right-continuous on [lo, hi) and left-continuous at hi.
///
/// Stored in canonical form: adjacent pieces always carry different values, so
/// two curves describe the same function exactly when they compare equal.
class StepCurve {
public:
    /// `breaks` has one more entry than `values`; values[i] holds on [breaks[i], breaks[i+1]).
    StepCurve(std::vector<double> breaks, std::vector<Vec> values);

    static StepCurve constant(const Interval& domain, const Vec& value);
    static StepCurve zero(const Interval& domain, int dim);

    const Interval& domain() const { return domain_; }
    int dim() const { return static_cast<int>(values_.front().size()); }
    std::size_t pieces() const { return values_.size(); }
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<Vec>& values() const { return values_; }

    /// Index of the piece whose half-open interval holds t (the last piece at t = hi).
    std::size_t piece_at(double t) const;
    const Vec& operator()(double t) const { return values_[piece_at(t)]; }
    /// Limit from the left at t in (lo, hi].
    const Vec& left_limit(double t) const;

    double sup_norm() const;
    /// Oriented integral over [a, b] (negated when b < a); both ends must lie in the domain.
    Vec integral(double a, double b) const;

    friend bool operator==(const StepCurve& a, const StepCurve& b);

private:
    Interval domain_;
    std::vector<double> breaks_;
    std::vector<Vec> values_;
};

enum class Regularity { regulated, ck };

/// Curve of order k given by its (k-1)-jet at the left end and a top derivative.
///
/// In regulated mode the k-th derivative is a StepCurve. In C^k mode it is
/// continuous and piecewise linear, stored as its value at the left end plus a
/// StepCurve of slopes. Lower derivatives are exact iterated primitives.
class RegCurve {
public:
    /// Regulated curve of order jet.size().
    RegCurve(std::vector<Vec> jet, StepCurve top);
    /// Order-zero curve.
    RegCurve(StepCurve top);  // NOLINT(google-explicit-constructor)

    /// C^k curve whose k-th derivative interpolates `nodes` linearly between `breaks`.
    static RegCurve with_continuous_top(std::vector<Vec> jet, const std::vector<double>& breaks,
                                        const std::vector<Vec>& nodes);

    /// Curve from its jet and lowest step derivative. With `top_start` the curve is
    /// in C^k mode and `step` holds the slopes of the continuous k-th derivative.
    static RegCurve from_parts(std::vector<Vec> jet, std::optional<Vec> top_start, StepCurve step);

    int order() const { return static_cast<int>(jet_.size()); }
    int dim() const { return step_.dim(); }
    Regularity mode() const { return mode_; }
    const Interval& domain() const { return step_.domain(); }

    /// c(t0), c'(t0), ..., c^(k-1)(t0).
    const std::vector<Vec>& jet() const { return jet_; }
    /// Step-valued k-th derivative; only meaningful in regulated mode.
    const StepCurve& top() const;
    /// Nodes of the continuous k-th derivative at its breakpoints (C^k mode only).
    std::vector<Vec> top_nodes() const;
    /// Lowest derivative that is a step function: order k in regulated mode, k+1 in C^k mode.
    const StepCurve& step_derivative() const { return step_; }
    /// Value of the continuous k-th derivative at the left end (C^k mode only).
    const std::optional<Vec>& top_start() const { return top_start_; }
    int step_order() const { return order() + (mode_ == Regularity::ck ? 1 : 0); }

    /// l-th derivative at t, 0 <= l <= order.
    Vec eval(double t, int l = 0) const;
    Vec operator()(double t) const { return eval(t, 0); }

    /// sup over the domain of the max-norm of the l-th derivative.
    double sup_derivative(int l) const;
    /// max over l <= k of sup_derivative(l).
    double norm(int k) const;
    double norm() const { return norm(order()); }
    /// Smallest and largest value of coordinate `coord` of the l-th derivative.
    std::pair<double, double> derivative_range(int l, int coord) const;

    friend bool operator==(const RegCurve& a, const RegCurve& b);

private:
    // Every derivative below the step level, taken at an anchor time at or
    // before the piece start. Restrictions keep the anchors of the parent so
    // values inside a sub-interval are reproduced bit for bit.
    struct Anchor {
        double time;
        std::vector<Vec> derivs;
    };

    RegCurve(std::vector<Vec> jet, std::optional<Vec> top_start, StepCurve step, Regularity mode,
             std::vector<Anchor> anchors);

    void build_anchors();
    std::vector<double> coefficients(std::size_t piece, int l, int coord) const;
    Vec eval_piece(std::size_t piece, double t, int l) const;
    int levels() const { return step_order(); }

    std::vector<Vec> jet_;
    std::optional<Vec> top_start_;
    StepCurve step_;
    Regularity mode_ = Regularity::regulated;
    std::vector<Anchor> anchors_;

    friend RegCurve restrict_to(const RegCurve& c, const Interval& sub);
};

/// Strictly monotone scalar curve of order >= 1 with a recorded speed bound.
class MonotoneReparametrization {
public:
    /// Throws CertificateError unless the first derivative keeps one sign and stays away from 0.
    explicit MonotoneReparametrization(RegCurve phi);

    const RegCurve& curve() const { return phi_; }
    int sign() const { return sign_; }
    double min_speed() const { return min_speed_; }
    double operator()(double s) const { return phi_.eval(s)(0); }
    /// Time s with phi(s) = value; `value` must lie in the image.
    double preimage(double value) const;

private:
    RegCurve phi_;
    int sign_ = 1;
    double min_speed_ = 0.0;
};

/// Primitive with initial value x0; raises the order by one.
RegCurve primitive(const RegCurve& c, const Vec& x0);

struct DerivativeSplit {
    Vec initial_value;
    RegCurve derivative;
};

/// Inverse of primitive: (c(t0), c').
DerivativeSplit derivative_split(const RegCurve& c);

/// Join curves on adjacent domains; the junction takes the value of the later curve.
StepCurve concat(const StepCurve& first, const StepCurve& second);
StepCurve concat(const std::vector<StepCurve>& parts);

/// Restriction to a sub-interval; the value at the right end is the left limit there.
StepCurve restrict_to(const StepCurve& c, const Interval& sub);
RegCurve restrict_to(const RegCurve& c, const Interval& sub);

StepCurve linear_push(const Mat& a, const StepCurve& c);
RegCurve linear_push(const Mat& a, const RegCurve& c);

/// alpha*x + beta*y on the union of both breakpoint sets.
StepCurve combine(double alpha, const StepCurve& x, double beta, const StepCurve& y);

/// Apply f to every value of a step curve.
StepCurve map_values(const StepCurve& c, const std::function<Vec(const Vec&)>& f);

/// Integral of phi'(r) c(phi(r)) over [s0, s1].
///
/// Exact for piecewise-linear phi: the integrand is itself a step function.
/// For higher-order phi the pieces are separated at preimages of c's breaks,
/// which are located to machine precision.
Vec substituted_integral(const StepCurve& c, const MonotoneReparametrization& phi, double s0, double s1);

/// Finite eps-net of the image. Exact value set for order 0; a uniform
/// parameter grid with spacing eps / sup|c'| otherwise.
std::vector<Vec> image_net(const RegCurve& c, double eps);

/// Staircase within eps of a sampled curve. With a Lipschitz modulus the
/// uniform grid of ceil(modulus * length / eps) cells is certified; without one
/// the grid is refined until sampled oscillation per cell falls below eps,
/// failing with BudgetError after `max_pieces`.
StepCurve step_approximate(const std::function<Vec(double)>& f, const Interval& domain, double eps,
                           std::optional<double> modulus = std::nullopt,
                           std::size_t max_pieces = std::size_t{1} << 20);
StepCurve step_approximate(const StepCurve& c, double eps);

/// c composed with the affine increasing bijection from `target` onto c's domain.
RegCurve reparametrize_affine(const RegCurve& c, const Interval& target);

}  // namespace pathatlas
