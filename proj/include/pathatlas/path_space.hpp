#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pathatlas/atlas.hpp"
#include "pathatlas/regulated.hpp"
#include "pathatlas/smooth_map.hpp"

namespace pathatlas {

/// Strict partition 0 = tau_0 < ... < tau_n = 1 with one chart per piece.
struct PathChartSystem {
    std::vector<double> tau;
    std::vector<int> charts;

    std::size_t pieces() const { return charts.size(); }
    Interval piece(std::size_t i) const { return {tau[i], tau[i + 1]}; }
    /// Piece i with tau_i <= t < tau_{i+1}; the last piece at t = 1.
    std::size_t piece_at(double t) const;
    /// Throws DomainError on malformed partitions or chart ids unknown to `m`.
    void validate(const Manifold& m) const;

    friend bool operator==(const PathChartSystem&, const PathChartSystem&) = default;
};

struct PathRep;

/// Path on a manifold: one order-1 curve per piece in that piece's chart.
///
/// Construction checks that every piece stays in its chart and that consecutive
/// pieces agree, through the chart transition, at the shared knot (within 1e-10).
class ManifoldPath {
public:
    ManifoldPath(std::shared_ptr<const Manifold> m, PathChartSystem system, std::vector<RegCurve> pieces);

    const Manifold& manifold() const { return *manifold_; }
    const std::shared_ptr<const Manifold>& manifold_ptr() const { return manifold_; }
    const PathChartSystem& system() const { return system_; }
    const std::vector<RegCurve>& pieces() const { return pieces_; }

    friend bool operator==(const ManifoldPath& a, const ManifoldPath& b) {
        return a.manifold_ == b.manifold_ && a.system_ == b.system_ && a.pieces_ == b.pieces_;
    }

private:
    struct Trusted {};
    ManifoldPath(Trusted, std::shared_ptr<const Manifold> m, PathChartSystem system, std::vector<RegCurve> pieces);

    std::shared_ptr<const Manifold> manifold_;
    PathChartSystem system_;
    std::vector<RegCurve> pieces_;

    friend ManifoldPath reconstruct(std::shared_ptr<const Manifold>, const PathChartSystem&, const PathRep&);
};

/// Chart-side coordinates of a path: the start point and one derivative step
/// curve per piece; lifts also carry one fiber step curve per piece.
struct PathRep {
    Vec x;
    std::vector<StepCurve> pieces;
    std::vector<StepCurve> fibers;

    bool has_fibers() const { return !fibers.empty(); }
    PathRep base() const { return {x, pieces, {}}; }

    friend bool operator==(const PathRep& a, const PathRep& b) {
        return same_values(a.x, b.x) && a.pieces == b.pieces && a.fibers == b.fibers;
    }
};

/// Sup distance between two reps over the same chart system: start point,
/// derivative pieces and fibers, all in the max norm.
double rep_distance(const PathRep& a, const PathRep& b);

/// Section of a bundle along a path, in the fiber coordinates of each piece's chart.
struct BundleLift {
    ManifoldPath base;
    std::shared_ptr<const BundleAtlas> bundle;
    std::vector<StepCurve> fibers;

    /// Validates fiber dimensions and piece domains.
    BundleLift(ManifoldPath base, std::shared_ptr<const BundleAtlas> bundle, std::vector<StepCurve> fibers);
};

/// First time at which the order-1 curve leaves the chart codomain, if any.
std::optional<double> first_escape(const Chart& chart, const RegCurve& piece);

PathRep chart_map(const ManifoldPath& p);
PathRep lift_chart_map(const BundleLift& c);

/// Rebuild a path from coordinates: the first piece is x + int y_1 and each
/// later piece starts at the transition image of the previous endpoint.
/// Throws DomainError with the first offending time when a piece leaves its chart.
ManifoldPath reconstruct(std::shared_ptr<const Manifold> m, const PathChartSystem& system, const PathRep& rep);
BundleLift reconstruct_lift(std::shared_ptr<const BundleAtlas> e, const PathChartSystem& system, const PathRep& rep);

/// Single-chart form: x + int (y_1 * ... * y_n), and its inverse.
RegCurve assemble(const PathRep& rep);
PathRep disassemble(const RegCurve& c, const std::vector<double>& tau);

/// Point (and fiber value) at time t; the later piece wins at interior knots.
Point evaluate_path(const ManifoldPath& p, double t);
std::pair<Point, Vec> evaluate_lift(const BundleLift& c, double t);

struct TransitionOptions {
    double tol = 1e-6;
    /// Optional grids recorded on a first call and replayed on later ones.
    CellPlan* base_plan = nullptr;
    CellPlan* fiber_plan = nullptr;
    std::size_t max_cells = std::size_t{1} << 23;
};

struct TransitionResult {
    PathRep rep;
    /// Common refinement of the source and destination partitions.
    std::vector<double> refinement;
};

/// Rewrite coordinates from one chart system to another.
///
/// Pieces whose chart does not change are restricted and concatenated exactly;
/// the others are composed with the chart transition (and, for fibers, the
/// cocycle) with sup error at most tol. Throws CoverError when the path is not
/// covered by the destination system.
TransitionResult transition_rep(const Manifold& m, const PathChartSystem& src, const PathChartSystem& dst,
                                const PathRep& rep, const TransitionOptions& options = {});
TransitionResult transition_rep(const BundleAtlas& e, const PathChartSystem& src, const PathChartSystem& dst,
                                const PathRep& rep, const TransitionOptions& options = {});

/// Radius of a neighbourhood of chart_map(p) that reconstructs inside the same system.
struct OpennessCertificate {
    double eta = 0.0;
    std::vector<double> chart_margins;      ///< delta_i: margin of piece i inside its chart
    std::vector<double> junction_radii;     ///< rho_i: half the transition margin at knot tau_i
    std::vector<double> junction_lipschitz; ///< Lipschitz bound of the transition on that ball
    std::vector<double> growth;             ///< a_i: error amplification reaching piece i
};

/// Any rep with |x' - x| < eta and every |y'_i - y_i| < eta reconstructs validly.
/// Throws DomainError when the path touches the boundary of a chart or overlap.
OpennessCertificate openness_margin(const ManifoldPath& p);

enum class Membership { inside, outside, indeterminate };

/// Open region of some coordinate space, through a signed margin: positive
/// values are radii of max-norm balls inside, nonpositive values mean outside.
/// Margins must be 1-Lipschitz.
struct Region {
    std::function<double(int chart, const Vec&)> signed_margin;
    static Region everything();
};

/// Finite union of closed time intervals; single points are allowed.
using TimeSet = std::vector<std::pair<double, double>>;

/// Whether the lift over K lies in `total` (base coordinates followed by fiber
/// coordinates), its base in `base`, and its base velocity in `velocity`.
/// Indeterminate when a sampled point is within `eps` of a region boundary.
Membership in_neighborhood(const BundleLift& c, const TimeSet& k, const Region& total, const Region& base,
                           const Region& velocity, double eps = 1e-3);
Membership in_neighborhood(const ManifoldPath& p, const TimeSet& k, const Region& base, const Region& velocity,
                           double eps = 1e-3);

/// Greedy cover search over `samples` evenly spaced sample times: each piece
/// uses the chart that keeps the path inside (with positive margin) the longest.
///
/// Consecutive samples must be closer than half the chart margin and at most
/// `max_step` apart in chart coordinates; a larger jump is read as the path
/// running off the chart. Throws CoverError when no chart can make progress.
PathChartSystem find_chart_system(const Manifold& m, const std::function<Point(double)>& sample,
                                  std::size_t samples = 1001, double max_step = 0.5);

}  // namespace pathatlas
