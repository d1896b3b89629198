#include <algorithm>
#include <cmath>

#include "pathatlas/errors.hpp"
#include "pathatlas/path_space.hpp"

namespace pathatlas {
namespace {

constexpr int kMaxBisection = 50;
constexpr double kJunctionTolerance = 1e-10;

// First time in [s, e] where a non-convex chart cannot certify the segment
// between the curve values at s and e; the margin at one endpoint must exceed
// the segment length.
std::optional<double> certify_segment(const Chart& chart, const RegCurve& piece, double s, double e, int depth) {
    const Vec ps = piece.eval(s);
    const Vec pe = piece.eval(e);
    if (!chart.contains(ps)) return s;
    const double length = max_norm(pe - ps);
    if (chart.margin(ps) > length || (chart.contains(pe) && chart.margin(pe) > length)) return std::nullopt;
    if (depth >= kMaxBisection) return s;
    const double mid = 0.5 * (s + e);
    if (auto left = certify_segment(chart, piece, s, mid, depth + 1)) return left;
    return certify_segment(chart, piece, mid, e, depth + 1);
}

// Along a straight segment of a convex chart the inside set is an interval
// starting at s; locate its right end.
double exit_time(const Chart& chart, const RegCurve& piece, double s, double e) {
    double inside = s, outside = e;
    for (int k = 0; k < kMaxBisection; ++k) {
        const double mid = 0.5 * (inside + outside);
        (chart.contains(piece.eval(mid)) ? inside : outside) = mid;
    }
    return outside;
}

void require_order_one(const RegCurve& c) {
    if (c.order() != 1 || c.mode() != Regularity::regulated)
        throw OrderError("path pieces must be order-1 curves with step derivatives");
}

void check_path(const Manifold& m, const PathChartSystem& system, const std::vector<RegCurve>& pieces) {
    system.validate(m);
    if (pieces.size() != system.pieces()) throw DimensionError("one local curve per partition piece is required");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        require_order_one(pieces[i]);
        if (pieces[i].dim() != m.dim()) throw DimensionError("local curve dimension differs from the manifold");
        if (!(pieces[i].domain() == system.piece(i))) throw DomainError("local curve domain differs from its partition piece");
        if (auto t = first_escape(m.chart(system.charts[i]), pieces[i]))
            throw DomainError("path leaves chart " + std::to_string(system.charts[i]), *t);
    }
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double knot = system.tau[i + 1];
        const int from = system.charts[i], to = system.charts[i + 1];
        const Vec end = pieces[i].eval(knot);
        if (!m.in_overlap(from, to, end)) throw CoverError("junction point is outside the chart overlap", knot);
        const Vec mapped = m.transition(from, to)(end);
        const Vec start = pieces[i + 1].eval(knot);
        if (max_norm(mapped - start) > kJunctionTolerance * std::max(1.0, max_norm(start)))
            throw DomainError("local curves disagree at a junction", knot);
    }
}

}  // namespace

std::size_t PathChartSystem::piece_at(double t) const {
    const auto it = std::upper_bound(tau.begin() + 1, tau.end() - 1, t);
    return static_cast<std::size_t>(it - tau.begin()) - 1;
}

void PathChartSystem::validate(const Manifold& m) const {
    if (charts.empty() || tau.size() != charts.size() + 1) throw DomainError("partition and chart list do not match");
    if (tau.front() != 0.0 || tau.back() != 1.0) throw DomainError("partition must span [0, 1]");
    for (std::size_t i = 0; i + 1 < tau.size(); ++i)
        if (!(tau[i] < tau[i + 1])) throw DomainError("partition must be strictly increasing", tau[i]);
    for (int c : charts)
        if (c < 0 || c >= m.chart_count()) throw DomainError("unknown chart id " + std::to_string(c));
}

ManifoldPath::ManifoldPath(std::shared_ptr<const Manifold> m, PathChartSystem system, std::vector<RegCurve> pieces)
    : manifold_(std::move(m)), system_(std::move(system)), pieces_(std::move(pieces)) {
    if (!manifold_) throw std::invalid_argument("path needs a manifold");
    check_path(*manifold_, system_, pieces_);
}

ManifoldPath::ManifoldPath(Trusted, std::shared_ptr<const Manifold> m, PathChartSystem system,
                           std::vector<RegCurve> pieces)
    : manifold_(std::move(m)), system_(std::move(system)), pieces_(std::move(pieces)) {}

BundleLift::BundleLift(ManifoldPath base_path, std::shared_ptr<const BundleAtlas> bundle_atlas,
                       std::vector<StepCurve> fiber_curves)
    : base(std::move(base_path)), bundle(std::move(bundle_atlas)), fibers(std::move(fiber_curves)) {
    if (!bundle) throw std::invalid_argument("lift needs a bundle");
    if (bundle->base_ptr() != base.manifold_ptr()) throw std::invalid_argument("bundle is over a different manifold");
    if (fibers.size() != base.pieces().size()) throw DimensionError("one fiber curve per partition piece is required");
    for (std::size_t i = 0; i < fibers.size(); ++i) {
        if (fibers[i].dim() != bundle->rank()) throw DimensionError("fiber curve dimension differs from the bundle rank");
        if (!(fibers[i].domain() == base.system().piece(i))) throw DomainError("fiber curve domain differs from its piece");
    }
}

std::optional<double> first_escape(const Chart& chart, const RegCurve& piece) {
    require_order_one(piece);
    const auto& breaks = piece.top().breaks();
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double s = breaks[j], e = breaks[j + 1];
        if (!chart.contains(piece.eval(s))) return s;
        if (chart.convex) {
            if (!chart.contains(piece.eval(e))) return exit_time(chart, piece, s, e);
        } else if (auto t = certify_segment(chart, piece, s, e, 0)) {
            return t;
        }
    }
    return std::nullopt;
}

double rep_distance(const PathRep& a, const PathRep& b) {
    if (a.pieces.size() != b.pieces.size() || a.fibers.size() != b.fibers.size())
        throw DimensionError("reps have different piece counts");
    double d = max_norm(a.x - b.x);
    for (std::size_t i = 0; i < a.pieces.size(); ++i) d = std::max(d, combine(1.0, a.pieces[i], -1.0, b.pieces[i]).sup_norm());
    for (std::size_t i = 0; i < a.fibers.size(); ++i) d = std::max(d, combine(1.0, a.fibers[i], -1.0, b.fibers[i]).sup_norm());
    return d;
}

PathRep chart_map(const ManifoldPath& p) {
    PathRep rep;
    rep.x = p.pieces().front().jet().front();
    for (const auto& piece : p.pieces()) rep.pieces.push_back(piece.top());
    return rep;
}

PathRep lift_chart_map(const BundleLift& c) {
    PathRep rep = chart_map(c.base);
    rep.fibers = c.fibers;
    return rep;
}

ManifoldPath reconstruct(std::shared_ptr<const Manifold> m, const PathChartSystem& system, const PathRep& rep) {
    system.validate(*m);
    if (rep.pieces.size() != system.pieces()) throw DimensionError("rep has the wrong number of pieces");
    if (rep.x.size() != m->dim()) throw DimensionError("start point dimension differs from the manifold");
    std::vector<RegCurve> pieces;
    pieces.reserve(rep.pieces.size());
    Vec start = rep.x;
    for (std::size_t i = 0; i < rep.pieces.size(); ++i) {
        const int chart = system.charts[i];
        if (rep.pieces[i].dim() != m->dim()) throw DimensionError("derivative piece dimension differs from the manifold");
        if (!(rep.pieces[i].domain() == system.piece(i))) throw DomainError("derivative piece domain differs from its partition piece");
        if (i > 0) {
            const int previous = system.charts[i - 1];
            const double knot = system.tau[i];
            const Vec end = pieces.back().eval(knot);
            if (!m->in_overlap(previous, chart, end)) throw DomainError("junction point is outside the chart overlap", knot);
            start = m->transition(previous, chart)(end);
        }
        if (!m->in_chart(chart, start)) throw DomainError("piece starts outside its chart", system.tau[i]);
        pieces.emplace_back(std::vector<Vec>{start}, rep.pieces[i]);
        if (auto t = first_escape(m->chart(chart), pieces.back()))
            throw DomainError("reconstructed path leaves chart " + std::to_string(chart), *t);
    }
    return ManifoldPath(ManifoldPath::Trusted{}, std::move(m), system, std::move(pieces));
}

BundleLift reconstruct_lift(std::shared_ptr<const BundleAtlas> e, const PathChartSystem& system, const PathRep& rep) {
    ManifoldPath base = reconstruct(e->base_ptr(), system, rep);
    return BundleLift(std::move(base), std::move(e), rep.fibers);
}

RegCurve assemble(const PathRep& rep) {
    if (rep.pieces.empty()) throw DimensionError("rep has no pieces");
    for (const auto& y : rep.pieces)
        if (y.dim() != rep.x.size()) throw DimensionError("piece dimensions differ from the start point");
    return primitive(RegCurve(concat(rep.pieces)), rep.x);
}

PathRep disassemble(const RegCurve& c, const std::vector<double>& tau) {
    require_order_one(c);
    if (tau.size() < 2 || tau.front() != c.domain().lo || tau.back() != c.domain().hi)
        throw DomainError("partition does not span the curve domain");
    PathRep rep;
    rep.x = c.jet().front();
    for (std::size_t i = 0; i + 1 < tau.size(); ++i) rep.pieces.push_back(restrict_to(c.top(), Interval(tau[i], tau[i + 1])));
    return rep;
}

Point evaluate_path(const ManifoldPath& p, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("evaluation time outside [0, 1]", t);
    const std::size_t i = p.system().piece_at(t);
    return {p.system().charts[i], p.pieces()[i].eval(t)};
}

std::pair<Point, Vec> evaluate_lift(const BundleLift& c, double t) {
    Point point = evaluate_path(c.base, t);
    return {std::move(point), c.fibers[c.base.system().piece_at(t)](t)};
}

}  // namespace pathatlas
