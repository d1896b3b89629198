#include <algorithm>
#include <cmath>
#include <tuple>

#include "pathatlas/errors.hpp"
#include "pathatlas/lifts.hpp"

namespace pathatlas {
namespace {

constexpr int kBoundSamples = 257;

void require_pieces(const PathTrivialization& triv, std::size_t count, const char* what) {
    if (count != triv.path().system().pieces()) throw DimensionError(std::string(what) + ": one curve per path piece is required");
}

// Central difference of two reps over the same chart system.
PathRep central_difference(const PathRep& plus, const PathRep& minus, double h) {
    const double w = 1.0 / (2.0 * h);
    PathRep out;
    out.x = (plus.x - minus.x) * w;
    for (std::size_t i = 0; i < plus.pieces.size(); ++i) out.pieces.push_back(combine(w, plus.pieces[i], -w, minus.pieces[i]));
    for (std::size_t i = 0; i < plus.fibers.size(); ++i) out.fibers.push_back(combine(w, plus.fibers[i], -w, minus.fibers[i]));
    return out;
}

PathRep richardson(const PathRep& coarse, const PathRep& fine) {
    PathRep out;
    out.x = (4.0 * fine.x - coarse.x) / 3.0;
    for (std::size_t i = 0; i < fine.pieces.size(); ++i)
        out.pieces.push_back(combine(4.0 / 3.0, fine.pieces[i], -1.0 / 3.0, coarse.pieces[i]));
    for (std::size_t i = 0; i < fine.fibers.size(); ++i)
        out.fibers.push_back(combine(4.0 / 3.0, fine.fibers[i], -1.0 / 3.0, coarse.fibers[i]));
    return out;
}

// Tangent of a family of reps: the variation of x and of every derivative and fiber piece.
using Slice = std::pair<PathChartSystem, PathRep>;

PathRep rep_tangent(const std::function<Slice(double)>& slice_at, const PathChartSystem& system, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("difference step must be positive");
    auto sample = [&](double eps) {
        Slice slice = slice_at(eps);
        if (!(slice.first == system)) throw DomainError("deformation slices use different chart systems");
        return std::move(slice.second);
    };
    const PathRep coarse = central_difference(sample(h), sample(-h), h);
    const PathRep fine = central_difference(sample(0.5 * h), sample(-0.5 * h), 0.5 * h);
    return richardson(coarse, fine);
}

RegCurve glue_derivatives(const PathTrivialization& tangent, const Vec& start, const std::vector<StepCurve>& derivatives) {
    std::vector<StepCurve> parts;
    for (std::size_t i = 0; i < derivatives.size(); ++i) parts.push_back(linear_push(tangent.frames()[i], derivatives[i]));
    return primitive(RegCurve(concat(parts)), tangent.frames().front() * start);
}

void check_same_path(const PathTrivialization& a, const PathTrivialization& b) {
    if (a.path().manifold_ptr() != b.path().manifold_ptr()) throw std::invalid_argument("trivializations live on different manifolds");
    if (a.bundle().name() != b.bundle().name() || a.rank() != b.rank())
        throw std::invalid_argument("trivializations use different bundles");
    if (a.path().system() == b.path().system()) {
        if (!(a.path() == b.path())) throw std::invalid_argument("trivializations are over different paths");
        return;
    }
    const Manifold& m = a.path().manifold();
    std::vector<double> times = a.path().system().tau;
    times.insert(times.end(), b.path().system().tau.begin(), b.path().system().tau.end());
    for (double t : times) {
        const Point pa = evaluate_path(a.path(), t), pb = evaluate_path(b.path(), t);
        const Point converted = convert_point(m, pa, pb.chart);
        if (max_norm(converted.coords - pb.coords) > 1e-6 * std::max(1.0, max_norm(pb.coords)))
            throw std::invalid_argument("trivializations are over different paths");
    }
}

}  // namespace

PathTrivialization::PathTrivialization(ManifoldPath path, std::shared_ptr<const BundleAtlas> bundle,
                                       std::optional<Mat> initial_frame)
    : path_(std::move(path)), bundle_(std::move(bundle)) {
    if (!bundle_) throw std::invalid_argument("trivialization needs a bundle");
    if (bundle_->base_ptr() != path_.manifold_ptr()) throw std::invalid_argument("bundle is over a different manifold");
    const int d = bundle_->rank();
    const Mat id = Mat::Identity(d, d);
    const Mat first = initial_frame.value_or(id);
    if (first.rows() != d || first.cols() != d) throw DimensionError("initial frame has the wrong shape");
    frames_.push_back(first);
    inverse_frames_.push_back(initial_frame ? Mat(first.inverse()) : id);
    const auto& sys = path_.system();
    for (std::size_t i = 0; i + 1 < sys.pieces(); ++i) {
        const int from = sys.charts[i], to = sys.charts[i + 1];
        if (from == to) {
            frames_.push_back(frames_.back());
            inverse_frames_.push_back(inverse_frames_.back());
            continue;
        }
        const double knot = sys.tau[i + 1];
        const Vec junction = path_.pieces()[i].eval(knot);
        Mat g;
        try {
            g = bundle_->cocycle(from, to, junction);
        } catch (const DomainError& err) {
            throw DomainError(std::string("cocycle undefined at a junction: ") + err.what(), knot);
        }
        const Mat g_inverse = g.inverse();
        frames_.push_back(frames_.back() * g_inverse);
        inverse_frames_.push_back(g * inverse_frames_.back());
    }
    for (std::size_t i = 0; i < frames_.size(); ++i)
        kappa_ = std::max({kappa_, operator_norm(frames_[i]), operator_norm(inverse_frames_[i])});
}

PathTrivialization tangent_trivialization(const ManifoldPath& path, std::optional<Mat> initial_frame) {
    return PathTrivialization(path, tangent_bundle(path.manifold_ptr()), std::move(initial_frame));
}

StepCurve represent_section(const PathTrivialization& triv, const std::vector<StepCurve>& pieces) {
    require_pieces(triv, pieces.size(), "section");
    std::vector<StepCurve> parts;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].dim() != triv.rank()) throw DimensionError("section piece dimension differs from the bundle rank");
        if (!(pieces[i].domain() == triv.path().system().piece(i))) throw DomainError("section piece domain differs from its path piece");
        parts.push_back(linear_push(triv.frames()[i], pieces[i]));
    }
    return concat(parts);
}

std::vector<StepCurve> section_pieces(const PathTrivialization& triv, const StepCurve& global) {
    if (global.dim() != triv.rank()) throw DimensionError("section dimension differs from the bundle rank");
    std::vector<StepCurve> out;
    const auto& sys = triv.path().system();
    for (std::size_t i = 0; i < sys.pieces(); ++i)
        out.push_back(linear_push(triv.inverse_frames()[i], restrict_to(global, sys.piece(i))));
    return out;
}

FieldRep represent_field(const PathTrivialization& tangent, const FieldPieces& field, const PathTrivialization* bundle) {
    require_pieces(tangent, field.base.size(), "field");
    const auto& sys = tangent.path().system();
    std::vector<StepCurve> derivatives;
    for (std::size_t i = 0; i < field.base.size(); ++i) {
        const RegCurve& xi = field.base[i];
        if (xi.order() != 1 || xi.mode() != Regularity::regulated) throw OrderError("field components must be order-1 curves");
        if (xi.dim() != tangent.rank()) throw DimensionError("field component dimension differs from the manifold");
        if (!(xi.domain() == sys.piece(i))) throw DomainError("field component domain differs from its path piece");
        derivatives.push_back(xi.top());
        if (i + 1 == field.base.size()) break;
        const double knot = sys.tau[i + 1];
        const Vec left = tangent.frames()[i] * xi.eval(knot);
        const Vec right = tangent.frames()[i + 1] * field.base[i + 1].eval(knot);
        if (max_norm(left - right) > 1e-8 * std::max(1.0, max_norm(left)))
            throw DomainError("field components do not match across the junction", knot);
    }
    FieldRep rep{glue_derivatives(tangent, field.base.front().jet().front(), derivatives), std::nullopt};
    if (bundle) {
        if (!(bundle->path() == tangent.path())) throw std::invalid_argument("tangent and bundle trivializations use different paths");
        rep.theta = represent_section(*bundle, field.fiber);
    }
    return rep;
}

FieldPieces field_pieces(const PathTrivialization& tangent, const FieldRep& rep, const PathTrivialization* bundle) {
    FieldPieces out;
    const auto& sys = tangent.path().system();
    for (std::size_t i = 0; i < sys.pieces(); ++i)
        out.base.push_back(linear_push(tangent.inverse_frames()[i], restrict_to(rep.phi, sys.piece(i))));
    if (bundle) {
        if (!rep.theta) throw std::invalid_argument("field has no fiber part");
        out.fiber = section_pieces(*bundle, *rep.theta);
    }
    return out;
}

Mat transport(const PathTrivialization& triv, double s, double t) {
    const auto& sys = triv.path().system();
    if (!(0.0 <= s && s <= 1.0 && 0.0 <= t && t <= 1.0)) throw DomainError("transport times must lie in [0, 1]");
    const std::size_t from = sys.piece_at(s), to = sys.piece_at(t);
    if (from == to) return Mat::Identity(triv.rank(), triv.rank());
    return triv.inverse_frames()[to] * triv.frames()[from];
}

StepCurve covariant_derivative(const PathTrivialization& triv, const RegCurve& global) {
    if (global.order() != 1 || global.mode() != Regularity::regulated)
        throw OrderError("covariant derivative needs an order-1 global coordinate");
    if (global.dim() != triv.rank()) throw DimensionError("field dimension differs from the bundle rank");
    return concat(section_pieces(triv, global.top()));
}

NormComparison compare_norms(const PathTrivialization& triv, const RegCurve& global) {
    NormComparison out;
    const StepCurve nabla = covariant_derivative(triv, global);
    out.local = max_norm(triv.inverse_frames().front() * global.jet().front()) + nabla.sup_norm();
    out.global = std::max(global.sup_derivative(0), global.sup_derivative(1));
    if (out.local > 0.0 || out.global > 0.0) out.ratio = std::max(out.local / out.global, out.global / out.local);
    out.bound = (1.0 + global.domain().length()) * triv.kappa();
    return out;
}

Compatibility compatibility_automorphisms(const PathTrivialization& a, const PathTrivialization& b) {
    check_same_path(a, b);
    Compatibility out;
    const auto& sa = a.path().system();
    const auto& sb = b.path().system();
    if (sa == sb) {
        // Both frame sequences follow the same junction cocycles, so A is the
        // ratio of the initial frames on every piece.
        const Mat forward = b.frames().front() * a.inverse_frames().front();
        const Mat backward = a.frames().front() * b.inverse_frames().front();
        out.breaks = {0.0, 1.0};
        out.matrix = [forward](double) { return forward; };
        out.inverse = [backward](double) { return backward; };
        out.norm_bound = operator_norm(forward);
        out.inverse_norm_bound = operator_norm(backward);
        out.constant = true;
        return out;
    }
    std::set_union(sa.tau.begin(), sa.tau.end(), sb.tau.begin(), sb.tau.end(), std::back_inserter(out.breaks));
    out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()), out.breaks.end());
    // The matrix fields keep their own copies of both trivializations.
    auto pa = std::make_shared<const PathTrivialization>(a);
    auto pb = std::make_shared<const PathTrivialization>(b);
    auto cocycle = [pa, pb](double t) {
        const std::size_t i = pa->path().system().piece_at(t), j = pb->path().system().piece_at(t);
        const int ca = pa->path().system().charts[i], cb = pb->path().system().charts[j];
        const Mat g = pa->bundle().cocycle(ca, cb, pa->path().pieces()[i].eval(t));
        return std::tuple<std::size_t, std::size_t, Mat>{i, j, g};
    };
    out.matrix = [pa, pb, cocycle](double t) -> Mat {
        const auto [i, j, g] = cocycle(t);
        return pb->frames()[j] * g * pa->inverse_frames()[i];
    };
    out.inverse = [pa, pb, cocycle](double t) -> Mat {
        const auto [i, j, g] = cocycle(t);
        return pa->frames()[i] * g.inverse() * pb->inverse_frames()[j];
    };
    double forward = 0.0, backward = 0.0;
    for (std::size_t k = 0; k + 1 < out.breaks.size(); ++k)
        for (int q = 0; q < kBoundSamples; ++q) {
            const double t = out.breaks[k] + (out.breaks[k + 1] - out.breaks[k]) * q / (kBoundSamples - 1.0);
            forward = std::max(forward, operator_norm(out.matrix(t)));
            backward = std::max(backward, operator_norm(out.inverse(t)));
        }
    out.norm_bound = 2.0 * forward;
    out.inverse_norm_bound = 2.0 * backward;
    return out;
}

Mat LiftCompatibility::matrix(double t) const {
    const Mat top = base.matrix(t), bottom = fiber.matrix(t);
    Mat out = Mat::Zero(top.rows() + bottom.rows(), top.cols() + bottom.cols());
    out.topLeftCorner(top.rows(), top.cols()) = top;
    out.bottomRightCorner(bottom.rows(), bottom.cols()) = bottom;
    return out;
}

Mat LiftCompatibility::project(double t) const {
    const Mat full = matrix(t);
    const Mat top = base.matrix(t);
    return full.topLeftCorner(top.rows(), top.cols());
}

LiftCompatibility lift_compatibility(const PathTrivialization& tangent_a, const PathTrivialization& bundle_a,
                                     const PathTrivialization& tangent_b, const PathTrivialization& bundle_b) {
    return {compatibility_automorphisms(tangent_a, tangent_b), compatibility_automorphisms(bundle_a, bundle_b)};
}

FieldRep deformation_tangent(const PathDeformation& d, double h) {
    const ManifoldPath center = d(0.0);
    const PathRep v = rep_tangent(
        [&](double eps) {
            const ManifoldPath slice = d(eps);
            return Slice{slice.system(), chart_map(slice)};
        },
        center.system(), h);
    const PathTrivialization tangent = tangent_trivialization(center);
    return {glue_derivatives(tangent, v.x, v.pieces), std::nullopt};
}

FieldRep deformation_tangent(const LiftDeformation& d, double h) {
    const BundleLift center = d(0.0);
    const PathRep v = rep_tangent(
        [&](double eps) {
            const BundleLift slice = d(eps);
            return Slice{slice.base.system(), lift_chart_map(slice)};
        },
        center.base.system(), h);
    const PathTrivialization tangent = tangent_trivialization(center.base);
    const PathTrivialization bundle(center.base, center.bundle);
    return {glue_derivatives(tangent, v.x, v.pieces), represent_section(bundle, v.fibers)};
}

}  // namespace pathatlas
