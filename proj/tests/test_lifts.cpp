#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pathatlas/corpus.hpp"
#include "pathatlas/lifts.hpp"

using namespace pathatlas;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { return Vec{{a, b}}; }
StepCurve constant(double lo, double hi, const Vec& v) { return StepCurve::constant({lo, hi}, v); }

// Loop once around the circle: arc 0 up to pi/2, arc 1 on to 5 pi/4, then
// arc 0 from -3 pi/4 back to -pi/2 (= 3 pi/2).
ManifoldPath moebius_loop(const std::shared_ptr<const Manifold>& circle) {
    const PathChartSystem sys{{0.0, 0.5, 0.875, 1.0}, {0, 1, 0}};
    const PathRep rep{v1(-kPi / 2), {constant(0.0, 0.5, v1(2 * kPi)), constant(0.5, 0.875, v1(2 * kPi)),
                                     constant(0.875, 1.0, v1(2 * kPi))},
                      {}};
    return reconstruct(circle, sys, rep);
}

ManifoldPath slow_sphere_path(const PathChartSystem& sys, const std::shared_ptr<const Manifold>& sphere,
                              const PathRep& one_chart_rep, double tol, CellPlan* plan = nullptr) {
    if (sys.pieces() == 1) return reconstruct(sphere, sys, one_chart_rep);
    TransitionOptions options{.tol = tol, .base_plan = plan};
    return reconstruct(sphere, sys, transition_rep(*sphere, {{0.0, 1.0}, {0}}, sys, one_chart_rep, options).rep);
}

const PathRep kSlow{v2(1.0, 0.25),
                    {StepCurve({0.0, 0.25, 0.5, 0.75, 1.0}, {v2(-0.03125, 0.0625), v2(0.0625, 0.0), v2(0.0, -0.03125),
                                                              v2(-0.0625, 0.03125)})},
                    {}};

}  // namespace

TEST_CASE("single-chart and trivial-bundle frames are the identity") {
    auto sphere_bundle = builtin_bundle("trivial-bundle", {.dim = 3, .base = "sphere-stereo"});
    const ManifoldPath p = slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere_bundle->base_ptr(), kSlow, 1e-5);
    const PathTrivialization triv(p, sphere_bundle);
    for (const auto& c : triv.frames()) CHECK(same_values(c, Mat::Identity(3, 3)));
    CHECK(triv.kappa() == 1.0);

    auto plane = builtin_manifold("euclidean", {.dim = 2});
    const ManifoldPath q = reconstruct(plane, {{0.0, 0.25, 1.0}, {0, 0}}, {v2(0, 0), {constant(0, 0.25, v2(1, 0)), constant(0.25, 1, v2(0, 1))}, {}});
    const PathTrivialization flat = tangent_trivialization(q);
    for (const auto& c : flat.frames()) CHECK(same_values(c, Mat::Identity(2, 2)));
}

TEST_CASE("moebius holonomy is -1 after one loop") {
    auto e = builtin_bundle("moebius-line-bundle");
    const PathTrivialization triv(moebius_loop(e->base_ptr()), e);
    REQUIRE(triv.frames().size() == 3);
    CHECK(triv.frames()[0](0, 0) == 1.0);
    CHECK(triv.frames()[1](0, 0) == 1.0);
    CHECK(triv.frames()[2](0, 0) == -1.0);
    CHECK(same_values(transport(triv, 0.0, 1.0), Mat::Constant(1, 1, -1.0)));
    // The loop closes in chart coordinates, up to the 2 pi period.
    CHECK(evaluate_path(triv.path(), 1.0).coords(0) == doctest::Approx(-kPi / 2));
}

TEST_CASE("continuous moebius section has a continuous global coordinate") {
    auto e = builtin_bundle("moebius-line-bundle");
    const PathTrivialization triv(moebius_loop(e->base_ptr()), e);
    // Through the flip junction the raw fiber coordinate changes sign.
    const std::vector<StepCurve> u{constant(0.0, 0.5, v1(2.0)), constant(0.5, 0.875, v1(2.0)), constant(0.875, 1.0, v1(-2.0))};
    const StepCurve w = represent_section(triv, u);
    CHECK(w == constant(0.0, 1.0, v1(2.0)));
    CHECK(section_pieces(triv, w) == u);
}

TEST_CASE("transport groupoid laws") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto e = builtin_bundle("moebius-line-bundle");
    const PathTrivialization loop(moebius_loop(e->base_ptr()), e);
    for (int k = 0; k < 2000; ++k) {
        const double r = unit(rng), s = unit(rng), t = unit(rng);
        CHECK(same_values(transport(loop, t, t), Mat::Identity(1, 1)));
        CHECK(same_values(transport(loop, t, r) * transport(loop, s, t), transport(loop, s, r)));
        CHECK(same_values(Mat(transport(loop, s, t).inverse()), transport(loop, t, s)));
    }

    auto sphere = builtin_manifold("sphere-stereo");
    const PathTrivialization tangent = tangent_trivialization(slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere, kSlow, 1e-5));
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double r = unit(rng), s = unit(rng), t = unit(rng);
        worst = std::max(worst, operator_norm(transport(tangent, t, r) * transport(tangent, s, t) - transport(tangent, s, r)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("field representation") {
    auto plane = builtin_manifold("euclidean", {.dim = 2});
    const ManifoldPath line = reconstruct(plane, {{0.0, 1.0}, {0}}, {v2(0, 0), {constant(0, 1, v2(1, 1))}, {}});
    const RegCurve xi({v2(0.5, -1.0)}, StepCurve({0.0, 0.5, 1.0}, {v2(1.0, 0.0), v2(0.0, 2.0)}));
    const PathTrivialization flat = tangent_trivialization(line);
    CHECK(represent_field(flat, {{xi}, {}}).phi == xi);

    // The base part of a lift field is the field of the base path.
    auto e = builtin_bundle("trivial-bundle", {.dim = 1, .base = "euclidean"});
    const BundleLift lift = reconstruct_lift(e, {{0.0, 1.0}, {0}}, {v2(0, 0), {constant(0, 1, v2(1, 1))}, {constant(0, 1, v1(1.0))}});
    const PathTrivialization fibers(lift.base, e);
    const PathTrivialization tangent = tangent_trivialization(lift.base);
    const FieldRep with_fiber = represent_field(tangent, {{xi}, {constant(0, 1, v1(3.0))}}, &fibers);
    CHECK(with_fiber.phi == represent_field(tangent, {{xi}, {}}).phi);
    REQUIRE(with_fiber.theta.has_value());
    CHECK(*with_fiber.theta == constant(0, 1, v1(3.0)));

    // Two-chart sphere path: components matched through the jacobian at the knot.
    auto sphere = builtin_manifold("sphere-stereo");
    const ManifoldPath p = slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere, kSlow, 1e-5);
    const PathTrivialization frames = tangent_trivialization(p);
    const RegCurve first({v2(0.25, 0.5)}, StepCurve({0.0, 0.5}, {v2(1.0, -0.5)}));
    const Vec handed = tangent_cocycle(*sphere, 0, 1, p.pieces()[0].eval(0.5)) * first.eval(0.5);
    const RegCurve second({handed}, StepCurve({0.5, 0.75, 1.0}, {v2(0.0, 1.0), v2(-1.0, 0.0)}));
    const FieldRep rep = represent_field(frames, {{first, second}, {}});
    const FieldPieces back = field_pieces(frames, rep);
    double gap = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double t = k / 100.0;
        const std::size_t i = t < 0.5 ? 0 : 1;
        const RegCurve& original = i == 0 ? first : second;
        gap = std::max({gap, max_norm(back.base[i].eval(t) - original.eval(t)), max_norm(back.base[i].eval(t, 1) - original.eval(t, 1))});
    }
    CHECK(gap < 1e-10);

    const RegCurve mismatched({v2(9.0, 9.0)}, StepCurve({0.5, 1.0}, {v2(0.0, 0.0)}));
    CHECK_THROWS_AS(represent_field(frames, {{first, mismatched}, {}}), DomainError);
}

TEST_CASE("covariant derivative") {
    auto plane = builtin_manifold("euclidean", {.dim = 2});
    const ManifoldPath line = reconstruct(plane, {{0.0, 1.0}, {0}}, {v2(0, 0), {constant(0, 1, v2(1, 1))}, {}});
    const PathTrivialization flat = tangent_trivialization(line);
    const RegCurve xi({v2(0.5, -1.0)}, StepCurve({0.0, 0.5, 1.0}, {v2(1.0, 0.0), v2(0.0, 2.0)}));
    CHECK(covariant_derivative(flat, xi) == xi.top());

    auto sphere = builtin_manifold("sphere-stereo");
    const PathTrivialization frames = tangent_trivialization(slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere, kSlow, 1e-5));
    const RegCurve parallel({v2(1.0, 2.0)}, StepCurve::zero({0.0, 1.0}, 2));
    CHECK(covariant_derivative(frames, parallel).sup_norm() == 0.0);
    CHECK_THROWS_AS(covariant_derivative(frames, RegCurve(StepCurve::zero({0.0, 1.0}, 2))), OrderError);
}

TEST_CASE("norm comparison stays within the certified constant") {
    std::mt19937_64 rng(43);
    DyadicCorpus corpus{rng};
    auto sphere = builtin_manifold("sphere-stereo");
    const PathTrivialization frames = tangent_trivialization(slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere, kSlow, 1e-5));
    for (int k = 0; k < 300; ++k) {
        const RegCurve w({corpus.vector(2, 4.0)}, corpus.step_curve({0.0, 1.0}, 2, 6, 4.0));
        const auto cmp = compare_norms(frames, w);
        CHECK(cmp.ratio <= cmp.bound);
        const double w0 = max_norm(w.eval(0.0)), slope = w.sup_derivative(1);
        CHECK(std::max(w0, slope) <= w0 + slope);
        CHECK(cmp.global <= w0 + 2.0 * slope);
    }
}

TEST_CASE("compatibility automorphisms") {
    auto sphere = builtin_manifold("sphere-stereo");
    const ManifoldPath p = slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, sphere, kSlow, 1e-5);
    const PathTrivialization a = tangent_trivialization(p);
    const auto same = compatibility_automorphisms(a, a);
    CHECK(same.constant);
    CHECK(same_values(same.matrix(0.7), Mat::Identity(2, 2)));

    Mat f(2, 2);
    f << 2.0, 1.0, 0.0, 0.5;
    const PathTrivialization b = tangent_trivialization(p, f);
    const auto shifted = compatibility_automorphisms(a, b);
    CHECK(same_values(shifted.matrix(0.2), f));
    CHECK(same_values(shifted.matrix(0.9), f));
    CHECK(shifted.norm_bound == operator_norm(f));

    std::mt19937_64 rng(47);
    DyadicCorpus corpus{rng};
    const double kappa = std::max(shifted.norm_bound, shifted.inverse_norm_bound);
    for (int k = 0; k < 300; ++k) {
        const std::vector<StepCurve> u{corpus.step_curve({0.0, 0.5}, 2), corpus.step_curve({0.5, 1.0}, 2)};
        const double norm_a = represent_section(a, u).sup_norm();
        const double norm_b = represent_section(b, u).sup_norm();
        if (norm_a == 0.0) continue;
        CHECK(norm_b / norm_a <= kappa);
        CHECK(norm_a / norm_b <= kappa);
    }

    // Different chart systems: A(t) is invertible everywhere and the block form projects onto the base part.
    const ManifoldPath single = slow_sphere_path({{0.0, 1.0}, {0}}, sphere, kSlow, 1e-5);
    const PathTrivialization one = tangent_trivialization(single);
    const auto across = compatibility_automorphisms(one, a);
    CHECK_FALSE(across.constant);
    for (double t : {0.0, 0.3, 0.5, 0.8, 1.0})
        CHECK(operator_norm(across.matrix(t) * across.inverse(t) - Mat::Identity(2, 2)) < 1e-12);

    auto e = builtin_bundle("trivial-bundle", {.dim = 1, .base = "sphere-stereo"});
    const ManifoldPath pe = slow_sphere_path({{0.0, 0.5, 1.0}, {0, 1}}, e->base_ptr(), kSlow, 1e-5);
    const ManifoldPath qe = slow_sphere_path({{0.0, 1.0}, {0}}, e->base_ptr(), kSlow, 1e-5);
    const auto block = lift_compatibility(tangent_trivialization(qe), PathTrivialization(qe, e), tangent_trivialization(pe),
                                          PathTrivialization(pe, e));
    for (double t : {0.1, 0.6}) CHECK(same_values(block.project(t), block.base.matrix(t)));
}

TEST_CASE("deformation tangents") {
    auto plane = builtin_manifold("euclidean", {.dim = 2});
    const PathChartSystem sys{{0.0, 1.0}, {0}};
    const PathRep c{v2(0.5, 0.25), {StepCurve({0.0, 0.5, 1.0}, {v2(1.0, 0.0), v2(0.0, -1.0)})}, {}};
    const PathRep v{v2(-1.0, 2.0), {StepCurve({0.0, 0.25, 1.0}, {v2(0.5, 0.5), v2(-2.0, 0.0)})}, {}};
    auto along = [&](double eps) {
        PathRep r{c.x + eps * v.x, {combine(1.0, c.pieces[0], eps, v.pieces[0])}, {}};
        return reconstruct(plane, sys, r);
    };
    const FieldRep linear = deformation_tangent(PathDeformation(along));
    const RegCurve expected({v.x}, v.pieces[0]);
    for (int k = 0; k <= 64; ++k) {
        const double t = k / 64.0;
        CHECK(max_norm(linear.phi.eval(t) - expected.eval(t)) < 1e-9);
    }

    const FieldRep still = deformation_tangent(PathDeformation([&](double) { return reconstruct(plane, sys, c); }));
    CHECK(still.phi.sup_derivative(0) == 0.0);
    CHECK(still.phi.sup_derivative(1) == 0.0);

    // Smooth nonlinear dependence on epsilon: central differences with one
    // Richardson step converge with order close to four.
    auto curved = [&](double eps) {
        PathRep r{c.x + (eps + eps * eps) * v.x, {combine(1.0, c.pieces[0], std::exp(eps) - 1.0, v.pieces[0])}, {}};
        return reconstruct(plane, sys, r);
    };
    auto error = [&](double h) {
        const FieldRep got = deformation_tangent(PathDeformation(curved), h);
        double worst = 0.0;
        for (int k = 0; k <= 64; ++k) worst = std::max(worst, max_norm(got.phi.eval(k / 64.0) - expected.eval(k / 64.0)));
        return worst;
    };
    const double order = std::log2(error(0.2) / error(0.1));
    CHECK(order >= 2.9);

    auto switching = [&](double eps) {
        return eps > 0 ? reconstruct(plane, {{0.0, 0.5, 1.0}, {0, 0}}, {c.x, {restrict_to(c.pieces[0], {0.0, 0.5}), restrict_to(c.pieces[0], {0.5, 1.0})}, {}})
                       : reconstruct(plane, sys, c);
    };
    CHECK_THROWS_AS(deformation_tangent(PathDeformation(switching)), DomainError);
}

TEST_CASE("deformation tangents agree across chart systems") {
    auto sphere = builtin_manifold("sphere-stereo");
    const PathChartSystem one{{0.0, 1.0}, {0}}, two{{0.0, 0.5, 1.0}, {0, 1}};
    const PathRep direction{v2(0.5, -0.25), {StepCurve({0.0, 0.5, 1.0}, {v2(0.25, 0.5), v2(-0.5, 0.125)})}, {}};
    auto shifted = [&](double eps) {
        return PathRep{kSlow.x + eps * direction.x, {combine(1.0, kSlow.pieces[0], eps, direction.pieces[0])}, {}};
    };
    const double tol = 1e-6;
    CellPlan recorded;
    transition_rep(*sphere, one, two, kSlow, {.tol = tol, .base_plan = &recorded});
    PathDeformation in_one = [&](double eps) { return reconstruct(sphere, one, shifted(eps)); };
    PathDeformation in_two = [&](double eps) {
        CellPlan plan = recorded;
        plan.rewind();
        return reconstruct(sphere, two, transition_rep(*sphere, one, two, shifted(eps), {.tol = tol, .base_plan = &plan}).rep);
    };
    const FieldRep va = deformation_tangent(in_one), vb = deformation_tangent(in_two);
    const auto a = compatibility_automorphisms(tangent_trivialization(in_one(0.0)), tangent_trivialization(in_two(0.0)));
    double gap = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        gap = std::max(gap, max_norm(vb.phi.eval(t) - a.matrix(t) * va.phi.eval(t)));
    }
    CHECK(gap < 1e-6);
}
