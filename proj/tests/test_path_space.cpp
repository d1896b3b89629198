#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pathatlas/corpus.hpp"
#include "pathatlas/path_space.hpp"

using namespace pathatlas;

namespace {

constexpr double kPi = std::numbers::pi;

StepCurve steps(std::vector<double> breaks, std::vector<Vec> values) { return {std::move(breaks), std::move(values)}; }

Vec v2(double a, double b) { return Vec{{a, b}}; }
Vec v1(double a) { return Vec::Constant(1, a); }

double sup_gap(const StepCurve& a, const StepCurve& b) { return combine(1.0, a, -1.0, b).sup_norm(); }

double rep_gap(const PathRep& a, const PathRep& b) {
    double gap = max_norm(a.x - b.x);
    for (std::size_t i = 0; i < a.pieces.size(); ++i) gap = std::max(gap, sup_gap(a.pieces[i], b.pieces[i]));
    for (std::size_t i = 0; i < a.fibers.size(); ++i) gap = std::max(gap, sup_gap(a.fibers[i], b.fibers[i]));
    return gap;
}

// Octagon-like polygon along the unit circle (the equator in both stereographic
// charts): a quarter turn in the north chart, then a quarter turn in the south chart.
ManifoldPath equator_path(const std::shared_ptr<const Manifold>& sphere) {
    auto chord_slopes = [](double from, double to, double lo, double hi, int segments) {
        std::vector<double> breaks;
        std::vector<Vec> values;
        const double dt = (hi - lo) / segments;
        for (int k = 0; k < segments; ++k) {
            const double a0 = from + (to - from) * k / segments, a1 = from + (to - from) * (k + 1) / segments;
            breaks.push_back(lo + k * dt);
            values.push_back(v2(std::cos(a1) - std::cos(a0), std::sin(a1) - std::sin(a0)) / dt);
        }
        breaks.push_back(hi);
        return steps(breaks, values);
    };
    PathRep rep{v2(1.0, 0.0), {chord_slopes(0.0, kPi / 2, 0.0, 0.5, 4), chord_slopes(kPi / 2, kPi, 0.5, 1.0, 4)}, {}};
    return reconstruct(sphere, {{0.0, 0.5, 1.0}, {0, 1}}, rep);
}

}  // namespace

TEST_CASE("single-chart chart map is the derivative split") {
    auto m = builtin_manifold("euclidean", {.dim = 2});
    const RegCurve c = primitive(RegCurve(steps({0.0, 0.25, 1.0}, {v2(1.0, 2.0), v2(-0.5, 0.0)})), v2(0.5, 0.5));
    const ManifoldPath p(m, {{0.0, 1.0}, {0}}, {c});
    const PathRep rep = chart_map(p);
    const auto split = derivative_split(c);
    CHECK(same_values(rep.x, split.initial_value));
    CHECK(rep.pieces.front() == split.derivative.top());
    CHECK(reconstruct(m, p.system(), rep) == p);
    CHECK(assemble(rep) == c);
}

TEST_CASE("constant paths have zero derivative pieces and transported junctions") {
    auto sphere = builtin_manifold("sphere-stereo");
    const PathChartSystem sys{{0.0, 0.5, 1.0}, {0, 1}};
    const PathRep rep{v2(2.0, 0.0), {StepCurve::zero({0.0, 0.5}, 2), StepCurve::zero({0.5, 1.0}, 2)}, {}};
    const ManifoldPath p = reconstruct(sphere, sys, rep);
    CHECK(same_values(p.pieces()[1].eval(0.75), v2(0.5, 0.0)));
    CHECK(chart_map(p) == rep);
}

TEST_CASE("two-piece great circle on the sphere round-trips through reconstruct") {
    auto sphere = builtin_manifold("sphere-stereo");
    const ManifoldPath p = equator_path(sphere);
    const ManifoldPath back = reconstruct(sphere, p.system(), chart_map(p));
    CHECK(back == p);
    double gap = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double t = k / 1000.0;
        gap = std::max(gap, max_norm(evaluate_path(back, t).coords - evaluate_path(p, t).coords));
    }
    CHECK(gap <= 1e-9);
    // The equator stays on the unit circle in both charts.
    CHECK(evaluate_path(p, 1.0).coords.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("checked construction rejects broken junctions and escapes") {
    auto sphere = builtin_manifold("sphere-stereo");
    const PathChartSystem sys{{0.0, 0.5, 1.0}, {0, 1}};
    const RegCurve first({v2(2.0, 0.0)}, StepCurve::zero({0.0, 0.5}, 2));
    const RegCurve wrong({v2(2.0, 0.0)}, StepCurve::zero({0.5, 1.0}, 2));
    const RegCurve right({v2(0.5, 0.0)}, StepCurve::zero({0.5, 1.0}, 2));
    CHECK_THROWS_AS(ManifoldPath(sphere, sys, {first, wrong}), DomainError);
    CHECK_NOTHROW(ManifoldPath(sphere, sys, {first, right}));

    auto ball = builtin_manifold("euclidean", {.dim = 1, .radius = 1.0});
    const PathRep leaving{v1(0.5), {StepCurve::constant({0.0, 1.0}, v1(1.0))}, {}};
    try {
        reconstruct(ball, {{0.0, 1.0}, {0}}, leaving);
        FAIL("expected an escape");
    } catch (const DomainError& err) {
        REQUIRE(err.time().has_value());
        CHECK(*err.time() == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("random valid paths round-trip exactly on every builtin manifold") {
    std::mt19937_64 rng(101);
    for (const auto& name : builtin_manifold_names()) {
        CAPTURE(name);
        auto m = builtin_manifold(name);
        for (int trial = 0; trial < 100; ++trial) {
            const ManifoldPath p = random_path(m, rng);
            const PathRep rep = chart_map(p);
            REQUIRE(reconstruct(m, p.system(), rep) == p);
            CHECK(chart_map(reconstruct(m, p.system(), rep)) == rep);
        }
    }
}

TEST_CASE("distinct paths have distinct reps") {
    std::mt19937_64 rng(7);
    auto m = builtin_manifold("torus");
    for (int trial = 0; trial < 200; ++trial) {
        const ManifoldPath p = random_path(m, rng), q = random_path(m, rng);
        if (p == q) continue;
        const bool same_system = p.system() == q.system();
        CHECK((!same_system || !(chart_map(p) == chart_map(q))));
    }
}

TEST_CASE("moebius lift fibers survive the round trip exactly") {
    auto e = builtin_bundle("moebius-line-bundle");
    const PathChartSystem sys{{0.0, 0.5, 1.0}, {0, 1}};
    const PathRep rep{v1(0.5), {StepCurve::constant({0.0, 0.5}, v1(2.0)), StepCurve::constant({0.5, 1.0}, v1(2.0))},
                      {steps({0.0, 0.25, 0.5}, {v1(1.0), v1(-3.0)}), StepCurve::constant({0.5, 1.0}, v1(0.5))}};
    const BundleLift lift = reconstruct_lift(e, sys, rep);
    CHECK(lift_chart_map(lift) == rep);
    const auto [point, fiber] = evaluate_lift(lift, 0.3);
    CHECK(point.chart == 0);
    CHECK(fiber(0) == -3.0);
}

TEST_CASE("assemble and disassemble are inverse") {
    std::mt19937_64 rng(3);
    DyadicCorpus corpus{rng};
    for (int trial = 0; trial < 300; ++trial) {
        const auto tau = corpus.partition(1 + trial % 4);
        PathRep rep{corpus.vector(3), {}, {}};
        double largest = 0.0;
        for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
            rep.pieces.push_back(corpus.step_curve({tau[i], tau[i + 1]}, 3));
            largest = std::max(largest, rep.pieces.back().sup_norm());
        }
        const RegCurve c = assemble(rep);
        CHECK(disassemble(c, tau) == rep);
        CHECK(c.top().sup_norm() == largest);
    }
}

TEST_CASE("evaluation selects the right piece at knots") {
    auto sphere = builtin_manifold("sphere-stereo");
    const ManifoldPath p = equator_path(sphere);
    CHECK(evaluate_path(p, 0.0).chart == 0);
    CHECK(same_values(evaluate_path(p, 0.0).coords, v2(1.0, 0.0)));
    const Point at_knot = evaluate_path(p, 0.5);
    CHECK(at_knot.chart == 1);
    const Vec from_left = sphere->transition(0, 1)(p.pieces()[0].eval(0.5));
    CHECK(max_norm(at_knot.coords - from_left) <= 1e-10);
    CHECK(same_values(evaluate_path(p, 1.0).coords, p.pieces()[1].eval(1.0)));
    CHECK_THROWS_AS(evaluate_path(p, 1.5), DomainError);
}

TEST_CASE("identical and refinement-only transitions are exact") {
    std::mt19937_64 rng(11);
    auto m = builtin_manifold("torus");
    auto e = builtin_bundle("trivial-bundle", {.dim = 2, .base = "torus"});
    DyadicCorpus corpus{rng};
    for (int trial = 0; trial < 100; ++trial) {
        const ManifoldPath p = random_path(e->base_ptr(), rng);
        PathRep rep = chart_map(p);
        rep.fibers = random_fibers(p.system(), 2, rng);
        CHECK(transition_rep(*e, p.system(), p.system(), rep).rep == rep);

        // Same single chart on a finer partition: slices of the original steps.
        const ManifoldPath q = random_path(m, rng, {.max_pieces = 1});
        const PathRep single = chart_map(q);
        const auto tau = corpus.partition(3);
        const PathChartSystem fine{tau, std::vector<int>(3, q.system().charts[0])};
        const PathRep refined = transition_rep(*m, q.system(), fine, single).rep;
        for (std::size_t i = 0; i < 3; ++i) CHECK(refined.pieces[i] == restrict_to(single.pieces[0], fine.piece(i)));
        CHECK(transition_rep(*m, fine, q.system(), refined).rep == single);
    }
}

TEST_CASE("sphere transition between one and two charts round-trips within 1e-6 at tol 1e-7") {
    auto sphere = builtin_manifold("sphere-stereo");
    const PathChartSystem one{{0.0, 1.0}, {0}};
    const PathChartSystem two{{0.0, 0.5, 1.0}, {0, 1}};
    // Slow path near the unit circle, away from both poles.
    const PathRep rep{v2(1.0, 0.0),
                      {steps({0.0, 0.25, 0.5, 0.75, 1.0}, {v2(-0.015625, 0.03125), v2(0.0, 0.0625), v2(-0.03125, 0.0),
                                                            v2(0.0625, -0.015625)})},
                      {}};
    TransitionOptions options{.tol = 1e-7};
    const PathRep there = transition_rep(*sphere, one, two, rep, options).rep;
    const PathRep back = transition_rep(*sphere, two, one, there, options).rep;
    CHECK(rep_gap(back, rep) < 1e-6);
    // The first piece keeps its chart and is reproduced exactly.
    CHECK(there.pieces[0] == restrict_to(rep.pieces[0], two.piece(0)));
}

TEST_CASE("lift transitions factor through the base transition") {
    auto e = builtin_bundle("tangent-bundle");
    auto sphere = e->base_ptr();
    const PathChartSystem one{{0.0, 1.0}, {0}};
    const PathChartSystem two{{0.0, 0.5, 1.0}, {0, 1}};
    std::mt19937_64 rng(5);
    const PathRep base{v2(1.0, 0.5), {steps({0.0, 0.5, 1.0}, {v2(0.0625, -0.03125), v2(0.03125, 0.03125)})}, {}};
    PathRep lift = base;
    lift.fibers = random_fibers(one, 2, rng);
    const TransitionOptions options{.tol = 1e-6};
    const PathRep lifted = transition_rep(*e, one, two, lift, options).rep;
    CHECK(lifted.base() == transition_rep(*sphere, one, two, base, options).rep);
    const PathRep back = transition_rep(*e, two, one, lifted, options).rep;
    CHECK(rep_gap(back, lift) < 20 * options.tol);
}

TEST_CASE("moebius fiber rewrite flips sign on the lower overlap only") {
    auto e = builtin_bundle("moebius-line-bundle");
    const PathChartSystem arc0{{0.0, 1.0}, {0}};
    const PathChartSystem arc1{{0.0, 1.0}, {1}};
    const PathRep upper{v1(1.0), {StepCurve::constant({0.0, 1.0}, v1(1.0))}, {StepCurve::constant({0.0, 1.0}, v1(3.0))}};
    const PathRep lower{v1(-2.5), {StepCurve::constant({0.0, 1.0}, v1(1.0))}, {StepCurve::constant({0.0, 1.0}, v1(3.0))}};
    CHECK(transition_rep(*e, arc0, arc1, upper).rep.fibers[0] == upper.fibers[0]);
    const PathRep flipped = transition_rep(*e, arc0, arc1, lower).rep;
    CHECK(flipped.fibers[0] == StepCurve::constant({0.0, 1.0}, v1(-3.0)));
    CHECK(flipped.x(0) == doctest::Approx(2 * kPi - 2.5));
}

TEST_CASE("paths leaving the destination cover are rejected") {
    auto sphere = builtin_manifold("sphere-stereo");
    const PathRep through_origin{v2(-0.5, 0.0), {StepCurve::constant({0.0, 1.0}, v2(1.0, 0.0))}, {}};
    CHECK_THROWS_AS(transition_rep(*sphere, {{0.0, 1.0}, {0}}, {{0.0, 1.0}, {1}}, through_origin), CoverError);
}

TEST_CASE("openness margin of a path in a euclidean ball") {
    auto ball = builtin_manifold("euclidean", {.dim = 2, .radius = 1.0});
    const PathRep rep{v2(0.125, -0.25), {steps({0.0, 0.5, 1.0}, {v2(0.5, 0.25), v2(-0.25, 0.5)})}, {}};
    const ManifoldPath p = reconstruct(ball, {{0.0, 1.0}, {0}}, rep);
    double r = 0.0;
    for (double t : {0.0, 0.5, 1.0}) r = std::max(r, max_norm(p.pieces()[0].eval(t)));
    const auto cert = openness_margin(p);
    CHECK(cert.eta >= (1.0 - r) / 2);
}

TEST_CASE("openness needs positive margins") {
    Chart inner;
    inner.name = "underestimated";
    inner.convex = true;
    inner.contains = [](const Vec& x) { return max_norm(x) < 1.0; };
    inner.margin = [](const Vec& x) { return std::max(0.0, 0.5 - max_norm(x)); };
    auto m = std::make_shared<Manifold>("cautious", 1, std::vector<Chart>{inner});
    const PathRep rep{v1(0.0), {StepCurve::constant({0.0, 1.0}, v1(0.75))}, {}};
    const ManifoldPath p = reconstruct(m, {{0.0, 1.0}, {0}}, rep);
    CHECK_THROWS_AS(openness_margin(p), DomainError);
}

TEST_CASE("perturbations below the openness margin reconstruct") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::vector<std::shared_ptr<const Manifold>> manifolds{
        builtin_manifold("euclidean", {.dim = 2, .radius = 2.0}), builtin_manifold("circle-two-arcs"),
        builtin_manifold("sphere-stereo"), builtin_manifold("torus")};
    for (const auto& m : manifolds) {
        CAPTURE(m->name());
        for (int scenario = 0; scenario < 4; ++scenario) {
            const ManifoldPath p = random_path(m, rng);
            const auto cert = openness_margin(p);
            REQUIRE(cert.eta > 0.0);
            const double eta = std::min(cert.eta, 10.0);
            const PathRep rep = chart_map(p);
            int failures = 0;
            for (int trial = 0; trial < 50; ++trial) {
                PathRep moved = rep;
                for (int k = 0; k < moved.x.size(); ++k) moved.x(k) += 0.999 * eta * unit(rng);
                for (auto& y : moved.pieces) {
                    std::vector<double> breaks{y.domain().lo, 0.5 * (y.domain().lo + y.domain().hi), y.domain().hi};
                    std::vector<Vec> values;
                    for (int c = 0; c < 2; ++c) {
                        Vec v(m->dim());
                        for (int k = 0; k < m->dim(); ++k) v(k) = 0.999 * eta * unit(rng);
                        values.push_back(v);
                    }
                    y = combine(1.0, y, 1.0, StepCurve(breaks, values));
                }
                try {
                    reconstruct(m, p.system(), moved);
                } catch (const DomainError&) {
                    ++failures;
                }
            }
            CHECK(failures == 0);
        }
    }
}

TEST_CASE("neighbourhood membership") {
    auto line = builtin_manifold("euclidean", {.dim = 1});
    const ManifoldPath tent = reconstruct(line, {{0.0, 1.0}, {0}},
                                          {v1(0.0), {steps({0.0, 0.5, 1.0}, {v1(1.0), v1(-1.0)})}, {}});
    const Region all = Region::everything();
    const Region below = {[](int, const Vec& x) { return 0.45 - x(0); }};
    const Region rising = {[](int, const Vec& v) { return v(0) - 0.5; }};

    CHECK(in_neighborhood(tent, {{0.0, 1.0}}, all, all) == Membership::inside);
    CHECK(in_neighborhood(tent, {{0.0, 0.4}}, all, rising) == Membership::inside);
    CHECK(in_neighborhood(tent, {{0.2, 0.7}}, all, rising) == Membership::outside);
    CHECK(in_neighborhood(tent, {{0.5, 0.5}}, all, rising) == Membership::outside);
    CHECK(in_neighborhood(tent, {{0.49, 0.49}}, all, rising) == Membership::inside);

    CHECK(in_neighborhood(tent, {{0.0, 0.4}}, below, all) == Membership::inside);
    CHECK(in_neighborhood(tent, {{0.0, 0.45}}, below, all) == Membership::outside);
    CHECK(in_neighborhood(tent, {{0.0, 0.4495}}, below, all) == Membership::indeterminate);
    CHECK(in_neighborhood(tent, {{0.25, 0.25}}, below, all) == Membership::inside);
    CHECK(in_neighborhood(tent, {{0.46, 0.46}}, below, all) == Membership::outside);
    CHECK(in_neighborhood(tent, {{0.0, 0.1}, {0.2, 0.3}}, below, rising) == Membership::inside);

    auto e = builtin_bundle("trivial-bundle", {.dim = 1, .base = "euclidean"});
    const BundleLift lift = reconstruct_lift(
        e, {{0.0, 1.0}, {0}},
        {Vec::Zero(2), {StepCurve::zero({0.0, 1.0}, 2)}, {steps({0.0, 0.5, 1.0}, {v1(1.0), v1(3.0)})}});
    const Region small_fiber = {[](int, const Vec& z) { return 2.0 - z(2); }};
    CHECK(in_neighborhood(lift, {{0.0, 0.4}}, small_fiber, all, all) == Membership::inside);
    CHECK(in_neighborhood(lift, {{0.0, 0.6}}, small_fiber, all, all) == Membership::outside);
    CHECK(in_neighborhood(lift, {{0.5, 0.5}}, small_fiber, all, all) == Membership::outside);
}

TEST_CASE("cover search") {
    auto plane = builtin_manifold("euclidean", {.dim = 2});
    const auto single = find_chart_system(*plane, [](double t) { return Point{0, v2(t, t * t)}; });
    CHECK(single.pieces() == 1);

    // Great circle in the xz-plane through the north pole (theta = pi/2) and
    // the south pole (theta = 3 pi/2).
    auto sphere = builtin_manifold("sphere-stereo");
    auto great_circle = [](double t) {
        const double theta = kPi / 4 + t * 1.5 * kPi;
        const double x = std::cos(theta), z = std::sin(theta);
        if (z < 0.0) return Point{0, v2(x / (1.0 - z), 0.0)};
        return Point{1, v2(x / (1.0 + z), 0.0)};
    };
    const auto found = find_chart_system(*sphere, great_circle);
    CHECK(found.pieces() == 2);
    CHECK(found.charts == std::vector<int>{1, 0});
    // Both poles are avoided by the chart in use around them.
    const double knot_theta = kPi / 4 + found.tau[1] * 1.5 * kPi;
    CHECK(knot_theta > kPi / 2);
    CHECK(knot_theta < 1.5 * kPi);

    auto ball = builtin_manifold("euclidean", {.dim = 2, .radius = 1.0});
    CHECK_THROWS_AS(find_chart_system(*ball, [](double t) { return Point{0, v2(2.0 * t, 0.0)}; }), CoverError);
}
