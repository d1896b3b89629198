#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pathatlas/atlas.hpp"

using namespace pathatlas;

TEST_CASE("euclidean space has one chart and identity transitions") {
    auto m = builtin_manifold("euclidean", {.dim = 2});
    CHECK(m->chart_count() == 1);
    CHECK(m->dim() == 2);
    const Vec x{{0.3, -4.0}};
    CHECK(same_values(m->transition(0, 0)(x), x));
    CHECK(same_values(tangent_cocycle(*m, 0, 0, x), Mat::Identity(2, 2)));
    auto ball = builtin_manifold("euclidean", {.dim = 2, .radius = 1.0});
    CHECK(ball->chart(0).margin(Vec{{0.25, -0.5}}) == 0.5);
    CHECK_FALSE(ball->in_chart(0, Vec{{1.0, 0.0}}));
}

TEST_CASE("stereographic inversion") {
    auto m = builtin_manifold("sphere-stereo");
    const Point p{0, Vec{{1.0, 0.0}}};
    const Point q = convert_point(*m, p, 1);
    CHECK(q.chart == 1);
    CHECK(same_values(q.coords, p.coords));
    CHECK(same_values(convert_point(*m, p, 0).coords, p.coords));
    CHECK_THROWS_AS(convert_point(*m, Point{0, Vec::Zero(2)}, 1), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec x{{u(rng), u(rng)}};
        if (max_norm(x) < 1e-3) continue;
        const Point there = convert_point(*m, {0, x}, 1);
        CHECK(max_norm(convert_point(*m, there, 0).coords - x) < 1e-10);
        const Mat jac = tangent_cocycle(*m, 0, 1, x);
        const Mat fd = m->transition(0, 1).finite_difference_jacobian(x);
        CHECK(operator_norm(jac - fd) / operator_norm(jac) < 1e-6);
    }
}

TEST_CASE("analytic curvature bound of the inversion dominates sampled second differences") {
    auto m = builtin_manifold("sphere-stereo");
    const SmoothMap& t = m->transition(0, 1);
    const std::vector<Vec> corners{Vec{{1.0, 1.0}}, Vec{{1.0, -1.0}}, Vec{{-1.0, 1.0}}, Vec{{-1.0, -1.0}}};
    for (double r : {0.01, 0.1, 0.3}) {
        const Vec c{{0.8, 0.6}};
        double sampled = 0.0;
        for (const auto& z : ball_sample(c, r)) {
            const double eps = 1e-5;
            for (const auto& k : corners) {
                const Mat dj = (t.jacobian(z + eps * k) - t.jacobian(z - eps * k)) / (2.0 * eps);
                for (const auto& h : corners) sampled = std::max(sampled, max_norm(dj * h));
            }
        }
        CHECK(t.curvature_bound(c, r) >= sampled);
    }
}

TEST_CASE("affine transitions have constant jacobian") {
    Mat a(2, 2);
    a << 2, 1, 0, 3;
    const auto f = SmoothMap::affine(a, Vec{{1.0, -1.0}});
    CHECK(same_values(f.jacobian(Vec{{5.0, 7.0}}), a));
    CHECK(f.curvature_bound(Vec::Zero(2), 10.0) == 0.0);
    CHECK(operator_norm(f.finite_difference_jacobian(Vec{{5.0, 7.0}}) - a) < 1e-8);
}

TEST_CASE("circle arcs and their two overlap components") {
    auto m = builtin_manifold("circle-two-arcs");
    constexpr double pi = std::numbers::pi;
    CHECK(m->transition(0, 1)(Vec::Constant(1, 1.0))(0) == 1.0);
    CHECK(m->transition(0, 1)(Vec::Constant(1, -1.0))(0) == doctest::Approx(2 * pi - 1.0));
    CHECK_FALSE(m->in_overlap(0, 1, Vec::Constant(1, 0.0)));
    CHECK(m->transition(1, 0)(Vec::Constant(1, 4.0))(0) == doctest::Approx(4.0 - 2 * pi));
}

TEST_CASE("moebius cocycle is +1 on the upper arc and -1 on the lower arc") {
    auto e = builtin_bundle("moebius-line-bundle");
    CHECK(e->rank() == 1);
    CHECK(e->cocycle(0, 1, Vec::Constant(1, 1.0))(0, 0) == 1.0);
    CHECK(e->cocycle(0, 1, Vec::Constant(1, -1.0))(0, 0) == -1.0);
    CHECK(e->cocycle(1, 0, Vec::Constant(1, 1.0))(0, 0) == 1.0);
    CHECK(e->cocycle(1, 0, Vec::Constant(1, 4.0))(0, 0) == -1.0);
    CHECK(e->cocycle(0, 0, Vec::Constant(1, 4.0))(0, 0) == 1.0);
}

TEST_CASE("sampled atlas identities on every builtin manifold") {
    for (const auto& name : builtin_manifold_names()) {
        CAPTURE(name);
        const auto m = builtin_manifold(name);
        const auto report = check_manifold(*m, 1000, 17);
        CHECK(report.samples >= 1000);
        CHECK(report.identity_error == 0.0);
        CHECK(report.inverse_error <= 1e-8);
        CHECK(report.cocycle_error <= 1e-8);
        CHECK(report.jacobian_error <= 1e-5);
        CHECK(report.margin_violations == 0);
    }
}

TEST_CASE("sampled cocycle identities on every builtin bundle") {
    for (const auto& name : builtin_bundle_names()) {
        for (const std::string base : {"circle-two-arcs", "sphere-stereo", "torus"}) {
            CAPTURE(name);
            CAPTURE(base);
            if (name == "moebius-line-bundle" && base != "circle-two-arcs") continue;
            const auto e = builtin_bundle(name, {.dim = 2, .base = base});
            const auto report = check_bundle(*e, 1000, 23);
            CHECK(report.identity_error == 0.0);
            CHECK(report.cocycle_error <= (name == "tangent-bundle" ? 1e-5 : 1e-8));
            CHECK(report.min_abs_determinant > 1e-12);
        }
    }
}

TEST_CASE("unknown names are rejected") {
    CHECK_THROWS_AS(builtin_manifold("klein-bottle"), std::invalid_argument);
    CHECK_THROWS_AS(builtin_bundle("hopf"), std::invalid_argument);
}
