#include <cmath>
#include <numbers>

#include "pathatlas/atlas.hpp"
#include "pathatlas/errors.hpp"

namespace pathatlas {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Chart box_chart(std::string name, int dim, double radius) {
    Chart c;
    c.name = std::move(name);
    c.convex = true;
    c.contains = [radius](const Vec& x) { return max_norm(x) < radius; };
    c.margin = [radius](const Vec& x) { return std::max(0.0, radius - max_norm(x)); };
    const double span = std::min(radius, 10.0) * 0.999;
    c.sample = [dim, span](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-span, span);
        Vec x(dim);
        for (int k = 0; k < dim; ++k) x(k) = u(rng);
        return x;
    };
    return c;
}

// Angle chart of the circle omitting the point at angle `center + pi`;
// coordinates range over (center - pi, center + pi).
struct ArcChart {
    double center;

    bool contains(double theta) const { return std::abs(theta - center) < kPi; }
    double margin(double theta) const { return std::max(0.0, kPi - std::abs(theta - center)); }
};

constexpr ArcChart kArcs[2] = {{0.0}, {kPi}};

// Angle change from arc a to arc b (a != b): identity on the upper overlap
// (0, pi) and a shift by +-2 pi on the lower one.
struct ArcTransition {
    int from;

    double cut() const { return kArcs[from].center; }  // the overlap splits at this angle
    bool contains(double theta) const { return kArcs[from].contains(theta) && theta != cut(); }
    double margin(double theta) const { return std::min(kArcs[from].margin(theta), std::abs(theta - cut())); }
    bool upper(double theta) const { return from == 0 ? theta > 0.0 : theta < kPi; }
    double apply(double theta) const {
        if (upper(theta)) return theta;
        return from == 0 ? theta + 2.0 * kPi : theta - 2.0 * kPi;
    }
};

Chart arc_chart(int which) {
    Chart c;
    const ArcChart arc = kArcs[which];
    c.name = which == 0 ? "arc-around-0" : "arc-around-pi";
    c.convex = true;
    c.contains = [arc](const Vec& x) { return arc.contains(x(0)); };
    c.margin = [arc](const Vec& x) { return arc.margin(x(0)); };
    c.sample = [arc](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(arc.center - kPi * 0.999, arc.center + kPi * 0.999);
        return Vec::Constant(1, u(rng));
    };
    return c;
}

SmoothMap arc_transition(int from) {
    const ArcTransition t{from};
    SmoothMap f;
    f.dim_in = f.dim_out = 1;
    f.value = [t](const Vec& x) { return Vec::Constant(1, t.apply(x(0))); };
    f.analytic_jacobian = [](const Vec&) { return Mat::Identity(1, 1); };
    f.domain = [t](const Vec& x) { return t.contains(x(0)); };
    f.domain_margin = [t](const Vec& x) { return t.contains(x(0)) ? t.margin(x(0)) : 0.0; };
    f.second_derivative_bound = [](const Vec&, double) { return 0.0; };
    return f;
}

std::shared_ptr<Manifold> euclidean(const BuiltinParams& p) {
    if (p.dim < 1) throw DimensionError("euclidean space needs dim >= 1");
    if (!(p.radius > 0.0)) throw DomainError("euclidean chart radius must be positive");
    return std::make_shared<Manifold>("euclidean", p.dim, std::vector<Chart>{box_chart("box", p.dim, p.radius)});
}

std::shared_ptr<Manifold> circle() {
    auto m = std::make_shared<Manifold>("circle-two-arcs", 1, std::vector<Chart>{arc_chart(0), arc_chart(1)});
    m->set_transition(0, 1, arc_transition(0));
    m->set_transition(1, 0, arc_transition(1));
    return m;
}

// Stereographic charts from the north (0) and south (1) poles; both cover R^2
// and are related by the inversion x -> x / |x|^2 on R^2 minus the origin.
std::shared_ptr<Manifold> sphere() {
    Chart north = box_chart("stereo-north", 2, kInf);
    Chart south = box_chart("stereo-south", 2, kInf);
    north.sample = south.sample = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        return Vec{{u(rng), u(rng)}};
    };
    SmoothMap inversion;
    inversion.dim_in = inversion.dim_out = 2;
    inversion.value = [](const Vec& x) -> Vec { return x / x.squaredNorm(); };
    inversion.analytic_jacobian = [](const Vec& x) -> Mat {
        const double r2 = x.squaredNorm();
        return (Mat::Identity(2, 2) * r2 - 2.0 * x * x.transpose()) / (r2 * r2);
    };
    inversion.domain = [](const Vec& x) { return max_norm(x) > 0.0; };
    inversion.domain_margin = [](const Vec& x) { return max_norm(x); };
    // |D^2 inversion| <= 4 / |x|^3 in max norms; the ball keeps Euclidean
    // distance at least |c| - sqrt(2) r from the origin.
    inversion.second_derivative_bound = [](const Vec& c, double r) {
        const double rho = c.norm() - std::sqrt(2.0) * r;
        return rho > 0.0 ? 4.0 / (rho * rho * rho) : kInf;
    };
    auto m = std::make_shared<Manifold>("sphere-stereo", 2, std::vector<Chart>{north, south});
    m->set_transition(0, 1, inversion);
    m->set_transition(1, 0, inversion);
    return m;
}

// Products of the two circle arcs; chart index 2a + b uses arc a on the first
// factor and arc b on the second.
std::shared_ptr<Manifold> torus() {
    std::vector<Chart> charts;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Chart c;
            c.name = "arcs-" + std::to_string(a) + std::to_string(b);
            c.convex = true;
            const ArcChart ca = kArcs[a], cb = kArcs[b];
            c.contains = [ca, cb](const Vec& x) { return ca.contains(x(0)) && cb.contains(x(1)); };
            c.margin = [ca, cb](const Vec& x) { return std::min(ca.margin(x(0)), cb.margin(x(1))); };
            c.sample = [ca, cb](std::mt19937_64& rng) {
                std::uniform_real_distribution<double> u(-kPi * 0.999, kPi * 0.999);
                return Vec{{ca.center + u(rng), cb.center + u(rng)}};
            };
            charts.push_back(std::move(c));
        }
    auto m = std::make_shared<Manifold>("torus", 2, std::move(charts));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            const int ia[2] = {i / 2, i % 2}, ja[2] = {j / 2, j % 2};
            SmoothMap f;
            f.dim_in = f.dim_out = 2;
            auto component_ok = [=](const Vec& x, int k) {
                return ia[k] == ja[k] ? kArcs[ia[k]].contains(x(k)) : ArcTransition{ia[k]}.contains(x(k));
            };
            auto component_margin = [=](const Vec& x, int k) {
                return ia[k] == ja[k] ? kArcs[ia[k]].margin(x(k)) : ArcTransition{ia[k]}.margin(x(k));
            };
            f.value = [=](const Vec& x) {
                Vec y = x;
                for (int k = 0; k < 2; ++k)
                    if (ia[k] != ja[k]) y(k) = ArcTransition{ia[k]}.apply(x(k));
                return y;
            };
            f.analytic_jacobian = [](const Vec&) { return Mat::Identity(2, 2); };
            f.domain = [=](const Vec& x) { return component_ok(x, 0) && component_ok(x, 1); };
            f.domain_margin = [=](const Vec& x) {
                if (!component_ok(x, 0) || !component_ok(x, 1)) return 0.0;
                return std::min(component_margin(x, 0), component_margin(x, 1));
            };
            f.second_derivative_bound = [](const Vec&, double) { return 0.0; };
            m->set_transition(i, j, std::move(f));
        }
    return m;
}

SmoothMap constant_cocycle(const SmoothMap& transition, const std::function<Mat(const Vec&)>& value, int rank) {
    SmoothMap g;
    g.dim_in = transition.dim_in;
    g.dim_out = rank * rank;
    g.value = [value](const Vec& x) -> Vec {
        const Mat m = value(x);
        return Eigen::Map<const Vec>(m.data(), m.size());
    };
    g.analytic_jacobian = [dim_in = g.dim_in, dim_out = g.dim_out](const Vec&) { return Mat::Zero(dim_out, dim_in); };
    g.domain = transition.domain;
    g.domain_margin = transition.domain_margin;
    g.second_derivative_bound = [](const Vec&, double) { return 0.0; };
    return g;
}

}  // namespace

std::vector<std::string> builtin_manifold_names() { return {"euclidean", "circle-two-arcs", "sphere-stereo", "torus"}; }

std::vector<std::string> builtin_bundle_names() { return {"trivial-bundle", "tangent-bundle", "moebius-line-bundle"}; }

std::shared_ptr<const Manifold> builtin_manifold(const std::string& name, const BuiltinParams& params) {
    if (name == "euclidean") return euclidean(params);
    if (name == "circle-two-arcs") return circle();
    if (name == "sphere-stereo") return sphere();
    if (name == "torus") return torus();
    throw std::invalid_argument("unknown builtin manifold: " + name);
}

std::shared_ptr<const BundleAtlas> builtin_bundle(const std::string& name, const BuiltinParams& params) {
    if (name == "trivial-bundle") {
        BuiltinParams base_params;
        auto base = builtin_manifold(params.base.empty() ? "euclidean" : params.base, base_params);
        const int rank = params.dim;
        auto e = std::make_shared<BundleAtlas>("trivial-bundle", base, rank);
        for (int i = 0; i < base->chart_count(); ++i)
            for (int j = 0; j < base->chart_count(); ++j) {
                if (i == j) continue;
                try {
                    const auto& t = base->transition(i, j);
                    e->set_cocycle(i, j, constant_cocycle(t, [rank](const Vec&) { return Mat::Identity(rank, rank); }, rank));
                } catch (const DomainError&) {
                }
            }
        return e;
    }
    if (name == "tangent-bundle") return tangent_bundle(builtin_manifold(params.base.empty() ? "sphere-stereo" : params.base));
    if (name == "moebius-line-bundle") {
        auto base = builtin_manifold("circle-two-arcs");
        auto e = std::make_shared<BundleAtlas>("moebius-line-bundle", base, 1);
        for (int from = 0; from < 2; ++from) {
            const ArcTransition t{from};
            e->set_cocycle(from, 1 - from,
                           constant_cocycle(base->transition(from, 1 - from),
                                            [t](const Vec& x) { return Mat::Constant(1, 1, t.upper(x(0)) ? 1.0 : -1.0); }, 1));
        }
        return e;
    }
    throw std::invalid_argument("unknown builtin bundle: " + name);
}

}  // namespace pathatlas
