#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

#include "pathatlas/corpus.hpp"
#include "pathatlas/errors.hpp"
#include "pathatlas/lifts.hpp"
#include "pathatlas/suites.hpp"

namespace pathatlas {
namespace {

constexpr double kPi = std::numbers::pi;

CaseResult verdict(bool ok, double measured, double bound, std::string note = {}) {
    return {ok ? Status::pass : Status::fail, measured, bound, std::move(note)};
}

/// Domain [lo, lo + 2^e] with lo a multiple of 1/16 in [-1, 1] and e in [-2, 2].
Interval dyadic_domain(DyadicCorpus& corpus) {
    std::uniform_int_distribution<int> exponent(-2, 2);
    const double lo = corpus.value(1.0, 4);
    return {lo, lo + std::ldexp(1.0, exponent(corpus.rng))};
}

/// Dyadic sub-interval; endpoints of the domain are allowed.
Interval dyadic_subinterval(DyadicCorpus& corpus, const Interval& d) {
    std::uniform_int_distribution<int> cell(0, 32);
    int a = cell(corpus.rng), b = cell(corpus.rng);
    if (a == b) b = a == 32 ? a - 1 : a + 1;
    if (a > b) std::swap(a, b);
    return {d.lo + d.length() * std::ldexp(a, -5), d.lo + d.length() * std::ldexp(b, -5)};
}

double dyadic_time(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> k(0, 1024);
    return std::ldexp(k(rng), -10);
}

/// Nonzero power of two with random sign, 2^e for e in [-2, 2].
double signed_power(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> exponent(-2, 2), sign(0, 1);
    return (sign(rng) ? -1.0 : 1.0) * std::ldexp(1.0, exponent(rng));
}

/// Upper-triangular frame with power-of-two diagonal, so its inverse is exact.
Mat dyadic_frame(DyadicCorpus& corpus, int n) {
    Mat f = Mat::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        f(r, r) = signed_power(corpus.rng);
        for (int c = r + 1; c < n; ++c) f(r, c) = corpus.value(1.0, 3);
    }
    return f;
}

Mat signed_permutation(std::mt19937_64& rng, int n) {
    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<int> sign(0, 1);
    Mat p = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) p(k, order[k]) = sign(rng) ? -1.0 : 1.0;
    return p;
}

std::shared_ptr<const Manifold> corpus_manifold(std::size_t index) {
    switch (index % 4) {
        case 0: return builtin_manifold("euclidean", {.dim = 2, .radius = 2.0, .base = {}});
        case 1: return builtin_manifold("circle-two-arcs");
        case 2: return builtin_manifold("sphere-stereo");
        default: return builtin_manifold("torus");
    }
}

/// (a - b) * scale, piece by piece.
PathRep scaled_difference(const PathRep& a, const PathRep& b, double scale) {
    PathRep out{(a.x - b.x) * scale, {}, {}};
    for (std::size_t i = 0; i < a.pieces.size(); ++i) out.pieces.push_back(combine(scale, a.pieces[i], -scale, b.pieces[i]));
    return out;
}

const PathChartSystem kOneChart{{0.0, 1.0}, {0}};
const PathChartSystem kTwoCharts{{0.0, 0.5, 1.0}, {0, 1}};

/// Slow single-chart sphere rep near (1, 1/4) in the first stereographic chart.
PathRep slow_sphere_rep(DyadicCorpus& corpus) {
    return {Vec{{1.0, 0.25}} + corpus.vector(2, 0.125), {corpus.step_curve({0.0, 1.0}, 2, 4, 1.0 / 16)}, {}};
}

PathRep shifted(const PathRep& base, const PathRep& direction, double eps) {
    return {base.x + eps * direction.x, {combine(1.0, base.pieces[0], eps, direction.pieces[0])}, {}};
}

ManifoldPath moebius_loop(const std::shared_ptr<const Manifold>& circle) {
    const PathChartSystem sys{{0.0, 0.5, 0.875, 1.0}, {0, 1, 0}};
    std::vector<StepCurve> pieces;
    for (std::size_t i = 0; i + 1 < sys.tau.size(); ++i)
        pieces.push_back(StepCurve::constant({sys.tau[i], sys.tau[i + 1]}, Vec::Constant(1, 2 * kPi)));
    return reconstruct(circle, sys, {Vec::Constant(1, -kPi / 2), pieces, {}});
}

/// Same path in a system with one extra dyadic knot inside every piece.
PathChartSystem refine(const PathChartSystem& sys, DyadicCorpus& corpus) {
    PathChartSystem out{{sys.tau.front()}, {}};
    for (std::size_t i = 0; i < sys.pieces(); ++i) {
        const Interval piece = sys.piece(i);
        out.tau.push_back(corpus.inner_time(piece, 3));
        out.tau.push_back(piece.hi);
        out.charts.insert(out.charts.end(), {sys.charts[i], sys.charts[i]});
    }
    return out;
}

// regulated-core

CaseResult concat_isometry(std::size_t, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<int> dim(1, 3);
    const int n = dim(rng);
    const Interval d = dyadic_domain(corpus);
    const double mid = corpus.inner_time(d);
    const StepCurve first = corpus.step_curve({d.lo, mid}, n, 6, 4.0);
    const StepCurve second = corpus.step_curve({mid, d.hi}, n, 6, 4.0);
    const double joined = concat(first, second).sup_norm();
    const double expected = std::max(first.sup_norm(), second.sup_norm());
    return verdict(joined == expected, std::abs(joined - expected), 0.0);
}

CaseResult restriction_contraction(std::size_t, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<int> dim(1, 3);
    const int n = dim(rng);
    const Interval d = dyadic_domain(corpus);
    const RegCurve c({corpus.vector(n), corpus.vector(n)}, corpus.step_curve(d, n, 6, 2.0));
    const RegCurve r = restrict_to(c, dyadic_subinterval(corpus, d));
    double excess = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 2; ++k) excess = std::max(excess, r.norm(k) - c.norm(k));
    return verdict(excess <= 0.0, excess, 0.0);
}

CaseResult derivative_isomorphism(std::size_t, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<int> dim(1, 3);
    const int n = dim(rng);
    const Interval d = dyadic_domain(corpus);
    const Vec x = corpus.vector(n, 2.0);
    const StepCurve u = corpus.step_curve(d, n, 6, 2.0);
    const RegCurve c = primitive(RegCurve(u), x);

    const DerivativeSplit split = derivative_split(c);
    const bool round_trip = same_values(split.initial_value, x) && split.derivative == RegCurve(u) &&
                            primitive(split.derivative, split.initial_value) == c;

    const double norm = c.norm(1), slope = u.sup_norm();
    const double lhs_split = max_norm(c.eval(d.lo)) + slope, rhs_split = 2.0 * norm;
    const double rhs_primitive = (1.0 + d.length()) * (max_norm(x) + slope);
    const bool bounds = lhs_split <= rhs_split && norm <= rhs_primitive;
    auto ratio = [](double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0); };
    const double measured = std::max(ratio(lhs_split, rhs_split), ratio(norm, rhs_primitive));
    return verdict(round_trip && bounds, measured, 1.0, round_trip ? "" : "round trip differs");
}

CaseResult integral_commutation(std::size_t, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<int> dim(1, 3), order(1, 2);
    const int n = dim(rng), m = dim(rng), k = order(rng);
    std::uniform_int_distribution<int> level(1, k);
    const int l = level(rng);
    Mat a(m, n);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < n; ++s) a(r, s) = corpus.value(2.0, 4);
    const Interval d = dyadic_domain(corpus);
    std::vector<Vec> jet;
    for (int j = 0; j < k; ++j) jet.push_back(corpus.vector(n));
    const RegCurve c(jet, corpus.step_curve(d, n, 6, 2.0));
    const RegCurve pushed = linear_push(a, c);
    const Interval over = dyadic_subinterval(corpus, d);

    Vec lhs, rhs;
    if (l == k) {
        lhs = a * c.top().integral(over.lo, over.hi);
        rhs = pushed.top().integral(over.lo, over.hi);
    } else {
        lhs = a * (c.eval(over.hi, l - 1) - c.eval(over.lo, l - 1));
        rhs = pushed.eval(over.hi, l - 1) - pushed.eval(over.lo, l - 1);
    }
    return verdict(same_values(lhs, rhs), max_norm(lhs - rhs), 0.0);
}

CaseResult change_of_variables(std::size_t, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<int> dim(1, 3), exponent(-1, 1), sign(0, 1);
    const int n = dim(rng);
    const Interval j = dyadic_domain(corpus);
    const double direction = sign(rng) ? -1.0 : 1.0;
    StepCurve speeds = corpus.step_curve(j, 1, 4);
    speeds = map_values(speeds, [&](const Vec&) { return Vec::Constant(1, direction * std::ldexp(1.0, exponent(rng))); });
    const MonotoneReparametrization phi(primitive(RegCurve(speeds), Vec::Constant(1, corpus.value(1.0, 4))));
    const double e0 = phi(j.lo), e1 = phi(j.hi);
    const StepCurve c = corpus.step_curve({std::min(e0, e1), std::max(e0, e1)}, n, 6, 2.0);

    const double s0 = corpus.inner_time(j), s = dyadic_subinterval(corpus, j).hi;
    const Vec lhs = substituted_integral(c, phi, s0, s);
    const Vec rhs = c.integral(phi(s0), phi(s));
    return verdict(same_values(lhs, rhs), max_norm(lhs - rhs), 0.0);
}

// manifold-atlas and path-space

CaseResult atlas_roundtrip(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    const auto m = corpus_manifold(index);
    const ManifoldPath p = random_path(m, rng);
    const PathRep rep = chart_map(p);
    const ManifoldPath back = reconstruct(m, p.system(), rep);
    const bool ok = back == p && chart_map(back) == rep;
    return verdict(ok, ok ? 0.0 : rep_distance(chart_map(back), rep), 0.0, m->name());
}

CaseResult transition_smoothness(std::size_t, std::mt19937_64& rng, const SuiteOptions& options) {
    DyadicCorpus corpus{rng};
    const auto sphere = builtin_manifold("sphere-stereo");
    const double tol = options.tol.value_or(1e-5);
    const PathRep base = slow_sphere_rep(corpus);
    const PathRep direction{corpus.vector(2, 0.25), {corpus.step_curve({0.0, 1.0}, 2, 4, 0.25)}, {}};
    const double h = 1e-2;

    // One cell plan for every evaluation, so all images share their breakpoints.
    CellPlan recorded;
    transition_rep(*sphere, kOneChart, kTwoCharts, shifted(base, direction, h), {.tol = tol, .base_plan = &recorded});
    auto image = [&](double eps) {
        CellPlan plan = recorded;
        plan.rewind();
        return transition_rep(*sphere, kOneChart, kTwoCharts, shifted(base, direction, eps), {.tol = tol, .base_plan = &plan}).rep;
    };
    auto central = [&](double step) { return scaled_difference(image(step), image(-step), 0.5 / step); };
    const PathRep d1 = central(h), d2 = central(h / 2), d4 = central(h / 4);
    const double coarse = rep_distance(d1, d2), fine = rep_distance(d2, d4);
    const double order = std::log2(coarse / fine);
    return verdict(order >= 1.9, order, 1.9);
}

CaseResult transition_roundtrip(std::size_t, std::mt19937_64& rng, const SuiteOptions& options) {
    DyadicCorpus corpus{rng};
    const auto sphere = builtin_manifold("sphere-stereo");
    const double tol = options.tol.value_or(1e-7);
    const double bound = 10.0 * tol;
    const PathRep base = slow_sphere_rep(corpus);
    const PathRep there = transition_rep(*sphere, kOneChart, kTwoCharts, base, {.tol = tol}).rep;
    const PathRep back = transition_rep(*sphere, kTwoCharts, kOneChart, there, {.tol = tol}).rep;
    const PathRep again = transition_rep(*sphere, kOneChart, kTwoCharts, back, {.tol = tol}).rep;
    const double error = std::max(rep_distance(back, base), rep_distance(again, there));
    return verdict(error < bound, error, bound);
}

CaseResult transition_refinement(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    const auto m = corpus_manifold(index);
    const ManifoldPath p = random_path(m, rng);
    const PathRep rep = chart_map(p);
    const PathChartSystem fine = refine(p.system(), corpus);
    const PathRep refined = transition_rep(*m, p.system(), fine, rep).rep;
    const PathRep back = transition_rep(*m, fine, p.system(), refined).rep;
    const ManifoldPath q = reconstruct(m, fine, refined);
    bool ok = back == rep;
    for (int k = 0; ok && k <= 64; ++k) {
        const double t = std::ldexp(k, -6);
        ok = same_values(evaluate_path(q, t).coords, evaluate_path(p, t).coords);
    }
    return verdict(ok, ok ? 0.0 : rep_distance(back, rep), 0.0, m->name());
}

CaseResult openness(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    const auto m = corpus_manifold(index);
    const ManifoldPath p = random_path(m, rng);
    const auto certificate = openness_margin(p);
    if (!(certificate.eta > 0.0)) return verdict(false, certificate.eta, 0.0, "non-positive margin");
    const double eta = std::min(certificate.eta, 10.0);
    const PathRep rep = chart_map(p);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        try {
            reconstruct(m, p.system(), perturb(rep, eta, rng));
        } catch (const DomainError&) {
            ++failures;
        }
    }
    std::ostringstream note;
    note << m->name() << " eta=" << eta;
    return verdict(failures == 0, failures, 0.0, note.str());
}

// lifts-transport

PathTrivialization groupoid_scenario(std::size_t index, std::mt19937_64& rng) {
    if (index % 2 == 0) {
        const auto e = builtin_bundle("moebius-line-bundle");
        return PathTrivialization(moebius_loop(e->base_ptr()), e, Mat::Constant(1, 1, signed_power(rng)));
    }
    const ManifoldPath p = random_path(builtin_manifold("torus"), rng);
    return tangent_trivialization(p, signed_permutation(rng, 2));
}

CaseResult transport_groupoid(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    const PathTrivialization triv = groupoid_scenario(index, rng);
    const double r = dyadic_time(rng), s = dyadic_time(rng), t = dyadic_time(rng);
    const Mat id = Mat::Identity(triv.rank(), triv.rank());
    const Mat composed = transport(triv, t, r) * transport(triv, s, t);
    const Mat direct = transport(triv, s, r);
    const Mat there_and_back = transport(triv, t, s) * transport(triv, s, t);
    const bool ok = same_values(transport(triv, s, s), id) && same_values(composed, direct) && same_values(there_and_back, id);
    const double measured = std::max({operator_norm(transport(triv, s, s) - id), operator_norm(composed - direct),
                                      operator_norm(there_and_back - id)});
    return verdict(ok, measured, 0.0);
}

CaseResult moebius_holonomy(std::size_t, std::mt19937_64&, const SuiteOptions&) {
    const auto e = builtin_bundle("moebius-line-bundle");
    const PathTrivialization triv(moebius_loop(e->base_ptr()), e);
    const Mat holonomy = transport(triv, 0.0, 1.0);
    const Mat minus_id = -Mat::Identity(1, 1);
    return verdict(same_values(holonomy, minus_id), operator_norm(holonomy - minus_id), 0.0);
}

CaseResult norm_equivalence(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    std::optional<PathTrivialization> triv;
    switch (index % 3) {
        case 0: {
            const auto sphere = builtin_manifold("sphere-stereo");
            const PathRep rep = slow_sphere_rep(corpus);
            triv.emplace(tangent_trivialization(
                reconstruct(sphere, kTwoCharts, transition_rep(*sphere, kOneChart, kTwoCharts, rep, {.tol = 1e-5}).rep)));
            break;
        }
        case 1: {
            const auto e = builtin_bundle("moebius-line-bundle");
            triv.emplace(moebius_loop(e->base_ptr()), e, Mat::Constant(1, 1, signed_power(rng)));
            break;
        }
        default:
            triv.emplace(tangent_trivialization(random_path(builtin_manifold("torus"), rng), dyadic_frame(corpus, 2)));
    }
    const int n = triv->rank();
    const RegCurve w({corpus.vector(n, 4.0)}, corpus.step_curve({0.0, 1.0}, n, 6, 4.0));
    const NormComparison cmp = compare_norms(*triv, w);
    return verdict(cmp.ratio <= cmp.bound, cmp.ratio, cmp.bound);
}

CaseResult compatibility_projection(std::size_t index, std::mt19937_64& rng, const SuiteOptions&) {
    DyadicCorpus corpus{rng};
    const bool moebius = index % 2 == 0;
    const auto e = moebius ? builtin_bundle("moebius-line-bundle") : builtin_bundle("trivial-bundle", {.dim = 2, .base = "torus"});
    const ManifoldPath p = moebius ? moebius_loop(e->base_ptr()) : random_path(e->base_ptr(), rng);
    const int n = p.manifold().dim(), rank = e->rank();

    const PathTrivialization tangent_a = tangent_trivialization(p, dyadic_frame(corpus, n));
    const PathTrivialization bundle_a(p, e, dyadic_frame(corpus, rank));
    const PathTrivialization tangent_b = tangent_trivialization(p, dyadic_frame(corpus, n));
    const PathTrivialization bundle_b(p, e, dyadic_frame(corpus, rank));

    int mismatches = 0;
    const LiftCompatibility same = lift_compatibility(tangent_a, bundle_a, tangent_b, bundle_b);
    const std::vector<StepCurve> u = random_fibers(p.system(), rank, rng);
    const StepCurve via_a = linear_push(same.fiber.matrix(0.0), represent_section(bundle_a, u));
    if (!(via_a == represent_section(bundle_b, u))) ++mismatches;

    // A second system for the same path: the automorphism is assembled piecewise.
    const PathChartSystem fine = refine(p.system(), corpus);
    const ManifoldPath q = reconstruct(e->base_ptr(), fine, transition_rep(e->base(), p.system(), fine, chart_map(p)).rep);
    const LiftCompatibility across = lift_compatibility(tangent_a, bundle_a, tangent_trivialization(q), PathTrivialization(q, e));
    for (int k = 0; k < 8; ++k) {
        const double t = dyadic_time(rng);
        if (!same_values(same.project(t), same.base.matrix(t))) ++mismatches;
        if (!same_values(across.project(t), across.base.matrix(t))) ++mismatches;
    }
    return verdict(mismatches == 0, mismatches, 0.0);
}

CaseResult tangent_chart_independence(std::size_t, std::mt19937_64& rng, const SuiteOptions& options) {
    DyadicCorpus corpus{rng};
    const auto sphere = builtin_manifold("sphere-stereo");
    const double tol = options.tol.value_or(1e-6);
    const double bound = 1e-6;
    const PathRep base = slow_sphere_rep(corpus);
    // The direction shares the base breakpoints, so one cell plan fits every slice.
    const PathRep direction{corpus.vector(2, 0.5), {map_values(base.pieces[0], [&](const Vec&) { return corpus.vector(2, 0.5); })}, {}};

    CellPlan recorded;
    transition_rep(*sphere, kOneChart, kTwoCharts, base, {.tol = tol, .base_plan = &recorded});
    const PathDeformation in_one = [&](double eps) { return reconstruct(sphere, kOneChart, shifted(base, direction, eps)); };
    const PathDeformation in_two = [&](double eps) {
        CellPlan plan = recorded;
        plan.rewind();
        return reconstruct(sphere, kTwoCharts,
                           transition_rep(*sphere, kOneChart, kTwoCharts, shifted(base, direction, eps), {.tol = tol, .base_plan = &plan}).rep);
    };
    const FieldRep va = deformation_tangent(in_one), vb = deformation_tangent(in_two);
    const auto a = compatibility_automorphisms(tangent_trivialization(in_one(0.0)), tangent_trivialization(in_two(0.0)));
    double gap = 0.0;
    for (int k = 0; k <= 256; ++k) {
        const double t = std::ldexp(k, -8);
        gap = std::max(gap, max_norm(vb.phi.eval(t) - a.matrix(t) * va.phi.eval(t)));
    }
    return verdict(gap < bound, gap, bound);
}

std::vector<Suite> make_suites() {
    return {
        {"concat-isometry", "regulated.concat.isometry", 10000, concat_isometry},
        {"restriction-contraction", "regulated.restrict.contraction", 10000, restriction_contraction},
        {"derivative-isomorphism", "regulated.derivative-split.isomorphism", 10000, derivative_isomorphism},
        {"integral-commutation", "regulated.integral.linear-commutation", 1000, integral_commutation},
        {"change-of-variables", "regulated.integral.change-of-variables", 1000, change_of_variables},
        {"atlas-roundtrip", "path.chart-map.reconstruct.inverse", 4000, atlas_roundtrip},
        {"transition-smoothness", "path.transition.smoothness", 100, transition_smoothness},
        {"transition-roundtrip", "path.transition.roundtrip", 20, transition_roundtrip},
        {"transition-refinement", "path.transition.refinement-exact", 1000, transition_refinement},
        {"openness", "path.openness.margin", 20, openness},
        {"transport-groupoid", "lift.transport.groupoid", 10000, transport_groupoid},
        {"moebius-holonomy", "lift.transport.holonomy", 1, moebius_holonomy},
        {"norm-equivalence", "lift.norm.equivalence", 3000, norm_equivalence},
        {"compatibility-projection", "lift.compatibility.projection", 1000, compatibility_projection},
        {"tangent-chart-independence", "lift.deformation.chart-independence", 100, tangent_chart_independence},
    };
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        default: return "indeterminate";
    }
}

Json encode(const Check& c, bool with_runtime) {
    Json out;
    out["name"] = c.name;
    out["anchor"] = c.anchor;
    out["status"] = to_string(c.status);
    out["measured"] = number(c.measured);
    out["bound"] = number(c.bound);
    if (with_runtime) out["runtime_ms"] = std::round(c.runtime_ms * 1000.0) / 1000.0;
    if (!c.note.empty()) out["note"] = c.note;
    return out;
}

std::string render_report(const std::vector<Check>& checks, bool with_runtime) {
    std::string out;
    for (const auto& c : checks) out += encode(c, with_runtime).dump() + "\n";
    return out;
}

const std::vector<Suite>& suites() {
    static const std::vector<Suite> registry = make_suites();
    return registry;
}

const Suite* find_suite(const std::string& name) {
    for (const auto& s : suites())
        if (s.name == name) return &s;
    return nullptr;
}

std::size_t worker_count(std::size_t requested) {
    std::size_t n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("PATHATLAS_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(cap, &end, 10);
        if (end != cap && value > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(value));
    }
    return n;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 of the pair
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Check> run_suite(const Suite& suite, const SuiteOptions& options) {
    const std::size_t count = options.count != 0 ? options.count : suite.default_count;
    std::vector<Check> checks(count);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            Check& check = checks[i];
            check.name = suite.name + "#" + std::to_string(i);
            check.anchor = suite.anchor;
            std::mt19937_64 rng(case_seed(options.seed, i));
            const auto start = std::chrono::steady_clock::now();
            try {
                CaseResult r = suite.run_case(i, rng, options);
                check.status = r.status;
                check.measured = r.measured;
                check.bound = r.bound;
                check.note = std::move(r.note);
            } catch (const std::exception& ex) {
                check.status = Status::fail;
                check.measured = std::numeric_limits<double>::quiet_NaN();
                check.note = ex.what();
            }
            check.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const std::size_t workers = std::min(worker_count(options.workers), count);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return checks;
}

}  // namespace pathatlas
