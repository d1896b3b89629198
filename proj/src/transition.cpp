#include <algorithm>
#include <cmath>
#include <limits>

#include "pathatlas/errors.hpp"
#include "pathatlas/path_space.hpp"

namespace pathatlas {
namespace {

std::vector<double> common_refinement(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> knots;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(knots));
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return knots;
}

std::size_t next_count(CellPlan* plan, const std::function<std::size_t()>& certify) {
    if (plan && plan->replay) {
        if (plan->cursor >= plan->cells.size()) throw std::invalid_argument("cell plan exhausted");
        return plan->cells[plan->cursor++];
    }
    const std::size_t n = certify();
    if (plan) plan->cells.push_back(n);
    return n;
}

// Fiber coordinates g(base(t)) u(t) on one refinement cell, approximated by
// freezing the cocycle at the midpoint of each sub-cell. Along a base segment
// of speed |v| the operator norm of g moves at most rank * Lip(vec g) * |v| per
// unit time, which fixes the number of sub-cells for tolerance tol.
StepCurve rewrite_fiber(const BundleAtlas& e, int from, int to, const RegCurve& base, const StepCurve& fiber,
                        double tol, CellPlan* plan, std::size_t& budget) {
    const SmoothMap& g = e.cocycle_map(from, to);
    std::vector<double> cells = common_refinement(base.top().breaks(), fiber.breaks());
    std::vector<double> breaks;
    std::vector<Vec> values;
    for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
        const double s = cells[k], t = cells[k + 1], len = t - s;
        const double mid_time = 0.5 * (s + t);
        const Vec& u = fiber(mid_time);
        const Vec ps = base.eval(s), pt = base.eval(t);
        const std::size_t n = next_count(plan, [&]() -> std::size_t {
            const double displacement = max_norm(pt - ps);
            const double size = max_norm(u);
            if (displacement == 0.0 || size == 0.0) return 1;
            const double lip = g.lipschitz_bound(0.5 * (ps + pt), 0.5 * displacement * (1.0 + 1e-12));
            const double needed = std::ceil(e.rank() * lip * displacement * size / (2.0 * tol));
            if (!(needed < 1e18)) return std::numeric_limits<std::size_t>::max();
            return std::max<std::size_t>(1, static_cast<std::size_t>(needed));
        });
        if (n == std::numeric_limits<std::size_t>::max() || n > budget)
            throw BudgetError("fiber rewrite needs more cells than the budget allows");
        budget -= n;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = s + len * static_cast<double>(i) / static_cast<double>(n);
            const double b = (i + 1 == n) ? t : s + len * static_cast<double>(i + 1) / static_cast<double>(n);
            const Vec p = base.eval(0.5 * (a + b));
            if (!g.contains(p)) throw CoverError("fiber cocycle evaluated outside the chart overlap", a);
            breaks.push_back(a);
            values.push_back(e.cocycle(from, to, p) * u);
        }
    }
    breaks.push_back(cells.back());
    return StepCurve(std::move(breaks), std::move(values));
}

TransitionResult transition_impl(std::shared_ptr<const Manifold> m, const BundleAtlas* bundle,
                                 const PathChartSystem& src, const PathChartSystem& dst, const PathRep& rep,
                                 const TransitionOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("transition tolerance must be positive");
    dst.validate(*m);
    if (bundle && rep.fibers.size() != src.pieces()) throw DimensionError("lift rep needs one fiber curve per piece");

    std::optional<ManifoldPath> path;
    try {
        path.emplace(reconstruct(m, src, rep));
    } catch (const DomainError& err) {
        throw CoverError(std::string("source rep is not covered by its chart system: ") + err.what(), err.time());
    }

    TransitionResult result;
    result.refinement = common_refinement(src.tau, dst.tau);
    const auto& knots = result.refinement;
    std::size_t budget = options.max_cells;
    std::vector<StepCurve> base_parts, fiber_parts;
    std::size_t j = 0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const Interval cell(knots[k], knots[k + 1]);
        const std::size_t i = src.piece_at(cell.lo);
        const int from = src.charts[i], to = dst.charts[j];
        const RegCurve local = restrict_to(path->pieces()[i], cell);
        if (from == to) {
            base_parts.push_back(local.top());
            if (k == 0) result.rep.x = rep.x;
        } else {
            RegCurve mapped = [&] {
                try {
                    return compose_smooth(m->transition(from, to), local, options.tol, options.base_plan, budget);
                } catch (const DomainError& err) {
                    throw CoverError(std::string("path is not covered by the destination system: ") + err.what(), err.time());
                }
            }();
            budget -= std::min(budget, mapped.top().pieces());
            base_parts.push_back(mapped.top());
            if (k == 0) result.rep.x = mapped.jet().front();
        }
        if (bundle) {
            const StepCurve u = restrict_to(rep.fibers[i], cell);
            fiber_parts.push_back(from == to ? u
                                             : rewrite_fiber(*bundle, from, to, local, u, options.tol, options.fiber_plan, budget));
        }
        if (cell.hi == dst.tau[j + 1]) {
            result.rep.pieces.push_back(concat(base_parts));
            base_parts.clear();
            if (bundle) {
                result.rep.fibers.push_back(concat(fiber_parts));
                fiber_parts.clear();
            }
            ++j;
        }
    }

    try {
        reconstruct(m, dst, result.rep);
    } catch (const DomainError& err) {
        throw CoverError(std::string("path is not covered by the destination system: ") + err.what(), err.time());
    }
    return result;
}

}  // namespace

TransitionResult transition_rep(const Manifold& m, const PathChartSystem& src, const PathChartSystem& dst,
                                const PathRep& rep, const TransitionOptions& options) {
    // The manifold is borrowed for the duration of the call only.
    std::shared_ptr<const Manifold> view(&m, [](const Manifold*) {});
    return transition_impl(view, nullptr, src, dst, rep.base(), options);
}

TransitionResult transition_rep(const BundleAtlas& e, const PathChartSystem& src, const PathChartSystem& dst,
                                const PathRep& rep, const TransitionOptions& options) {
    return transition_impl(e.base_ptr(), &e, src, dst, rep, options);
}

}  // namespace pathatlas
