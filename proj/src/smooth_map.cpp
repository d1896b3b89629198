#include "pathatlas/smooth_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathatlas {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(int index, int base) {
    double result = 0.0, f = 1.0 / base;
    while (index > 0) {
        result += f * (index % base);
        index /= base;
        f /= base;
    }
    return result;
}

std::size_t cells_for(double x) {
    if (!std::isfinite(x) || x > 1e15) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
}

}  // namespace

Vec SmoothMap::operator()(const Vec& x) const {
    if (x.size() != dim_in) throw DimensionError("smooth map argument has the wrong dimension");
    return value(x);
}

Mat SmoothMap::finite_difference_jacobian(const Vec& x) const {
    const double h = difference_step(x);
    Mat j(dim_out, dim_in);
    for (int k = 0; k < dim_in; ++k) {
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        j.col(k) = (value(xp) - value(xm)) / (xp(k) - xm(k));
    }
    return j;
}

Mat SmoothMap::jacobian(const Vec& x) const {
    if (x.size() != dim_in) throw DimensionError("smooth map argument has the wrong dimension");
    return analytic_jacobian ? analytic_jacobian(x) : finite_difference_jacobian(x);
}

bool SmoothMap::contains(const Vec& x) const { return !domain || domain(x); }

double SmoothMap::margin(const Vec& x) const {
    if (domain_margin) return domain_margin(x);
    return contains(x) ? std::numeric_limits<double>::infinity() : 0.0;
}

std::vector<Vec> ball_sample(const Vec& center, double radius, int extra_points) {
    const auto m = static_cast<int>(center.size());
    std::vector<Vec> pts{center};
    if (!(radius > 0.0) || !std::isfinite(radius)) return pts;
    for (int k = 0; k < m; ++k)
        for (double s : {-1.0, 1.0}) {
            Vec p = center;
            p(k) += s * radius;
            pts.push_back(p);
        }
    if (m <= 6)
        for (int mask = 0; mask < (1 << m); ++mask) {
            Vec p = center;
            for (int k = 0; k < m; ++k) p(k) += ((mask >> k) & 1 ? 1.0 : -1.0) * radius;
            pts.push_back(p);
        }
    for (int i = 1; i <= extra_points; ++i) {
        Vec p = center;
        for (int k = 0; k < m; ++k) p(k) += radius * (2.0 * radical_inverse(i, kPrimes[k % 12]) - 1.0);
        pts.push_back(p);
    }
    return pts;
}

double SmoothMap::lipschitz_bound(const Vec& center, double radius) const {
    if (second_derivative_bound)
        return operator_norm(jacobian(center)) + second_derivative_bound(center, radius) * radius;
    double best = 0.0;
    for (const auto& z : ball_sample(center, radius))
        if (contains(z)) best = std::max(best, operator_norm(jacobian(z)));
    return 2.0 * best;
}

double SmoothMap::curvature_bound(const Vec& center, double radius) const {
    if (second_derivative_bound) return second_derivative_bound(center, radius);
    double best = 0.0;
    for (const auto& z : ball_sample(center, radius, 8)) {
        if (!contains(z)) continue;
        const double h = 1e-4 * (1.0 + max_norm(z));
        double total = 0.0;
        for (int k = 0; k < dim_in; ++k) {
            Vec zp = z, zm = z;
            zp(k) += h;
            zm(k) -= h;
            if (!contains(zp) || !contains(zm)) continue;
            total += operator_norm(jacobian(zp) - jacobian(zm)) / (2.0 * h);
        }
        best = std::max(best, total);
    }
    return 2.0 * best;
}

SmoothMap SmoothMap::identity(int dim) { return affine(Mat::Identity(dim, dim), Vec::Zero(dim)); }

SmoothMap SmoothMap::affine(const Mat& a, const Vec& b) {
    SmoothMap f;
    f.dim_in = static_cast<int>(a.cols());
    f.dim_out = static_cast<int>(a.rows());
    const bool pure_identity = a.isIdentity(0.0) && b.isZero(0.0);
    f.value = [a, b, pure_identity](const Vec& x) -> Vec { return pure_identity ? x : Vec(a * x + b); };
    f.analytic_jacobian = [a](const Vec&) { return a; };
    f.second_derivative_bound = [](const Vec&, double) { return 0.0; };
    return f;
}

RegCurve compose_smooth(const SmoothMap& f, const RegCurve& c, double tol, CellPlan* plan, std::size_t max_cells) {
    if (!(tol > 0.0)) throw std::invalid_argument("composition tolerance must be positive");
    if (c.dim() != f.dim_in) throw DimensionError("curve dimension differs from the map's input dimension");
    if (c.mode() == Regularity::ck || c.order() > 1)
        throw OrderError("composition is implemented for regulated curves of order 0 and 1");

    auto checked = [&](const Vec& p, double t) {
        if (!f.contains(p)) throw DomainError("curve image leaves the domain of the map", t);
        return f(p);
    };

    if (c.order() == 0) {
        const auto& top = c.top();
        std::vector<Vec> values;
        for (std::size_t j = 0; j < top.pieces(); ++j) values.push_back(checked(top.values()[j], top.breaks()[j]));
        return RegCurve(StepCurve(top.breaks(), std::move(values)));
    }

    const StepCurve& top = c.top();
    const auto& b = top.breaks();

    // Cells needed on piece j; 0 marks a piece along which f is affine.
    auto certify = [&](std::size_t j) -> std::size_t {
        const Vec& v = top.values()[j];
        const double speed = max_norm(v);
        if (speed == 0.0) return 1;
        double curvature = 0.0;
        struct Block {
            double s, e;
            int depth;
        };
        std::vector<Block> stack{{b[j], b[j + 1], 0}};
        while (!stack.empty()) {
            auto [s, e, depth] = stack.back();
            stack.pop_back();
            const Vec ps = c.eval(s), pe = c.eval(e);
            const Vec mid = 0.5 * (ps + pe);
            const double radius = 0.5 * max_norm(pe - ps) * (1.0 + 1e-12);
            if (f.margin(mid) > radius) {
                curvature = std::max(curvature, f.curvature_bound(mid, radius));
                continue;
            }
            if (depth > 48) throw DomainError("curve image leaves the domain of the map", s);
            const double m = 0.5 * (s + e);
            stack.push_back({m, e, depth + 1});
            stack.push_back({s, m, depth + 1});
        }
        if (curvature == 0.0) return 0;
        return cells_for(curvature * speed * speed * (b[j + 1] - b[j]) / tol);
    };

    std::vector<double> nodes{b.front()};
    std::vector<Vec> slopes;
    Vec at_prev = checked(c.eval(b.front()), b.front());
    const Vec start = at_prev;
    std::size_t total = 0;
    for (std::size_t j = 0; j < top.pieces(); ++j) {
        std::size_t n = 0;
        if (plan && plan->replay) {
            if (plan->cursor >= plan->cells.size()) throw std::invalid_argument("cell plan exhausted");
            n = plan->cells[plan->cursor++];
        } else {
            n = certify(j);
            if (plan) plan->cells.push_back(n);
        }
        const double a = b[j], e = b[j + 1], len = e - a;
        if (n == 0) {
            slopes.push_back(f.jacobian(c.eval(0.5 * (a + e))) * top.values()[j]);
            nodes.push_back(e);
            at_prev = checked(c.eval(e), e);
            continue;
        }
        total += n;
        if (n == std::numeric_limits<std::size_t>::max() || total > max_cells)
            throw BudgetError("composition tolerance needs more cells than the budget allows");
        double t_prev = a;
        for (std::size_t i = 1; i <= n; ++i) {
            const double t = (i == n) ? e : a + len * static_cast<double>(i) / static_cast<double>(n);
            Vec at = checked(c.eval(t), t);
            slopes.push_back((at - at_prev) / (t - t_prev));
            nodes.push_back(t);
            at_prev = std::move(at);
            t_prev = t;
        }
    }
    return RegCurve({start}, StepCurve(std::move(nodes), std::move(slopes)));
}

}  // namespace pathatlas
