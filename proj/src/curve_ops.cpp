#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathatlas/regulated.hpp"

namespace pathatlas {
namespace {

// ceil(x) that forgives the last-bit noise of quotients such as 1/0.1.
std::size_t cell_count(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::size_t>(std::max(1.0, r));
    return static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
}

std::vector<double> uniform_grid(const Interval& d, std::size_t n) {
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = d.lo + d.length() * static_cast<double>(i) / static_cast<double>(n);
    t.front() = d.lo;
    t.back() = d.hi;
    return t;
}

}  // namespace

RegCurve primitive(const RegCurve& c, const Vec& x0) {
    if (x0.size() != c.dim()) throw DimensionError("initial value dimension differs from the curve");
    std::vector<Vec> jet{x0};
    jet.insert(jet.end(), c.jet().begin(), c.jet().end());
    return RegCurve::from_parts(std::move(jet), c.top_start(), c.step_derivative());
}

DerivativeSplit derivative_split(const RegCurve& c) {
    if (c.order() < 1) throw OrderError("derivative split needs order >= 1");
    std::vector<Vec> rest(c.jet().begin() + 1, c.jet().end());
    return {c.jet().front(), RegCurve::from_parts(std::move(rest), c.top_start(), c.step_derivative())};
}

StepCurve concat(const StepCurve& first, const StepCurve& second) {
    if (first.domain().hi != second.domain().lo) throw DomainError("concatenation needs adjacent domains");
    if (first.dim() != second.dim()) throw DimensionError("concatenation needs equal dimensions");
    auto breaks = first.breaks();
    breaks.insert(breaks.end(), second.breaks().begin() + 1, second.breaks().end());
    auto values = first.values();
    values.insert(values.end(), second.values().begin(), second.values().end());
    return StepCurve(std::move(breaks), std::move(values));
}

StepCurve concat(const std::vector<StepCurve>& parts) {
    if (parts.empty()) throw DimensionError("nothing to concatenate");
    std::vector<double> breaks{parts.front().domain().lo};
    std::vector<Vec> values;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (p > 0) {
            if (parts[p - 1].domain().hi != parts[p].domain().lo) throw DomainError("concatenation needs adjacent domains");
            if (parts[p - 1].dim() != parts[p].dim()) throw DimensionError("concatenation needs equal dimensions");
        }
        breaks.insert(breaks.end(), parts[p].breaks().begin() + 1, parts[p].breaks().end());
        values.insert(values.end(), parts[p].values().begin(), parts[p].values().end());
    }
    return StepCurve(std::move(breaks), std::move(values));
}

StepCurve restrict_to(const StepCurve& c, const Interval& sub) {
    if (!c.domain().contains(sub)) throw DomainError("restriction interval not contained in the domain");
    const auto& b = c.breaks();
    std::vector<double> breaks{sub.lo};
    std::vector<Vec> values;
    for (std::size_t i = 0; i < c.pieces(); ++i) {
        if (b[i + 1] <= sub.lo || b[i] >= sub.hi) continue;
        if (!values.empty()) breaks.push_back(b[i]);
        values.push_back(c.values()[i]);
    }
    breaks.push_back(sub.hi);
    return StepCurve(std::move(breaks), std::move(values));
}

StepCurve map_values(const StepCurve& c, const std::function<Vec(const Vec&)>& f) {
    std::vector<Vec> values;
    values.reserve(c.pieces());
    for (const auto& v : c.values()) values.push_back(f(v));
    return StepCurve(c.breaks(), std::move(values));
}

StepCurve linear_push(const Mat& a, const StepCurve& c) {
    if (a.cols() != c.dim()) throw DimensionError("matrix columns differ from the curve dimension");
    return map_values(c, [&](const Vec& v) -> Vec { return a * v; });
}

RegCurve linear_push(const Mat& a, const RegCurve& c) {
    if (a.cols() != c.dim()) throw DimensionError("matrix columns differ from the curve dimension");
    std::vector<Vec> jet;
    for (const auto& v : c.jet()) jet.push_back(a * v);
    std::optional<Vec> top_start;
    if (c.top_start()) top_start = a * *c.top_start();
    return RegCurve::from_parts(std::move(jet), std::move(top_start), linear_push(a, c.step_derivative()));
}

StepCurve combine(double alpha, const StepCurve& x, double beta, const StepCurve& y) {
    if (!(x.domain() == y.domain())) throw DomainError("combined curves need the same domain");
    if (x.dim() != y.dim()) throw DimensionError("combined curves need the same dimension");
    std::vector<double> breaks;
    std::set_union(x.breaks().begin(), x.breaks().end(), y.breaks().begin(), y.breaks().end(),
                   std::back_inserter(breaks));
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<Vec> values;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        values.push_back(alpha * x(breaks[i]) + beta * y(breaks[i]));
    return StepCurve(std::move(breaks), std::move(values));
}

MonotoneReparametrization::MonotoneReparametrization(RegCurve phi) : phi_(std::move(phi)) {
    if (phi_.order() < 1) throw CertificateError("reparametrization needs order >= 1");
    if (phi_.dim() != 1) throw DimensionError("reparametrization must be scalar");
    auto [lo, hi] = phi_.derivative_range(1, 0);
    if (lo > 0.0) {
        sign_ = 1;
        min_speed_ = lo;
    } else if (hi < 0.0) {
        sign_ = -1;
        min_speed_ = -hi;
    } else {
        throw CertificateError("derivative changes sign or touches zero; no monotonicity certificate");
    }
}

double MonotoneReparametrization::preimage(double value) const {
    const auto& b = phi_.step_derivative().breaks();
    const auto oriented = [&](double s) { return sign_ * (*this)(s); };
    const double target = sign_ * value;
    if (target < oriented(b.front()) || target > oriented(b.back()))
        throw DomainError("value outside the image of the reparametrization");
    // Last break whose image does not exceed the target.
    std::size_t j = 0;
    while (j + 1 < b.size() - 1 && oriented(b[j + 1]) <= target) ++j;
    const double start = b[j];
    const double at_start = (*this)(start);
    if (at_start == value) return start;
    if (phi_.step_order() == 1) {
        const double slope = phi_.step_derivative().values()[j](0);
        return std::clamp(start + (value - at_start) / slope, b[j], b[j + 1]);
    }
    double lo = b[j], hi = b[j + 1];
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (oriented(mid) <= target) lo = mid;
        else hi = mid;
    }
    return std::abs((*this)(lo)-value) <= std::abs((*this)(hi)-value) ? lo : hi;
}

Vec substituted_integral(const StepCurve& c, const MonotoneReparametrization& phi, double s0, double s1) {
    if (s1 < s0) return -substituted_integral(c, phi, s1, s0);
    const auto& dom = phi.curve().domain();
    if (!dom.contains(s0) || !dom.contains(s1)) throw DomainError("substitution bounds outside the reparametrization domain");
    if (s0 == s1) return Vec::Zero(c.dim());
    const double v0 = phi(s0), v1 = phi(s1);
    if (!c.domain().contains(v0) || !c.domain().contains(v1))
        throw DomainError("reparametrization leaves the curve domain");

    std::vector<double> cuts{s0, s1};
    for (double b : phi.curve().step_derivative().breaks())
        if (b > s0 && b < s1) cuts.push_back(b);
    const double img_lo = std::min(v0, v1), img_hi = std::max(v0, v1);
    for (double b : c.breaks())
        if (b > img_lo && b < img_hi) cuts.push_back(phi.preimage(b));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto value_on = [&](double r0, double r1) -> const Vec& { return c(phi(0.5 * (r0 + r1))); };
    if (phi.curve().step_order() == 1) {
        std::vector<Vec> integrand;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double speed = phi.curve().step_derivative()(cuts[i])(0);
            integrand.push_back(speed * value_on(cuts[i], cuts[i + 1]));
        }
        return StepCurve(cuts, std::move(integrand)).integral(s0, s1);
    }
    Vec sum = Vec::Zero(c.dim());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        sum += value_on(cuts[i], cuts[i + 1]) * (phi(cuts[i + 1]) - phi(cuts[i]));
    return sum;
}

std::vector<Vec> image_net(const RegCurve& c, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("net radius must be positive");
    std::vector<Vec> net;
    auto add = [&](const Vec& v) {
        if (std::none_of(net.begin(), net.end(), [&](const Vec& w) { return same_values(v, w); })) net.push_back(v);
    };
    if (c.order() == 0 && c.mode() == Regularity::regulated) {
        for (const auto& v : c.step_derivative().values()) add(v);
        return net;
    }
    const double speed = c.order() >= 1 ? c.sup_derivative(1) : c.step_derivative().sup_norm();
    if (speed == 0.0) return {c.eval(c.domain().lo)};
    for (double t : uniform_grid(c.domain(), cell_count(c.domain().length() * speed / eps))) {
        Vec v = c.eval(t);
        if (net.empty() || !same_values(net.back(), v)) net.push_back(std::move(v));
    }
    return net;
}

StepCurve step_approximate(const std::function<Vec(double)>& f, const Interval& domain, double eps,
                           std::optional<double> modulus, std::size_t max_pieces) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximation tolerance must be positive");
    auto staircase = [&](const std::vector<double>& grid) {
        std::vector<Vec> values;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) values.push_back(f(grid[i]));
        return StepCurve(grid, std::move(values));
    };
    if (modulus) {
        const std::size_t n = cell_count(*modulus * domain.length() / eps);
        if (n > max_pieces) throw BudgetError("staircase would exceed the piece budget");
        return staircase(uniform_grid(domain, n));
    }
    for (std::size_t n = 1; n <= max_pieces; n *= 2) {
        const auto grid = uniform_grid(domain, n);
        bool ok = true;
        for (std::size_t i = 0; ok && i < n; ++i) {
            const Vec left = f(grid[i]);
            for (int q = 1; q <= 4 && ok; ++q) {
                const double t = grid[i] + (grid[i + 1] - grid[i]) * q / 4.0;
                ok = max_norm(f(t) - left) <= 0.5 * eps;
            }
        }
        if (ok) return staircase(grid);
    }
    throw BudgetError("no modulus given and refinement budget exhausted");
}

StepCurve step_approximate(const StepCurve& c, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximation tolerance must be positive");
    return c;
}

RegCurve reparametrize_affine(const RegCurve& c, const Interval& target) {
    const Interval& d = c.domain();
    if (target == d) return c;
    const double slope = d.length() / target.length();
    std::vector<double> breaks;
    for (double t : c.step_derivative().breaks()) breaks.push_back(target.lo + (t - d.lo) / slope);
    breaks.front() = target.lo;
    breaks.back() = target.hi;
    std::vector<Vec> jet;
    double scale = 1.0;
    for (const auto& v : c.jet()) {
        jet.push_back(scale * v);
        scale *= slope;
    }
    std::optional<Vec> top_start;
    if (c.top_start()) {
        top_start = scale * *c.top_start();
        scale *= slope;
    }
    std::vector<Vec> values;
    for (const auto& v : c.step_derivative().values()) values.push_back(scale * v);
    return RegCurve::from_parts(std::move(jet), std::move(top_start), StepCurve(std::move(breaks), std::move(values)));
}

}  // namespace pathatlas
