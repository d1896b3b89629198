#include <algorithm>
#include <cmath>
#include <limits>

#include "pathatlas/errors.hpp"
#include "pathatlas/path_space.hpp"

namespace pathatlas {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest chart margin along an order-1 piece. Convex charts carry concave
// margins, so the minimum over a straight segment sits at an endpoint;
// otherwise a net with spacing eps is used and eps is subtracted.
double piece_margin(const Chart& chart, const RegCurve& piece) {
    double margin = kInf;
    if (chart.convex) {
        for (double t : piece.top().breaks()) margin = std::min(margin, chart.margin(piece.eval(t)));
        return margin;
    }
    const double eps = 1e-3 * std::max(1.0, piece.sup_derivative(0));
    for (const auto& p : image_net(piece, eps)) margin = std::min(margin, chart.margin(p));
    return margin - eps;
}

// Net of base values over [s, e] with spacing at most eps. The point at e is
// exact only when the curve really takes that value there.
struct NetPoint {
    Vec value;
    bool exact;
};

void segment_net(const RegCurve& piece, double s, double e, double eps, bool closed, std::vector<NetPoint>& out) {
    const Vec ps = piece.eval(s), pe = piece.eval(e);
    const double cells = std::ceil(max_norm(pe - ps) / eps);
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::min(cells, 1e7)));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = (k == n) ? e : s + (e - s) * static_cast<double>(k) / static_cast<double>(n);
        out.push_back({piece.eval(t), k < n || closed});
    }
}

class Verdict {
public:
    // Net points carry a covering radius of eps; isolated exact values carry none.
    void net_point(double margin, bool exact, double eps) {
        if (margin <= 0.0) {
            exact ? outside_ = true : unsure_ = true;
        } else if (margin <= eps) {
            unsure_ = true;
        }
    }
    void value(double margin) {
        if (margin <= 0.0) outside_ = true;
    }
    Membership result() const {
        if (outside_) return Membership::outside;
        return unsure_ ? Membership::indeterminate : Membership::inside;
    }

private:
    bool outside_ = false;
    bool unsure_ = false;
};

Vec stack(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    out << a, b;
    return out;
}

Membership neighborhood_impl(const ManifoldPath& p, const std::vector<StepCurve>* fibers, const TimeSet& k,
                             const Region* total, const Region& base, const Region& velocity, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("net spacing must be positive");
    const auto& sys = p.system();
    Verdict verdict;
    for (const auto& [a, b] : k) {
        if (!(0.0 <= a && a <= b && b <= 1.0)) throw DomainError("time set must lie in [0, 1]", a);
        if (a == b) {
            const std::size_t i = sys.piece_at(a);
            const int chart = sys.charts[i];
            const Vec x = p.pieces()[i].eval(a);
            verdict.value(base.signed_margin(chart, x));
            verdict.value(velocity.signed_margin(chart, p.pieces()[i].top()(a)));
            if (total) verdict.value(total->signed_margin(chart, stack(x, (*fibers)[i](a))));
            continue;
        }
        for (std::size_t i = 0; i < sys.pieces(); ++i) {
            const double lo = std::max(a, sys.tau[i]), hi = std::min(b, sys.tau[i + 1]);
            if (!(lo < hi)) continue;
            const int chart = sys.charts[i];
            const RegCurve& piece = p.pieces()[i];
            const StepCurve y = restrict_to(piece.top(), Interval(lo, hi));
            for (const auto& v : y.values()) verdict.value(velocity.signed_margin(chart, v));

            // Cells on which both the base velocity and the fiber value are constant.
            std::vector<double> cuts = y.breaks();
            if (total) {
                const StepCurve u = restrict_to((*fibers)[i], Interval(lo, hi));
                cuts.insert(cuts.end(), u.breaks().begin(), u.breaks().end());
                std::sort(cuts.begin(), cuts.end());
                cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            }
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const double s = cuts[c], e = cuts[c + 1];
                std::vector<NetPoint> net;
                segment_net(piece, s, e, eps, true, net);
                for (const auto& q : net) verdict.net_point(base.signed_margin(chart, q.value), q.exact, eps);
                if (!total) continue;
                // The cell's fiber value is attained at e only if the fiber does not jump there.
                const Vec u = (*fibers)[i](0.5 * (s + e));
                const bool selected = e < sys.tau[i + 1] || i + 1 == sys.pieces();
                net.clear();
                segment_net(piece, s, e, eps, selected && same_values((*fibers)[i](e), u), net);
                for (const auto& q : net) verdict.net_point(total->signed_margin(chart, stack(q.value, u)), q.exact, eps);
            }
        }
    }
    return verdict.result();
}

}  // namespace

OpennessCertificate openness_margin(const ManifoldPath& p) {
    const Manifold& m = p.manifold();
    const auto& sys = p.system();
    OpennessCertificate cert;
    cert.eta = kInf;
    double growth = 1.0;
    for (std::size_t i = 0; i < sys.pieces(); ++i) {
        const RegCurve& piece = p.pieces()[i];
        const double delta = piece_margin(m.chart(sys.charts[i]), piece);
        if (!(delta > 0.0)) throw DomainError("path is not interior to chart " + std::to_string(sys.charts[i]), sys.tau[i]);
        growth += piece.domain().length();
        cert.chart_margins.push_back(delta);
        cert.growth.push_back(growth);
        cert.eta = std::min(cert.eta, delta / growth);
        if (i + 1 == sys.pieces()) break;

        const int from = sys.charts[i], to = sys.charts[i + 1];
        const double knot = sys.tau[i + 1];
        double rho = kInf, lip = 1.0;
        if (from != to) {
            const SmoothMap& t = m.transition(from, to);
            const Vec junction = piece.eval(knot);
            rho = 0.5 * t.margin(junction);
            if (!(rho > 0.0)) throw DomainError("junction point is not interior to the chart overlap", knot);
            lip = t.lipschitz_bound(junction, rho);
            cert.eta = std::min(cert.eta, rho / growth);
        }
        cert.junction_radii.push_back(rho);
        cert.junction_lipschitz.push_back(lip);
        growth *= lip;
    }
    return cert;
}

Region Region::everything() {
    return {[](int, const Vec&) { return kInf; }};
}

Membership in_neighborhood(const BundleLift& c, const TimeSet& k, const Region& total, const Region& base,
                           const Region& velocity, double eps) {
    return neighborhood_impl(c.base, &c.fibers, k, &total, base, velocity, eps);
}

Membership in_neighborhood(const ManifoldPath& p, const TimeSet& k, const Region& base, const Region& velocity,
                           double eps) {
    return neighborhood_impl(p, nullptr, k, nullptr, base, velocity, eps);
}

PathChartSystem find_chart_system(const Manifold& m, const std::function<Point(double)>& sample, std::size_t samples,
                                  double max_step) {
    if (samples < 2) throw std::invalid_argument("at least two samples are needed");
    std::vector<double> times(samples);
    std::vector<Point> points(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        times[k] = (k + 1 == samples) ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
        points[k] = sample(times[k]);
    }
    auto in_chart = [&](int chart, std::size_t k) -> std::optional<Vec> {
        const Point& p = points[k];
        if (p.chart == chart) return m.in_chart(chart, p.coords) ? std::optional<Vec>(p.coords) : std::nullopt;
        if (!m.in_overlap(p.chart, chart, p.coords)) return std::nullopt;
        Vec q = m.transition(p.chart, chart)(p.coords);
        return m.in_chart(chart, q) ? std::optional<Vec>(std::move(q)) : std::nullopt;
    };

    PathChartSystem sys{{0.0}, {}};
    std::size_t start = 0;
    while (start + 1 < samples) {
        std::size_t best_end = start;
        int best_chart = -1;
        for (int chart = 0; chart < m.chart_count(); ++chart) {
            auto q = in_chart(chart, start);
            if (!q) continue;
            std::size_t end = start;
            while (end + 1 < samples) {
                auto next = in_chart(chart, end + 1);
                if (!next) break;
                const double step = max_norm(*next - *q);
                const Chart& ch = m.chart(chart);
                if (step > max_step || !(ch.margin(*q) > 2.0 * step) || !(ch.margin(*next) > 2.0 * step)) break;
                q = std::move(next);
                ++end;
            }
            if (end > best_end) {
                best_end = end;
                best_chart = chart;
            }
        }
        if (best_chart < 0) throw CoverError("no chart covers the path beyond this sample", times[start]);
        sys.charts.push_back(best_chart);
        sys.tau.push_back(times[best_end]);
        start = best_end;
    }
    return sys;
}

}  // namespace pathatlas
