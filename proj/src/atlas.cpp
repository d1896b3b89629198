#include <cmath>

#include "pathatlas/atlas.hpp"
#include "pathatlas/errors.hpp"

namespace pathatlas {
namespace {

bool has_transition(const Manifold& m, int i, int j) {
    try {
        m.transition(i, j);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

}  // namespace

Manifold::Manifold(std::string name, int dim, std::vector<Chart> charts)
    : name_(std::move(name)), dim_(dim), charts_(std::move(charts)), identity_(SmoothMap::identity(dim)) {
    if (charts_.empty()) throw DimensionError("a manifold needs at least one chart");
}

void Manifold::set_transition(int i, int j, SmoothMap map) {
    if (i == j) throw std::invalid_argument("self transitions are always the identity");
    if (map.dim_in != dim_ || map.dim_out != dim_) throw DimensionError("transition dimension differs from the manifold");
    chart(i);
    chart(j);
    transitions_[{i, j}] = std::move(map);
}

const Chart& Manifold::chart(int i) const {
    if (i < 0 || i >= chart_count()) throw std::out_of_range("unknown chart id");
    return charts_[static_cast<std::size_t>(i)];
}

const SmoothMap& Manifold::transition(int i, int j) const {
    chart(i);
    chart(j);
    if (i == j) return identity_;
    auto it = transitions_.find({i, j});
    if (it == transitions_.end()) throw DomainError("charts " + std::to_string(i) + " and " + std::to_string(j) + " do not overlap");
    return it->second;
}

bool Manifold::in_chart(int i, const Vec& x) const { return x.size() == dim_ && chart(i).contains(x); }

bool Manifold::in_overlap(int i, int j, const Vec& x) const {
    if (!in_chart(i, x)) return false;
    if (i == j) return true;
    auto it = transitions_.find({i, j});
    return it != transitions_.end() && it->second.contains(x);
}

BundleAtlas::BundleAtlas(std::string name, std::shared_ptr<const Manifold> base, int rank)
    : name_(std::move(name)), base_(std::move(base)), rank_(rank) {
    if (rank_ < 1) throw DimensionError("bundle rank must be positive");
}

void BundleAtlas::set_cocycle(int i, int j, SmoothMap g) {
    if (g.dim_in != base_->dim() || g.dim_out != rank_ * rank_) throw DimensionError("cocycle has the wrong shape");
    cocycles_[{i, j}] = std::move(g);
}

const SmoothMap& BundleAtlas::cocycle_map(int i, int j) const {
    auto it = cocycles_.find({i, j});
    if (it == cocycles_.end()) throw DomainError("no cocycle between these charts");
    return it->second;
}

Mat BundleAtlas::cocycle(int i, int j, const Vec& x) const {
    if (i == j) return Mat::Identity(rank_, rank_);
    const auto& g = cocycle_map(i, j);
    if (!g.contains(x)) throw DomainError("cocycle evaluated outside the chart overlap");
    const Vec flat = g(x);
    return Eigen::Map<const Mat>(flat.data(), rank_, rank_);
}

Point convert_point(const Manifold& m, const Point& p, int target) {
    if (p.chart == target) return p;
    if (!m.in_overlap(p.chart, target, p.coords)) throw DomainError("point is not in the overlap with the target chart");
    return {target, m.transition(p.chart, target)(p.coords)};
}

Mat tangent_cocycle(const Manifold& m, int i, int j, const Vec& x) {
    if (!m.in_overlap(i, j, x)) throw DomainError("point is not in the overlap of the two charts");
    return m.transition(i, j).jacobian(x);
}

std::shared_ptr<const BundleAtlas> tangent_bundle(std::shared_ptr<const Manifold> m) {
    auto e = std::make_shared<BundleAtlas>("tangent-bundle", m, m->dim());
    const int n = m->dim();
    for (int i = 0; i < m->chart_count(); ++i)
        for (int j = 0; j < m->chart_count(); ++j) {
            if (i == j || !has_transition(*m, i, j)) continue;
            const SmoothMap& t = m->transition(i, j);
            SmoothMap g;
            g.dim_in = n;
            g.dim_out = n * n;
            g.value = [t](const Vec& x) -> Vec {
                const Mat jac = t.jacobian(x);
                return Eigen::Map<const Vec>(jac.data(), jac.size());
            };
            g.domain = t.domain;
            g.domain_margin = t.domain_margin;
            e->set_cocycle(i, j, std::move(g));
        }
    return e;
}

namespace {

Vec ball_point(std::mt19937_64& rng, const Vec& center, double radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec p = center;
    for (int k = 0; k < p.size(); ++k) p(k) += radius * u(rng);
    return p;
}

std::size_t margin_violations(std::mt19937_64& rng, const Vec& x, double r,
                              const std::function<bool(const Vec&)>& inside) {
    if (!(r > 0.0)) return 0;
    const double radius = std::min(r, 1e3) * (1.0 - 1e-9);
    std::size_t bad = 0;
    for (int q = 0; q < 100; ++q)
        if (!inside(ball_point(rng, x, radius))) ++bad;
    return bad;
}

}  // namespace

AtlasCheck check_manifold(const Manifold& m, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    AtlasCheck out;
    const int nc = m.chart_count();
    for (std::size_t s = 0; s < samples; ++s) {
        const int i = static_cast<int>(s % static_cast<std::size_t>(nc));
        const Vec x = m.chart(i).sample(rng);
        ++out.samples;
        out.identity_error = std::max(out.identity_error, max_norm(m.transition(i, i)(x) - x));
        out.margin_violations += margin_violations(rng, x, m.chart(i).margin(x), m.chart(i).contains);
        for (int j = 0; j < nc; ++j) {
            if (j == i || !has_transition(m, i, j) || !m.in_overlap(i, j, x)) continue;
            const SmoothMap& tij = m.transition(i, j);
            out.margin_violations += margin_violations(rng, x, tij.margin(x), [&](const Vec& y) { return m.in_overlap(i, j, y); });
            const Vec y = tij(x);
            out.inverse_error = std::max(out.inverse_error, max_norm(m.transition(j, i)(y) - x));
            const Mat jac = tij.jacobian(x);
            const Mat fd = tij.finite_difference_jacobian(x);
            out.jacobian_error = std::max(out.jacobian_error, operator_norm(jac - fd) / std::max(1.0, operator_norm(jac)));
            for (int k = 0; k < nc; ++k) {
                if (k == i || k == j || !m.in_overlap(i, k, x) || !m.in_overlap(j, k, y)) continue;
                out.cocycle_error = std::max(out.cocycle_error, max_norm(m.transition(i, k)(x) - m.transition(j, k)(y)));
            }
        }
    }
    return out;
}

BundleCheck check_bundle(const BundleAtlas& e, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BundleCheck out;
    const Manifold& m = e.base();
    const int nc = m.chart_count();
    const Mat id = Mat::Identity(e.rank(), e.rank());
    for (std::size_t s = 0; s < samples; ++s) {
        const int i = static_cast<int>(s % static_cast<std::size_t>(nc));
        const Vec x = m.chart(i).sample(rng);
        ++out.samples;
        out.identity_error = std::max(out.identity_error, operator_norm(e.cocycle(i, i, x) - id));
        for (int j = 0; j < nc; ++j) {
            if (j == i || !m.in_overlap(i, j, x)) continue;
            const Mat gij = e.cocycle(i, j, x);
            out.min_abs_determinant = std::min(out.min_abs_determinant, std::abs(gij.determinant()));
            const Vec y = m.transition(i, j)(x);
            for (int k = 0; k < nc; ++k) {
                if (!m.in_overlap(i, k, x) || !m.in_overlap(j, k, y)) continue;
                out.cocycle_error = std::max(out.cocycle_error, operator_norm(e.cocycle(i, k, x) - e.cocycle(j, k, y) * gij));
            }
        }
    }
    return out;
}

}  // namespace pathatlas
