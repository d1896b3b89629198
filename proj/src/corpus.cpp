#include <algorithm>
#include <cmath>
#include <set>

#include "pathatlas/corpus.hpp"
#include "pathatlas/errors.hpp"

namespace pathatlas {

double DyadicCorpus::value(double scale, int bits) {
    const long long range = 1LL << bits;
    std::uniform_int_distribution<long long> k(-range, range);
    return std::ldexp(static_cast<double>(k(rng)), -bits) * scale;
}

Vec DyadicCorpus::vector(int dim, double scale) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = value(scale);
    return v;
}

double DyadicCorpus::inner_time(const Interval& domain, int bits) {
    const long long cells = 1LL << bits;
    std::uniform_int_distribution<long long> k(1, cells - 1);
    return domain.lo + domain.length() * std::ldexp(static_cast<double>(k(rng)), -bits);
}

StepCurve DyadicCorpus::step_curve(const Interval& domain, int dim, std::size_t max_pieces, double scale) {
    std::uniform_int_distribution<std::size_t> count(1, std::max<std::size_t>(1, max_pieces));
    std::set<double> inner;
    const std::size_t pieces = count(rng);
    while (inner.size() + 1 < pieces) inner.insert(inner_time(domain));
    std::vector<double> breaks{domain.lo};
    breaks.insert(breaks.end(), inner.begin(), inner.end());
    breaks.push_back(domain.hi);
    std::vector<Vec> values;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) values.push_back(vector(dim, scale));
    return StepCurve(std::move(breaks), std::move(values));
}

std::vector<double> DyadicCorpus::partition(std::size_t pieces) {
    std::set<double> inner;
    while (inner.size() + 1 < pieces) inner.insert(inner_time(Interval(0.0, 1.0), 4));
    std::vector<double> tau{0.0};
    tau.insert(tau.end(), inner.begin(), inner.end());
    tau.push_back(1.0);
    return tau;
}

namespace {

std::vector<int> neighbours(const Manifold& m, int chart) {
    std::vector<int> out;
    for (int j = 0; j < m.chart_count(); ++j) {
        if (j == chart) continue;
        try {
            m.transition(chart, j);
            out.push_back(j);
        } catch (const DomainError&) {
        }
    }
    return out;
}

}  // namespace

ManifoldPath random_path(const std::shared_ptr<const Manifold>& m, std::mt19937_64& rng,
                         const RandomPathOptions& options) {
    DyadicCorpus corpus{rng};
    std::uniform_int_distribution<std::size_t> piece_count(1, std::max<std::size_t>(1, options.max_pieces));
    std::uniform_int_distribution<int> any_chart(0, m->chart_count() - 1);
    for (int attempt = 0; attempt < options.attempts; ++attempt) {
        PathChartSystem system;
        system.tau = corpus.partition(piece_count(rng));
        system.charts.push_back(any_chart(rng));
        for (std::size_t i = 1; i + 1 < system.tau.size(); ++i) {
            const auto next = neighbours(*m, system.charts.back());
            if (next.empty()) {
                system.charts.push_back(system.charts.back());
                continue;
            }
            std::uniform_int_distribution<std::size_t> pick(0, next.size());
            const std::size_t k = pick(rng);
            system.charts.push_back(k == next.size() ? system.charts.back() : next[k]);
        }
        // Start points rounded to a dyadic grid keep every value exactly representable.
        Vec x = m->chart(system.charts.front()).sample(rng);
        x = (x * 64.0).array().round() / 64.0;
        // Shrink the derivative until the path fits; each halving is exact.
        PathRep rep{x, {}, {}};
        for (std::size_t i = 0; i < system.pieces(); ++i)
            rep.pieces.push_back(corpus.step_curve(system.piece(i), m->dim(), options.max_steps, options.speed));
        for (int shrink = 0; shrink < 8; ++shrink) {
            try {
                return reconstruct(m, system, rep);
            } catch (const DomainError&) {
                for (auto& y : rep.pieces) y = map_values(y, [](const Vec& v) -> Vec { return 0.5 * v; });
            }
        }
    }
    throw DomainError("could not generate a valid random path on " + m->name());
}

std::vector<StepCurve> random_fibers(const PathChartSystem& system, int rank, std::mt19937_64& rng, double scale) {
    DyadicCorpus corpus{rng};
    std::vector<StepCurve> out;
    for (std::size_t i = 0; i < system.pieces(); ++i) out.push_back(corpus.step_curve(system.piece(i), rank, 4, scale));
    return out;
}

PathRep perturb(const PathRep& rep, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto jitter = [&](int n) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v(k) = 0.999 * radius * unit(rng);
        return v;
    };
    PathRep moved = rep;
    moved.x += jitter(static_cast<int>(rep.x.size()));
    for (auto& y : moved.pieces) {
        const Interval d = y.domain();
        y = combine(1.0, y, 1.0, StepCurve({d.lo, 0.5 * (d.lo + d.hi), d.hi}, {jitter(y.dim()), jitter(y.dim())}));
    }
    return moved;
}

}  // namespace pathatlas
