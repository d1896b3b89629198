#include <algorithm>
#include <cmath>

#include "pathatlas/regulated.hpp"

namespace pathatlas {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("interval needs finite lo < hi");
}

Partition::Partition(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw DomainError("partition needs at least two knots");
    if (!std::is_sorted(knots_.begin(), knots_.end())) throw DomainError("partition knots must be nondecreasing");
    if (!(knots_.front() < knots_.back())) throw DomainError("partition must span a nondegenerate interval");
}

Partition Partition::strict() const {
    auto k = knots_;
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return Partition(std::move(k));
}

StepCurve::StepCurve(std::vector<double> breaks, std::vector<Vec> values) {
    if (values.empty() || breaks.size() != values.size() + 1)
        throw DimensionError("step curve needs n values and n+1 breakpoints");
    const auto dim = values.front().size();
    if (dim == 0) throw DimensionError("step curve values must be nonempty vectors");
    for (const auto& v : values)
        if (v.size() != dim) throw DimensionError("step curve values must share one dimension");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1])) throw DomainError("step curve breakpoints must increase strictly");
    domain_ = Interval(breaks.front(), breaks.back());

    breaks_.push_back(breaks.front());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values_.empty() && same_values(values_.back(), values[i])) {
            breaks_.back() = breaks[i + 1];
            continue;
        }
        values_.push_back(std::move(values[i]));
        breaks_.push_back(breaks[i + 1]);
    }
}

StepCurve StepCurve::constant(const Interval& domain, const Vec& value) {
    return StepCurve({domain.lo, domain.hi}, {value});
}

StepCurve StepCurve::zero(const Interval& domain, int dim) { return constant(domain, Vec::Zero(dim)); }

std::size_t StepCurve::piece_at(double t) const {
    if (!domain_.contains(t)) throw DomainError("evaluation time outside the curve domain", t);
    if (t == domain_.hi) return values_.size() - 1;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

const Vec& StepCurve::left_limit(double t) const {
    if (!(t > domain_.lo && t <= domain_.hi)) throw DomainError("left limit needs lo < t <= hi", t);
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
    return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

double StepCurve::sup_norm() const {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, max_norm(v));
    return s;
}

Vec StepCurve::integral(double a, double b) const {
    if (!domain_.contains(a) || !domain_.contains(b)) throw DomainError("integration bounds outside the domain");
    if (b < a) return -integral(b, a);
    Vec sum = Vec::Zero(dim());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double lo = std::max(a, breaks_[i]);
        const double hi = std::min(b, breaks_[i + 1]);
        if (hi > lo) sum += values_[i] * (hi - lo);
    }
    return sum;
}

bool operator==(const StepCurve& a, const StepCurve& b) {
    if (a.breaks_ != b.breaks_ || a.values_.size() != b.values_.size()) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i)
        if (!same_values(a.values_[i], b.values_[i])) return false;
    return true;
}

}  // namespace pathatlas
