#include <algorithm>
#include <cmath>

#include "pathatlas/regulated.hpp"
#include "polynomial.hpp"

namespace pathatlas {
namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void require_dims(const std::vector<Vec>& jet, int dim) {
    for (const auto& v : jet)
        if (v.size() != dim) throw DimensionError("jet entries must match the dimension of the top derivative");
}

}  // namespace

RegCurve::RegCurve(std::vector<Vec> jet, StepCurve top) : jet_(std::move(jet)), step_(std::move(top)) {
    require_dims(jet_, step_.dim());
    build_anchors();
}

RegCurve::RegCurve(StepCurve top) : RegCurve(std::vector<Vec>{}, std::move(top)) {}

RegCurve::RegCurve(std::vector<Vec> jet, std::optional<Vec> top_start, StepCurve step, Regularity mode,
                   std::vector<Anchor> anchors)
    : jet_(std::move(jet)),
      top_start_(std::move(top_start)),
      step_(std::move(step)),
      mode_(mode),
      anchors_(std::move(anchors)) {}

RegCurve RegCurve::from_parts(std::vector<Vec> jet, std::optional<Vec> top_start, StepCurve step) {
    require_dims(jet, step.dim());
    if (top_start && top_start->size() != step.dim())
        throw DimensionError("top derivative start must match the curve dimension");
    const auto mode = top_start ? Regularity::ck : Regularity::regulated;
    RegCurve c(std::move(jet), std::move(top_start), std::move(step), mode, {});
    c.build_anchors();
    return c;
}

RegCurve RegCurve::with_continuous_top(std::vector<Vec> jet, const std::vector<double>& breaks,
                                       const std::vector<Vec>& nodes) {
    if (nodes.size() != breaks.size() || nodes.size() < 2)
        throw DimensionError("continuous top derivative needs one node per breakpoint");
    std::vector<Vec> slopes;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        slopes.push_back((nodes[i + 1] - nodes[i]) / (breaks[i + 1] - breaks[i]));
    return from_parts(std::move(jet), nodes.front(), StepCurve(breaks, std::move(slopes)));
}

void RegCurve::build_anchors() {
    std::vector<Vec> start = jet_;
    if (top_start_) start.push_back(*top_start_);
    anchors_.clear();
    anchors_.push_back({domain().lo, std::move(start)});
    const auto& b = step_.breaks();
    for (std::size_t j = 1; j < step_.pieces(); ++j) {
        std::vector<Vec> derivs;
        for (int l = 0; l < levels(); ++l) derivs.push_back(eval_piece(j - 1, b[j], l));
        anchors_.push_back({b[j], std::move(derivs)});
    }
}

const StepCurve& RegCurve::top() const {
    if (mode_ == Regularity::ck) throw OrderError("the top derivative of a C^k curve is not a step curve");
    return step_;
}

std::vector<Vec> RegCurve::top_nodes() const {
    if (mode_ != Regularity::ck) throw OrderError("top derivative nodes exist only in C^k mode");
    std::vector<Vec> nodes;
    for (double t : step_.breaks()) nodes.push_back(eval(t, order()));
    return nodes;
}

std::vector<double> RegCurve::coefficients(std::size_t piece, int l, int coord) const {
    const int degree = levels() - l;
    const auto& anchor = anchors_[piece];
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (int m = 0; m < degree; ++m) c[m] = anchor.derivs[l + m](coord) / factorial(m);
    c[degree] = step_.values()[piece](coord) / factorial(degree);
    return c;
}

Vec RegCurve::eval_piece(std::size_t piece, double t, int l) const {
    const double u = t - anchors_[piece].time;
    Vec out(dim());
    for (int i = 0; i < dim(); ++i) out(i) = detail::horner(coefficients(piece, l, i), u);
    return out;
}

Vec RegCurve::eval(double t, int l) const {
    if (l < 0 || l > order()) throw OrderError("derivative order exceeds the curve order");
    return eval_piece(step_.piece_at(t), t, l);
}

std::pair<double, double> RegCurve::derivative_range(int l, int coord) const {
    if (l < 0 || l > order()) throw OrderError("derivative order exceeds the curve order");
    if (coord < 0 || coord >= dim()) throw DimensionError("coordinate index out of range");
    double lo = INFINITY, hi = -INFINITY;
    const auto& b = step_.breaks();
    for (std::size_t j = 0; j < step_.pieces(); ++j) {
        const double a = anchors_[j].time;
        auto [pl, ph] = detail::range_on(coefficients(j, l, coord), b[j] - a, b[j + 1] - a);
        lo = std::min(lo, pl);
        hi = std::max(hi, ph);
    }
    return {lo, hi};
}

double RegCurve::sup_derivative(int l) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
        auto [lo, hi] = derivative_range(l, i);
        s = std::max({s, std::abs(lo), std::abs(hi)});
    }
    return s;
}

double RegCurve::norm(int k) const {
    if (k < 0 || k > order()) throw OrderError("norm order exceeds the curve order");
    double s = 0.0;
    for (int l = 0; l <= k; ++l) s = std::max(s, sup_derivative(l));
    return s;
}

bool operator==(const RegCurve& a, const RegCurve& b) {
    if (a.mode_ != b.mode_ || a.jet_.size() != b.jet_.size()) return false;
    for (std::size_t i = 0; i < a.jet_.size(); ++i)
        if (!same_values(a.jet_[i], b.jet_[i])) return false;
    if (a.top_start_.has_value() != b.top_start_.has_value()) return false;
    if (a.top_start_ && !same_values(*a.top_start_, *b.top_start_)) return false;
    return a.step_ == b.step_;
}

RegCurve restrict_to(const RegCurve& c, const Interval& sub) {
    if (!c.domain().contains(sub)) throw DomainError("restriction interval not contained in the domain");
    StepCurve step = restrict_to(c.step_, sub);
    const std::size_t first = c.step_.piece_at(sub.lo);
    std::vector<RegCurve::Anchor> anchors(c.anchors_.begin() + static_cast<std::ptrdiff_t>(first),
                                          c.anchors_.begin() + static_cast<std::ptrdiff_t>(first + step.pieces()));
    std::vector<Vec> jet;
    for (int l = 0; l < c.order(); ++l) jet.push_back(c.eval_piece(first, sub.lo, l));
    std::optional<Vec> top_start;
    if (c.top_start_) top_start = c.eval_piece(first, sub.lo, c.order());
    return RegCurve(std::move(jet), std::move(top_start), std::move(step), c.mode_, std::move(anchors));
}

}  // namespace pathatlas
