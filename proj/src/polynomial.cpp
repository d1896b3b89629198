#include "polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace pathatlas::detail {
namespace {

std::vector<double> trimmed(std::vector<double> c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    return c;
}

std::vector<double> derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t m = 1; m < c.size(); ++m) d.push_back(c[m] * static_cast<double>(m));
    if (d.empty()) d.push_back(0.0);
    return d;
}

double bisect(const std::vector<double>& c, double a, double b) {
    double fa = horner(c, a);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = horner(c, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

void keep_inside(std::vector<double>& roots, double u0, double u1) {
    std::erase_if(roots, [&](double r) { return !(r > u0 && r < u1) || !std::isfinite(r); });
    std::sort(roots.begin(), roots.end());
}

}  // namespace

std::vector<double> roots_inside(const std::vector<double>& raw, double u0, double u1) {
    const auto c = trimmed(raw);
    std::vector<double> roots;
    switch (c.size()) {
        case 1:
            return roots;
        case 2:
            roots.push_back(-c[0] / c[1]);
            break;
        case 3: {
            const double a = c[2], b = c[1], cc = c[0];
            const double disc = b * b - 4.0 * a * cc;
            if (disc < 0.0) return roots;
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            if (q != 0.0) {
                roots.push_back(q / a);
                roots.push_back(cc / q);
            } else {
                roots.push_back(0.0);
            }
            break;
        }
        default: {
            std::vector<double> cuts{u0};
            for (double r : roots_inside(derivative(c), u0, u1)) cuts.push_back(r);
            cuts.push_back(u1);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double fa = horner(c, cuts[i]);
                const double fb = horner(c, cuts[i + 1]);
                if (fa == 0.0) roots.push_back(cuts[i]);
                if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
                    roots.push_back(bisect(c, cuts[i], cuts[i + 1]));
            }
            break;
        }
    }
    keep_inside(roots, u0, u1);
    return roots;
}

std::pair<double, double> range_on(const std::vector<double>& coeffs, double u0, double u1) {
    double lo = std::min(horner(coeffs, u0), horner(coeffs, u1));
    double hi = std::max(horner(coeffs, u0), horner(coeffs, u1));
    if (coeffs.size() > 2) {
        for (double r : roots_inside(derivative(coeffs), u0, u1)) {
            const double v = horner(coeffs, r);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

}  // namespace pathatlas::detail
