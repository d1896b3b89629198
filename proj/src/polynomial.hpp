#pragma once

#include <utility>
#include <vector>

namespace pathatlas::detail {

/// Horner evaluation of sum coeffs[m] * u^m.
inline double horner(const std::vector<double>& coeffs, double u) {
    double r = coeffs.back();
    for (auto m = coeffs.size() - 1; m-- > 0;) r = r * u + coeffs[m];
    return r;
}

/// Real roots of the polynomial strictly inside (u0, u1), ascending.
/// Closed form up to degree 2; higher degrees bisect between the roots of the derivative.
std::vector<double> roots_inside(const std::vector<double>& coeffs, double u0, double u1);

/// Smallest and largest value on [u0, u1] over the endpoints and interior critical points.
std::pair<double, double> range_on(const std::vector<double>& coeffs, double u0, double u1);

}  // namespace pathatlas::detail
