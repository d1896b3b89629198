#pragma once

#include <Eigen/Dense>

namespace pathatlas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Max-coordinate norm; the norm used on every model space.
inline double max_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Operator norm induced by the max-coordinate norm (largest absolute row sum).
inline double operator_norm(const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Bitwise value equality (same shape, every coefficient compares equal).
inline bool same_values(const Vec& a, const Vec& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

inline bool same_values(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace pathatlas
