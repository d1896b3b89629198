#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pathatlas/linalg.hpp"
#include "pathatlas/smooth_map.hpp"

namespace pathatlas {

/// Open subset of R^m that is the image of one chart.
struct Chart {
    std::string name;
    std::function<bool(const Vec&)> contains;
    /// Radius of a max-norm ball around x inside the codomain; 0 outside, +inf if unbounded.
    std::function<double(const Vec&)> margin;
    /// Random point of the codomain, used by the sampled invariant checks.
    std::function<Vec(std::mt19937_64&)> sample;
    /// True when the codomain is convex and the margin concave, so segment
    /// containment follows from the endpoints.
    bool convex = false;
};

/// A point given in the coordinates of one chart.
struct Point {
    int chart = 0;
    Vec coords;
};

/// Chart codomains plus smooth transitions between every ordered pair of charts.
///
/// Chart maps themselves are never stored; a transition's domain is the overlap
/// as seen from the source chart.
class Manifold {
public:
    Manifold(std::string name, int dim, std::vector<Chart> charts);

    /// Install the transition from chart i to chart j (i != j).
    void set_transition(int i, int j, SmoothMap map);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    int chart_count() const { return static_cast<int>(charts_.size()); }
    const Chart& chart(int i) const;
    const SmoothMap& transition(int i, int j) const;

    bool in_chart(int i, const Vec& x) const;
    bool in_overlap(int i, int j, const Vec& x) const;

private:
    std::string name_;
    int dim_;
    std::vector<Chart> charts_;
    std::map<std::pair<int, int>, SmoothMap> transitions_;
    SmoothMap identity_;
};

/// Vector bundle of rank d over a manifold, described by GL(d)-valued cocycles.
///
/// cocycle(i, j, x) maps fiber coordinates over chart i to those over chart j at
/// the base point with chart-i coordinates x.
class BundleAtlas {
public:
    BundleAtlas(std::string name, std::shared_ptr<const Manifold> base, int rank);

    /// Install g_ij as a map from R^m to column-major d*d matrices.
    void set_cocycle(int i, int j, SmoothMap g);

    const std::string& name() const { return name_; }
    const Manifold& base() const { return *base_; }
    const std::shared_ptr<const Manifold>& base_ptr() const { return base_; }
    int rank() const { return rank_; }

    Mat cocycle(int i, int j, const Vec& x) const;
    const SmoothMap& cocycle_map(int i, int j) const;

private:
    std::string name_;
    std::shared_ptr<const Manifold> base_;
    int rank_;
    std::map<std::pair<int, int>, SmoothMap> cocycles_;
};

/// Change of chart; throws DomainError when the point is not in the overlap.
Point convert_point(const Manifold& m, const Point& p, int target);

/// Jacobian of the transition i -> j at x.
Mat tangent_cocycle(const Manifold& m, int i, int j, const Vec& x);

/// The tangent bundle, with the transition jacobians as cocycle.
std::shared_ptr<const BundleAtlas> tangent_bundle(std::shared_ptr<const Manifold> m);

/// Parameters of the builtin catalog.
struct BuiltinParams {
    int dim = 2;
    double radius = std::numeric_limits<double>::infinity();
    std::string base;
};

/// euclidean, circle-two-arcs, sphere-stereo, torus.
std::shared_ptr<const Manifold> builtin_manifold(const std::string& name, const BuiltinParams& params = {});
/// trivial-bundle, tangent-bundle, moebius-line-bundle.
std::shared_ptr<const BundleAtlas> builtin_bundle(const std::string& name, const BuiltinParams& params = {});
std::vector<std::string> builtin_manifold_names();
std::vector<std::string> builtin_bundle_names();

/// Worst deviations seen while sampling atlas identities.
struct AtlasCheck {
    std::size_t samples = 0;
    double identity_error = 0.0;   ///< |T_ii(x) - x|
    double inverse_error = 0.0;    ///< |T_ji(T_ij(x)) - x|
    double cocycle_error = 0.0;    ///< |T_ik(x) - T_jk(T_ij(x))|
    double jacobian_error = 0.0;   ///< relative gap between jacobian and central differences
    std::size_t margin_violations = 0;
};

AtlasCheck check_manifold(const Manifold& m, std::size_t samples, std::uint64_t seed);

struct BundleCheck {
    std::size_t samples = 0;
    double identity_error = 0.0;   ///< |g_ii - Id|
    double cocycle_error = 0.0;    ///< |g_ik - g_jk g_ij|
    double min_abs_determinant = std::numeric_limits<double>::infinity();
};

BundleCheck check_bundle(const BundleAtlas& e, std::size_t samples, std::uint64_t seed);

}  // namespace pathatlas
