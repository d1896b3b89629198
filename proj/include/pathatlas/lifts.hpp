#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pathatlas/atlas.hpp"
#include "pathatlas/path_space.hpp"
#include "pathatlas/regulated.hpp"

namespace pathatlas {

/// Trivialization of a bundle along a path, glued from the chart trivializations.
///
/// Piece i carries a constant frame C_i; fiber coordinates u_i over piece i
/// correspond to the global coordinate C_i u_i. Frames follow C_1 = F and
/// C_{i+1} = C_i g_{i -> i+1}(gamma(tau_i))^{-1}, which makes the global
/// coordinate of a continuous section continuous at every knot.
class PathTrivialization {
public:
    /// Throws DomainError when a cocycle is undefined at a junction.
    PathTrivialization(ManifoldPath path, std::shared_ptr<const BundleAtlas> bundle,
                       std::optional<Mat> initial_frame = std::nullopt);

    const ManifoldPath& path() const { return path_; }
    const BundleAtlas& bundle() const { return *bundle_; }
    const std::shared_ptr<const BundleAtlas>& bundle_ptr() const { return bundle_; }
    int rank() const { return bundle_->rank(); }

    const std::vector<Mat>& frames() const { return frames_; }
    const std::vector<Mat>& inverse_frames() const { return inverse_frames_; }
    /// Frame of the piece selected at time t.
    const Mat& frame_at(double t) const { return frames_[path_.system().piece_at(t)]; }
    const Mat& inverse_frame_at(double t) const { return inverse_frames_[path_.system().piece_at(t)]; }
    /// max over pieces of max(|C_i|, |C_i^{-1}|) in operator norm.
    double kappa() const { return kappa_; }

private:
    ManifoldPath path_;
    std::shared_ptr<const BundleAtlas> bundle_;
    std::vector<Mat> frames_;
    std::vector<Mat> inverse_frames_;
    double kappa_ = 1.0;
};

/// Trivialization of the tangent bundle along a path.
PathTrivialization tangent_trivialization(const ManifoldPath& path, std::optional<Mat> initial_frame = std::nullopt);

/// Global coordinate of a section: concatenation of C_i u_i.
StepCurve represent_section(const PathTrivialization& triv, const std::vector<StepCurve>& pieces);
/// Inverse of represent_section.
std::vector<StepCurve> section_pieces(const PathTrivialization& triv, const StepCurve& global);

/// Vector field along a path (or a lift) as one pair: the glued base part phi
/// (an order-1 curve in R^m) and, for lifts, the glued fiber part theta.
struct FieldRep {
    RegCurve phi;
    std::optional<StepCurve> theta;

    friend bool operator==(const FieldRep&, const FieldRep&) = default;
};

/// Per-piece chart components of a field: order-1 base components and optional fiber components.
struct FieldPieces {
    std::vector<RegCurve> base;
    std::vector<StepCurve> fiber;
};

/// Glue chart components into a FieldRep. The base components must be
/// continuous across knots through the tangent cocycle (checked to 1e-8).
FieldRep represent_field(const PathTrivialization& tangent, const FieldPieces& field,
                         const PathTrivialization* bundle = nullptr);
/// Inverse of represent_field.
FieldPieces field_pieces(const PathTrivialization& tangent, const FieldRep& rep,
                         const PathTrivialization* bundle = nullptr);

/// Frame change C_{i(t)}^{-1} C_{i(s)} carrying fiber coordinates at s to those at t.
Mat transport(const PathTrivialization& triv, double s, double t);

/// Derivative of the global coordinate mapped back to piece coordinates:
/// C_i^{-1} w' on piece i. Throws OrderError for order-0 input.
StepCurve covariant_derivative(const PathTrivialization& triv, const RegCurve& global);

/// Two norms of a field given by its global coordinate w.
struct NormComparison {
    double local = 0.0;   ///< |X(0)| + sup |nabla X| in piece coordinates
    double global = 0.0;  ///< max(sup |w|, sup |w'|)
    double ratio = 1.0;   ///< max(local / global, global / local)
    double bound = 1.0;   ///< (1 + length) * kappa
};

NormComparison compare_norms(const PathTrivialization& triv, const RegCurve& global);

/// Matrix field A with rep_B(t) = A(t) rep_A(t) between two trivializations
/// of one path (possibly in different chart systems), with norm bounds of A and A^{-1}.
struct Compatibility {
    std::vector<double> breaks;  ///< A is smooth between consecutive breaks
    std::function<Mat(double)> matrix;
    std::function<Mat(double)> inverse;
    double norm_bound = 1.0;
    double inverse_norm_bound = 1.0;
    /// True when A is one constant matrix (both sides use the same chart system).
    bool constant = false;
};

/// Bounds are exact when A is constant and taken over a grid of 257 points per
/// cell (inflated by 2) otherwise.
Compatibility compatibility_automorphisms(const PathTrivialization& a, const PathTrivialization& b);

/// Block-diagonal automorphism acting on (base, fiber) pairs of a lift; its
/// upper-left block is the base automorphism.
struct LiftCompatibility {
    Compatibility base;
    Compatibility fiber;

    Mat matrix(double t) const;
    /// First projection of the block form at t: the base automorphism.
    Mat project(double t) const;
};

LiftCompatibility lift_compatibility(const PathTrivialization& tangent_a, const PathTrivialization& bundle_a,
                                     const PathTrivialization& tangent_b, const PathTrivialization& bundle_b);

/// One-parameter family of paths or lifts around epsilon = 0, all in one chart system.
using PathDeformation = std::function<ManifoldPath(double)>;
using LiftDeformation = std::function<BundleLift(double)>;

/// Tangent vector of a deformation at epsilon = 0 as a field over the central path.
///
/// Central differences of the chart coordinates at +-h and +-h/2 combined by one
/// Richardson step. Throws DomainError when slices use different chart systems.
FieldRep deformation_tangent(const PathDeformation& d, double h = 1e-3);
FieldRep deformation_tangent(const LiftDeformation& d, double h = 1e-3);

}  // namespace pathatlas
