#pragma once

#include <memory>
#include <random>

#include "pathatlas/atlas.hpp"
#include "pathatlas/path_space.hpp"
#include "pathatlas/regulated.hpp"

namespace pathatlas {

/// Random objects with dyadic breakpoints and values, so that sums, products by
/// powers of two and integrals over dyadic intervals are exact in binary floating point.
struct DyadicCorpus {
    std::mt19937_64& rng;

    /// Uniform dyadic number k / 2^bits in [-scale, scale]; scale must be a power of two.
    double value(double scale = 1.0, int bits = 6);
    Vec vector(int dim, double scale = 1.0);
    /// Dyadic time strictly inside (lo, hi) on a grid of 2^bits cells.
    double inner_time(const Interval& domain, int bits = 5);
    StepCurve step_curve(const Interval& domain, int dim, std::size_t max_pieces = 6, double scale = 1.0);
    /// Strict dyadic partition of [0, 1] with the given number of pieces.
    std::vector<double> partition(std::size_t pieces);
};

struct RandomPathOptions {
    std::size_t max_pieces = 3;
    std::size_t max_steps = 4;
    /// Upper bound on derivative values before shrinking.
    double speed = 1.0;
    /// Attempts before giving up with DomainError.
    int attempts = 200;
};

/// Random path built through reconstruct, so chart_map and reconstruct
/// invert each other on it exactly. Consecutive pieces use overlapping charts.
ManifoldPath random_path(const std::shared_ptr<const Manifold>& m, std::mt19937_64& rng,
                         const RandomPathOptions& options = {});

/// Random fiber curves over a path, one per piece.
std::vector<StepCurve> random_fibers(const PathChartSystem& system, int rank, std::mt19937_64& rng,
                                     double scale = 1.0);

/// Rep moved by less than `radius` in sup distance: the start point and every
/// derivative piece (split at its midpoint) get independent uniform offsets.
PathRep perturb(const PathRep& rep, double radius, std::mt19937_64& rng);

}  // namespace pathatlas
