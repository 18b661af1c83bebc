#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "tilesub/geometry.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub {

/// Points stored column-wise; every point lies in the closed ball B_radius(0).
struct PointSet {
    Eigen::Matrix2Xd points;
    double radius = 0;

    Eigen::Index size() const { return points.cols(); }
};

/// One placed control point R_a x_i + t per tile; radius = max point norm.
PointSet control_points(const Patch& patch);

/// Points of `ps` within the closed ball B_radius(0); the result's radius is `radius`.
PointSet ball_subset(const PointSet& ps, double radius);

PointSet transformed(const PointSet& ps, const RigidMotion& m);


// ---------------------------------------------------------------------------
// Autocorrelation

/// Polar-binned estimator of the volume-normalised autocorrelation. Row b covers
/// |v| in [edges[b], edges[b+1]), column a covers arg v in [2 pi a/A, 2 pi (a+1)/A).
struct PolarHistogram {
    Eigen::VectorXd radial_edges; // B + 1 entries, radial_edges[0] = inner radius delta
    int angular_bins = 0;
    Eigen::MatrixXd weights;      // B x A, pair counts / volume
    Eigen::MatrixXd pair_counts;  // B x A
    double origin_mass = 0;       // left points / volume: the atom at v = 0
    double volume = 0;            // pi R_eff^2
    std::size_t left_points = 0;

    int radial_bins() const { return static_cast<int>(weights.rows()); }
};

struct AutocorrelationOptions {
    double inner_radius = 1e-6;
    int threads = 1;
};

/// Pairs (x, y), x != y, |x - y| < r_max, with x restricted to B_{R - r_max}.
/// Each pair contributes x - y and y - x with half weight, so antipodal bins are exactly equal.
PolarHistogram autocorrelation(const PointSet& ps, double r_max, int radial_bins, int angular_bins,
                               const AutocorrelationOptions& opts = {});

struct ShellSymmetry {
    double r_lo = 0;
    double r_hi = 0;
    double mean = 0;          // mean weight per angular bin
    double cv = 0;            // std / mean over angular bins, empty bins included
    double max_min_ratio = 0; // +inf when some bin is empty
    double count = 0;         // pairs in the shell
    bool qualifies = false;   // count >= min_occupancy
};

struct SymmetryReport {
    std::vector<ShellSymmetry> shells;
    double max_cv = 0; // over qualifying shells
    double min_occupancy = 0;
};

/// min_occupancy < 0 selects the default 50 * A.
SymmetryReport circular_symmetry_stat(const PolarHistogram& h, double min_occupancy = -1);

// ---------------------------------------------------------------------------
// Diffraction

/// I(k) = |sum_x exp(-2 pi i <k, x>)|^2 / N sampled on an N_g x N_g grid over [-k_max, k_max]^2.
/// values(j, i) holds k = (coordinate(i), coordinate(j)).
struct IntensityGrid {
    double k_max = 0;
    int resolution = 0;
    Eigen::MatrixXd values;

    double coordinate(int i) const
    {
        return k_max * static_cast<double>(2 * i - (resolution - 1)) / static_cast<double>(resolution - 1);
    }
    double spacing() const { return 2.0 * k_max / static_cast<double>(resolution - 1); }
};

IntensityGrid diffraction(const PointSet& ps, double k_max, int resolution, int threads = 1);

/// Direct evaluation of I at one wave vector.
double intensity_at(const PointSet& ps, const Vec2& k);

/// max over k of |I_{R ps}(R k) - I_ps(k)| / max(I_ps(k), 1).
double rotation_covariance_check(const PointSet& ps, Angle beta, std::span<const Vec2> wavevectors);

/// Uniform wave vectors in [-k_max, k_max]^2 from a seeded generator.
std::vector<Vec2> random_wavevectors(std::size_t n, double k_max, std::uint64_t seed);

struct RadialShell {
    double k_lo = 0;
    double k_hi = 0;
    double mean = 0;
    double cv = 0; // over angular sectors that received samples
    std::size_t samples = 0;
};

std::vector<RadialShell> radial_profile(const IntensityGrid& g, int shells, int sectors = 12);

} // namespace tilesub
