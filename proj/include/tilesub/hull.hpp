#pragma once

#include <cmath>
#include <optional>

#include "tilesub/geometry.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub {

/// Upper bound of the tiling metric.
inline const double kHullCap = 1.0 / std::sqrt(2.0);

/// T + s and R_rotation T' + t agree on B_{1/epsilon}.
struct HullWitness {
    double epsilon = 0;
    Vec2 shift_s = Vec2::Zero();
    Vec2 shift_t = Vec2::Zero();
    double rotation = 0; // signed, in (-pi, pi]
};

enum class Exactness { exact_on_candidates, upper_bound };

const char* to_string(Exactness e);

struct PatchDistance {
    double value = kHullCap;
    std::optional<HullWitness> witness;
    Exactness exactness = Exactness::exact_on_candidates;
};

struct HullOptions {
    double epsilon_floor = 1e-6;
    int iterations = 20;
};

/// Finite-patch version of the hull metric, by bisection on epsilon over motions obtained from
/// aligning the tile of `a` that covers the origin with same-prototile tiles of `b`.
/// Throws RuleError if either patch does not cover the origin.
PatchDistance patch_distance(const Patch& a, const Patch& b, const HullOptions& opts = {});

struct SymmetricPatchDistance {
    PatchDistance forward;  // d(a, b)
    PatchDistance backward; // d(b, a)
    bool asymmetric = false; // |forward - backward| > 1e-9
};

SymmetricPatchDistance patch_distance_both(const Patch& a, const Patch& b, const HullOptions& opts = {});

/// Re-check a witness independently: bounds on s, t, rotation and tile-for-tile agreement on B_{1/epsilon}.
bool verify_witness(const Patch& a, const Patch& b, const HullWitness& w);

/// Tiles whose shape meets the open ball B_radius(0).
Patch ball_restriction(const Patch& patch, double radius);

} // namespace tilesub
