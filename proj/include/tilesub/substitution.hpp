#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tilesub/geometry.hpp"

namespace tilesub {

struct Prototile {
    int id = 0;
    std::string label;
    Polygon shape;          // local frame, orientation 0
    Vec2 control_point = Vec2::Zero();
    std::optional<std::string> decoration;
};

/// A placed copy R_alpha P_i + t of prototile i.
struct TilePlacement {
    int prototile = 0;
    Angle orientation;
    Vec2 translation = Vec2::Zero();

    RigidMotion motion() const { return {orientation, translation}; }
};

/// Prototiles, inflation factor and per-prototile child placements inside lambda * P_i.
/// Construction checks structural consistency; geometric selfsimilarity is checked by validate_rule().
class SubstitutionRule {
public:
    SubstitutionRule(std::string name, double lambda, std::vector<Prototile> prototiles,
                     std::vector<std::vector<TilePlacement>> children);

    const std::string& name() const { return name_; }
    double lambda() const { return lambda_; }
    std::size_t size() const { return prototiles_.size(); }
    const std::vector<Prototile>& prototiles() const { return prototiles_; }
    const Prototile& prototile(int i) const { return prototiles_.at(static_cast<std::size_t>(i)); }
    const std::vector<TilePlacement>& children(int i) const { return children_.at(static_cast<std::size_t>(i)); }

    /// Realised shape of a placement.
    Polygon shape_of(const TilePlacement& t) const { return apply_motion(t.motion(), prototile(t.prototile).shape); }
    Vec2 control_point_of(const TilePlacement& t) const { return t.motion()(prototile(t.prototile).control_point); }

    /// FNV-1a digest over the rule's numeric content, stable across platforms.
    std::uint64_t digest() const;

private:
    std::string name_;
    double lambda_;
    std::vector<Prototile> prototiles_;
    std::vector<std::vector<TilePlacement>> children_;
};

using RulePtr = std::shared_ptr<const SubstitutionRule>;

/// Parse a rule document (JSON). Throws ParseError / GeometryError / RuleError.
SubstitutionRule load_rule(std::string_view document);
SubstitutionRule load_rule_file(const std::filesystem::path& path);
std::string rule_to_json(const SubstitutionRule& rule);

struct SupertileProvenance {
    int seed = 0;
    int depth = 0;
};

struct Patch {
    RulePtr rule;
    std::vector<TilePlacement> tiles;
    std::optional<SupertileProvenance> provenance; // empty means "free"

    std::size_t size() const { return tiles.size(); }
    bool empty() const { return tiles.empty(); }
};

/// The patch consisting of the single placement (i, 0, (0,0)).
Patch seed_patch(RulePtr rule, int prototile, const RigidMotion& placement = RigidMotion::identity());

/// Apply a global motion to every tile; provenance is dropped.
Patch transformed(const Patch& patch, const RigidMotion& m);

// ---------------------------------------------------------------------------
// Validation

struct PrototileValidation {
    int prototile = 0;
    double area_residual = 0;      // |sum child areas - lambda^2 area| / (lambda^2 area)
    double max_overlap = 0;        // max pairwise child intersection area
    double min_child_area = 0;
    double containment_deficit = 0; // max over children of area(child) - area(child ∩ lambda P)
    std::size_t samples = 0;
    std::size_t skipped = 0;
    std::size_t uncovered = 0;
    bool control_point_on_boundary = false; // allowed, reported only
    bool passed = false;
};

struct ValidationReport {
    std::vector<PrototileValidation> prototiles;
    bool passed = false;
};

struct ValidationOptions {
    std::size_t coverage_samples = 10000;
    std::uint64_t seed = 0;
    double area_tolerance = 1e-9;
    double overlap_tolerance = 1e-9; // relative to the smallest child area
};

ValidationReport validate_rule(const SubstitutionRule& rule, const ValidationOptions& opts = {});

// ---------------------------------------------------------------------------
// Generation

/// Tile cap: 1e7, or TILESUB_CAP from the environment when set.
std::size_t default_tile_cap();

/// One inflation step: tile (i, a, t) becomes children (j, a + b, R_a u + lambda t), in rule order.
Patch substitute(const Patch& patch);

/// sigma^k(P_i) with provenance (i, k). Throws CapExceeded before allocating if the predicted count is too large.
/// seed_motion places the seed tile before inflation, so its translation ends up scaled by lambda^k.
Patch supertile(RulePtr rule, int prototile, int depth, std::size_t cap = default_tile_cap());
Patch supertile(RulePtr rule, int prototile, int depth, const RigidMotion& seed_motion,
                std::size_t cap = default_tile_cap());

// ---------------------------------------------------------------------------
// Substitution matrix and Perron-Frobenius data

using SubstitutionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Entry (i, j) counts children of P_j that are copies of P_i, regardless of orientation.
SubstitutionMatrix substitution_matrix(const SubstitutionRule& rule);

/// 1^T M^k e_i as a double (exact below 2^53).
double predicted_tile_count(const SubstitutionMatrix& m, int prototile, int depth);

struct PrimitivityResult {
    bool primitive = false;
    std::optional<int> witness;
};

/// Tests M^k > 0 entrywise for k = 1 .. m^2 - 2m + 2.
PrimitivityResult is_primitive(const SubstitutionMatrix& m);

struct PerronFrobenius {
    double eigenvalue = 0;
    Eigen::VectorXd frequencies; // positive, sums to 1
    int iterations = 0;
};

PerronFrobenius pf_eigen(const SubstitutionMatrix& m, double tolerance = 1e-13, int max_iterations = 100000);

// ---------------------------------------------------------------------------
// Orientations and translation classes

struct OrientationClass {
    int prototile = 0;
    Angle orientation;
};

struct OrientationCensus {
    bool finite = false;
    std::vector<std::size_t> counts;       // distinct (prototile, orientation) pairs at depth 1..k
    std::vector<OrientationClass> classes; // final-depth set, sorted by (prototile, angle)
};

/// Distinct (prototile, orientation) pairs in sigma^k(P_0), k = 1..k_max, grouped within kAngleEps.
OrientationCensus orientation_census(const SubstitutionRule& rule, int k_max = 10, int window = 3);

/// Group angles whose circular distance is below eps (transitively); returns sorted representatives.
std::vector<double> group_angles(std::vector<double> radians, double eps = kAngleEps);

struct TranslationClassExpansion {
    SubstitutionRule rule;                // one prototile per (P_i, alpha); children placed at orientation 0
    std::vector<OrientationClass> classes; // classes[c] is the origin of prototile c of `rule`
};

/// Split every congruence class into its translation classes. Throws InfiniteOrientationsError
/// when the census reports a growing orientation set.
TranslationClassExpansion expand_translation_classes(const SubstitutionRule& rule, std::size_t max_classes = 4096);

struct FrequencyEstimate {
    double value = 0;
    std::size_t matched = 0;
    std::size_t total = 0;
    bool ball_not_covered = false;
};

/// Finite-radius frequency of tiles (prototile, orientation) among tiles whose placed control point
/// lies in the closed ball B_r(0). Flags the estimate when the ball is not fully covered by the patch.
FrequencyEstimate empirical_frequency(const Patch& patch, int prototile, Angle orientation, double radius);

} // namespace tilesub
