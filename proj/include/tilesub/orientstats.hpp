#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tilesub/geometry.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub {

/// Prefix length at which the first `length` tiles of the DFS order form sigma^depth(P_prototile).
struct PrefixMark {
    std::size_t length = 0;
    int prototile = 0;
    int depth = 0;
};

struct OrientationSequence {
    std::vector<Angle> angles;
    std::vector<PrefixMark> marks; // ascending by length; the last one is the whole sequence
    int seed = 0;
    int depth = 0;
};

/// Tile orientations of sigma^k(P_i) in depth-first order (children expanded in rule order).
OrientationSequence hierarchical_sequence(const RulePtr& rule, int prototile, int depth,
                                          std::size_t cap = default_tile_cap());

/// Prefix marks from the first-descendant chain and matrix powers, without generating tiles.
std::vector<PrefixMark> prefix_marks(const SubstitutionRule& rule, int prototile, int depth);

/// sup over half-open arcs [x, y) of |#{angles in arc}/n - |arc|/(2 pi)|. Exact, O(n log n).
double circle_discrepancy(std::span<const Angle> angles);

/// |W_m| = |(1/n) sum_j exp(i m a_j)| for m = 1..m_max.
std::vector<double> weyl_sums(std::span<const Angle> angles, int m_max);

/// Equal-width bins on [0, 2 pi).
std::vector<std::size_t> orientation_histogram(std::span<const Angle> angles, int bins);

struct EquidistributionReport {
    std::size_t n = 0;
    double discrepancy = 0;
    std::vector<double> weyl; // weyl[m-1] = |W_m|
    std::vector<std::size_t> histogram;
};

EquidistributionReport equidistribution_report(std::span<const Angle> angles, int m_max = 4, int bins = 36);

/// One report per prefix mark of the sequence (the `stats` CSV rows).
std::vector<EquidistributionReport> prefix_reports(const OrientationSequence& seq, int m_max = 4, int bins = 36);

/// Orientations ordered by distance of the placed control point from `center` (ties by DFS index).
/// A cross-check ordering; the hierarchical sequence is the primary one.
std::vector<Angle> distance_ordered_angles(const Patch& patch, const Vec2& center = Vec2::Zero());

} // namespace tilesub
