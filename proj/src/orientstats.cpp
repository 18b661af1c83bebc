#include "tilesub/orientstats.hpp"

#include <algorithm>
#include <complex>
#include <numeric>

namespace tilesub {

std::vector<PrefixMark> prefix_marks(const SubstitutionRule& rule, int prototile, int depth)
{
    const SubstitutionMatrix m = substitution_matrix(rule);
    // chain[j] is the prototile of the first tile at level j below the seed.
    std::vector<int> chain{prototile};
    for (int j = 1; j <= depth; ++j) {
        chain.push_back(rule.children(chain.back()).front().prototile);
    }
    std::vector<PrefixMark> marks;
    for (int j = depth; j >= 0; --j) {
        const int c = chain[static_cast<std::size_t>(j)];
        const int d = depth - j;
        const auto len = static_cast<std::size_t>(predicted_tile_count(m, c, d));
        if (marks.empty() || marks.back().length != len) {
            marks.push_back({len, c, d});
        } else {
            marks.back() = {len, c, d};
        }
    }
    return marks;
}

OrientationSequence hierarchical_sequence(const RulePtr& rule, int prototile, int depth, std::size_t cap)
{
    // Level-by-level substitution preserves the DFS order: children of tile 1, then of tile 2, ...
    const Patch p = supertile(rule, prototile, depth, cap);
    OrientationSequence seq;
    seq.seed = prototile;
    seq.depth = depth;
    seq.angles.reserve(p.size());
    for (const auto& t : p.tiles) {
        seq.angles.push_back(t.orientation);
    }
    seq.marks = prefix_marks(*rule, prototile, depth);
    return seq;
}

double circle_discrepancy(std::span<const Angle> angles)
{
    if (angles.empty()) {
        throw std::invalid_argument("circle_discrepancy: empty input");
    }
    std::vector<double> u;
    u.reserve(angles.size());
    for (const auto& a : angles) {
        u.push_back(a.radians() / kTwoPi);
    }
    std::sort(u.begin(), u.end());
    // G(t) = #{u < t}/n - t. Every arc deviation is G(y) - G(x), so D = sup G - inf G.
    // sup is approached just after a sample (counting ties), inf at a sample itself.
    const double n = static_cast<double>(u.size());
    double hi = 0;
    double lo = 0;
    std::size_t i = 0;
    while (i < u.size()) {
        std::size_t j = i;
        while (j < u.size() && u[j] == u[i]) {
            ++j;
        }
        hi = std::max(hi, static_cast<double>(j) / n - u[i]);
        lo = std::min(lo, static_cast<double>(i) / n - u[i]);
        i = j;
    }
    return std::clamp(hi - lo, 0.0, 1.0);
}

std::vector<double> weyl_sums(std::span<const Angle> angles, int m_max)
{
    if (angles.empty()) {
        throw std::invalid_argument("weyl_sums: empty input");
    }
    std::vector<double> out;
    const double n = static_cast<double>(angles.size());
    for (int m = 1; m <= m_max; ++m) {
        double re = 0;
        double im = 0;
        for (const auto& a : angles) {
            re += std::cos(m * a.radians());
            im += std::sin(m * a.radians());
        }
        out.push_back(std::min(1.0, std::hypot(re, im) / n));
    }
    return out;
}

std::vector<std::size_t> orientation_histogram(std::span<const Angle> angles, int bins)
{
    if (bins < 1) {
        throw std::invalid_argument("orientation_histogram: bins must be >= 1");
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (const auto& a : angles) {
        auto b = static_cast<std::size_t>(a.radians() / kTwoPi * bins);
        ++counts[std::min(b, counts.size() - 1)];
    }
    return counts;
}

EquidistributionReport equidistribution_report(std::span<const Angle> angles, int m_max, int bins)
{
    EquidistributionReport r;
    r.n = angles.size();
    r.discrepancy = circle_discrepancy(angles);
    r.weyl = weyl_sums(angles, m_max);
    r.histogram = orientation_histogram(angles, bins);
    return r;
}

std::vector<EquidistributionReport> prefix_reports(const OrientationSequence& seq, int m_max, int bins)
{
    std::vector<EquidistributionReport> out;
    const std::span<const Angle> all(seq.angles);
    for (const auto& mark : seq.marks) {
        out.push_back(equidistribution_report(all.first(mark.length), m_max, bins));
    }
    return out;
}

std::vector<Angle> distance_ordered_angles(const Patch& patch, const Vec2& center)
{
    std::vector<double> dist;
    dist.reserve(patch.size());
    for (const auto& t : patch.tiles) {
        dist.push_back((patch.rule->control_point_of(t) - center).norm());
    }
    std::vector<std::size_t> order(patch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    std::vector<Angle> out;
    out.reserve(order.size());
    for (const auto i : order) {
        out.push_back(patch.tiles[i].orientation);
    }
    return out;
}

} // namespace tilesub
