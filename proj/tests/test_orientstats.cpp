#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "support.hpp"
#include "tilesub/errors.hpp"
#include "tilesub/orientstats.hpp"

using namespace tilesub;
using tilesub::testing::bundled;
using tilesub::testing::Gen;

namespace {

/// O(n^3) oracle. For each ordered pair of sample points (a_i, a_j) it evaluates the closed arc
/// [a_i, a_j] (limit of [a_i, y) with y just past a_j) and the open arc (a_i, a_j) (limit of
/// [x, a_j) with x just past a_i), counting points directly.
double brute_discrepancy(const std::vector<double>& a)
{
    const auto n = static_cast<double>(a.size());
    double sup = 0;
    for (double x : a) {
        for (double y : a) {
            const double len = Angle::canonical(y - x);
            std::size_t closed = 0;
            std::size_t open = 0;
            for (double z : a) {
                const double off = Angle::canonical(z - x);
                if (off <= len || z == x || z == y) {
                    ++closed;
                }
                if (off > 0 && off < len && z != y) {
                    ++open;
                }
            }
            if (x == y) {
                // Degenerate arc: zero length around x, or the full circle minus x.
                std::size_t at = 0;
                for (double z : a) {
                    at += z == x;
                }
                sup = std::max(sup, static_cast<double>(at) / n);
                continue;
            }
            sup = std::max(sup, static_cast<double>(closed) / n - len / kTwoPi);
            sup = std::max(sup, len / kTwoPi - static_cast<double>(open) / n);
        }
    }
    return sup;
}

std::vector<Angle> as_angles(const std::vector<double>& v)
{
    std::vector<Angle> out;
    for (double x : v) {
        out.emplace_back(x);
    }
    return out;
}

bool has_mark(const OrientationSequence& s, std::size_t len)
{
    return std::any_of(s.marks.begin(), s.marks.end(), [len](const PrefixMark& m) { return m.length == len; });
}

} // namespace

TEST_CASE("hierarchical sequences and prefix marks")
{
    const auto chair = hierarchical_sequence(bundled("chair"), 0, 1);
    CHECK(chair.angles.size() == 4);
    CHECK(has_mark(chair, 1));
    CHECK(has_mark(chair, 4));

    const auto pin = hierarchical_sequence(bundled("pinwheel"), 0, 3);
    CHECK(pin.angles.size() == 125);
    for (std::size_t len : {1u, 5u, 25u, 125u}) {
        CHECK(has_mark(pin, len));
    }
    CHECK(pin.marks.back().length == 125);

    for (const char* name : {"chair", "pinwheel", "imbalance"}) {
        const auto s = hierarchical_sequence(bundled(name), 0, 0);
        REQUIRE(s.angles.size() == 1);
        CHECK(s.angles[0].radians() == 0.0);
        REQUIRE(s.marks.size() == 1);
        CHECK(s.marks[0].length == 1);
    }

    CHECK_THROWS_AS(hierarchical_sequence(bundled("pinwheel"), 0, 11), CapExceeded);
}

TEST_CASE("every prefix mark is a congruent copy of the recorded supertile")
{
    for (const char* name : {"chair", "pinwheel", "imbalance"}) {
        const auto rule = bundled(name);
        for (int i = 0; i < static_cast<int>(rule->size()); ++i) {
            const Patch full = supertile(rule, i, 5);
            for (const auto& mark : prefix_marks(*rule, i, 5)) {
                const Patch ref = supertile(rule, mark.prototile, mark.depth);
                REQUIRE(ref.size() == mark.length);
                const auto& p0 = full.tiles[0];
                const auto& r0 = ref.tiles[0];
                const Angle rot = p0.orientation - r0.orientation;
                const Vec2 shift = p0.translation - rot.matrix() * r0.translation;
                bool congruent = true;
                for (std::size_t k = 0; k < mark.length && congruent; ++k) {
                    const auto& p = full.tiles[k];
                    const auto& r = ref.tiles[k];
                    congruent = p.prototile == r.prototile && p.orientation.approx_equal(rot + r.orientation) &&
                                (p.translation - (rot.matrix() * r.translation + shift)).norm() < 1e-7;
                }
                CHECK_MESSAGE(congruent, name << " prefix " << mark.length);
            }
        }
    }
}

TEST_CASE("circle discrepancy")
{
    const double mass = circle_discrepancy(as_angles(std::vector<double>(100, 0.0)));
    CHECK(mass >= 0.99);
    CHECK(mass <= 1.0);

    std::vector<double> even;
    for (int j = 0; j < 8; ++j) {
        even.push_back(kTwoPi * j / 8);
    }
    CHECK(circle_discrepancy(as_angles(even)) == doctest::Approx(1.0 / 8).epsilon(1e-12));
    CHECK(brute_discrepancy(even) == doctest::Approx(1.0 / 8).epsilon(1e-12));

    CHECK_THROWS(circle_discrepancy(std::vector<Angle>{}));
}

TEST_CASE("circle discrepancy matches the brute-force oracle")
{
    Gen g(53);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = g.integer(1, 40);
        // Quantised angles so ties occur.
        const int levels = g.integer(3, 64);
        std::vector<double> a;
        for (int k = 0; k < n; ++k) {
            a.push_back(g.uniform(0, 1) < 0.5 ? kTwoPi * g.integer(0, levels - 1) / levels : g.uniform(0, kTwoPi));
        }
        const double exact = circle_discrepancy(as_angles(a));
        CHECK(exact == doctest::Approx(brute_discrepancy(a)).epsilon(1e-12));
        CHECK(exact >= 1.0 / n - 1e-12);
        CHECK(exact <= 1.0);
    }
}

TEST_CASE("circle discrepancy is rotation invariant")
{
    Gen g(59);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Angle> a;
        const int n = g.integer(1, 200);
        for (int k = 0; k < n; ++k) {
            a.push_back(g.angle());
        }
        const Angle beta = g.angle();
        std::vector<Angle> b;
        for (const auto& x : a) {
            b.push_back(x + beta);
        }
        CHECK(std::abs(circle_discrepancy(a) - circle_discrepancy(b)) < 1e-12);
    }
}

TEST_CASE("seed rotation shifts the whole sequence")
{
    const auto pin = bundled("pinwheel");
    const auto base = hierarchical_sequence(pin, 1, 4);
    const Angle beta(1.234);
    const Patch turned = supertile(pin, 1, 4, RigidMotion{beta, Vec2::Zero()});
    REQUIRE(turned.size() == base.angles.size());
    std::vector<Angle> shifted;
    for (std::size_t k = 0; k < turned.size(); ++k) {
        CHECK(turned.tiles[k].orientation.approx_equal(base.angles[k] + beta));
        shifted.push_back(turned.tiles[k].orientation);
    }
    CHECK(std::abs(circle_discrepancy(shifted) - circle_discrepancy(base.angles)) < 1e-12);
}

TEST_CASE("Weyl sums")
{
    for (double w : weyl_sums(as_angles(std::vector<double>(17, 0.0)), 6)) {
        CHECK(w == doctest::Approx(1.0));
    }
    std::vector<double> even;
    for (int j = 0; j < 12; ++j) {
        even.push_back(kTwoPi * j / 12);
    }
    const auto w = weyl_sums(as_angles(even), 13);
    for (int m = 1; m <= 13; ++m) {
        if (m % 12 != 0) {
            CHECK(w[static_cast<std::size_t>(m - 1)] < 1e-12);
        } else {
            CHECK(w[static_cast<std::size_t>(m - 1)] == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS(weyl_sums(std::vector<Angle>{}, 3));
}

TEST_CASE("orientation histogram")
{
    const auto h = orientation_histogram(as_angles({0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2}), 4);
    CHECK(h == std::vector<std::size_t>{1, 1, 1, 1});

    const auto z = orientation_histogram(as_angles(std::vector<double>(9, 0.0)), 8);
    CHECK(z == std::vector<std::size_t>{9, 0, 0, 0, 0, 0, 0, 0});

    Gen g(61);
    std::vector<Angle> a;
    for (int k = 0; k < 1000; ++k) {
        a.push_back(g.angle());
    }
    const auto r = orientation_histogram(a, 36);
    std::size_t total = 0;
    for (auto c : r) {
        total += c;
    }
    CHECK(total == 1000);
}

TEST_CASE("pinwheel orientations spread out with depth")
{
    const auto pin = bundled("pinwheel");
    const auto s4 = equidistribution_report(hierarchical_sequence(pin, 0, 4).angles);
    const auto s5 = equidistribution_report(hierarchical_sequence(pin, 0, 5).angles);
    const auto s7 = equidistribution_report(hierarchical_sequence(pin, 0, 7).angles);

    CHECK(s7.discrepancy < s4.discrepancy);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(s7.weyl[m] < s4.weyl[m]);
    }
    auto heaviest = [](const EquidistributionReport& r) {
        return static_cast<double>(*std::max_element(r.histogram.begin(), r.histogram.end())) / static_cast<double>(r.n);
    };
    CHECK(heaviest(s7) < heaviest(s5));
}

TEST_CASE("discrepancy decreases along the last prefix marks of growing rules")
{
    const auto pin = bundled("pinwheel");
    REQUIRE_FALSE(orientation_census(*pin).finite);
    const auto rows = prefix_reports(hierarchical_sequence(pin, 0, 8));
    REQUIRE(rows.size() >= 4);
    for (std::size_t k = rows.size() - 3; k < rows.size(); ++k) {
        CHECK(rows[k].discrepancy < rows[k - 1].discrepancy);
    }
    for (const auto& r : rows) {
        std::size_t total = 0;
        for (auto c : r.histogram) {
            total += c;
        }
        CHECK(total == r.n);
    }
}

TEST_CASE("finite-orientation rules: class counts approach Perron-Frobenius frequencies")
{
    for (const char* name : {"chair", "imbalance"}) {
        const auto rule = bundled(name);
        const auto expansion = expand_translation_classes(*rule);
        const auto pf = pf_eigen(substitution_matrix(expansion.rule));
        const Patch p = supertile(rule, 0, 8);
        for (std::size_t c = 0; c < expansion.classes.size(); ++c) {
            const auto& cls = expansion.classes[c];
            const auto n = std::count_if(p.tiles.begin(), p.tiles.end(), [&](const TilePlacement& t) {
                return t.prototile == cls.prototile && t.orientation.approx_equal(cls.orientation);
            });
            const double f = static_cast<double>(n) / static_cast<double>(p.size());
            CHECK(std::abs(f - pf.frequencies(static_cast<Eigen::Index>(c))) < 0.01);
        }
    }
}

TEST_CASE("distance ordering")
{
    const auto chair = bundled("chair");
    const Patch p = supertile(chair, 0, 3);
    const auto by_distance = distance_ordered_angles(p);
    REQUIRE(by_distance.size() == p.size());
    // The tile nearest the origin is the corner tile at orientation 0.
    CHECK(by_distance.front().radians() == 0.0);
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& a : by_distance) {
        x.push_back(a.radians());
    }
    for (const auto& t : p.tiles) {
        y.push_back(t.orientation.radians());
    }
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
}
