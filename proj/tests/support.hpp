#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "tilesub/geometry.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub::testing {

inline std::filesystem::path rule_path(const std::string& name)
{
    return std::filesystem::path(TILESUB_RULES_DIR) / (name + ".json");
}

inline RulePtr bundled(const std::string& name)
{
    return std::make_shared<const SubstitutionRule>(load_rule_file(rule_path(name)));
}

inline Polygon unit_square()
{
    return Polygon({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)});
}

/// Hand-rolled generators over a fixed-seed engine.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Vec2 vec(double scale) { return Vec2(uniform(-scale, scale), uniform(-scale, scale)); }
    Angle angle() { return Angle(uniform(0.0, kTwoPi)); }
    RigidMotion motion(double scale = 10.0) { return {angle(), vec(scale)}; }

    /// Star-shaped simple polygon: sorted angles around a centre with radii in [0.5, 1.5].
    Polygon star(int min_vertices = 3, int max_vertices = 12)
    {
        const int n = integer(min_vertices, max_vertices);
        std::vector<double> phis(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            phis[static_cast<std::size_t>(k)] = kTwoPi * (k + uniform(0.1, 0.9)) / n;
        }
        std::vector<Vec2> v;
        const Vec2 c = vec(3.0);
        for (double phi : phis) {
            const double r = uniform(0.5, 1.5);
            v.push_back(c + r * Vec2(std::cos(phi), std::sin(phi)));
        }
        return Polygon(std::move(v));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace tilesub::testing
