#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tilesub/geometry.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub {

/// Uniform-grid bucket index over the realised shapes of a patch.
class TileIndex {
public:
    explicit TileIndex(const Patch& patch);

    std::size_t size() const { return shapes_.size(); }
    const Polygon& shape(std::size_t i) const { return shapes_[i]; }
    const Box2& bounds(std::size_t i) const { return boxes_[i]; }
    const Box2& extent() const { return extent_; }

    /// Tiles whose bounding box meets `box`, ascending and without duplicates.
    std::vector<std::size_t> candidates(const Box2& box) const;

    /// True if q lies inside or on the boundary of some tile.
    bool covers(const Vec2& q) const;

private:
    static std::int64_t key(std::int64_t cx, std::int64_t cy)
    {
        return static_cast<std::int64_t>((static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy));
    }
    std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

    std::vector<Polygon> shapes_;
    std::vector<Box2> boxes_;
    Box2 extent_;
    double cell_ = 1.0;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

} // namespace tilesub
