#include "tilesub/tile_index.hpp"

#include <algorithm>

namespace tilesub {

TileIndex::TileIndex(const Patch& patch)
{
    shapes_.reserve(patch.size());
    boxes_.reserve(patch.size());
    double diameter_sum = 0;
    for (const auto& t : patch.tiles) {
        shapes_.push_back(patch.rule->shape_of(t));
        boxes_.push_back(shapes_.back().bounds());
        extent_.extend(boxes_.back());
        diameter_sum += boxes_.back().diagonal().norm();
    }
    if (!shapes_.empty()) {
        cell_ = std::max(diameter_sum / static_cast<double>(shapes_.size()), 1e-6);
    }
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        const auto& b = boxes_[i];
        for (auto cx = cell(b.min().x()); cx <= cell(b.max().x()); ++cx) {
            for (auto cy = cell(b.min().y()); cy <= cell(b.max().y()); ++cy) {
                buckets_[key(cx, cy)].push_back(i);
            }
        }
    }
}

std::vector<std::size_t> TileIndex::candidates(const Box2& box) const
{
    std::vector<std::size_t> out;
    if (shapes_.empty() || !box.intersects(extent_)) {
        return out;
    }
    const Box2 clipped = box.intersection(extent_);
    for (auto cx = cell(clipped.min().x()); cx <= cell(clipped.max().x()); ++cx) {
        for (auto cy = cell(clipped.min().y()); cy <= cell(clipped.max().y()); ++cy) {
            const auto it = buckets_.find(key(cx, cy));
            if (it == buckets_.end()) {
                continue;
            }
            for (const std::size_t i : it->second) {
                if (boxes_[i].intersects(box)) {
                    out.push_back(i);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool TileIndex::covers(const Vec2& q) const
{
    const Vec2 pad = Vec2::Constant(kGeoEps);
    for (const std::size_t i : candidates(Box2(q - pad, q + pad))) {
        if (point_in_polygon(q, shapes_[i]) != PointLocation::outside) {
            return true;
        }
    }
    return false;
}

} // namespace tilesub
