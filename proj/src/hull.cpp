#include "tilesub/hull.hpp"

#include <algorithm>
#include <unordered_map>

#include "tilesub/tile_index.hpp"

namespace tilesub {

const char* to_string(Exactness e)
{
    return e == Exactness::exact_on_candidates ? "exact-on-candidates" : "upper-bound";
}

namespace {

constexpr double kMatchCell = 1e-3;

/// Realised shapes plus a translation hash for tile matching.
class MatchIndex {
public:
    explicit MatchIndex(const Patch& patch) : patch_(patch), shapes_(patch)
    {
        reach_.reserve(patch.size());
        for (std::size_t i = 0; i < patch.size(); ++i) {
            const auto& t = patch.tiles[i];
            double r = 0;
            for (const auto& v : shapes_.shape(i).vertices()) {
                r = std::max(r, (v - t.translation).norm());
            }
            reach_.push_back(r);
            buckets_[key(t.translation)].push_back(i);
        }
    }

    const Patch& patch() const { return patch_; }
    std::size_t size() const { return patch_.size(); }
    const TilePlacement& tile(std::size_t i) const { return patch_.tiles[i]; }

    /// Does tile i (in local coordinates) meet the open ball B_radius(center)?
    bool meets_ball(std::size_t i, const Vec2& center, double radius) const
    {
        const double d = (tile(i).translation - center).norm();
        if (d - reach_[i] >= radius) {
            return false;
        }
        return distance_to_polygon(center, shapes_.shape(i)) < radius;
    }

    /// Index of a tile with this prototile, orientation and translation (local coordinates).
    bool contains(int prototile, Angle orientation, const Vec2& translation) const
    {
        const auto cx = static_cast<std::int64_t>(std::floor(translation.x() / kMatchCell));
        const auto cy = static_cast<std::int64_t>(std::floor(translation.y() / kMatchCell));
        for (auto dx = -1; dx <= 1; ++dx) {
            for (auto dy = -1; dy <= 1; ++dy) {
                const auto it = buckets_.find(pack(cx + dx, cy + dy));
                if (it == buckets_.end()) {
                    continue;
                }
                for (const auto i : it->second) {
                    const auto& t = tile(i);
                    if (t.prototile == prototile && t.orientation.approx_equal(orientation) &&
                        (t.translation - translation).norm() <= kGeoEps) {
                        return true;
                    }
                }
            }
        }
        return false;
    }

    std::optional<std::size_t> tile_covering_origin() const
    {
        const Vec2 pad = Vec2::Constant(kGeoEps);
        for (const auto i : shapes_.candidates(Box2(-pad, pad))) {
            if (point_in_polygon(Vec2(Vec2::Zero()), shapes_.shape(i)) != PointLocation::outside) {
                return i;
            }
        }
        return std::nullopt;
    }

private:
    static std::int64_t pack(std::int64_t x, std::int64_t y)
    {
        return static_cast<std::int64_t>((static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint32_t>(y));
    }
    static std::int64_t key(const Vec2& v)
    {
        return pack(static_cast<std::int64_t>(std::floor(v.x() / kMatchCell)),
                    static_cast<std::int64_t>(std::floor(v.y() / kMatchCell)));
    }

    const Patch& patch_;
    TileIndex shapes_;
    std::vector<double> reach_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

struct Candidate {
    double rotation = 0;
    Vec2 relative = Vec2::Zero(); // t - s
    double magnitude = 0;         // max(|rotation|, |t - s|)
};

/// Every tile of `from` (placed by motion_from) meeting B_radius(0) has a match in `to` (placed by motion_to).
bool one_way_agreement(const MatchIndex& from, const RigidMotion& motion_from, const MatchIndex& to,
                       const RigidMotion& motion_to, double radius)
{
    const RigidMotion from_inv = motion_from.inverse();
    const RigidMotion to_inv = motion_to.inverse();
    const Vec2 center_local = from_inv(Vec2::Zero());
    for (std::size_t i = 0; i < from.size(); ++i) {
        if (!from.meets_ball(i, center_local, radius)) {
            continue;
        }
        const auto& t = from.tile(i);
        // World placement, then pulled back into `to`'s local frame.
        const RigidMotion world = motion_from * t.motion();
        const RigidMotion local = to_inv * world;
        if (!to.contains(t.prototile, local.rotation, local.translation)) {
            return false;
        }
    }
    return true;
}

bool agreement(const MatchIndex& a, const MatchIndex& b, const HullWitness& w)
{
    const RigidMotion ma{Angle(0.0), w.shift_s};
    const RigidMotion mb{Angle(w.rotation), w.shift_t};
    const double radius = 1.0 / w.epsilon;
    return one_way_agreement(a, ma, b, mb, radius) && one_way_agreement(b, mb, a, ma, radius);
}

HullWitness witness_for(const Candidate& c, double epsilon)
{
    return {epsilon, -c.relative / 2.0, c.relative / 2.0, c.rotation};
}

} // namespace

PatchDistance patch_distance(const Patch& a, const Patch& b, const HullOptions& opts)
{
    const MatchIndex ia(a);
    const MatchIndex ib(b);
    const auto anchor = ia.tile_covering_origin();
    if (!anchor || !ib.tile_covering_origin()) {
        throw RuleError("patch_distance: both patches must cover the origin");
    }

    // The anchor meets every admissible ball, so it must match some tile of b.
    const auto& u = ia.tile(*anchor);
    std::vector<Candidate> candidates;
    for (std::size_t j = 0; j < ib.size(); ++j) {
        const auto& v = ib.tile(j);
        if (v.prototile != u.prototile) {
            continue;
        }
        Candidate c;
        c.rotation = (u.orientation - v.orientation).signed_radians();
        if (std::abs(c.rotation) > kHullCap) {
            continue;
        }
        c.relative = u.translation - Angle(c.rotation).matrix() * v.translation;
        c.magnitude = std::max(std::abs(c.rotation), c.relative.norm());
        if (c.magnitude <= kHullCap) {
            candidates.push_back(c);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.magnitude < y.magnitude; });

    const auto feasible = [&](double eps) -> std::optional<std::pair<HullWitness, double>> {
        for (const auto& c : candidates) {
            if (c.magnitude > eps) {
                break;
            }
            const HullWitness w = witness_for(c, eps);
            if (agreement(ia, ib, w)) {
                return std::make_pair(w, c.magnitude);
            }
        }
        return std::nullopt;
    };

    PatchDistance out;
    auto at_cap = feasible(kHullCap);
    if (!at_cap) {
        return out; // value = cap, no witness
    }
    if (auto at_floor = feasible(opts.epsilon_floor)) {
        out.value = opts.epsilon_floor;
        out.witness = at_floor->first;
        return out;
    }
    double lo = opts.epsilon_floor;
    double hi = kHullCap;
    auto best = *at_cap;
    for (int it = 0; it < opts.iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (auto f = feasible(mid)) {
            hi = mid;
            best = *f;
        } else {
            lo = mid;
        }
    }
    out.value = hi;
    out.witness = best.first;
    // The winning motion's own size, not the agreement radius, set the bound.
    out.exactness = best.second >= lo ? Exactness::upper_bound : Exactness::exact_on_candidates;
    return out;
}

SymmetricPatchDistance patch_distance_both(const Patch& a, const Patch& b, const HullOptions& opts)
{
    SymmetricPatchDistance r;
    r.forward = patch_distance(a, b, opts);
    r.backward = patch_distance(b, a, opts);
    r.asymmetric = std::abs(r.forward.value - r.backward.value) > 1e-9;
    return r;
}

bool verify_witness(const Patch& a, const Patch& b, const HullWitness& w)
{
    const double slack = 1.0 + 1e-12;
    if (!(w.epsilon > 0) || w.shift_s.norm() > slack * w.epsilon / 2 || w.shift_t.norm() > slack * w.epsilon / 2 ||
        std::abs(w.rotation) > slack * w.epsilon) {
        return false;
    }
    const MatchIndex ia(a);
    const MatchIndex ib(b);
    return agreement(ia, ib, w);
}

Patch ball_restriction(const Patch& patch, double radius)
{
    Patch out;
    out.rule = patch.rule;
    for (const auto& t : patch.tiles) {
        const Polygon shape = patch.rule->shape_of(t);
        if (distance_to_polygon(Vec2(Vec2::Zero()), shape) < radius) {
            out.tiles.push_back(t);
        }
    }
    return out;
}

} // namespace tilesub
