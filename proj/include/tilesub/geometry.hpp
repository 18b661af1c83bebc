#pragma once

// Planar primitives: vectors, canonical angles, direct rigid motions and
// simple polygons. Everything is templated on the scalar type; the rest of
// the library uses the double-precision aliases at the bottom of this file.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tilesub/errors.hpp"

namespace tilesub {

/// Absolute geometric tolerance in prototile units.
inline constexpr double kGeoEps = 1e-9;
/// Circular tolerance for orientation equality.
inline constexpr double kAngleEps = 1e-9;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
using Box2T = Eigen::AlignedBox<Scalar, 2>;

template <typename Scalar>
inline Vec2T<Scalar> make_vec2(Scalar x, Scalar y)
{
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw GeometryError("non-finite coordinate");
    }
    return Vec2T<Scalar>(x, y);
}

/// z-component of the 2D cross product.
template <typename Derived1, typename Derived2>
inline auto cross2(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

// ---------------------------------------------------------------------------
// Angles

/// An orientation in [0, 2*pi). Any real input is reduced modulo 2*pi.
template <typename Scalar>
class AngleT {
public:
    static constexpr Scalar two_pi = Scalar(kTwoPi);

    constexpr AngleT() = default;
    explicit AngleT(Scalar radians) : radians_(canonical(radians)) {}

    static Scalar canonical(Scalar a)
    {
        if (!std::isfinite(a)) {
            throw GeometryError("non-finite angle");
        }
        Scalar r = std::fmod(a, two_pi);
        if (r < Scalar(0)) {
            r += two_pi;
        }
        if (r >= two_pi) {
            r = Scalar(0);
        }
        return r;
    }

    Scalar radians() const { return radians_; }

    Mat2T<Scalar> matrix() const { return Eigen::Rotation2D<Scalar>(radians_).toRotationMatrix(); }

    /// Representative in (-pi, pi].
    Scalar signed_radians() const
    {
        return radians_ > Scalar(std::numbers::pi) ? radians_ - two_pi : radians_;
    }

    friend AngleT operator+(AngleT a, AngleT b) { return AngleT(a.radians_ + b.radians_); }
    friend AngleT operator-(AngleT a, AngleT b) { return AngleT(a.radians_ - b.radians_); }
    AngleT operator-() const { return AngleT(-radians_); }

    /// Exact representation equality; use approx_equal for orientation grouping.
    friend bool operator==(AngleT a, AngleT b) { return a.radians_ == b.radians_; }

    bool approx_equal(AngleT other, Scalar eps = Scalar(kAngleEps)) const
    {
        return circular_distance(*this, other) < eps;
    }

    friend Scalar circular_distance(AngleT a, AngleT b)
    {
        const Scalar d = std::abs(a.radians_ - b.radians_);
        return std::min(d, two_pi - d);
    }

private:
    Scalar radians_ = Scalar(0);
};

// ---------------------------------------------------------------------------
// Rigid motions

/// x -> R x + t, a direct isometry.
template <typename Scalar>
struct RigidMotionT {
    AngleT<Scalar> rotation;
    Vec2T<Scalar> translation = Vec2T<Scalar>::Zero();

    static RigidMotionT identity() { return {}; }

    Vec2T<Scalar> operator()(const Vec2T<Scalar>& x) const { return rotation.matrix() * x + translation; }

    RigidMotionT inverse() const
    {
        const AngleT<Scalar> back = -rotation;
        return {back, -(back.matrix() * translation)};
    }

    /// (a * b)(x) == a(b(x)).
    friend RigidMotionT operator*(const RigidMotionT& a, const RigidMotionT& b)
    {
        return {a.rotation + b.rotation, a.rotation.matrix() * b.translation + a.translation};
    }
};

// ---------------------------------------------------------------------------
// Polygons

template <typename Scalar>
Scalar segment_distance(const Vec2T<Scalar>& q, const Vec2T<Scalar>& a, const Vec2T<Scalar>& b)
{
    const Vec2T<Scalar> ab = b - a;
    const Scalar len2 = ab.squaredNorm();
    Scalar s = len2 > Scalar(0) ? (q - a).dot(ab) / len2 : Scalar(0);
    s = std::clamp(s, Scalar(0), Scalar(1));
    return (a + s * ab - q).norm();
}

template <typename Scalar>
Scalar segment_segment_distance(const Vec2T<Scalar>& a, const Vec2T<Scalar>& b, const Vec2T<Scalar>& c,
                                const Vec2T<Scalar>& d)
{
    const Scalar d1 = cross2(b - a, c - a);
    const Scalar d2 = cross2(b - a, d - a);
    const Scalar d3 = cross2(d - c, a - c);
    const Scalar d4 = cross2(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return Scalar(0);
    }
    return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                     segment_distance(d, a, b)});
}

template <typename Scalar>
Scalar signed_area(std::span<const Vec2T<Scalar>> vertices)
{
    Scalar twice = 0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross2(vertices[i], vertices[(i + 1) % n]);
    }
    return twice / Scalar(2);
}

/// A simple polygon with counterclockwise vertex order. Validated on construction;
/// transformed copies produced by this header skip re-validation.
template <typename Scalar>
class PolygonT {
public:
    using Vec = Vec2T<Scalar>;

    PolygonT() = default;

    /// Validates finiteness, non-degeneracy and simplicity. Clockwise input is reversed.
    explicit PolygonT(std::vector<Vec> vertices) : vertices_(std::move(vertices))
    {
        if (vertices_.size() < 3) {
            throw GeometryError("polygon needs at least 3 vertices");
        }
        for (const auto& v : vertices_) {
            if (!v.allFinite()) {
                throw GeometryError("polygon vertex is not finite");
            }
        }
        const Scalar a = signed_area<Scalar>(vertices_);
        if (std::abs(a) <= Scalar(kGeoEps)) {
            throw GeometryError("polygon has zero area");
        }
        if (a < 0) {
            std::reverse(vertices_.begin(), vertices_.end());
        }
        check_simple();
    }

    static PolygonT unchecked(std::vector<Vec> vertices)
    {
        PolygonT p;
        p.vertices_ = std::move(vertices);
        return p;
    }

    std::span<const Vec> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec& operator[](std::size_t i) const { return vertices_[i]; }

    Box2T<Scalar> bounds() const
    {
        Box2T<Scalar> box;
        for (const auto& v : vertices_) {
            box.extend(v);
        }
        return box;
    }

    Vec centroid() const
    {
        Vec c = Vec::Zero();
        Scalar twice = 0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec& p = vertices_[i];
            const Vec& q = vertices_[(i + 1) % n];
            const Scalar w = cross2(p, q);
            twice += w;
            c += w * (p + q);
        }
        return c / (Scalar(3) * twice);
    }

private:
    void check_simple() const
    {
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec& a = vertices_[i];
            const Vec& b = vertices_[(i + 1) % n];
            if ((b - a).norm() <= Scalar(kGeoEps)) {
                throw GeometryError("polygon has a repeated vertex");
            }
            // Adjacent edges folding back onto each other.
            const Vec& c = vertices_[(i + 2) % n];
            if (std::abs(cross2(b - a, c - b)) <= Scalar(kGeoEps) * (b - a).norm() && (b - a).dot(c - b) < 0) {
                throw GeometryError("polygon has a degenerate spike");
            }
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) {
                    continue;
                }
                const Vec& c2 = vertices_[j];
                const Vec& d2 = vertices_[(j + 1) % n];
                if (segment_segment_distance(a, b, c2, d2) < Scalar(kGeoEps)) {
                    throw GeometryError("polygon is not simple");
                }
            }
        }
    }

    std::vector<Vec> vertices_;
};

template <typename Scalar>
Scalar polygon_area(const PolygonT<Scalar>& p)
{
    return signed_area<Scalar>(p.vertices());
}

template <typename Scalar>
PolygonT<Scalar> apply_motion(const RigidMotionT<Scalar>& m, const PolygonT<Scalar>& p)
{
    const Mat2T<Scalar> r = m.rotation.matrix();
    std::vector<Vec2T<Scalar>> out;
    out.reserve(p.size());
    for (const auto& v : p.vertices()) {
        out.emplace_back(r * v + m.translation);
    }
    return PolygonT<Scalar>::unchecked(std::move(out));
}

template <typename Scalar>
PolygonT<Scalar> scaled(const PolygonT<Scalar>& p, Scalar factor)
{
    if (!(factor > Scalar(0))) {
        throw GeometryError("scale factor must be positive");
    }
    std::vector<Vec2T<Scalar>> out;
    out.reserve(p.size());
    for (const auto& v : p.vertices()) {
        out.emplace_back(factor * v);
    }
    return PolygonT<Scalar>::unchecked(std::move(out));
}

template <typename Scalar>
Scalar distance_to_boundary(const Vec2T<Scalar>& q, const PolygonT<Scalar>& p)
{
    Scalar best = std::numeric_limits<Scalar>::infinity();
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, segment_distance(q, p[i], p[(i + 1) % n]));
    }
    return best;
}

enum class PointLocation { inside, boundary, outside };

inline const char* to_string(PointLocation loc)
{
    switch (loc) {
    case PointLocation::inside: return "inside";
    case PointLocation::boundary: return "boundary";
    case PointLocation::outside: return "outside";
    }
    return "?";
}

/// Crossing-number classification; points within kGeoEps of an edge are on the boundary.
template <typename Scalar>
PointLocation point_in_polygon(const Vec2T<Scalar>& q, const PolygonT<Scalar>& p, Scalar eps = Scalar(kGeoEps))
{
    if (distance_to_boundary(q, p) <= eps) {
        return PointLocation::boundary;
    }
    bool inside = false;
    const std::size_t n = p.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2T<Scalar>& a = p[i];
        const Vec2T<Scalar>& b = p[j];
        if ((a.y() > q.y()) != (b.y() > q.y())) {
            const Scalar x = (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (q.x() < x) {
                inside = !inside;
            }
        }
    }
    return inside ? PointLocation::inside : PointLocation::outside;
}

/// Euclidean distance from q to the closed polygon (0 inside).
template <typename Scalar>
Scalar distance_to_polygon(const Vec2T<Scalar>& q, const PolygonT<Scalar>& p)
{
    return point_in_polygon(q, p, Scalar(0)) == PointLocation::inside ? Scalar(0) : distance_to_boundary(q, p);
}

template <typename Scalar>
using TriangleT = std::array<Vec2T<Scalar>, 3>;

/// Ear clipping. Handles non-convex simple polygons such as the chair L-shape.
template <typename Scalar>
std::vector<TriangleT<Scalar>> triangulate(const PolygonT<Scalar>& p)
{
    using Vec = Vec2T<Scalar>;
    std::vector<Vec> ring(p.vertices().begin(), p.vertices().end());
    std::vector<TriangleT<Scalar>> tris;
    tris.reserve(ring.size());

    const auto in_triangle = [](const Vec& q, const Vec& a, const Vec& b, const Vec& c) {
        return cross2(b - a, q - a) >= 0 && cross2(c - b, q - b) >= 0 && cross2(a - c, q - c) >= 0;
    };

    while (ring.size() > 3) {
        const std::size_t n = ring.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const Vec& a = ring[(i + n - 1) % n];
            const Vec& b = ring[i];
            const Vec& c = ring[(i + 1) % n];
            const Scalar turn = cross2(b - a, c - b);
            if (std::abs(turn) <= Scalar(1e-14) * (b - a).norm() * (c - b).norm()) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
            if (turn < 0) {
                continue;
            }
            bool ear = true;
            for (std::size_t j = 0; j < n && ear; ++j) {
                const Vec& q = ring[j];
                if (q == a || q == b || q == c) {
                    continue;
                }
                ear = !in_triangle(q, a, b, c);
            }
            if (ear) {
                tris.push_back({a, b, c});
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
            }
        }
        if (!clipped) {
            throw GeometryError("ear clipping failed; polygon is not simple");
        }
    }
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

/// Sutherland-Hodgman clip of `subject` against the convex CCW polygon `clip`.
template <typename Scalar>
std::vector<Vec2T<Scalar>> clip_convex(std::span<const Vec2T<Scalar>> subject, std::span<const Vec2T<Scalar>> clip)
{
    using Vec = Vec2T<Scalar>;
    std::vector<Vec> out(subject.begin(), subject.end());
    const std::size_t m = clip.size();
    for (std::size_t e = 0; e < m && !out.empty(); ++e) {
        const Vec& a = clip[e];
        const Vec& b = clip[(e + 1) % m];
        const Vec dir = b - a;
        std::vector<Vec> in = std::move(out);
        out.clear();
        const std::size_t k = in.size();
        for (std::size_t i = 0; i < k; ++i) {
            const Vec& cur = in[i];
            const Vec& prev = in[(i + k - 1) % k];
            const Scalar sc = cross2(dir, cur - a);
            const Scalar sp = cross2(dir, prev - a);
            if (sc >= 0) {
                if (sp < 0) {
                    out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
                }
                out.push_back(cur);
            } else if (sp >= 0) {
                out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
    }
    return out;
}

/// Area of p intersected with q: triangulate both, clip triangle pairs.
template <typename Scalar>
Scalar intersection_area(const PolygonT<Scalar>& p, const PolygonT<Scalar>& q)
{
    if (!p.bounds().intersects(q.bounds())) {
        return Scalar(0);
    }
    const auto tp = triangulate(p);
    const auto tq = triangulate(q);
    Scalar total = 0;
    for (const auto& a : tp) {
        Box2T<Scalar> ba;
        for (const auto& v : a) {
            ba.extend(v);
        }
        for (const auto& b : tq) {
            Box2T<Scalar> bb;
            for (const auto& v : b) {
                bb.extend(v);
            }
            if (!ba.intersects(bb)) {
                continue;
            }
            const auto piece = clip_convex<Scalar>(a, b);
            if (piece.size() >= 3) {
                total += std::abs(signed_area<Scalar>(piece));
            }
        }
    }
    return total;
}

/// Approximate deepest interior point (largest inscribed disk centre) and its clearance,
/// found by a coarse grid search refined around the best sample.
template <typename Scalar>
std::pair<Vec2T<Scalar>, Scalar> interior_center(const PolygonT<Scalar>& p, int grid = 48, int refinements = 12)
{
    const Box2T<Scalar> box = p.bounds();
    Vec2T<Scalar> best = p[0];
    Scalar best_depth = -1;
    Vec2T<Scalar> lo = box.min();
    Vec2T<Scalar> span = box.sizes();
    for (int round = 0; round <= refinements; ++round) {
        Vec2T<Scalar> round_best = best;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid; ++j) {
                const Vec2T<Scalar> q = lo + Vec2T<Scalar>(span.x() * i / grid, span.y() * j / grid);
                if (point_in_polygon(q, p, Scalar(0)) != PointLocation::inside) {
                    continue;
                }
                const Scalar depth = distance_to_boundary(q, p);
                if (depth > best_depth) {
                    best_depth = depth;
                    round_best = q;
                }
            }
        }
        best = round_best;
        span *= Scalar(4) / Scalar(grid);
        lo = best - span / Scalar(2);
    }
    return {best, std::max(best_depth, Scalar(0))};
}

// Double-precision aliases used throughout the library.
using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;
using Box2 = Box2T<double>;
using Angle = AngleT<double>;
using RigidMotion = RigidMotionT<double>;
using Polygon = PolygonT<double>;
using Triangle = TriangleT<double>;

} // namespace tilesub
