#include "tilesub/substitution.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "tilesub/tile_index.hpp"

namespace tilesub {

namespace {

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ = (hash_ ^ p[i]) * 0x100000001b3ULL;
        }
    }
    void number(double v)
    {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            const unsigned char b = static_cast<unsigned char>(bits >> (8 * i));
            bytes(&b, 1);
        }
    }
    void text(const std::string& s) { bytes(s.data(), s.size()); }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

double radical_inverse(std::uint64_t i, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<std::size_t> parent;
};

using OrientationSet = std::vector<std::vector<double>>; // per prototile, grouped and sorted

bool same_orientation_set(const OrientationSet& a, const OrientationSet& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) {
            return false;
        }
        for (const double x : a[i]) {
            const bool found = std::any_of(b[i].begin(), b[i].end(),
                                           [x](double y) { return Angle(x).approx_equal(Angle(y)); });
            if (!found) {
                return false;
            }
        }
    }
    return true;
}

std::size_t total_size(const OrientationSet& s)
{
    std::size_t n = 0;
    for (const auto& v : s) {
        n += v.size();
    }
    return n;
}

std::string degrees_label(double radians)
{
    std::ostringstream os;
    os.precision(6);
    os << radians * 180.0 / std::numbers::pi;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------

SubstitutionRule::SubstitutionRule(std::string name, double lambda, std::vector<Prototile> prototiles,
                                   std::vector<std::vector<TilePlacement>> children)
    : name_(std::move(name)), lambda_(lambda), prototiles_(std::move(prototiles)), children_(std::move(children))
{
    if (!std::isfinite(lambda_) || lambda_ <= 1.0) {
        throw RuleError("lambda must exceed 1");
    }
    if (prototiles_.empty()) {
        throw RuleError("rule has no prototiles");
    }
    if (children_.size() != prototiles_.size()) {
        throw RuleError("children must list one entry per prototile");
    }
    const int m = static_cast<int>(prototiles_.size());
    for (int i = 0; i < m; ++i) {
        auto& p = prototiles_[static_cast<std::size_t>(i)];
        p.id = i;
        if (!p.control_point.allFinite()) {
            throw GeometryError("prototile " + std::to_string(i) + " (" + p.label + "): control point not finite");
        }
        if (point_in_polygon(p.control_point, p.shape) == PointLocation::outside) {
            throw GeometryError("prototile " + std::to_string(i) + " (" + p.label +
                                "): control point lies outside the shape");
        }
        const auto& kids = children_[static_cast<std::size_t>(i)];
        if (kids.empty()) {
            throw RuleError("prototile " + std::to_string(i) + " (" + p.label + ") has no children");
        }
        for (const auto& c : kids) {
            if (c.prototile < 0 || c.prototile >= m) {
                throw RuleError("prototile " + std::to_string(i) + " (" + p.label +
                                "): child references unknown prototile " + std::to_string(c.prototile));
            }
            if (!c.translation.allFinite()) {
                throw GeometryError("prototile " + std::to_string(i) + ": child translation not finite");
            }
        }
    }
}

std::uint64_t SubstitutionRule::digest() const
{
    Fnv1a h;
    h.text(name_);
    h.number(lambda_);
    for (const auto& p : prototiles_) {
        for (const auto& v : p.shape.vertices()) {
            h.number(v.x());
            h.number(v.y());
        }
        h.number(p.control_point.x());
        h.number(p.control_point.y());
    }
    for (const auto& kids : children_) {
        for (const auto& c : kids) {
            h.number(static_cast<double>(c.prototile));
            h.number(c.orientation.radians());
            h.number(c.translation.x());
            h.number(c.translation.y());
        }
    }
    return h.value();
}

Patch seed_patch(RulePtr rule, int prototile, const RigidMotion& placement)
{
    if (!rule || prototile < 0 || static_cast<std::size_t>(prototile) >= rule->size()) {
        throw RuleError("prototile index out of range");
    }
    Patch p;
    p.rule = std::move(rule);
    p.tiles.push_back({prototile, placement.rotation, placement.translation});
    return p;
}

Patch transformed(const Patch& patch, const RigidMotion& m)
{
    Patch out;
    out.rule = patch.rule;
    out.tiles.reserve(patch.size());
    const Mat2 r = m.rotation.matrix();
    for (const auto& t : patch.tiles) {
        out.tiles.push_back({t.prototile, m.rotation + t.orientation, r * t.translation + m.translation});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_rule(const SubstitutionRule& rule, const ValidationOptions& opts)
{
    ValidationReport report;
    report.passed = true;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lambda2 = rule.lambda() * rule.lambda();

    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto& proto = rule.prototiles()[i];
        PrototileValidation v;
        v.prototile = static_cast<int>(i);
        v.control_point_on_boundary = point_in_polygon(proto.control_point, proto.shape) == PointLocation::boundary;
        const Polygon parent = scaled(proto.shape, rule.lambda());
        const double parent_area = polygon_area(parent);

        std::vector<Polygon> kids;
        for (const auto& c : rule.children(static_cast<int>(i))) {
            kids.push_back(rule.shape_of(c));
        }

        double child_sum = 0;
        v.min_child_area = std::numeric_limits<double>::infinity();
        for (const auto& k : kids) {
            const double a = polygon_area(k);
            child_sum += a;
            v.min_child_area = std::min(v.min_child_area, a);
            v.containment_deficit = std::max(v.containment_deficit, a - intersection_area(k, parent));
        }
        v.area_residual = std::abs(child_sum - lambda2 * polygon_area(proto.shape)) / parent_area;

        for (std::size_t a = 0; a < kids.size(); ++a) {
            for (std::size_t b = a + 1; b < kids.size(); ++b) {
                v.max_overlap = std::max(v.max_overlap, intersection_area(kids[a], kids[b]));
            }
        }

        // Coverage: shifted Halton points inside lambda * P_i.
        const Box2 box = parent.bounds();
        const Vec2 shift(unit(rng), unit(rng));
        std::uint64_t index = 1;
        const std::uint64_t max_draws = 1000 * opts.coverage_samples + 1000;
        while (v.samples < opts.coverage_samples && index < max_draws) {
            const Vec2 u(std::fmod(radical_inverse(index, 2) + shift.x(), 1.0),
                         std::fmod(radical_inverse(index, 3) + shift.y(), 1.0));
            ++index;
            const Vec2 q = box.min() + u.cwiseProduct(box.sizes());
            if (point_in_polygon(q, parent) != PointLocation::inside) {
                continue;
            }
            ++v.samples;
            bool near_edge = false;
            bool covered = false;
            for (const auto& k : kids) {
                const auto loc = point_in_polygon(q, k);
                near_edge = near_edge || loc == PointLocation::boundary;
                covered = covered || loc == PointLocation::inside;
            }
            if (near_edge) {
                ++v.skipped;
            } else if (!covered) {
                ++v.uncovered;
            }
        }

        v.passed = v.area_residual < opts.area_tolerance &&
                   v.max_overlap < opts.overlap_tolerance * v.min_child_area &&
                   v.containment_deficit < opts.overlap_tolerance * v.min_child_area && v.uncovered == 0 &&
                   v.samples == opts.coverage_samples;
        report.passed = report.passed && v.passed;
        report.prototiles.push_back(v);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Generation

std::size_t default_tile_cap()
{
    if (const char* env = std::getenv("TILESUB_CAP")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v >= 1.0) {
            return static_cast<std::size_t>(v);
        }
    }
    return 10'000'000;
}

Patch substitute(const Patch& patch)
{
    Patch out;
    out.rule = patch.rule;
    if (patch.empty()) {
        return out;
    }
    const auto& rule = *patch.rule;
    std::size_t n = 0;
    for (const auto& t : patch.tiles) {
        n += rule.children(t.prototile).size();
    }
    out.tiles.reserve(n);
    const double lambda = rule.lambda();
    for (const auto& t : patch.tiles) {
        const Mat2 r = t.orientation.matrix();
        const Vec2 base = lambda * t.translation;
        for (const auto& c : rule.children(t.prototile)) {
            out.tiles.push_back({c.prototile, t.orientation + c.orientation, r * c.translation + base});
        }
    }
    if (patch.provenance) {
        out.provenance = SupertileProvenance{patch.provenance->seed, patch.provenance->depth + 1};
    }
    return out;
}

Patch supertile(RulePtr rule, int prototile, int depth, std::size_t cap)
{
    return supertile(std::move(rule), prototile, depth, RigidMotion::identity(), cap);
}

Patch supertile(RulePtr rule, int prototile, int depth, const RigidMotion& seed_motion, std::size_t cap)
{
    if (depth < 0) {
        throw RuleError("depth must be non-negative");
    }
    Patch p = seed_patch(rule, prototile, seed_motion);
    const double predicted = predicted_tile_count(substitution_matrix(*rule), prototile, depth);
    if (predicted > static_cast<double>(cap)) {
        std::ostringstream os;
        os << "supertile would contain " << predicted << " tiles, cap is " << cap;
        throw CapExceeded(os.str());
    }
    p.provenance = SupertileProvenance{prototile, 0};
    for (int k = 0; k < depth; ++k) {
        p = substitute(p);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Matrix

SubstitutionMatrix substitution_matrix(const SubstitutionRule& rule)
{
    const auto m = static_cast<Eigen::Index>(rule.size());
    SubstitutionMatrix out = SubstitutionMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (const auto& c : rule.children(static_cast<int>(j))) {
            ++out(c.prototile, j);
        }
    }
    return out;
}

double predicted_tile_count(const SubstitutionMatrix& m, int prototile, int depth)
{
    Eigen::VectorXd v = Eigen::VectorXd::Unit(m.rows(), prototile);
    const Eigen::MatrixXd md = m.cast<double>();
    for (int k = 0; k < depth; ++k) {
        v = md * v;
    }
    return v.sum();
}

PrimitivityResult is_primitive(const SubstitutionMatrix& m)
{
    const auto n = m.rows();
    if (n == 0 || m.cols() != n || (m.array() < 0).any()) {
        return {};
    }
    const Eigen::MatrixXi pattern = (m.array() > 0).cast<int>();
    Eigen::MatrixXi power = pattern;
    const auto bound = n * n - 2 * n + 2;
    for (Eigen::Index k = 1; k <= bound; ++k) {
        if ((power.array() > 0).all()) {
            return {true, static_cast<int>(k)};
        }
        power = (power * pattern).cwiseMin(1);
    }
    return {};
}

PerronFrobenius pf_eigen(const SubstitutionMatrix& m, double tolerance, int max_iterations)
{
    if (!is_primitive(m).primitive) {
        throw NotPrimitiveError("substitution matrix is not primitive");
    }
    const Eigen::MatrixXd md = m.cast<double>();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m.rows(), 1.0 / static_cast<double>(m.rows()));
    PerronFrobenius out;
    for (int it = 1; it <= max_iterations; ++it) {
        Eigen::VectorXd w = md * v;
        const double norm = w.sum();
        w /= norm;
        const double change = (w - v).lpNorm<1>();
        v = std::move(w);
        out.eigenvalue = norm;
        if (change < tolerance) {
            out.iterations = it;
            out.eigenvalue = (md * v).sum();
            out.frequencies = v;
            return out;
        }
    }
    throw ConvergenceError("power iteration did not converge");
}

// ---------------------------------------------------------------------------
// Orientations

std::vector<double> group_angles(std::vector<double> radians, double eps)
{
    for (auto& a : radians) {
        a = Angle::canonical(a);
    }
    std::sort(radians.begin(), radians.end());
    const std::size_t n = radians.size();
    if (n == 0) {
        return radians;
    }
    UnionFind uf(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (radians[i + 1] - radians[i] < eps) {
            uf.unite(i, i + 1);
        }
    }
    if (n > 1 && radians[0] + kTwoPi - radians[n - 1] < eps) {
        uf.unite(0, n - 1);
    }
    std::vector<double> reps;
    for (std::size_t i = 0; i < n; ++i) {
        if (uf.find(i) == i) {
            reps.push_back(radians[i]);
        }
    }
    return reps;
}

OrientationCensus orientation_census(const SubstitutionRule& rule, int k_max, int window)
{
    if (window < 1 || k_max < window) {
        throw RuleError("census needs k_max >= window >= 1");
    }
    constexpr std::size_t kSetCap = 1'000'000;
    const std::size_t m = rule.size();
    OrientationSet current(m);
    current[0] = {0.0};
    std::vector<OrientationSet> history;
    OrientationCensus out;

    for (int k = 1; k <= k_max; ++k) {
        std::vector<std::vector<double>> raw(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (const double a : current[i]) {
                for (const auto& c : rule.children(static_cast<int>(i))) {
                    raw[static_cast<std::size_t>(c.prototile)].push_back(a + c.orientation.radians());
                }
            }
        }
        OrientationSet next(m);
        for (std::size_t i = 0; i < m; ++i) {
            next[i] = group_angles(std::move(raw[i]));
        }
        current = std::move(next);
        out.counts.push_back(total_size(current));
        history.push_back(current);
        if (out.counts.back() > kSetCap) {
            break;
        }
    }

    const auto h = static_cast<int>(history.size());
    out.finite = h == k_max;
    for (int j = h - window + 1; out.finite && j < h; ++j) {
        out.finite = same_orientation_set(history[static_cast<std::size_t>(j - 1)],
                                          history[static_cast<std::size_t>(j)]);
    }
    if (out.finite) {
        for (std::size_t i = 0; i < m; ++i) {
            for (const double a : current[i]) {
                out.classes.push_back({static_cast<int>(i), Angle(a)});
            }
        }
    }
    return out;
}

TranslationClassExpansion expand_translation_classes(const SubstitutionRule& rule, std::size_t max_classes)
{
    const auto census = orientation_census(rule);
    if (!census.finite) {
        throw InfiniteOrientationsError("rule '" + rule.name() +
                                        "' has a growing orientation set; translation classes are infinite");
    }

    // Closure of {(P_i, 0)} under the child map.
    std::vector<OrientationClass> classes;
    const auto find_class = [&classes](int prototile, Angle a) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (classes[c].prototile == prototile && classes[c].orientation.approx_equal(a)) {
                return c;
            }
        }
        return std::nullopt;
    };
    for (std::size_t i = 0; i < rule.size(); ++i) {
        classes.push_back({static_cast<int>(i), Angle(0.0)});
    }
    for (std::size_t next = 0; next < classes.size(); ++next) {
        const OrientationClass cls = classes[next];
        for (const auto& c : rule.children(cls.prototile)) {
            const Angle a = cls.orientation + c.orientation;
            if (!find_class(c.prototile, a)) {
                if (classes.size() >= max_classes) {
                    throw InfiniteOrientationsError("translation-class closure exceeds " +
                                                    std::to_string(max_classes) + " classes");
                }
                classes.push_back({c.prototile, a});
            }
        }
    }
    std::sort(classes.begin(), classes.end(), [](const OrientationClass& a, const OrientationClass& b) {
        return a.prototile != b.prototile ? a.prototile < b.prototile
                                          : a.orientation.radians() < b.orientation.radians();
    });

    std::vector<Prototile> prototiles;
    std::vector<std::vector<TilePlacement>> children;
    for (const auto& cls : classes) {
        const auto& base = rule.prototile(cls.prototile);
        const RigidMotion turn{cls.orientation, Vec2::Zero()};
        const Polygon rotated = apply_motion(turn, base.shape);
        Prototile p;
        p.label = base.label + "@" + degrees_label(cls.orientation.radians());
        p.shape = Polygon(std::vector<Vec2>(rotated.vertices().begin(), rotated.vertices().end()));
        p.control_point = turn(base.control_point);
        p.decoration = base.decoration;
        prototiles.push_back(std::move(p));

        std::vector<TilePlacement> kids;
        const Mat2 r = cls.orientation.matrix();
        for (const auto& c : rule.children(cls.prototile)) {
            const auto target = find_class(c.prototile, cls.orientation + c.orientation);
            kids.push_back({static_cast<int>(*target), Angle(0.0), r * c.translation});
        }
        children.push_back(std::move(kids));
    }

    return {SubstitutionRule(rule.name() + "/translation-classes", rule.lambda(), std::move(prototiles),
                             std::move(children)),
            std::move(classes)};
}

FrequencyEstimate empirical_frequency(const Patch& patch, int prototile, Angle orientation, double radius)
{
    if (patch.empty()) {
        throw RuleError("empirical frequency needs a nonempty patch");
    }
    FrequencyEstimate est;
    const auto& rule = *patch.rule;
    for (const auto& t : patch.tiles) {
        if (rule.control_point_of(t).norm() > radius) {
            continue;
        }
        ++est.total;
        if (t.prototile == prototile && t.orientation.approx_equal(orientation)) {
            ++est.matched;
        }
    }
    est.value = est.total == 0 ? 0.0 : static_cast<double>(est.matched) / static_cast<double>(est.total);

    const TileIndex index(patch);
    constexpr int kRingSamples = 64;
    bool covered = index.covers(Vec2::Zero());
    for (const double frac : {0.5, 1.0}) {
        for (int s = 0; s < kRingSamples && covered && radius > 0; ++s) {
            const double a = kTwoPi * s / kRingSamples;
            covered = index.covers(frac * radius * Vec2(std::cos(a), std::sin(a)));
        }
    }
    est.ball_not_covered = !covered;
    return est;
}

} // namespace tilesub
