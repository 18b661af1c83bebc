#include "tilesub/spectral.hpp"

#include <complex>
#include <limits>
#include <random>

#include "tilesub/parallel.hpp"

namespace tilesub {

PointSet control_points(const Patch& patch)
{
    if (patch.empty()) {
        throw RuleError("control_points: empty patch");
    }
    PointSet ps;
    ps.points.resize(2, static_cast<Eigen::Index>(patch.size()));
    for (std::size_t i = 0; i < patch.size(); ++i) {
        ps.points.col(static_cast<Eigen::Index>(i)) = patch.rule->control_point_of(patch.tiles[i]);
    }
    ps.radius = ps.points.colwise().norm().maxCoeff();
    return ps;
}

PointSet ball_subset(const PointSet& ps, double radius)
{
    const Eigen::RowVectorXd norms = ps.points.colwise().norm();
    PointSet out;
    out.radius = radius;
    out.points.resize(2, (norms.array() <= radius).count());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < ps.size(); ++i) {
        if (norms(i) <= radius) {
            out.points.col(k++) = ps.points.col(i);
        }
    }
    return out;
}

PointSet transformed(const PointSet& ps, const RigidMotion& m)
{
    PointSet out;
    out.points = (m.rotation.matrix() * ps.points).colwise() + m.translation;
    out.radius = out.points.size() ? out.points.colwise().norm().maxCoeff() : 0.0;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Dense bucket grid with cell size >= r over the bounding box of the points.
class PointGrid {
public:
    PointGrid(const Eigen::Matrix2Xd& pts, double r) : pts_(pts)
    {
        lo_ = pts.rowwise().minCoeff();
        const Vec2 hi = pts.rowwise().maxCoeff();
        const double span = std::max((hi - lo_).maxCoeff(), r);
        cell_ = std::max(r, span / 2048.0);
        nx_ = static_cast<Eigen::Index>((hi.x() - lo_.x()) / cell_) + 1;
        ny_ = static_cast<Eigen::Index>((hi.y() - lo_.y()) / cell_) + 1;
        start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
        std::vector<Eigen::Index> cell_of(static_cast<std::size_t>(pts.cols()));
        for (Eigen::Index i = 0; i < pts.cols(); ++i) {
            const auto c = index(cx(pts(0, i)), cy(pts(1, i)));
            cell_of[static_cast<std::size_t>(i)] = c;
            ++start_[static_cast<std::size_t>(c + 1)];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) {
            start_[c] += start_[c - 1];
        }
        order_.resize(static_cast<std::size_t>(pts.cols()));
        std::vector<Eigen::Index> fill(start_.begin(), start_.end() - 1);
        for (Eigen::Index i = 0; i < pts.cols(); ++i) {
            order_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])]++)] = i;
        }
    }

    template <typename Fn>
    void for_neighbors(const Vec2& q, Fn&& fn) const
    {
        const auto qx = cx(q.x());
        const auto qy = cy(q.y());
        for (auto x = std::max<Eigen::Index>(0, qx - 1); x <= std::min(nx_ - 1, qx + 1); ++x) {
            for (auto y = std::max<Eigen::Index>(0, qy - 1); y <= std::min(ny_ - 1, qy + 1); ++y) {
                const auto c = static_cast<std::size_t>(index(x, y));
                for (auto k = start_[c]; k < start_[c + 1]; ++k) {
                    fn(order_[static_cast<std::size_t>(k)]);
                }
            }
        }
    }

private:
    Eigen::Index cx(double x) const { return std::clamp<Eigen::Index>(static_cast<Eigen::Index>((x - lo_.x()) / cell_), 0, nx_ - 1); }
    Eigen::Index cy(double y) const { return std::clamp<Eigen::Index>(static_cast<Eigen::Index>((y - lo_.y()) / cell_), 0, ny_ - 1); }
    Eigen::Index index(Eigen::Index x, Eigen::Index y) const { return y * nx_ + x; }

    const Eigen::Matrix2Xd& pts_;
    Vec2 lo_;
    double cell_ = 1;
    Eigen::Index nx_ = 1;
    Eigen::Index ny_ = 1;
    std::vector<Eigen::Index> start_;
    std::vector<Eigen::Index> order_;
};

int angular_bin(double x, double y, int bins)
{
    double theta = std::atan2(y, x);
    if (theta < 0) {
        theta += kTwoPi;
    }
    const int a = static_cast<int>(theta / kTwoPi * bins);
    return std::clamp(a, 0, bins - 1);
}

} // namespace

PolarHistogram autocorrelation(const PointSet& ps, double r_max, int radial_bins, int angular_bins,
                               const AutocorrelationOptions& opts)
{
    if (ps.size() == 0) {
        throw std::invalid_argument("autocorrelation: empty point set");
    }
    if (radial_bins < 1 || angular_bins < 1) {
        throw std::invalid_argument("autocorrelation: bin counts must be >= 1");
    }
    if (!(r_max > opts.inner_radius) || r_max > ps.radius / 2.0) {
        throw std::invalid_argument("autocorrelation: r_max must satisfy delta < r_max <= R/2");
    }

    PolarHistogram h;
    h.angular_bins = angular_bins;
    h.radial_edges = Eigen::VectorXd::LinSpaced(radial_bins + 1, 0.0, r_max);
    h.radial_edges(0) = opts.inner_radius;
    const double r_eff = ps.radius - r_max;
    h.volume = std::numbers::pi * r_eff * r_eff;

    std::vector<Eigen::Index> left;
    for (Eigen::Index i = 0; i < ps.size(); ++i) {
        if (ps.points.col(i).norm() <= r_eff) {
            left.push_back(i);
        }
    }
    h.left_points = left.size();
    h.origin_mass = static_cast<double>(left.size()) / h.volume;

    const PointGrid grid(ps.points, r_max);
    const int threads = resolve_threads(opts.threads);
    std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(threads),
                                         Eigen::MatrixXd::Zero(radial_bins, angular_bins));
    const double r2 = r_max * r_max;
    const double d2 = opts.inner_radius * opts.inner_radius;
    const bool even = angular_bins % 2 == 0;

    parallel_chunks(left.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Eigen::MatrixXd& acc = partial[chunk];
        for (std::size_t li = begin; li < end; ++li) {
            const Eigen::Index i = left[li];
            const Vec2 x = ps.points.col(i);
            grid.for_neighbors(x, [&](Eigen::Index j) {
                if (j == i) {
                    return;
                }
                const Vec2 v = x - ps.points.col(j);
                const double n2 = v.squaredNorm();
                if (n2 >= r2 || n2 < d2) {
                    return;
                }
                const int b = std::min(radial_bins - 1, static_cast<int>(std::sqrt(n2) / r_max * radial_bins));
                const int a = angular_bin(v.x(), v.y(), angular_bins);
                const int anti = even ? (a + angular_bins / 2) % angular_bins : angular_bin(-v.x(), -v.y(), angular_bins);
                acc(b, a) += 0.5;
                acc(b, anti) += 0.5;
            });
        }
    });

    h.pair_counts = Eigen::MatrixXd::Zero(radial_bins, angular_bins);
    for (const auto& p : partial) {
        h.pair_counts += p;
    }
    h.weights = h.pair_counts / h.volume;
    return h;
}

SymmetryReport circular_symmetry_stat(const PolarHistogram& h, double min_occupancy)
{
    SymmetryReport r;
    r.min_occupancy = min_occupancy < 0 ? 50.0 * h.angular_bins : min_occupancy;
    for (int b = 0; b < h.radial_bins(); ++b) {
        ShellSymmetry s;
        s.r_lo = h.radial_edges(b);
        s.r_hi = h.radial_edges(b + 1);
        const Eigen::RowVectorXd w = h.weights.row(b);
        s.mean = w.mean();
        s.count = h.pair_counts.row(b).sum();
        if (s.mean > 0) {
            const double var = (w.array() - s.mean).square().mean();
            s.cv = std::sqrt(var) / s.mean;
        }
        const double mn = w.minCoeff();
        s.max_min_ratio = mn > 0 ? w.maxCoeff() / mn : std::numeric_limits<double>::infinity();
        s.qualifies = s.count >= r.min_occupancy;
        if (s.qualifies) {
            r.max_cv = std::max(r.max_cv, s.cv);
        }
        r.shells.push_back(s);
    }
    return r;
}

// ---------------------------------------------------------------------------

IntensityGrid diffraction(const PointSet& ps, double k_max, int resolution, int threads)
{
    if (resolution < 2 || !(k_max > 0)) {
        throw std::invalid_argument("diffraction: need resolution >= 2 and k_max > 0");
    }
    using Complex = std::complex<double>;
    using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

    IntensityGrid g;
    g.k_max = k_max;
    g.resolution = resolution;
    Eigen::VectorXd k(resolution);
    for (int i = 0; i < resolution; ++i) {
        k(i) = g.coordinate(i);
    }

    // S(j, i) = sum_p exp(-2 pi i ky_j y_p) exp(-2 pi i kx_i x_p), i.e. Ey * Ex^T,
    // accumulated over fixed-size point blocks.
    constexpr Eigen::Index kBlock = 4096;
    const Eigen::Index n = ps.size();
    const auto phase = [](double t) { return Complex(std::cos(t), -std::sin(t)); };
    const Eigen::Index rows = resolution;
    const int workers = std::min<int>(resolve_threads(threads), resolution);
    CMatrix sum = CMatrix::Zero(rows, resolution);

    parallel_chunks(static_cast<std::size_t>(rows), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        if (begin == end) {
            return;
        }
        const auto r0 = static_cast<Eigen::Index>(begin);
        const auto nr = static_cast<Eigen::Index>(end - begin);
        for (Eigen::Index p0 = 0; p0 < n; p0 += kBlock) {
            const Eigen::Index np = std::min(kBlock, n - p0);
            CMatrix ex(resolution, np);
            CMatrix ey(nr, np);
            for (Eigen::Index p = 0; p < np; ++p) {
                const double x = ps.points(0, p0 + p);
                const double y = ps.points(1, p0 + p);
                for (Eigen::Index i = 0; i < resolution; ++i) {
                    ex(i, p) = phase(kTwoPi * k(i) * x);
                }
                for (Eigen::Index j = 0; j < nr; ++j) {
                    ey(j, p) = phase(kTwoPi * k(r0 + j) * y);
                }
            }
            sum.middleRows(r0, nr).noalias() += ey * ex.transpose();
        }
    });

    g.values = sum.cwiseAbs2() / static_cast<double>(n);
    return g;
}

double intensity_at(const PointSet& ps, const Vec2& k)
{
    double re = 0;
    double im = 0;
    for (Eigen::Index p = 0; p < ps.size(); ++p) {
        const double t = kTwoPi * k.dot(ps.points.col(p));
        re += std::cos(t);
        im -= std::sin(t);
    }
    return (re * re + im * im) / static_cast<double>(ps.size());
}

double rotation_covariance_check(const PointSet& ps, Angle beta, std::span<const Vec2> wavevectors)
{
    const RigidMotion rot{beta, Vec2::Zero()};
    const PointSet rotated = transformed(ps, rot);
    const Mat2 r = beta.matrix();
    double worst = 0;
    for (const auto& k : wavevectors) {
        const double base = intensity_at(ps, k);
        const double turned = intensity_at(rotated, r * k);
        worst = std::max(worst, std::abs(turned - base) / std::max(base, 1.0));
    }
    return worst;
}

std::vector<Vec2> random_wavevectors(std::size_t n, double k_max, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-k_max, k_max);
    std::vector<Vec2> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(rng);
        const double y = u(rng);
        out.emplace_back(x, y);
    }
    return out;
}

std::vector<RadialShell> radial_profile(const IntensityGrid& g, int shells, int sectors)
{
    if (shells < 1 || sectors < 1) {
        throw std::invalid_argument("radial_profile: shells and sectors must be >= 1");
    }
    std::vector<RadialShell> out(static_cast<std::size_t>(shells));
    Eigen::MatrixXd sector_sum = Eigen::MatrixXd::Zero(shells, sectors);
    Eigen::MatrixXi sector_n = Eigen::MatrixXi::Zero(shells, sectors);
    const double origin_cut = g.spacing() / 2.0;
    for (int s = 0; s < shells; ++s) {
        out[static_cast<std::size_t>(s)].k_lo = g.k_max * s / shells;
        out[static_cast<std::size_t>(s)].k_hi = g.k_max * (s + 1) / shells;
    }
    for (int j = 0; j < g.resolution; ++j) {
        for (int i = 0; i < g.resolution; ++i) {
            const double kx = g.coordinate(i);
            const double ky = g.coordinate(j);
            const double kn = std::hypot(kx, ky);
            if (kn < origin_cut || kn > g.k_max) {
                continue;
            }
            const int s = std::min(shells - 1, static_cast<int>(kn / g.k_max * shells));
            const int a = angular_bin(kx, ky, sectors);
            sector_sum(s, a) += g.values(j, i);
            ++sector_n(s, a);
        }
    }
    for (int s = 0; s < shells; ++s) {
        auto& shell = out[static_cast<std::size_t>(s)];
        std::vector<double> means;
        double total = 0;
        for (int a = 0; a < sectors; ++a) {
            total += sector_sum(s, a);
            shell.samples += static_cast<std::size_t>(sector_n(s, a));
            if (sector_n(s, a) > 0) {
                means.push_back(sector_sum(s, a) / sector_n(s, a));
            }
        }
        if (shell.samples == 0) {
            continue;
        }
        shell.mean = total / static_cast<double>(shell.samples);
        double mu = 0;
        for (const double m : means) {
            mu += m;
        }
        mu /= static_cast<double>(means.size());
        double var = 0;
        for (const double m : means) {
            var += (m - mu) * (m - mu);
        }
        var /= static_cast<double>(means.size());
        shell.cv = mu > 0 ? std::sqrt(var) / mu : 0.0;
    }
    return out;
}

} // namespace tilesub
