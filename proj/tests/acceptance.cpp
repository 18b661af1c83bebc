// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "tilesub/hull.hpp"
#include "tilesub/io.hpp"
#include "tilesub/orientstats.hpp"
#include "tilesub/spectral.hpp"

using namespace tilesub;
using tilesub::testing::bundled;
using tilesub::testing::rule_path;

namespace {

const char* const kRules[] = {"pinwheel", "chair", "imbalance"};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void criterion_1(Outcome& o)
{
    const auto t0 = Clock::now();
    for (const char* name : kRules) {
        const auto report = validate_rule(*bundled(name));
        o.require(report.passed, std::string(name) + " invalid");
    }
    const double t = seconds_since(t0);
    o.require(t < 5.0, "runtime");
    o.detail << " runtime=" << t << "s";
}

void criterion_2(Outcome& o)
{
    const auto t0 = Clock::now();
    for (const char* name : kRules) {
        const auto rule = bundled(name);
        const SubstitutionMatrix m = substitution_matrix(*rule);
        const auto n = m.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
            // 1^T M^k e_i in exact integer arithmetic.
            SubstitutionMatrix v = SubstitutionMatrix::Zero(n, 1);
            v(i, 0) = 1;
            for (int k = 0; k <= 6; ++k) {
                const auto size = supertile(rule, static_cast<int>(i), k).size();
                o.require(static_cast<std::int64_t>(size) == v.sum(),
                          std::string(name) + " count i=" + std::to_string(i) + " k=" + std::to_string(k));
                v = m * v;
            }
        }
        const double pf = pf_eigen(m).eigenvalue;
        const double expected = rule->lambda() * rule->lambda();
        o.require(std::abs(pf - expected) < 1e-9, std::string(name) + " pf");
        o.detail << " " << name << ".pf=" << format_double(pf);
    }
    const double t = seconds_since(t0);
    o.require(t < 30.0, "runtime");
    o.detail << " runtime=" << t << "s";
}

void criterion_3(Outcome& o)
{
    struct Case {
        const char* name;
        std::vector<double> pf;
        double tolerance;
    };
    const std::vector<Case> cases = {{"chair", {0.25, 0.25, 0.25, 0.25}, 0.005}, {"imbalance", {2.0 / 3, 1.0 / 3}, 0.01}};
    for (const auto& c : cases) {
        const auto rule = bundled(c.name);
        const auto expansion = expand_translation_classes(*rule);
        const auto pf = pf_eigen(substitution_matrix(expansion.rule));
        o.require(static_cast<std::size_t>(pf.frequencies.size()) == c.pf.size(), std::string(c.name) + " classes");
        if (!o.pass) {
            return;
        }
        const Patch p = supertile(rule, 0, 8);
        const double whole = control_points(p).radius;
        o.detail << " " << c.name << ":";
        for (std::size_t k = 0; k < c.pf.size(); ++k) {
            const double f = pf.frequencies(static_cast<Eigen::Index>(k));
            const auto& cls = expansion.classes[k];
            const double emp = empirical_frequency(p, cls.prototile, cls.orientation, whole + 1.0).value;
            o.require(std::abs(f - c.pf[k]) < 1e-12, std::string(c.name) + " pf component");
            o.require(std::abs(emp - c.pf[k]) < c.tolerance, std::string(c.name) + " empirical");
            o.detail << " (" << format_double(f) << ", " << emp << ")";
        }
    }
}

void criterion_4(Outcome& o)
{
    const auto t0 = Clock::now();
    const auto rows = prefix_reports(hierarchical_sequence(bundled("pinwheel"), 0, 8));
    o.require(rows.size() >= 4, "marks");
    if (!o.pass) {
        return;
    }
    o.detail << " discrepancy:";
    for (std::size_t k = rows.size() - 4; k < rows.size(); ++k) {
        o.detail << " " << rows[k].n << "=" << rows[k].discrepancy;
        if (k > rows.size() - 4) {
            o.require(rows[k].discrepancy < rows[k - 1].discrepancy, "discrepancy not decreasing");
        }
    }
    const auto at625 = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.n == 625; });
    o.require(at625 != rows.end(), "mark 625");
    if (!o.pass) {
        return;
    }
    o.detail << " |W_m| 625 -> " << rows.back().n << ":";
    for (std::size_t m = 0; m < 4; ++m) {
        o.require(rows.back().weyl[m] < at625->weyl[m], "W_" + std::to_string(m + 1));
        o.detail << " " << at625->weyl[m] << "->" << rows.back().weyl[m];
    }
    const double t = seconds_since(t0);
    o.require(t < 120.0, "runtime");
    o.detail << " runtime=" << t << "s";
}

PointSet inscribed_points(const RulePtr& rule, int depth)
{
    const Patch p = supertile(rule, 0, depth);
    const Polygon region = scaled(rule->prototile(0).shape, std::pow(rule->lambda(), depth));
    const auto [center, clearance] = interior_center(region);
    return ball_subset(transformed(control_points(p), RigidMotion{Angle(0.0), -center}), clearance);
}

PointSet lattice_disk(std::size_t n)
{
    const double radius = std::sqrt(static_cast<double>(n) / std::numbers::pi);
    std::vector<Vec2> pts;
    const int r = static_cast<int>(radius) + 1;
    for (int x = -r; x <= r; ++x) {
        for (int y = -r; y <= r; ++y) {
            if (std::hypot(x, y) <= radius) {
                pts.emplace_back(x, y);
            }
        }
    }
    PointSet ps;
    ps.points.resize(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ps.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    ps.radius = radius;
    return ps;
}

SymmetryReport shell_report(const PointSet& ps)
{
    AutocorrelationOptions opts;
    opts.threads = 0;
    return circular_symmetry_stat(autocorrelation(ps, 10.0, 10, 24, opts));
}

bool in_range(const ShellSymmetry& s)
{
    return s.r_lo >= 2.0 - 1e-9 && s.r_hi <= 10.0 + 1e-9;
}

void criterion_5(Outcome& o)
{
    const auto t0 = Clock::now();
    const auto pin = bundled("pinwheel");
    std::vector<SymmetryReport> reports;
    std::size_t n7 = 0;
    for (int depth : {5, 6, 7}) {
        const PointSet ps = inscribed_points(pin, depth);
        n7 = static_cast<std::size_t>(ps.size());
        reports.push_back(shell_report(ps));
    }
    const SymmetryReport lattice = shell_report(lattice_disk(n7));

    o.detail << " cv(d5,d6,d7|lattice):";
    bool monotone = true;
    double best_ratio = 0;
    for (std::size_t b = 0; b < reports[0].shells.size(); ++b) {
        const auto& s5 = reports[0].shells[b];
        const auto& s6 = reports[1].shells[b];
        const auto& s7 = reports[2].shells[b];
        if (!in_range(s5)) {
            continue;
        }
        o.detail << " [" << s5.r_lo << "," << s5.r_hi << ") " << s5.cv << "," << s6.cv << "," << s7.cv << "|"
                 << lattice.shells[b].cv;
        if (s5.qualifies && s6.qualifies && s7.qualifies && !(s5.cv >= s6.cv && s6.cv >= s7.cv)) {
            monotone = false;
        }
        if (s7.qualifies && lattice.shells[b].qualifies && s7.cv > 0) {
            best_ratio = std::max(best_ratio, lattice.shells[b].cv / s7.cv);
        }
    }
    o.require(monotone, "per-shell CV not non-increasing in depth");
    o.require(best_ratio >= 5.0, "lattice baseline");
    const double t = seconds_since(t0);
    o.require(t < 300.0, "runtime");
    o.detail << " lattice/d7 max ratio=" << best_ratio << " runtime=" << t << "s";
}

void criterion_6(Outcome& o)
{
    const auto pin = bundled("pinwheel");
    const Patch p = supertile(pin, 0, 5);
    const Polygon region = scaled(pin->prototile(0).shape, std::pow(pin->lambda(), 5));
    const PointSet pts = transformed(control_points(p), RigidMotion{Angle(0.0), -interior_center(region).first});
    const PointSet lat = lattice_disk(static_cast<std::size_t>(std::numbers::pi * 900.0));
    const auto ks = random_wavevectors(100, 2.0, 1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const Angle beta(angle(rng));
        worst = std::max(worst, rotation_covariance_check(pts, beta, ks));
        worst = std::max(worst, rotation_covariance_check(lat, beta, ks));
    }
    o.require(worst < 1e-9, "covariance");
    o.detail << " worst=" << worst << " lattice N=" << lat.size();
}

void criterion_7(Outcome& o)
{
    for (const char* name : kRules) {
        const auto rule = bundled(name);
        for (int i = 0; i < static_cast<int>(rule->size()); ++i) {
            for (int depth = 0; depth <= 6; ++depth) {
                const PointSet ps = control_points(supertile(rule, i, depth));
                const IntensityGrid g = diffraction(ps, 2.0, 41, 0);
                const double i0 = g.values(20, 20);
                const std::string tag = std::string(name) + " i=" + std::to_string(i) + " k=" + std::to_string(depth);
                o.require(g.coordinate(20) == 0.0, "grid misses the origin");
                o.require(i0 == static_cast<double>(ps.size()), tag + " I(0) != N");
                // |sum|^2 of unit phasors carries rounding of a few ulps relative to N.
                o.require(g.values.maxCoeff() <= i0 * (1 + 1e-12), tag + " I(k) > I(0)");
            }
        }
    }
}

Patch centred_chair(int depth)
{
    const auto chair = bundled("chair");
    const double scale = std::pow(chair->lambda(), depth);
    const Vec2 c = interior_center(scaled(chair->prototile(0).shape, scale)).first;
    return transformed(supertile(chair, 0, depth), RigidMotion{Angle(0.0), -c});
}

void criterion_8(Outcome& o)
{
    const Patch p = centred_chair(5);
    const auto self = patch_distance(p, p);
    o.require(self.value <= 1e-6, "self distance");
    o.require(self.witness && verify_witness(p, p, *self.witness), "self witness");

    const auto imb = bundled("imbalance");
    const Patch h = transformed(seed_patch(imb, 0), RigidMotion{Angle(0.0), Vec2(-1.0, -0.5)});
    const Patch v = transformed(seed_patch(imb, 1), RigidMotion{Angle(0.0), Vec2(-0.5, -1.0)});
    o.require(patch_distance(h, v).value == 1.0 / std::sqrt(2.0), "disjoint prototiles");

    o.detail << " self=" << self.value << " shifted:";
    for (double len : {0.01, 0.005}) {
        for (double phi : {0.0, 0.7, 2.2}) {
            const Vec2 s = len * Vec2(std::cos(phi), std::sin(phi));
            const Patch q = transformed(p, RigidMotion{Angle(0.0), s});
            const auto d = patch_distance_both(p, q);
            o.require(d.forward.value <= 2 * len + 1e-6 && d.backward.value <= 2 * len + 1e-6, "shift bound");
            o.require(d.forward.witness && verify_witness(p, q, *d.forward.witness), "forward witness");
            o.require(d.backward.witness && verify_witness(q, p, *d.backward.witness), "backward witness");
            o.detail << " " << d.forward.value;
        }
    }
}

void criterion_9(Outcome& o)
{
    const auto dir = std::filesystem::temp_directory_path() / "tilesub_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto path = [&](const std::string& n) { return (dir / n).string(); };
    auto rule = [](const char* n) { return rule_path(n).string(); };
    auto slurp = [](const std::string& f) {
        std::ifstream in(f, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };

    std::ostringstream sink;
    cli::run({"generate", "--rule", rule("chair"), "--depth", "5", "--center", "--out", path("c5.json")}, sink, sink);

    struct Command {
        std::vector<std::string> args;
        std::vector<std::string> files;
    };
    const std::vector<Command> commands = {
        {{"generate", "--rule", rule("pinwheel"), "--depth", "5", "--seed", "7", "--out", path("g.json")}, {path("g.json")}},
        {{"render", "--rule", rule("chair"), "--patch", path("c5.json"), "--ticks", "--out", path("r.svg")}, {path("r.svg")}},
        {{"matrix", "--rule", rule("pinwheel")}, {}},
        {{"stats", "--rule", rule("pinwheel"), "--prototile", "1", "--depth", "7"}, {}},
        {{"freq", "--rule", rule("chair"), "--depth", "6"}, {}},
        {{"diffract", "--rule", rule("pinwheel"), "--depth", "5", "--grid", "41", "--threads", "1", "--pgm",
          path("d.pgm"), "--svg", path("d.svg")},
         {path("d.pgm"), path("d.svg")}},
        {{"autocorr", "--rule", rule("pinwheel"), "--depth", "6", "--threads", "1"}, {}},
        {{"hull-dist", "--rule", rule("chair"), "--a", path("c5.json"), "--shift", "0.01", "0"}, {}},
        {{"validate", "--rule", rule("pinwheel"), "--seed", "7"}, {}},
    };
    for (const auto& c : commands) {
        std::string outputs[2];
        for (auto& result : outputs) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(c.args, out, err);
            result = std::to_string(code) + "\n" + out.str();
            for (const auto& f : c.files) {
                result += slurp(f);
            }
            o.require(code == cli::ok, c.args[0] + " exit " + std::to_string(code));
        }
        o.require(!outputs[0].empty() && outputs[0] == outputs[1], c.args[0] + " differs");
    }
    o.detail << " commands=" << commands.size();
    std::filesystem::remove_all(dir);
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"rule validation", criterion_1},
        {"substitution bookkeeping", criterion_2},
        {"translation-class frequencies", criterion_3},
        {"orientation equidistribution", criterion_4},
        {"autocorrelation circular symmetry", criterion_5},
        {"diffraction rotation covariance", criterion_6},
        {"diffraction origin peak", criterion_7},
        {"hull metric", criterion_8},
        {"CLI determinism", criterion_9},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << index << " " << name << ":" << o.detail.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
