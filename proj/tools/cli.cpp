#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tilesub/errors.hpp"
#include "tilesub/hull.hpp"
#include "tilesub/io.hpp"
#include "tilesub/orientstats.hpp"
#include "tilesub/spectral.hpp"
#include "tilesub/substitution.hpp"

namespace tilesub::cli {

namespace {

struct RunConfig {
    std::string rule_path;
    std::string patch_path;
    std::string a_path;
    std::string b_path;
    std::string out_path;
    std::string pgm_path;
    std::string svg_path;
    int prototile = 0;
    int depth = 0;
    int threads = 0;
    std::uint64_t seed = 0;
    int m_max = 4;
    double radius = 0; // 0: command default
    double k_max = 2.0;
    int grid = 101;
    double r_max = 10.0;
    int radial_bins = 10;
    int angular_bins = 24;
    std::vector<double> shift;
    bool ticks = false;
    bool center = false;
    std::size_t samples = 10000;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

RulePtr load(const RunConfig& c)
{
    return std::make_shared<const SubstitutionRule>(load_rule_file(c.rule_path));
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out)
{
    if (c.out_path.empty()) {
        out << text;
    } else {
        write_file_atomic(c.out_path, text);
    }
}

void check_prototile(const SubstitutionRule& rule, int i)
{
    if (i < 0 || static_cast<std::size_t>(i) >= rule.size()) {
        throw UsageError("--prototile " + std::to_string(i) + " out of range (rule has " + std::to_string(rule.size()) +
                         " prototiles)");
    }
}

std::string validation_text(const SubstitutionRule& rule, const ValidationReport& r)
{
    std::ostringstream os;
    os << "rule " << rule.name() << ": " << (r.passed ? "valid" : "INVALID") << '\n';
    for (const auto& p : r.prototiles) {
        os << "  prototile " << p.prototile << " (" << rule.prototile(p.prototile).label << ")"
           << " area_residual=" << format_double(p.area_residual) << " max_overlap=" << format_double(p.max_overlap)
           << " containment_deficit=" << format_double(p.containment_deficit) << " samples=" << p.samples
           << " uncovered=" << p.uncovered << (p.control_point_on_boundary ? " control_point=boundary" : "")
           << (p.passed ? " ok" : " FAILED") << '\n';
    }
    return os.str();
}

void require_valid(const SubstitutionRule& rule, const RunConfig& c, std::ostream& err)
{
    const auto report = validate_rule(rule, {.coverage_samples = c.samples, .seed = c.seed});
    if (!report.passed) {
        err << validation_text(rule, report);
        throw RuleError("rule '" + rule.name() + "' failed validation");
    }
}

/// Control points of sigma^k(P_i), moved so the inscribed disk of lambda^k P_i is centred at the origin,
/// restricted to that disk (or to --radius when given).
PointSet centred_points(const RulePtr& rule, const RunConfig& c)
{
    check_prototile(*rule, c.prototile);
    const Patch p = supertile(rule, c.prototile, c.depth);
    const Polygon region = scaled(rule->prototile(c.prototile).shape, std::pow(rule->lambda(), c.depth));
    const auto [center, clearance] = interior_center(region);
    const PointSet moved = transformed(control_points(p), RigidMotion{Angle(0.0), -center});
    return ball_subset(moved, c.radius > 0 ? c.radius : clearance);
}

Patch read_patch(const std::string& path, const RulePtr& rule)
{
    return patch_from_json(read_file(path), rule);
}

int cmd_generate(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const RulePtr rule = load(c);
    check_prototile(*rule, c.prototile);
    require_valid(*rule, c, err);
    RigidMotion seed = RigidMotion::identity();
    if (c.center) {
        const double scale = std::pow(rule->lambda(), c.depth);
        const Polygon region = scaled(rule->prototile(c.prototile).shape, scale);
        seed.translation = -interior_center(region).first / scale;
    }
    emit(c, patch_to_json(supertile(rule, c.prototile, c.depth, seed)), out);
    return ok;
}

int cmd_render(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    emit(c, render_svg(read_patch(c.patch_path, rule), {.orientation_ticks = c.ticks}), out);
    return ok;
}

int cmd_validate(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    const auto report = validate_rule(*rule, {.coverage_samples = c.samples, .seed = c.seed});
    emit(c, validation_text(*rule, report), out);
    return report.passed ? ok : validation;
}

int cmd_matrix(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    const SubstitutionMatrix m = substitution_matrix(*rule);
    std::ostringstream os;
    os << "rule " << rule->name() << '\n';
    os << "M =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            os << (j ? ", " : "") << m(i, j);
        }
        os << "]\n";
    }
    const auto prim = is_primitive(m);
    if (!prim.primitive) {
        os << "primitive: no\n";
        emit(c, os.str(), out);
        return validation;
    }
    os << "primitive: yes (k=" << *prim.witness << ")\n";
    const auto pf = pf_eigen(m);
    os << "pf_eigenvalue: " << format_double(pf.eigenvalue) << '\n';
    os << "pf_vector: [";
    for (Eigen::Index i = 0; i < pf.frequencies.size(); ++i) {
        os << (i ? ", " : "") << format_double(pf.frequencies(i));
    }
    os << "]\n";
    os << "pf_iterations: " << pf.iterations << '\n';
    os << "lambda^2: " << format_double(rule->lambda() * rule->lambda()) << '\n';
    emit(c, os.str(), out);
    return ok;
}

int cmd_stats(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    check_prototile(*rule, c.prototile);
    const auto seq = hierarchical_sequence(rule, c.prototile, c.depth);
    emit(c, stats_csv(prefix_reports(seq, c.m_max)), out);
    return ok;
}

int cmd_freq(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    check_prototile(*rule, c.prototile);
    const auto expansion = expand_translation_classes(*rule);
    const auto pf = pf_eigen(substitution_matrix(expansion.rule));
    const Patch p = supertile(rule, c.prototile, c.depth);
    double radius = c.radius;
    if (radius <= 0) {
        for (const auto& t : p.tiles) {
            radius = std::max(radius, rule->control_point_of(t).norm());
        }
    }
    std::ostringstream os;
    os << "class,prototile,angle,pf,empirical,matched,total,ball_covered\n";
    for (std::size_t k = 0; k < expansion.classes.size(); ++k) {
        const auto& cls = expansion.classes[k];
        const auto est = empirical_frequency(p, cls.prototile, cls.orientation, radius);
        os << expansion.rule.prototile(static_cast<int>(k)).label << ',' << cls.prototile << ','
           << format_double(cls.orientation.radians()) << ',' << format_double(pf.frequencies(static_cast<Eigen::Index>(k)))
           << ',' << format_double(est.value) << ',' << est.matched << ',' << est.total << ','
           << (est.ball_not_covered ? "no" : "yes") << '\n';
    }
    emit(c, os.str(), out);
    return ok;
}

int cmd_diffract(const RunConfig& c, std::ostream& out)
{
    if (c.grid < 2) {
        throw UsageError("--grid must be at least 2");
    }
    if (!(c.k_max > 0)) {
        throw UsageError("--kmax must be positive");
    }
    const RulePtr rule = load(c);
    const IntensityGrid g = diffraction(centred_points(rule, c), c.k_max, c.grid, c.threads);
    if (!c.pgm_path.empty()) {
        write_file_atomic(c.pgm_path, intensity_pgm(g));
    }
    if (!c.svg_path.empty()) {
        write_file_atomic(c.svg_path, intensity_svg(g));
    }
    emit(c, intensity_csv(g), out);
    return ok;
}

int cmd_autocorr(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    const PointSet ps = centred_points(rule, c);
    const PolarHistogram h =
        autocorrelation(ps, c.r_max, c.radial_bins, c.angular_bins, {.threads = c.threads});
    emit(c, autocorrelation_csv(h), out);
    return ok;
}

int cmd_hull(const RunConfig& c, std::ostream& out)
{
    const RulePtr rule = load(c);
    const Patch a = read_patch(c.a_path, rule);
    Patch b = c.b_path.empty() ? a : read_patch(c.b_path, rule);
    if (!c.shift.empty()) {
        if (c.shift.size() != 2) {
            throw UsageError("--shift takes two numbers");
        }
        b = transformed(b, RigidMotion{Angle(0.0), make_vec2(c.shift[0], c.shift[1])});
    }
    emit(c, hull_json(patch_distance_both(a, b)), out);
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Substitution tilings: generation, orientation statistics, spectra and hull distances", "tilesub"};
    app.require_subcommand(1);
    RunConfig c;

    auto add_rule = [&](CLI::App* s) { s->add_option("--rule", c.rule_path, "Rule JSON file")->required(); };
    auto add_supertile = [&](CLI::App* s) {
        s->add_option("--prototile", c.prototile, "Seed prototile id");
        s->add_option("--depth", c.depth, "Substitution depth")->check(CLI::NonNegativeNumber);
    };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", c.out_path, "Output file (default: stdout)"); };
    auto add_threads = [&](CLI::App* s) {
        s->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    };
    auto add_validation = [&](CLI::App* s) {
        s->add_option("--seed", c.seed, "Seed for coverage sampling");
        s->add_option("--samples", c.samples, "Coverage samples per prototile")->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("generate", "Write the supertile sigma^k(P_i) as a patch file");
    add_rule(gen);
    add_supertile(gen);
    gen->add_flag("--center", c.center, "Move the centre of the inscribed disk of lambda^k P_i to the origin");
    add_out(gen);
    add_validation(gen);

    auto* render = app.add_subcommand("render", "Render a patch file as SVG");
    add_rule(render);
    render->add_option("--patch", c.patch_path, "Patch JSON file")->required();
    render->add_flag("--ticks", c.ticks, "Draw an orientation tick at each control point");
    add_out(render);

    auto* matrix = app.add_subcommand("matrix", "Substitution matrix, primitivity and Perron-Frobenius data");
    add_rule(matrix);
    add_out(matrix);

    auto* stats = app.add_subcommand("stats", "Orientation discrepancy and Weyl sums at supertile prefixes");
    add_rule(stats);
    add_supertile(stats);
    stats->add_option("--mmax", c.m_max, "Highest Weyl harmonic")->check(CLI::Range(1, 64));
    add_out(stats);

    auto* freq = app.add_subcommand("freq", "Translation-class frequencies: Perron-Frobenius vs empirical");
    add_rule(freq);
    add_supertile(freq);
    freq->add_option("--radius", c.radius, "Count control points in B_r(0) (default: whole supertile)");
    add_out(freq);

    auto* diff = app.add_subcommand("diffract", "Diffraction intensity of supertile control points");
    add_rule(diff);
    add_supertile(diff);
    diff->add_option("--kmax", c.k_max, "Grid half-width in k");
    diff->add_option("--grid", c.grid, "Grid points per axis");
    diff->add_option("--radius", c.radius, "Point-set radius (default: inscribed disk)");
    diff->add_option("--pgm", c.pgm_path, "Also write a PGM image");
    diff->add_option("--svg", c.svg_path, "Also write an SVG image");
    add_threads(diff);
    add_out(diff);

    auto* ac = app.add_subcommand("autocorr", "Polar-binned autocorrelation of supertile control points");
    add_rule(ac);
    add_supertile(ac);
    ac->add_option("--rmax", c.r_max, "Largest difference length");
    ac->add_option("--radial-bins", c.radial_bins, "Radial bins");
    ac->add_option("--angular-bins", c.angular_bins, "Angular bins");
    ac->add_option("--radius", c.radius, "Point-set radius (default: inscribed disk)");
    add_threads(ac);
    add_out(ac);

    auto* hull = app.add_subcommand("hull-dist", "Finite-patch hull distance between two patch files");
    add_rule(hull);
    hull->add_option("--a", c.a_path, "First patch")->required();
    hull->add_option("--b", c.b_path, "Second patch (default: the first)");
    hull->add_option("--shift", c.shift, "Translate the second patch by (x, y)")->expected(2);
    add_out(hull);

    auto* val = app.add_subcommand("validate", "Check that a rule is a selfsimilar substitution");
    add_rule(val);
    add_validation(val);
    add_out(val);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*gen) return cmd_generate(c, out, err);
        if (*render) return cmd_render(c, out);
        if (*matrix) return cmd_matrix(c, out);
        if (*stats) return cmd_stats(c, out);
        if (*freq) return cmd_freq(c, out);
        if (*diff) return cmd_diffract(c, out);
        if (*ac) return cmd_autocorr(c, out);
        if (*hull) return cmd_hull(c, out);
        if (*val) return cmd_validate(c, out);
    } catch (const CapExceeded& e) {
        err << "tilesub: " << e.what() << '\n';
        return cap;
    } catch (const IoError& e) {
        err << "tilesub: " << e.what() << '\n';
        return io;
    } catch (const UsageError& e) {
        err << "tilesub: " << e.what() << '\n';
        return usage;
    } catch (const GeometryError& e) {
        err << "tilesub: " << e.what() << '\n';
        return validation;
    } catch (const std::invalid_argument& e) {
        err << "tilesub: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "tilesub: " << e.what() << '\n';
        return validation;
    }
    return usage;
}

} // namespace tilesub::cli
