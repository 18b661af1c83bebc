#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <regex>

#include "support.hpp"
#include "tilesub/errors.hpp"
#include "tilesub/io.hpp"

using namespace tilesub;
using tilesub::testing::bundled;
using tilesub::testing::Gen;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

std::size_t lines(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / "tilesub_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("patch files round-trip exactly")
{
    Gen g(83);
    for (const char* name : {"chair", "pinwheel", "imbalance"}) {
        const auto rule = bundled(name);
        const Patch p = supertile(rule, 0, 4, g.motion());
        const Patch q = patch_from_json(patch_to_json(p), rule);
        REQUIRE(q.size() == p.size());
        REQUIRE(q.provenance);
        CHECK(q.provenance->depth == 4);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(q.tiles[i].prototile == p.tiles[i].prototile);
            CHECK(q.tiles[i].orientation == p.tiles[i].orientation);
            CHECK(q.tiles[i].translation == p.tiles[i].translation);
        }

        const Patch moved = transformed(p, g.motion());
        const Patch back = patch_from_json(patch_to_json(moved), rule);
        CHECK_FALSE(back.provenance);
        CHECK(patch_to_json(back) == patch_to_json(moved));
    }
}

TEST_CASE("patch files are checked against the rule")
{
    const auto chair = bundled("chair");
    const auto pin = bundled("pinwheel");
    const std::string doc = patch_to_json(supertile(chair, 0, 2));

    CHECK_THROWS_AS(patch_from_json(doc, pin), RuleError);

    auto edited = nlohmann::json::parse(doc);
    edited["rule_digest"] = "0000000000000000";
    CHECK_THROWS_WITH_AS(patch_from_json(edited.dump(), chair), doctest::Contains("digest"), RuleError);

    edited = nlohmann::json::parse(doc);
    edited["tile_count"] = 3;
    CHECK_THROWS_AS(patch_from_json(edited.dump(), chair), RuleError);

    edited = nlohmann::json::parse(doc);
    edited["tiles"].erase(0);
    edited["tile_count"] = 15;
    CHECK_THROWS_WITH_AS(patch_from_json(edited.dump(), chair), doctest::Contains("provenance"), RuleError);

    edited = nlohmann::json::parse(doc);
    edited["tiles"][0]["prototile"] = 4;
    CHECK_THROWS_AS(patch_from_json(edited.dump(), chair), RuleError);

    edited = nlohmann::json::parse(doc);
    edited["tiles"][0].erase("angle");
    CHECK_THROWS_AS(patch_from_json(edited.dump(), chair), ParseError);

    CHECK_THROWS_AS(patch_from_json("{", chair), ParseError);
}

TEST_CASE("CSV and JSON reports")
{
    const auto pin = bundled("pinwheel");
    const std::string stats = stats_csv({equidistribution_report(hierarchical_sequence(pin, 0, 2).angles)});
    CHECK(stats.rfind("n,discrepancy,W1,W2,W3,W4\n", 0) == 0);
    CHECK(lines(stats) == 2);

    IntensityGrid g;
    g.k_max = 1;
    g.resolution = 3;
    g.values = Eigen::MatrixXd::Ones(3, 3);
    const std::string grid = intensity_csv(g);
    CHECK(grid.rfind("kx,ky,intensity\n", 0) == 0);
    CHECK(lines(grid) == 10);
    CHECK(grid.find("\n-1,-1,1\n") != std::string::npos);
    CHECK(grid.find("\n0,0,1\n") != std::string::npos);

    PolarHistogram h;
    h.angular_bins = 2;
    h.radial_edges = Eigen::VectorXd::LinSpaced(3, 0.0, 1.0);
    h.radial_edges(0) = 1e-6;
    h.weights = Eigen::MatrixXd::Zero(2, 2);
    h.pair_counts = h.weights;
    const std::string ac = autocorrelation_csv(h);
    CHECK(ac.rfind("r_lo,r_hi,theta_lo,theta_hi,weight\n", 0) == 0);
    CHECK(lines(ac) == 5);

    SymmetricPatchDistance d;
    d.forward.value = 0.25;
    d.forward.witness = HullWitness{0.25, Vec2(0.1, 0), Vec2(-0.1, 0), 0.0};
    d.forward.exactness = Exactness::upper_bound;
    const auto j = nlohmann::json::parse(hull_json(d));
    CHECK(j["value"] == 0.25);
    CHECK(j["exactness"] == "upper-bound");
    CHECK(j["witness"]["s"][0] == 0.1);
    CHECK(j["reverse"]["witness"].is_null());
    CHECK(j["asymmetric"] == false);
}

TEST_CASE("doubles are written in shortest round-trip form")
{
    Gen g(89);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = g.uniform(-1e6, 1e6) * std::pow(10.0, g.integer(-20, 20));
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("SVG rendering")
{
    const auto chair = bundled("chair");
    const std::string svg = render_svg(supertile(chair, 0, 3));
    CHECK(count_of(svg, "<polygon") == 64);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);

    Patch empty;
    empty.rule = chair;
    const std::string blank = render_svg(empty);
    CHECK(count_of(blank, "<polygon") == 0);
    CHECK(blank.find("<svg") != std::string::npos);
    CHECK(blank.find("</svg>") != std::string::npos);
    CHECK(render_svg(Patch{}).find("</svg>") != std::string::npos);

    const std::string ticks = render_svg(supertile(chair, 0, 2), {.orientation_ticks = true});
    CHECK(count_of(ticks, "<line") == 16);

    const std::string imb = render_svg(supertile(bundled("imbalance"), 0, 4));
    CHECK(count_of(imb, "class=\"p0\"") > count_of(imb, "class=\"p1\""));
}

TEST_CASE("intensity images")
{
    IntensityGrid g;
    g.k_max = 1;
    g.resolution = 4;
    g.values = Eigen::MatrixXd::Zero(4, 4);
    g.values(0, 0) = 99;
    const std::string pgm = intensity_pgm(g);
    CHECK(pgm.rfind("P5\n4 4\n255\n", 0) == 0);
    CHECK(pgm.size() == std::string("P5\n4 4\n255\n").size() + 16);
    // Row 0 of the grid (lowest ky) is the last image row.
    CHECK(static_cast<unsigned char>(pgm[pgm.size() - 4]) == 255);
    CHECK(static_cast<unsigned char>(pgm.back()) == 0);
    CHECK(count_of(intensity_svg(g), "<rect") == 16);
}

TEST_CASE("atomic writes")
{
    const auto dir = scratch_dir();
    const auto target = dir / "out.txt";
    write_file_atomic(target, "hello\n");
    CHECK(read_file(target) == "hello\n");
    write_file_atomic(target, "again\n");
    CHECK(read_file(target) == "again\n");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));

    CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.txt", "data"), IoError);
    CHECK_FALSE(std::filesystem::exists(dir / "missing"));
    CHECK_THROWS_AS(read_file(dir / "nope.json"), IoError);
    std::filesystem::remove_all(dir);
}
