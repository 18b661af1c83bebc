#include "tilesub/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tilesub {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string hex_digest(std::uint64_t d)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << d;
    return os.str();
}

const char* const kPalette[] = {"#e8b04a", "#4a90c8", "#7fbf6a", "#d0605e", "#9a7fc8", "#5fc0b8", "#c8a07f", "#a0a0a0"};

} // namespace

std::string patch_to_json(const Patch& patch)
{
    json doc;
    doc["rule"] = patch.rule->name();
    doc["rule_digest"] = hex_digest(patch.rule->digest());
    if (patch.provenance) {
        doc["provenance"] = {{"seed", patch.provenance->seed}, {"depth", patch.provenance->depth}};
    } else {
        doc["provenance"] = "free";
    }
    doc["tile_count"] = patch.size();
    json tiles = json::array();
    for (const auto& t : patch.tiles) {
        tiles.push_back({{"prototile", t.prototile},
                         {"angle", t.orientation.radians()},
                         {"translation", {t.translation.x(), t.translation.y()}}});
    }
    doc["tiles"] = std::move(tiles);
    return doc.dump() + "\n";
}

Patch patch_from_json(std::string_view document, RulePtr rule)
{
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("patch document: ") + e.what());
    }
    try {
        if (doc.at("rule").get<std::string>() != rule->name()) {
            throw RuleError("patch was generated with rule '" + doc.at("rule").get<std::string>() + "', not '" +
                            rule->name() + "'");
        }
        if (doc.contains("rule_digest") && doc.at("rule_digest").get<std::string>() != hex_digest(rule->digest())) {
            throw RuleError("rule file changed since the patch was generated (digest mismatch)");
        }
        Patch p;
        p.rule = rule;
        const auto& tiles = doc.at("tiles");
        p.tiles.reserve(tiles.size());
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            const auto& t = tiles[i];
            TilePlacement tp;
            tp.prototile = t.at("prototile").get<int>();
            if (tp.prototile < 0 || static_cast<std::size_t>(tp.prototile) >= rule->size()) {
                throw RuleError("tiles[" + std::to_string(i) + "]: unknown prototile");
            }
            tp.orientation = Angle(t.at("angle").get<double>());
            const auto& tr = t.at("translation");
            tp.translation = make_vec2(tr.at(0).get<double>(), tr.at(1).get<double>());
            p.tiles.push_back(tp);
        }
        if (doc.contains("tile_count") && doc.at("tile_count").get<std::size_t>() != p.size()) {
            throw RuleError("tile_count does not match the number of tiles");
        }
        const auto& prov = doc.at("provenance");
        if (prov.is_object()) {
            p.provenance = SupertileProvenance{prov.at("seed").get<int>(), prov.at("depth").get<int>()};
            const double expected =
                predicted_tile_count(substitution_matrix(*rule), p.provenance->seed, p.provenance->depth);
            if (expected != static_cast<double>(p.size())) {
                throw RuleError("supertile provenance predicts " + format_double(expected) + " tiles, file has " +
                                std::to_string(p.size()));
            }
        }
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("patch document: ") + e.what());
    } catch (const GeometryError& e) {
        throw ParseError(std::string("patch document: ") + e.what());
    }
}

std::string stats_csv(const std::vector<EquidistributionReport>& rows)
{
    std::ostringstream os;
    os << "n,discrepancy,W1,W2,W3,W4\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.discrepancy);
        for (std::size_t m = 0; m < 4; ++m) {
            os << ',' << (m < r.weyl.size() ? format_double(r.weyl[m]) : std::string());
        }
        os << '\n';
    }
    return os.str();
}

std::string intensity_csv(const IntensityGrid& g)
{
    std::ostringstream os;
    os << "kx,ky,intensity\n";
    for (int j = 0; j < g.resolution; ++j) {
        for (int i = 0; i < g.resolution; ++i) {
            os << format_double(g.coordinate(i)) << ',' << format_double(g.coordinate(j)) << ','
               << format_double(g.values(j, i)) << '\n';
        }
    }
    return os.str();
}

std::string autocorrelation_csv(const PolarHistogram& h)
{
    std::ostringstream os;
    os << "r_lo,r_hi,theta_lo,theta_hi,weight\n";
    for (int b = 0; b < h.radial_bins(); ++b) {
        for (int a = 0; a < h.angular_bins; ++a) {
            os << format_double(h.radial_edges(b)) << ',' << format_double(h.radial_edges(b + 1)) << ','
               << format_double(kTwoPi * a / h.angular_bins) << ',' << format_double(kTwoPi * (a + 1) / h.angular_bins)
               << ',' << format_double(h.weights(b, a)) << '\n';
        }
    }
    return os.str();
}

namespace {

json distance_json(const PatchDistance& d)
{
    json j;
    j["value"] = d.value;
    j["exactness"] = to_string(d.exactness);
    if (d.witness) {
        const auto& w = *d.witness;
        j["witness"] = {{"epsilon", w.epsilon},
                        {"s", {w.shift_s.x(), w.shift_s.y()}},
                        {"t", {w.shift_t.x(), w.shift_t.y()}},
                        {"alpha", w.rotation}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

} // namespace

std::string hull_json(const SymmetricPatchDistance& d)
{
    json j = distance_json(d.forward);
    j["reverse"] = distance_json(d.backward);
    j["asymmetric"] = d.asymmetric;
    return j.dump(2) + "\n";
}

std::string render_svg(const Patch& patch, const SvgOptions& opts)
{
    std::ostringstream os;
    Box2 box;
    std::vector<Polygon> shapes;
    if (patch.rule) {
        for (const auto& t : patch.tiles) {
            shapes.push_back(patch.rule->shape_of(t));
            box.extend(shapes.back().bounds());
        }
    }
    if (box.isEmpty()) {
        box = Box2(Vec2(0, 0), Vec2(1, 1));
    }
    const double margin = 0.02 * box.diagonal().norm() + opts.stroke;
    const Vec2 lo = box.min() - Vec2::Constant(margin);
    const Vec2 size = box.sizes() + Vec2::Constant(2 * margin);
    const double px = 800.0 / std::max(size.x(), size.y());

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(size.x() * px) << "\" height=\""
       << format_double(size.y() * px) << "\" viewBox=\"" << format_double(lo.x()) << ' '
       << format_double(-(lo.y() + size.y())) << ' ' << format_double(size.x()) << ' ' << format_double(size.y())
       << "\">\n";
    os << "<g transform=\"scale(1,-1)\" stroke=\"#222\" stroke-width=\"" << format_double(opts.stroke)
       << "\" stroke-linejoin=\"round\">\n";
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& t = patch.tiles[i];
        os << "<polygon class=\"p" << t.prototile << "\" fill=\"" << kPalette[t.prototile % 8] << "\" points=\"";
        for (std::size_t k = 0; k < shapes[i].size(); ++k) {
            os << (k ? " " : "") << format_double(shapes[i][k].x()) << ',' << format_double(shapes[i][k].y());
        }
        os << "\"/>\n";
    }
    if (opts.orientation_ticks) {
        for (const auto& t : patch.tiles) {
            const Vec2 c = patch.rule->control_point_of(t);
            const Vec2 d = c + 0.3 * Vec2(std::cos(t.orientation.radians()), std::sin(t.orientation.radians()));
            os << "<line x1=\"" << format_double(c.x()) << "\" y1=\"" << format_double(c.y()) << "\" x2=\""
               << format_double(d.x()) << "\" y2=\"" << format_double(d.y()) << "\"/>\n";
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

namespace {

std::vector<unsigned char> gray_levels(const IntensityGrid& g)
{
    const Eigen::ArrayXXd logv = (g.values.array() + 1.0).log();
    const double mx = logv.maxCoeff();
    std::vector<unsigned char> out;
    out.reserve(static_cast<std::size_t>(g.resolution * g.resolution));
    for (int j = g.resolution - 1; j >= 0; --j) {
        for (int i = 0; i < g.resolution; ++i) {
            const double v = mx > 0 ? logv(j, i) / mx : 0.0;
            out.push_back(static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))));
        }
    }
    return out;
}

} // namespace

std::string intensity_pgm(const IntensityGrid& g)
{
    std::ostringstream os;
    os << "P5\n" << g.resolution << ' ' << g.resolution << "\n255\n";
    const auto levels = gray_levels(g);
    os.write(reinterpret_cast<const char*>(levels.data()), static_cast<std::streamsize>(levels.size()));
    return os.str();
}

std::string intensity_svg(const IntensityGrid& g)
{
    std::ostringstream os;
    const auto levels = gray_levels(g);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 4 * g.resolution << "\" height=\""
       << 4 * g.resolution << "\" viewBox=\"0 0 " << g.resolution << ' ' << g.resolution
       << "\" shape-rendering=\"crispEdges\">\n";
    for (int r = 0; r < g.resolution; ++r) {
        for (int c = 0; c < g.resolution; ++c) {
            const int v = levels[static_cast<std::size_t>(r * g.resolution + c)];
            os << "<rect x=\"" << c << "\" y=\"" << r << "\" width=\"1\" height=\"1\" fill=\"rgb(" << v << ',' << v
               << ',' << v << ")\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

} // namespace tilesub
