#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tilesub/substitution.hpp"

namespace tilesub {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(path + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ParseError(path + ": number is not finite");
    }
    return x;
}

Vec2 point(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2) {
        throw ParseError(path + ": expected [x, y]");
    }
    return Vec2(number(v[0], path + "[0]"), number(v[1], path + "[1]"));
}

} // namespace

SubstitutionRule load_rule(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("rule document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("rule document: top level must be an object");
    }

    const auto& name_v = field(doc, "name", "rule");
    if (!name_v.is_string()) {
        throw ParseError("name: expected a string");
    }
    const double lambda = number(field(doc, "lambda", "rule"), "lambda");

    const auto& protos_v = field(doc, "prototiles", "rule");
    if (!protos_v.is_array() || protos_v.empty()) {
        throw ParseError("prototiles: expected a nonempty array");
    }
    std::vector<Prototile> prototiles;
    for (std::size_t i = 0; i < protos_v.size(); ++i) {
        const std::string path = "prototiles[" + std::to_string(i) + "]";
        const auto& pv = protos_v[i];
        Prototile p;
        p.id = static_cast<int>(i);
        const auto& label = field(pv, "label", path);
        if (!label.is_string()) {
            throw ParseError(path + ".label: expected a string");
        }
        p.label = label.get<std::string>();
        const auto& verts = field(pv, "vertices", path);
        if (!verts.is_array()) {
            throw ParseError(path + ".vertices: expected an array");
        }
        std::vector<Vec2> vs;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            vs.push_back(point(verts[k], path + ".vertices[" + std::to_string(k) + "]"));
        }
        try {
            p.shape = Polygon(std::move(vs));
        } catch (const GeometryError& e) {
            throw GeometryError("prototile " + std::to_string(i) + " (" + p.label + "): " + e.what());
        }
        p.control_point = point(field(pv, "control_point", path), path + ".control_point");
        if (pv.contains("decoration")) {
            if (!pv["decoration"].is_string()) {
                throw ParseError(path + ".decoration: expected a string");
            }
            p.decoration = pv["decoration"].get<std::string>();
        }
        prototiles.push_back(std::move(p));
    }

    const auto& kids_v = field(doc, "children", "rule");
    if (!kids_v.is_array()) {
        throw ParseError("children: expected an array");
    }
    std::vector<std::vector<TilePlacement>> children;
    for (std::size_t i = 0; i < kids_v.size(); ++i) {
        const std::string path = "children[" + std::to_string(i) + "]";
        if (!kids_v[i].is_array()) {
            throw ParseError(path + ": expected an array");
        }
        std::vector<TilePlacement> kids;
        for (std::size_t k = 0; k < kids_v[i].size(); ++k) {
            const std::string cpath = path + "[" + std::to_string(k) + "]";
            const auto& cv = kids_v[i][k];
            const auto& idx = field(cv, "prototile", cpath);
            if (!idx.is_number_integer()) {
                throw ParseError(cpath + ".prototile: expected an integer");
            }
            TilePlacement t;
            t.prototile = idx.get<int>();
            t.orientation = Angle(number(field(cv, "angle", cpath), cpath + ".angle"));
            t.translation = point(field(cv, "translation", cpath), cpath + ".translation");
            kids.push_back(t);
        }
        children.push_back(std::move(kids));
    }

    return SubstitutionRule(name_v.get<std::string>(), lambda, std::move(prototiles), std::move(children));
}

SubstitutionRule load_rule_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open rule file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_rule(buf.str());
}

std::string rule_to_json(const SubstitutionRule& rule)
{
    json doc;
    doc["name"] = rule.name();
    doc["lambda"] = rule.lambda();
    doc["prototiles"] = json::array();
    for (const auto& p : rule.prototiles()) {
        json pv;
        pv["label"] = p.label;
        pv["vertices"] = json::array();
        for (const auto& v : p.shape.vertices()) {
            pv["vertices"].push_back({v.x(), v.y()});
        }
        pv["control_point"] = {p.control_point.x(), p.control_point.y()};
        if (p.decoration) {
            pv["decoration"] = *p.decoration;
        }
        doc["prototiles"].push_back(pv);
    }
    doc["children"] = json::array();
    for (std::size_t i = 0; i < rule.size(); ++i) {
        json kids = json::array();
        for (const auto& c : rule.children(static_cast<int>(i))) {
            kids.push_back({{"prototile", c.prototile},
                            {"angle", c.orientation.radians()},
                            {"translation", {c.translation.x(), c.translation.y()}}});
        }
        doc["children"].push_back(kids);
    }
    return doc.dump(2);
}

} // namespace tilesub
