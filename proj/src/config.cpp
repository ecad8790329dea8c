#include "zrp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zrp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) fail("unknown key \"" + key + "\" in " + where);
    }
}

double number_at(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    return v.get<double>();
}

Eigen::Vector3d vec3_at(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where + " must be an array of 3 numbers");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) fail(where + " must be an array of 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    if (!doc.is_object()) fail("top level must be a JSON object");
    reject_unknown(doc, {"units", "centers", "solver", "output"}, "top level");

    RunConfig cfg;
    if (doc.contains("units")) {
        if (!doc["units"].is_string() || doc["units"].get<std::string>() != "natural")
            fail("units must be the string \"natural\"");
    }

    if (!doc.contains("centers")) fail("missing required key \"centers\"");
    const json& centers = doc["centers"];
    if (!centers.is_array() || centers.empty()) fail("centers must be a non-empty array");
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const std::string where = "centers[" + std::to_string(i) + "]";
        const json& c = centers[i];
        if (!c.is_object()) fail(where + " must be an object");
        reject_unknown(c, {"position", "varkappa", "kappa"}, where);
        if (!c.contains("position")) fail(where + " is missing \"position\"");
        Center center;
        center.position = vec3_at(c["position"], where + ".position");
        if (c.contains("varkappa")) center.varkappa = number_at(c, "varkappa", where);
        if (c.contains("kappa")) center.kappa = vec3_at(c["kappa"], where + ".kappa");
        cfg.centers.push_back(center);
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object()) fail("solver must be an object");
        reject_unknown(s, {"grid_points", "delta", "root_tol"}, "solver");
        if (s.contains("grid_points")) {
            if (!s["grid_points"].is_number_integer() || s["grid_points"].get<long>() < 2)
                fail("solver.grid_points must be an integer >= 2");
            cfg.solver.grid_points = s["grid_points"].get<int>();
        }
        if (s.contains("delta")) {
            cfg.solver.delta = number_at(s, "delta", "solver");
            if (!(cfg.solver.delta > 0.0) || !(cfg.solver.delta < 1.0))
                fail("solver.delta must be in (0, 1)");
        }
        if (s.contains("root_tol")) {
            cfg.solver.root_tol = number_at(s, "root_tol", "solver");
            if (!(cfg.solver.root_tol > 0.0)) fail("solver.root_tol must be positive");
        }
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (!o.is_object()) fail("output must be an object");
        reject_unknown(o, {"path"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string()) fail("output.path must be a string");
            cfg.output_path = o["path"].get<std::string>();
        }
    }

    validate_centers(cfg.centers);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_json(const RunConfig& cfg) {
    json doc;
    doc["units"] = cfg.units;
    doc["centers"] = json::array();
    for (const Center& c : cfg.centers) {
        json jc;
        jc["position"] = {c.position.x(), c.position.y(), c.position.z()};
        jc["varkappa"] = c.varkappa;
        jc["kappa"] = {c.kappa.x(), c.kappa.y(), c.kappa.z()};
        doc["centers"].push_back(jc);
    }
    doc["solver"] = {{"grid_points", cfg.solver.grid_points},
                     {"delta", cfg.solver.delta},
                     {"root_tol", cfg.solver.root_tol}};
    doc["output"] = {{"path", cfg.output_path}};
    return doc.dump();
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char byte : text) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a_hash(canonical_json(cfg)); }

} // namespace zrp
