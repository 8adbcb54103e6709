#pragma once

#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/rational.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cutpack {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_field(const std::string& field, const std::string& what) {
    throw std::invalid_argument("field '" + field + "': " + what);
}

inline long get_int(const Json& j, const std::string& field) {
    if (!j.is_number_integer()) bad_field(field, "expected an integer, got " + j.dump());
    return j.get<long>();
}

inline const Json& member(const Json& obj, const char* key, const std::string& where = "") {
    auto it = obj.find(key);
    if (it == obj.end()) bad_field(where + key, "missing");
    return *it;
}

inline std::vector<Vertex> vertex_list(const VertexSet& s) {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < s.universe(); ++v) {
        if (s.contains(v)) out.push_back(v);
    }
    return out;
}

inline VertexSet vertex_set_from(const Json& j, int n, const std::string& field) {
    if (!j.is_array()) bad_field(field, "expected a vertex list");
    VertexSet s(n);
    for (std::size_t x = 0; x < j.size(); ++x) {
        long v = get_int(j[x], field + "[" + std::to_string(x) + "]");
        if (v < 0 || v >= n) bad_field(field + "[" + std::to_string(x) + "]", "vertex " + std::to_string(v) + " out of range");
        s.insert(static_cast<Vertex>(v));
    }
    return s;
}

inline Json parse_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace detail

inline Json instance_to_json(const Instance& inst) {
    Json j;
    j["n"] = inst.num_vertices();
    Json edges = Json::array();
    for (const auto& e : inst.graph().edges()) edges.push_back({e.u, e.v, e.capacity});
    j["edges"] = edges;
    Json commodities = Json::array();
    for (int a = 0; a < inst.num_commodities(); ++a) {
        Json s = Json::array();
        for (TerminalId t : inst.commodity_terminals(a)) s.push_back(inst.root(t));
        commodities.push_back(s);
    }
    j["commodities"] = commodities;
    if (inst.has_sink()) j["sink"] = *inst.sink();
    return j;
}

inline Instance instance_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("instance: expected a JSON object");
    long n = detail::get_int(detail::member(j, "n"), "n");
    if (n < 2) detail::bad_field("n", "need at least 2 vertices");
    const Json& je = detail::member(j, "edges");
    if (!je.is_array()) detail::bad_field("edges", "expected an array");
    std::vector<Edge> edges;
    for (std::size_t x = 0; x < je.size(); ++x) {
        std::string f = "edges[" + std::to_string(x) + "]";
        if (!je[x].is_array() || je[x].size() != 3) detail::bad_field(f, "expected [u, v, capacity]");
        edges.push_back({static_cast<Vertex>(detail::get_int(je[x][0], f + "[0]")),
                         static_cast<Vertex>(detail::get_int(je[x][1], f + "[1]")), detail::get_int(je[x][2], f + "[2]")});
    }
    const Json& jc = detail::member(j, "commodities");
    if (!jc.is_array()) detail::bad_field("commodities", "expected an array");
    std::vector<std::vector<Vertex>> commodities;
    for (std::size_t a = 0; a < jc.size(); ++a) {
        std::string f = "commodities[" + std::to_string(a) + "]";
        if (!jc[a].is_array()) detail::bad_field(f, "expected a vertex list");
        std::vector<Vertex> s;
        for (std::size_t x = 0; x < jc[a].size(); ++x) {
            s.push_back(static_cast<Vertex>(detail::get_int(jc[a][x], f + "[" + std::to_string(x) + "]")));
        }
        commodities.push_back(std::move(s));
    }
    std::optional<Vertex> sink;
    if (auto it = j.find("sink"); it != j.end() && !it->is_null()) sink = static_cast<Vertex>(detail::get_int(*it, "sink"));
    try {
        return Instance(Graph(static_cast<int>(n), std::move(edges)), std::move(commodities), sink);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("instance: ") + e.what());
    }
}

inline Instance read_instance(const std::string& path) {
    return instance_from_json(detail::parse_text(detail::read_text(path), path));
}

/// One member per line, nested objects one level deeper, arrays on one line.
inline std::string dump_json(const Json& j, int indent = 0) {
    if (!j.is_object() || j.empty()) return j.dump() + (indent == 0 ? "\n" : "");
    std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
    std::string out = "{\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it != j.begin()) out += ",\n";
        out += pad + Json(it.key()).dump() + ": " + dump_json(it.value(), indent + 2);
    }
    out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
    return indent == 0 ? out + "\n" : out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

/// Contents of a solution file. Rationals are "p/q" strings.
struct SolutionFile {
    Mode mode = Mode::Mcp;
    Rational lambda;
    std::optional<long> grid;
    std::vector<long> capacities;
    IntegralCutFamily cuts;
    std::vector<long> loads;
    std::string bound;
    std::vector<std::string> violations;
};

inline Json solution_to_json(const SolutionFile& s, const Graph& g) {
    Json j;
    j["mode"] = to_string(s.mode);
    j["lambda"] = to_string(s.lambda);
    if (s.grid) j["grid"] = *s.grid;
    j["capacities"] = s.capacities;
    Json cuts = Json::object();
    for (const auto& [t, c] : s.cuts.assignment) cuts[std::to_string(t)] = detail::vertex_list(c.members());
    j["cuts"] = cuts;
    Json loads = Json::array();
    for (EdgeId e = 0; e < g.num_edges(); ++e) loads.push_back({g.edge(e).u, g.edge(e).v, s.loads.at(e)});
    j["loads"] = loads;
    j["bound"] = s.bound;
    j["violations"] = s.violations;
    return j;
}

inline SolutionFile solution_from_json(const Json& j, const Instance& inst) {
    if (!j.is_object()) throw std::invalid_argument("solution: expected a JSON object");
    const Graph& g = inst.graph();
    SolutionFile s;
    const Json& jb = detail::member(j, "bound");
    if (jb == "8c+4") {
        s.mode = Mode::Mcp;
    } else if (jb == "c+2") {
        s.mode = Mode::Cscp;
    } else {
        detail::bad_field("bound", "expected \"8c+4\" or \"c+2\"");
    }
    s.bound = jb.get<std::string>();
    const Json& jl = detail::member(j, "lambda");
    if (!jl.is_string()) detail::bad_field("lambda", "expected a \"p/q\" string");
    try {
        s.lambda = parse_rational(jl.get<std::string>());
    } catch (const std::invalid_argument& e) {
        detail::bad_field("lambda", e.what());
    }
    if (auto it = j.find("grid"); it != j.end()) s.grid = detail::get_int(*it, "grid");
    if (auto it = j.find("capacities"); it != j.end()) {
        if (!it->is_array()) detail::bad_field("capacities", "expected an array");
        for (std::size_t x = 0; x < it->size(); ++x) s.capacities.push_back(detail::get_int((*it)[x], "capacities[" + std::to_string(x) + "]"));
    }
    const Json& jc = detail::member(j, "cuts");
    if (!jc.is_object()) detail::bad_field("cuts", "expected an object keyed by terminal id");
    for (auto it = jc.begin(); it != jc.end(); ++it) {
        std::string f = "cuts." + it.key();
        TerminalId t;
        try {
            std::size_t used = 0;
            t = std::stoi(it.key(), &used);
            if (used != it.key().size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            detail::bad_field(f, "key is not a terminal id");
        }
        if (t < 0 || t >= inst.num_terminals()) detail::bad_field(f, "no such terminal");
        try {
            s.cuts.assignment.emplace(t, Cut(detail::vertex_set_from(it.value(), g.num_vertices(), f)));
        } catch (const std::invalid_argument& e) {
            if (std::string(e.what()).rfind("field", 0) == 0) throw;
            detail::bad_field(f, e.what());
        }
    }
    if (auto it = j.find("loads"); it != j.end()) {
        if (!it->is_array()) detail::bad_field("loads", "expected an array");
        for (std::size_t x = 0; x < it->size(); ++x) {
            std::string f = "loads[" + std::to_string(x) + "]";
            if (!(*it)[x].is_array() || (*it)[x].size() != 3) detail::bad_field(f, "expected [u, v, load]");
            s.loads.push_back(detail::get_int((*it)[x][2], f + "[2]"));
        }
    }
    if (auto it = j.find("violations"); it != j.end() && it->is_array()) {
        for (const auto& v : *it) s.violations.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    return s;
}

inline SolutionFile read_solution(const std::string& path, const Instance& inst) {
    return solution_from_json(detail::parse_text(detail::read_text(path), path), inst);
}

inline Json family_to_json(const FractionalLaminarFamily& fam) {
    Json out = Json::array();
    for (const auto& c : fam.cuts) {
        out.push_back({{"owner", c.owner}, {"weight", to_string(c.weight)}, {"cut", detail::vertex_list(c.cut)}});
    }
    return out;
}

} // namespace cutpack
