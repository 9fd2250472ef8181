#pragma once

// Graph file format (JSON, canonical layout):
//
//   {
//     "version": 1,
//     "L": 64,
//     "W": 2,
//     "provenance": {"p": 0.1, "c": 2, "seed": 7},   or null
//     "edges": [[l, m, mult], ...],                  sorted by (l, m)
//     "training": [sorted factor indices]
//   }
//
// Equal graphs serialize to identical bytes.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "sccdma/coupling.hpp"
#include "sccdma/errors.hpp"

namespace sccdma {

inline constexpr int graph_format_version = 1;

struct GraphFile {
    CouplingGraph graph;
    TrainingAssignment training;
};

inline std::string serialize_graph(const CouplingGraph& g, const TrainingAssignment& t) {
    if (t.chain_length() != g.size() && !(t.tau() == 0))
        throw DimensionError("training assignment length does not match graph");
    std::ostringstream os;
    os << "{\n";
    os << "  \"version\": " << graph_format_version << ",\n";
    os << "  \"L\": " << g.size() << ",\n";
    os << "  \"W\": " << g.width() << ",\n";
    os << "  \"provenance\": ";
    if (const auto& pv = g.provenance()) {
        os << "{\"p\": " << nlohmann::json(pv->p).dump() << ", \"c\": " << pv->c
           << ", \"seed\": " << pv->seed << "}";
    } else {
        os << "null";
    }
    os << ",\n  \"edges\": [";
    bool first = true;
    for (int l = 0; l < g.size(); ++l) {
        for (int m = 0; m < g.size(); ++m) {
            const int k = g.multiplicity(l, m);
            if (k == 0) continue;
            os << (first ? "\n    " : ",\n    ") << '[' << l << ", " << m << ", " << k << ']';
            first = false;
        }
    }
    os << (first ? "],\n" : "\n  ],\n");
    os << "  \"training\": [";
    for (std::size_t i = 0; i < t.indices().size(); ++i) os << (i ? ", " : "") << t.indices()[i];
    os << "]\n}\n";
    return os.str();
}

namespace detail {

template <class T>
T field(const nlohmann::json& doc, const char* name) {
    if (!doc.contains(name)) throw ParseError(std::string("graph file: missing field '") + name + "'");
    try {
        return doc.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph file: field '") + name + "': " + e.what());
    }
}

} // namespace detail

inline GraphFile parse_graph(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("graph file: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("graph file: top level must be an object");

    const int version = detail::field<int>(doc, "version");
    if (version != graph_format_version)
        throw ParseError("graph file: unsupported version " + std::to_string(version));
    const int L = detail::field<int>(doc, "L");
    const int W = detail::field<int>(doc, "W");
    if (L <= 0 || W <= 0) throw ParseError("graph file: fields 'L' and 'W' must be positive");

    std::optional<Provenance> provenance;
    if (!doc.contains("provenance")) throw ParseError("graph file: missing field 'provenance'");
    if (const auto& pv = doc["provenance"]; !pv.is_null()) {
        if (!pv.is_object()) throw ParseError("graph file: field 'provenance' must be an object or null");
        provenance = Provenance{detail::field<double>(pv, "p"), detail::field<int>(pv, "c"),
                                detail::field<std::uint64_t>(pv, "seed")};
    }

    const auto edges = detail::field<std::vector<std::vector<long long>>>(doc, "edges");
    std::vector<int> mult(static_cast<std::size_t>(L) * L, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        const std::string where = "graph file: edges[" + std::to_string(i) + "]";
        if (e.size() != 3) throw ParseError(where + " must be [l, m, mult]");
        if (e[0] < 0 || e[0] >= L || e[1] < 0 || e[1] >= L)
            throw ParseError(where + " has a node index outside [0, L)");
        if (e[2] <= 0) throw ParseError(where + " has a nonpositive multiplicity");
        auto& slot = mult[static_cast<std::size_t>(e[0]) * L + static_cast<std::size_t>(e[1])];
        if (slot != 0) throw ParseError(where + " repeats an (l, m) pair");
        slot = static_cast<int>(e[2]);
    }

    const auto training = detail::field<std::vector<int>>(doc, "training");
    try {
        CouplingGraph g(L, W, std::move(mult), provenance);
        TrainingAssignment t(L, training);
        return {std::move(g), std::move(t)};
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("graph file: ") + e.what());
    }
}

inline GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open graph file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph(ss.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

} // namespace sccdma
