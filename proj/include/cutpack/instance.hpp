#pragma once

#include "cutpack/vertex_set.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutpack {

using EdgeId = int;
using TerminalId = int;

struct Edge {
    Vertex u = 0;
    Vertex v = 0;
    long capacity = 1;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with positive integral edge capacities. Parallel edges are
/// not allowed; multiplicity is expressed through the capacity.
class Graph {
public:
    Graph() = default;
    Graph(int num_vertices, std::vector<Edge> edges) : n_(num_vertices), edges_(std::move(edges)) {
        if (n_ < 1) {
            throw std::invalid_argument("graph needs at least one vertex");
        }
        incident_.assign(n_, {});
        for (std::size_t id = 0; id < edges_.size(); ++id) {
            const Edge& e = edges_[id];
            std::string where = "edges[" + std::to_string(id) + "]";
            if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
                throw std::invalid_argument(where + ": endpoint out of range");
            }
            if (e.u == e.v) {
                throw std::invalid_argument(where + ": self-loop");
            }
            if (e.capacity < 1) {
                throw std::invalid_argument(where + ": capacity must be a positive integer");
            }
            auto key = std::minmax(e.u, e.v);
            if (!index_.emplace(key, static_cast<EdgeId>(id)).second) {
                throw std::invalid_argument(where + ": duplicate edge");
            }
            incident_[e.u].push_back(static_cast<EdgeId>(id));
            incident_[e.v].push_back(static_cast<EdgeId>(id));
        }
    }

    int num_vertices() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }
    const std::vector<EdgeId>& incident(Vertex v) const { return incident_.at(v); }
    Vertex other(EdgeId id, Vertex v) const {
        const Edge& e = edges_[id];
        return e.u == v ? e.v : e.u;
    }
    std::optional<EdgeId> find_edge(Vertex a, Vertex b) const {
        auto it = index_.find(std::minmax(a, b));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> incident_;
    std::map<std::pair<Vertex, Vertex>, EdgeId> index_;
};

/// Edges with exactly one endpoint in the set.
inline std::vector<EdgeId> boundary(const VertexSet& set, const Graph& g) {
    std::vector<EdgeId> out;
    for (EdgeId id = 0; id < g.num_edges(); ++id) {
        const Edge& e = g.edge(id);
        if (set.contains(e.u) != set.contains(e.v)) {
            out.push_back(id);
        }
    }
    return out;
}

inline bool in_boundary(const VertexSet& set, const Edge& e) { return set.contains(e.u) != set.contains(e.v); }

/// A vertex set defining a proper partition of V.
class Cut {
public:
    explicit Cut(VertexSet members) : members_(std::move(members)) {
        if (members_.empty() || members_.is_full()) {
            throw std::invalid_argument("a cut must be a non-empty proper subset of the vertices");
        }
    }
    const VertexSet& members() const { return members_; }
    bool contains(Vertex v) const { return members_.contains(v); }

    friend bool operator==(const Cut&, const Cut&) = default;

private:
    VertexSet members_;
};

struct Terminal {
    int commodity = 0;
    Vertex vertex = 0;
};

/// Graph plus commodities. Each commodity is a list of terminal vertices; a
/// sink makes the instance a common-sink s-t cut packing instance.
///
/// Terminals are numbered globally in commodity order: the p-th terminal of
/// commodity a has id sum_{b<a} |S_b| + p.
class Instance {
public:
    Instance() = default;
    Instance(Graph graph, std::vector<std::vector<Vertex>> commodities, std::optional<Vertex> sink = std::nullopt)
        : graph_(std::move(graph)), commodities_(std::move(commodities)), sink_(sink) {
        const int n = graph_.num_vertices();
        if (sink_ && (*sink_ < 0 || *sink_ >= n)) {
            throw std::invalid_argument("sink: vertex out of range");
        }
        for (std::size_t a = 0; a < commodities_.size(); ++a) {
            const auto& s = commodities_[a];
            std::string where = "commodities[" + std::to_string(a) + "]";
            if (s.size() < 2) {
                throw std::invalid_argument(where + ": needs at least two terminals");
            }
            std::set<Vertex> seen;
            std::vector<TerminalId> ids;
            for (Vertex v : s) {
                if (v < 0 || v >= n) {
                    throw std::invalid_argument(where + ": terminal vertex out of range");
                }
                if (!seen.insert(v).second) {
                    throw std::invalid_argument(where + ": terminals must be at distinct vertices");
                }
                ids.push_back(static_cast<TerminalId>(terminals_.size()));
                terminals_.push_back({static_cast<int>(a), v});
            }
            if (sink_) {
                if (s.size() != 2 || seen.count(*sink_) == 0) {
                    throw std::invalid_argument(where + ": with a sink every commodity is a pair containing the sink");
                }
            }
            commodity_terminals_.push_back(std::move(ids));
        }
    }

    const Graph& graph() const { return graph_; }
    int num_vertices() const { return graph_.num_vertices(); }
    const std::vector<std::vector<Vertex>>& commodities() const { return commodities_; }
    int num_commodities() const { return static_cast<int>(commodities_.size()); }
    const std::optional<Vertex>& sink() const { return sink_; }
    bool has_sink() const { return sink_.has_value(); }

    int num_terminals() const { return static_cast<int>(terminals_.size()); }
    const Terminal& terminal(TerminalId id) const { return terminals_.at(id); }
    Vertex root(TerminalId id) const { return terminals_.at(id).vertex; }
    const std::vector<TerminalId>& commodity_terminals(int a) const { return commodity_terminals_.at(a); }

    bool is_sink_terminal(TerminalId id) const { return sink_ && terminals_.at(id).vertex == *sink_; }

    /// Terminals that receive cuts: all of them for MCP, all but the sink
    /// terminals in common-sink mode.
    std::vector<TerminalId> cut_terminals(bool common_sink) const {
        std::vector<TerminalId> out;
        for (TerminalId id = 0; id < num_terminals(); ++id) {
            if (!(common_sink && is_sink_terminal(id))) {
                out.push_back(id);
            }
        }
        return out;
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.graph_ == b.graph_ && a.commodities_ == b.commodities_ && a.sink_ == b.sink_;
    }

private:
    Graph graph_;
    std::vector<std::vector<Vertex>> commodities_;
    std::optional<Vertex> sink_;
    std::vector<Terminal> terminals_;
    std::vector<std::vector<TerminalId>> commodity_terminals_;
};

enum class Mode { Mcp, Cscp };

inline const char* to_string(Mode m) { return m == Mode::Mcp ? "mcp" : "cscp"; }

} // namespace cutpack
