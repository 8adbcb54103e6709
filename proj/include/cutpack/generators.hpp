#pragma once

#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/rational.hpp"

#include <algorithm>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutpack {

/// Seeded generator with its own bounded draws: std distributions are
/// implementation-defined, which would make generated files differ between
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    // Uniform on [lo, hi]; the modulo bias is irrelevant at these ranges.
    long uniform(long lo, long hi) {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(engine_() % span);
    }
    bool chance(int permille) { return uniform(0, 999) < permille; }
    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct RandomParams {
    int n = 8;
    int k = 2;
    int min_terminals = 2;
    int max_terminals = 3;
    long max_capacity = 3;
    int density_permille = 300;
    bool common_sink = false;
};

inline void validate(const RandomParams& p) {
    if (p.n < 2 || p.n > 64) throw std::invalid_argument("n must be in [2, 64]");
    if (p.k < 1 || p.k > 8) throw std::invalid_argument("k must be in [1, 8]");
    if (p.min_terminals < 2) throw std::invalid_argument("commodities need at least two terminals");
    if (p.max_terminals < p.min_terminals || p.max_terminals > 4 || p.max_terminals > p.n) {
        throw std::invalid_argument("terminal count must be in [2, min(4, n)]");
    }
    if (p.max_capacity < 1) throw std::invalid_argument("capacities must be at least 1");
    if (p.density_permille < 0 || p.density_permille > 1000) throw std::invalid_argument("density must be in [0, 1000]");
}

namespace detail {

inline bool connected(int n, const std::vector<Edge>& edges) {
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    int parts = n;
    for (const auto& e : edges) {
        int a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --parts;
        }
    }
    return parts == 1;
}

} // namespace detail

/// Random connected graph (each pair independently with the given density,
/// redrawn until connected) and random commodities. With common_sink the
/// sink is a random vertex and every commodity pairs it with another one.
inline Instance random_instance(const RandomParams& p, std::uint64_t seed) {
    validate(p);
    Rng rng(seed);
    std::vector<Edge> edges;
    for (int attempt = 0;; ++attempt) {
        if (attempt == 10000) throw std::invalid_argument("density too low to draw a connected graph");
        edges.clear();
        for (int u = 0; u < p.n; ++u) {
            for (int v = u + 1; v < p.n; ++v) {
                if (rng.chance(p.density_permille)) edges.push_back({u, v, rng.uniform(1, p.max_capacity)});
            }
        }
        if (detail::connected(p.n, edges)) break;
    }
    std::vector<std::vector<Vertex>> commodities;
    if (p.common_sink) {
        Vertex sink = static_cast<Vertex>(rng.uniform(0, p.n - 1));
        for (int a = 0; a < p.k; ++a) {
            Vertex r = static_cast<Vertex>(rng.uniform(0, p.n - 2));
            if (r >= sink) ++r;
            commodities.push_back({r, sink});
        }
        return Instance(Graph(p.n, std::move(edges)), std::move(commodities), sink);
    }
    for (int a = 0; a < p.k; ++a) {
        int size = static_cast<int>(rng.uniform(p.min_terminals, p.max_terminals));
        std::vector<Vertex> pool(p.n);
        for (int v = 0; v < p.n; ++v) pool[v] = v;
        std::vector<Vertex> s;
        for (int x = 0; x < size; ++x) {
            auto idx = static_cast<std::size_t>(rng.uniform(x, p.n - 1));
            std::swap(pool[x], pool[idx]);
            s.push_back(pool[x]);
        }
        commodities.push_back(std::move(s));
    }
    return Instance(Graph(p.n, std::move(edges)), std::move(commodities));
}

/// Integrality-gap family: complete graph on n vertices (n even), a chain
/// v_1, ..., v_{n/2+1} = t of new vertices, every clique vertex joined to
/// v_1, one commodity {r_i, t} per clique vertex. Unit capacities.
/// Vertex ids: clique 0..n-1, then v_1 = n, ..., t = n + n/2.
inline Instance clique_chain(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("clique-chain needs an even n >= 2");
    const int chain = n / 2 + 1;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v, 1});
    }
    for (int u = 0; u < n; ++u) edges.push_back({u, n, 1});
    for (int c = 0; c + 1 < chain; ++c) edges.push_back({n + c, n + c + 1, 1});
    Vertex t = n + chain - 1;
    std::vector<std::vector<Vertex>> commodities;
    for (int u = 0; u < n; ++u) commodities.push_back({u, t});
    return Instance(Graph(n + chain, std::move(edges)), std::move(commodities), t);
}

struct SyntheticFamily {
    FractionalLaminarFamily family;
    std::vector<long> capacities;
};

namespace detail {

// Random laminar hierarchy: each set of two or more vertices splits into 2
// or 3 random non-empty parts, down to singletons. Appends every part.
inline void split_hierarchy(Rng& rng, std::vector<Vertex> set, std::vector<VertexSet>& out, int n) {
    if (set.size() < 2) return;
    int parts = std::min<int>(static_cast<int>(set.size()), static_cast<int>(rng.uniform(2, 3)));
    for (std::size_t x = set.size(); x > 1; --x) std::swap(set[x - 1], set[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(x) - 1))]);
    std::vector<std::vector<Vertex>> groups(parts);
    for (int p = 0; p < parts; ++p) groups[p].push_back(set[p]);
    for (std::size_t x = parts; x < set.size(); ++x) groups[rng.uniform(0, parts - 1)].push_back(set[x]);
    for (auto& g : groups) {
        VertexSet s(n);
        for (Vertex v : g) s.insert(v);
        out.push_back(s);
        split_hierarchy(rng, std::move(g), out, n);
    }
}

} // namespace detail

/// A feasible fractional laminar family built directly, without the LP.
/// All cuts come from one random laminar hierarchy (over V minus the sink
/// for common-sink mode). Each terminal gets 1 to 3 nested sets around its
/// vertex with weights on a 1/grid lattice. For the general mode every
/// commodity is put in a random order and a terminal's sets may hold the
/// vertices of earlier terminals only, so each pair is separated on one
/// side. Capacities are the rounded-up loads.
inline SyntheticFamily synthetic_family(const Instance& inst, Mode mode, std::uint64_t seed, long grid = 6) {
    if (grid < 1) throw std::invalid_argument("grid must be positive");
    if (mode == Mode::Cscp && !inst.has_sink()) throw std::invalid_argument("common-sink family needs a sink");
    Rng rng(seed);
    const int n = inst.num_vertices();
    std::vector<Vertex> universe;
    for (Vertex v = 0; v < n; ++v) {
        if (!(mode == Mode::Cscp && v == *inst.sink())) universe.push_back(v);
    }
    std::vector<VertexSet> hierarchy;
    if (mode == Mode::Cscp) {
        VertexSet all(n);
        for (Vertex v : universe) all.insert(v);
        hierarchy.push_back(all);
    }
    detail::split_hierarchy(rng, universe, hierarchy, n);
    std::sort(hierarchy.begin(), hierarchy.end(), [](const VertexSet& a, const VertexSet& b) { return a.size() < b.size(); });

    // Vertices a terminal's sets must avoid.
    std::vector<VertexSet> avoid(inst.num_terminals(), VertexSet(n));
    for (int a = 0; a < inst.num_commodities(); ++a) {
        auto ts = inst.commodity_terminals(a);
        for (std::size_t x = ts.size(); x > 1; --x) std::swap(ts[x - 1], ts[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(x) - 1))]);
        for (std::size_t x = 0; x < ts.size(); ++x) {
            for (std::size_t y = x + 1; y < ts.size(); ++y) avoid[ts[x]].insert(inst.root(ts[y]));
        }
    }

    SyntheticFamily out;
    for (TerminalId t : inst.cut_terminals(mode == Mode::Cscp)) {
        std::vector<const VertexSet*> chain;
        for (const auto& s : hierarchy) {
            if (s.contains(inst.root(t)) && !s.intersects(avoid[t])) chain.push_back(&s);
        }
        long parts = std::min<long>({3, static_cast<long>(chain.size()), grid});
        parts = rng.uniform(1, parts);
        std::vector<std::size_t> picks(chain.size());
        for (std::size_t x = 0; x < picks.size(); ++x) picks[x] = x;
        for (std::size_t x = picks.size(); x > 1; --x) std::swap(picks[x - 1], picks[static_cast<std::size_t>(rng.uniform(0, static_cast<long>(x) - 1))]);
        picks.resize(static_cast<std::size_t>(parts));
        std::sort(picks.begin(), picks.end());
        long left = grid;
        for (long p = 0; p < parts; ++p) {
            long units = p + 1 == parts ? left : rng.uniform(1, left - (parts - p - 1));
            left -= units;
            out.family.cuts.push_back({*chain[picks[p]], make_rational(units, grid), t});
        }
    }
    for (const auto& l : load_vector(out.family, inst.graph())) out.capacities.push_back(std::max(1L, ceil_to_long(l)));
    return out;
}

} // namespace cutpack
