#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/rational.hpp"
#include "cutpack/simplex.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace cutpack {

/// Edge lengths per commodity (lengths[a][e]) and the maximum relative
/// load lambda they achieve.
struct MetricSolution {
    Rational lambda;
    std::vector<std::vector<Rational>> lengths;
    int rounds = 0;
    int paths = 0;
    long pivots = 0;
};

struct ShortestPaths {
    std::vector<std::optional<Rational>> dist;
    std::vector<EdgeId> via;  // edge used to reach each vertex, -1 at the source
};

/// Dijkstra with exact arithmetic. Ties go to the lower vertex id, so the
/// tree is a deterministic function of the input.
inline ShortestPaths shortest_paths(const Graph& g, const std::vector<Rational>& length, Vertex source) {
    const int n = g.num_vertices();
    ShortestPaths sp{std::vector<std::optional<Rational>>(n), std::vector<EdgeId>(n, -1)};
    std::vector<bool> done(n, false);
    using Item = std::pair<Rational, Vertex>;
    auto cmp = [](const Item& x, const Item& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second > y.second;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    sp.dist[source] = Rational(0);
    pq.emplace(Rational(0), source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = true;
        for (EdgeId e : g.incident(u)) {
            Vertex v = g.other(e, u);
            if (done[v]) continue;
            Rational nd = d + length[e];
            if (!sp.dist[v] || nd < *sp.dist[v]) {
                sp.dist[v] = nd;
                sp.via[v] = e;
                pq.emplace(std::move(nd), v);
            }
        }
    }
    return sp;
}

struct PathConstraint {
    int commodity = 0;
    TerminalId from = 0;
    TerminalId to = 0;
    std::vector<EdgeId> edges;
    Rational length;
};

/// Every same-commodity terminal path shorter than 1 - tol under the
/// commodity's lengths, one shortest path per violated pair.
inline std::vector<PathConstraint> separation_oracle(const MetricSolution& solution, const Instance& inst,
                                                     const Rational& tol = 0) {
    const Graph& g = inst.graph();
    std::vector<PathConstraint> out;
    Rational threshold = 1 - tol;
    for (int a = 0; a < inst.num_commodities(); ++a) {
        const auto& ts = inst.commodity_terminals(a);
        for (std::size_t x = 0; x + 1 < ts.size(); ++x) {
            Vertex s = inst.root(ts[x]);
            auto sp = shortest_paths(g, solution.lengths[a], s);
            for (std::size_t y = x + 1; y < ts.size(); ++y) {
                Vertex t = inst.root(ts[y]);
                if (!sp.dist[t] || *sp.dist[t] >= threshold) continue;
                PathConstraint pc{a, ts[x], ts[y], {}, *sp.dist[t]};
                for (Vertex v = t; v != s; v = g.other(sp.via[v], v)) pc.edges.push_back(sp.via[v]);
                std::reverse(pc.edges.begin(), pc.edges.end());
                out.push_back(std::move(pc));
            }
        }
    }
    return out;
}

/// Solves  min lambda  s.t.  sum_a d_a(e) <= lambda c_e,  d_a(P) >= 1 for
/// every path P between two terminals of commodity a,  d >= 0.
///
/// Path rows are generated lazily. The restricted problem is solved through
/// its dual (a packing LP over path columns), where the all-slack basis is
/// feasible and new paths enter as columns without restarting; d and lambda
/// are read off as the dual prices.
inline MetricSolution solve_mcp_lp(const Instance& inst, const Rational& tol = 0, int max_rounds = 100000,
                                   long max_pivots = 50000000) {
    const Graph& g = inst.graph();
    const int m = g.num_edges();
    const int k = inst.num_commodities();
    const int rows = k * m + 1;
    const int norm = k * m;

    Tableau t;
    t.a.assign(rows, {});
    t.b.assign(rows, Rational(0));
    t.b[norm] = 1;
    t.basis.resize(rows);
    const int cols = m + rows;
    for (auto& row : t.a) row.assign(cols, Rational(0));
    for (EdgeId e = 0; e < m; ++e) {
        for (int a = 0; a < k; ++a) t.a[a * m + e][e] = -1;
        t.a[norm][e] = g.edge(e).capacity;
    }
    std::vector<int> slack(rows);
    for (int r = 0; r < rows; ++r) {
        slack[r] = m + r;
        t.a[r][slack[r]] = 1;
        t.basis[r] = slack[r];
    }
    t.cost.assign(cols, Rational(0));
    t.price();

    MetricSolution sol;
    sol.lengths.assign(k, std::vector<Rational>(m, Rational(0)));
    for (;;) {
        for (int a = 0; a < k; ++a) {
            for (EdgeId e = 0; e < m; ++e) {
                const Rational& price = t.reduced[slack[a * m + e]];
                sol.lengths[a][e] = price > 1 ? Rational(1) : price;
            }
        }
        sol.lambda = t.reduced[slack[norm]];
        auto violated = separation_oracle(sol, inst, tol);
        if (violated.empty()) break;
        if (++sol.rounds > max_rounds) {
            throw BudgetExceeded("path generation round limit reached");
        }
        for (const auto& pc : violated) {
            std::vector<std::pair<int, Rational>> column;
            for (EdgeId e : pc.edges) column.emplace_back(pc.commodity * m + e, Rational(1));
            t.add_column(column, Rational(-1), slack);
            ++sol.paths;
        }
        if (!t.optimize(max_pivots)) {
            throw InvariantViolation("path packing dual reported unbounded");
        }
    }
    sol.pivots = t.pivots;

    for (EdgeId e = 0; e < m; ++e) {
        Rational sum = 0;
        for (int a = 0; a < k; ++a) {
            ensure(sol.lengths[a][e] >= 0, "negative edge length in LP solution");
            sum += sol.lengths[a][e];
        }
        ensure(sum <= sol.lambda * g.edge(e).capacity + tol, "LP solution exceeds lambda on an edge");
    }
    return sol;
}

} // namespace cutpack
