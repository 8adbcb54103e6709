#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/rational.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

namespace cutpack {

struct OracleResult {
    Rational optimum;
    IntegralCutFamily witness;
    long nodes = 0;
};

inline constexpr double kDefaultOracleBudget = 1e15;

/// Number of partition-form solutions: prod_a |S_a|^(free vertices of a).
inline double oracle_search_size(const Instance& inst) {
    double total = 1;
    for (int a = 0; a < inst.num_commodities(); ++a) {
        const auto& ts = inst.commodity_terminals(a);
        int free = inst.num_vertices() - static_cast<int>(ts.size());
        for (int x = 0; x < free; ++x) total *= static_cast<double>(ts.size());
    }
    return total;
}

namespace detail {

class PartitionSearch {
public:
    PartitionSearch(const Instance& inst, Mode mode) : inst_(inst), g_(inst.graph()), cscp_(mode == Mode::Cscp) {
        if (cscp_ && !inst.has_sink()) throw std::invalid_argument("common-sink mode needs a sink");
        const int n = inst.num_vertices();
        const int k = inst.num_commodities();
        side_.assign(k, std::vector<int>(n, -1));
        load_.assign(g_.num_edges(), 0);
        // Sides are labelled by the commodity's terminals. Every side but one
        // carries a cut; the uncut side is the sink's in common-sink mode and
        // a search choice otherwise.
        has_cut_.resize(k);
        uncut_.assign(k, -1);
        for (int a = 0; a < k; ++a) has_cut_[a].assign(inst.commodity_terminals(a).size(), true);
        for (int a = 0; a < k; ++a) {
            twin_.push_back(-1);
            for (int b = a - 1; b >= 0; --b) {
                if (same_vertices(a, b)) {
                    twin_[a] = b;
                    break;
                }
            }
        }
        // Free vertices of each commodity in BFS order from its terminals, so
        // edges get both endpoints fixed early.
        for (int a = 0; a < k; ++a) {
            std::vector<bool> seen(n, false);
            std::deque<Vertex> queue;
            for (TerminalId t : inst.commodity_terminals(a)) {
                seen[inst.root(t)] = true;
                queue.push_back(inst.root(t));
            }
            std::vector<Vertex> order;
            while (!queue.empty()) {
                Vertex v = queue.front();
                queue.pop_front();
                for (EdgeId e : g_.incident(v)) {
                    Vertex u = g_.other(e, v);
                    if (seen[u]) continue;
                    seen[u] = true;
                    order.push_back(u);
                    queue.push_back(u);
                }
            }
            for (Vertex v = 0; v < n; ++v) {
                if (!seen[v]) order.push_back(v);
            }
            vars_.push_back({a, -1});
            for (Vertex v : order) vars_.push_back({a, v});
        }
    }

    OracleResult run() {
        search(0);
        ensure(!best_side_.empty(), "oracle found no solution");
        OracleResult out;
        out.optimum = make_rational(best_num_, best_den_);
        out.nodes = nodes_;
        for (int a = 0; a < inst_.num_commodities(); ++a) {
            const auto& ts = inst_.commodity_terminals(a);
            for (std::size_t s = 0; s < ts.size(); ++s) {
                if (static_cast<int>(s) == best_uncut_[a]) continue;
                VertexSet members(inst_.num_vertices());
                for (Vertex v = 0; v < inst_.num_vertices(); ++v) {
                    if (best_side_[a][v] == static_cast<int>(s)) members.insert(v);
                }
                out.witness.assignment.emplace(ts[s], Cut(members));
            }
        }
        return out;
    }

private:
    struct Var {
        int commodity;
        Vertex vertex;
    };

    bool same_vertices(int a, int b) const {
        const auto& x = inst_.commodity_terminals(a);
        const auto& y = inst_.commodity_terminals(b);
        if (x.size() != y.size()) return false;
        for (std::size_t s = 0; s < x.size(); ++s) {
            if (inst_.root(x[s]) != inst_.root(y[s])) return false;
        }
        return true;
    }

    // Relative load of e at least the best found so far.
    bool hopeless(EdgeId e) const {
        return best_den_ > 0 && load_[e] * best_den_ >= best_num_ * g_.edge(e).capacity;
    }

    // Sets side s of vertex v for commodity a and charges the edges to
    // already placed neighbours. Returns false if some edge became hopeless;
    // the placement stays in effect either way and must be undone.
    bool place(int a, Vertex v, int s) {
        side_[a][v] = s;
        bool ok = true;
        for (EdgeId e : g_.incident(v)) {
            int t = side_[a][g_.other(e, v)];
            if (t < 0 || t == s) continue;
            load_[e] += has_cut_[a][s] + has_cut_[a][t];
            if (hopeless(e)) ok = false;
        }
        return ok;
    }

    void unplace(int a, Vertex v) {
        int s = side_[a][v];
        for (EdgeId e : g_.incident(v)) {
            int t = side_[a][g_.other(e, v)];
            if (t < 0 || t == s) continue;
            load_[e] -= has_cut_[a][s] + has_cut_[a][t];
        }
        side_[a][v] = -1;
    }

    std::vector<int> uncut_choices(int a) const {
        const auto& ts = inst_.commodity_terminals(a);
        std::vector<int> out;
        for (std::size_t s = 0; s < ts.size(); ++s) {
            if (cscp_ ? inst_.is_sink_terminal(ts[s]) : true) out.push_back(static_cast<int>(s));
        }
        return out;
    }

    // Identical commodities are interchangeable: a later twin may not be
    // lexicographically smaller than the earlier one (uncut side first, then
    // sides in variable order).
    bool breaks_symmetry(std::size_t index) const {
        const Var& var = vars_[index];
        int b = twin_[var.commodity];
        if (b < 0 || uncut_[var.commodity] != uncut_[b]) return false;
        for (std::size_t x = index; x-- > 0 && vars_[x].vertex >= 0 && vars_[x].commodity == var.commodity;) {
            if (side_[var.commodity][vars_[x].vertex] != side_[b][vars_[x].vertex]) return false;
        }
        return side_[var.commodity][var.vertex] < side_[b][var.vertex];
    }

    void search(std::size_t index) {
        ++nodes_;
        if (index == vars_.size()) {
            record();
            return;
        }
        const Var& var = vars_[index];
        if (var.vertex < 0) {
            const int a = var.commodity;
            const auto& ts = inst_.commodity_terminals(a);
            for (int d : uncut_choices(a)) {
                if (twin_[a] >= 0 && d < uncut_[twin_[a]]) continue;
                uncut_[a] = d;
                has_cut_[a][d] = false;
                bool ok = true;
                for (std::size_t s = 0; s < ts.size(); ++s) ok = place(a, inst_.root(ts[s]), static_cast<int>(s)) && ok;
                if (ok) search(index + 1);
                for (std::size_t s = ts.size(); s-- > 0;) unplace(a, inst_.root(ts[s]));
                has_cut_[a][d] = true;
            }
            uncut_[a] = -1;
            return;
        }
        if (side_[var.commodity][var.vertex] >= 0) {
            search(index + 1);
            return;
        }
        int sides = static_cast<int>(has_cut_[var.commodity].size());
        for (int s = 0; s < sides; ++s) {
            bool ok = place(var.commodity, var.vertex, s);
            if (ok && !breaks_symmetry(index)) search(index + 1);
            unplace(var.commodity, var.vertex);
        }
    }

    void record() {
        long num = 0, den = 1;
        for (EdgeId e = 0; e < g_.num_edges(); ++e) {
            long c = g_.edge(e).capacity;
            if (load_[e] * den > num * c) {
                num = load_[e];
                den = c;
            }
        }
        if (best_den_ == 0 || num * best_den_ < best_num_ * den) {
            best_num_ = num;
            best_den_ = den;
            best_side_ = side_;
            best_uncut_ = uncut_;
        }
    }

    const Instance& inst_;
    const Graph& g_;
    bool cscp_;
    std::vector<std::vector<int>> side_;
    std::vector<std::vector<bool>> has_cut_;
    std::vector<int> uncut_;
    std::vector<int> twin_;
    std::vector<Var> vars_;
    std::vector<long> load_;
    long best_num_ = 0, best_den_ = 0;
    std::vector<std::vector<int>> best_side_;
    std::vector<int> best_uncut_;
    long nodes_ = 0;
};

} // namespace detail

/// Exact optimum over partition-form solutions: every commodity colours the
/// vertices by its terminals, and every colour class but one becomes the cut
/// of its terminal. The uncut class is the sink's in common-sink mode and free
/// otherwise, so a two-terminal commodity loads each edge it separates once.
/// Minimises the largest load/capacity.
/// Branch and bound: a branch stops once some edge reaches the best ratio
/// found so far; twin commodities are ordered to skip mirror solutions.
inline OracleResult brute_force_opt(const Instance& inst, Mode mode, double budget = kDefaultOracleBudget) {
    double size = oracle_search_size(inst);
    if (size > budget) {
        throw BudgetExceeded("oracle search space " + std::to_string(size) + " exceeds budget " + std::to_string(budget));
    }
    return detail::PartitionSearch(inst, mode).run();
}

inline OracleResult brute_force_opt(const Instance& inst, double budget = kDefaultOracleBudget) {
    return brute_force_opt(inst, inst.has_sink() ? Mode::Cscp : Mode::Mcp, budget);
}

struct GuaranteeReport {
    bool ok = true;
    std::string bound;
    std::vector<std::string> violations;
    long min_slack = 0;
    long max_slack = 0;
};

inline long guarantee_bound(long capacity, Mode mode) { return mode == Mode::Mcp ? 8 * capacity + 4 : capacity + 2; }

/// Per-edge load against 8c+4 (general) or c+2 (common sink).
inline GuaranteeReport check_guarantee(const IntegralCutFamily& result, const Graph& g, const std::vector<long>& capacities,
                                       Mode mode) {
    if (static_cast<int>(capacities.size()) != g.num_edges()) {
        throw std::invalid_argument("capacity vector does not match the edge count");
    }
    GuaranteeReport report;
    report.bound = mode == Mode::Mcp ? "8c+4" : "c+2";
    auto load = load_vector(result, g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        long slack = guarantee_bound(capacities[e], mode) - load[e];
        if (e == 0 || slack < report.min_slack) report.min_slack = slack;
        if (e == 0 || slack > report.max_slack) report.max_slack = slack;
        if (slack < 0) {
            report.violations.push_back("edge " + std::to_string(e) + " (" + std::to_string(g.edge(e).u) + "," +
                                        std::to_string(g.edge(e).v) + ") load " + std::to_string(load[e]) +
                                        " exceeds " + report.bound + " = " +
                                        std::to_string(guarantee_bound(capacities[e], mode)));
        }
    }
    report.ok = report.violations.empty();
    return report;
}

} // namespace cutpack
