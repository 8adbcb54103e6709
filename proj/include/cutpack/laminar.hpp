#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/lp.hpp"
#include "cutpack/rational.hpp"
#include "cutpack/vertex_set.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace cutpack {

/// Prefix cuts of the distance order around each terminal. For terminal i
/// of commodity a the vertices are sorted by d_a-distance from r_i (r_i
/// first, ties by id, unreachable vertices dropped) and the prefix
/// {v_0..v_b} gets weight (min(d(v_{b+1}), cap) - d(v_b)) / cap for every b
/// with d(v_b) < cap. Weights per terminal sum to 1; zero weights are
/// dropped. Cuts of one terminal come out innermost first.
inline std::vector<WeightedCut> ball_cuts(const Instance& inst, const MetricSolution& metric, const Rational& cap,
                                          bool skip_sink_terminals = false) {
    if (cap <= 0) throw std::invalid_argument("ball radius must be positive");
    const Graph& g = inst.graph();
    const int n = g.num_vertices();
    std::vector<WeightedCut> out;
    for (TerminalId t : inst.cut_terminals(skip_sink_terminals)) {
        int a = inst.terminal(t).commodity;
        Vertex r = inst.root(t);
        auto sp = shortest_paths(g, metric.lengths.at(a), r);
        std::vector<Vertex> order;
        for (Vertex v = 0; v < n; ++v) {
            if (sp.dist[v]) order.push_back(v);
        }
        std::sort(order.begin(), order.end(), [&](Vertex x, Vertex y) {
            if (*sp.dist[x] != *sp.dist[y]) return *sp.dist[x] < *sp.dist[y];
            if ((x == r) != (y == r)) return x == r;
            return x < y;
        });
        VertexSet prefix(n);
        for (std::size_t b = 0; b < order.size(); ++b) {
            const Rational& db = *sp.dist[order[b]];
            if (db >= cap) break;
            prefix.insert(order[b]);
            Rational next = cap;
            if (b + 1 < order.size() && *sp.dist[order[b + 1]] < cap) next = *sp.dist[order[b + 1]];
            Rational w = (next - db) / cap;
            if (w == 0) continue;
            ensure(!prefix.is_full(), "ball cut covers every vertex");
            out.push_back({prefix, std::move(w), t});
        }
    }
    return out;
}

/// Cuts whose weights are multiples of 1/grid. A cut of weight u/grid stands
/// for u unit copies of weight 1/grid; expand() lists them.
struct QuantizedFamily {
    long grid = 1;
    std::vector<WeightedCut> cuts;

    long units(const WeightedCut& c) const {
        Rational u = c.weight * grid;
        ensure(u.get_den() == 1, "weight off the quantization grid");
        return u.get_num().get_si();
    }

    std::vector<WeightedCut> expand() const {
        std::vector<WeightedCut> out;
        Rational unit(1, grid);
        unit.canonicalize();
        for (const auto& c : cuts) {
            for (long u = units(c); u > 0; --u) out.push_back({c.cut, unit, c.owner});
        }
        return out;
    }
};

/// Rounds every weight up to a multiple of 1/grid, then truncates each
/// terminal's chain from the outermost end so its total is exactly 1.
/// Cuts of one owner must be nested; they are processed innermost first.
inline QuantizedFamily quantize(const std::vector<WeightedCut>& raw, long grid) {
    if (grid < 1) throw std::invalid_argument("quantization grid must be positive");
    std::map<TerminalId, std::vector<const WeightedCut*>> chains;
    for (const auto& c : raw) chains[c.owner].push_back(&c);
    QuantizedFamily q;
    q.grid = grid;
    for (auto& [owner, chain] : chains) {
        std::stable_sort(chain.begin(), chain.end(),
                         [](const WeightedCut* x, const WeightedCut* y) { return x->cut.size() < y->cut.size(); });
        long left = grid;
        Rational total = 0;
        for (const WeightedCut* c : chain) {
            total += c->weight;
            if (left == 0) continue;
            long u = std::min(left, ceil_to_long(c->weight * grid));
            left -= u;
            if (u > 0) q.cuts.push_back({c->cut, Rational(u, grid), owner});
        }
        ensure(total == 1, "terminal " + std::to_string(owner) + " does not have unit weight before quantization");
        ensure(left == 0, "quantized chain lost weight");
        for (auto& c : q.cuts) c.weight.canonicalize();
    }
    return q;
}

struct UncrossStats {
    long steps = 0;
};

/// Uncrossing for common-sink families. A crossing pair C_i (owner i), C_j
/// (owner j) is split to the smaller of the two weights and that portion is
/// replaced according to where the roots lie:
///   both roots in C_i & C_j         -> i gets C_i & C_j, j gets C_i | C_j
///   r_i in C_i - C_j, r_j in C_j - C_i -> i gets C_i - C_j, j gets C_j - C_i
///   r_i in C_i & C_j, r_j in C_j - C_i -> i gets C_i & C_j, j gets C_i | C_j
///   mirror of the previous line.
/// Cuts of a single owner that cross are replaced by intersection and union.
/// The pair scanned first in (owner, set) order is resolved first.
/// roots[t] is the vertex of terminal t.
inline FractionalLaminarFamily uncross_cscp(std::vector<WeightedCut> cuts, Vertex sink, const std::vector<Vertex>& roots,
                                            UncrossStats* stats = nullptr) {
    auto root_of = [&](const WeightedCut& c) { return roots.at(c.owner); };
    FractionalLaminarFamily fam;
    fam.cuts = std::move(cuts);
    for (const auto& c : fam.cuts) {
        if (c.cut.contains(sink)) throw std::invalid_argument("uncross_cscp: a cut contains the sink");
        if (!c.cut.contains(root_of(c))) throw std::invalid_argument("uncross_cscp: a cut misses its terminal");
    }
    fam.canonicalize();
    const std::size_t initial = fam.cuts.size();
    const long cap = static_cast<long>(std::max<std::size_t>(initial, 2)) * static_cast<long>(initial + 2) *
                     static_cast<long>(initial + 2) * 4;
    long steps = 0;
    for (;;) {
        std::size_t x = 0, y = 0;
        bool found = false;
        for (x = 0; x < fam.cuts.size() && !found; ++x) {
            for (y = x + 1; y < fam.cuts.size(); ++y) {
                if (crosses(fam.cuts[x].cut, fam.cuts[y].cut)) {
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) break;
        if (++steps > cap) throw BudgetExceeded("uncrossing did not terminate within its step limit");

        WeightedCut ci = fam.cuts[x];
        WeightedCut cj = fam.cuts[y];
        Rational w = std::min(ci.weight, cj.weight);
        fam.cuts[x].weight -= w;
        fam.cuts[y].weight -= w;
        const VertexSet& a = ci.cut;
        const VertexSet& b = cj.cut;
        Vertex ri = root_of(ci);
        Vertex rj = root_of(cj);
        VertexSet for_i(a.universe()), for_j(a.universe());
        bool i_in_both = b.contains(ri);
        bool j_in_both = a.contains(rj);
        if (ci.owner == cj.owner || (i_in_both && j_in_both)) {
            for_i = a & b;
            for_j = a | b;
        } else if (!i_in_both && !j_in_both) {
            for_i = a - b;
            for_j = b - a;
        } else if (i_in_both) {
            for_i = a & b;
            for_j = a | b;
        } else {
            for_i = a | b;
            for_j = a & b;
        }
        fam.cuts.push_back({std::move(for_i), w, ci.owner});
        fam.cuts.push_back({std::move(for_j), w, cj.owner});
        ensure(!fam.cuts.back().cut.contains(sink) && !fam.cuts[fam.cuts.size() - 2].cut.contains(sink),
               "uncrossing moved the sink into a cut");
        ensure(fam.cuts.back().cut.contains(rj) && fam.cuts[fam.cuts.size() - 2].cut.contains(ri),
               "uncrossing lost a terminal");
        fam.canonicalize();
    }
    if (stats) stats->steps += steps;
    return fam;
}

/// Lam-1 for common-sink instances: ball cuts of radius 1 around every
/// non-sink terminal, quantized to 1/N^2 with N = n k, then uncrossed.
/// The result is feasible for capacities lambda c_e + 1/N.
inline FractionalLaminarFamily lam1(const Instance& inst, const MetricSolution& metric, UncrossStats* stats = nullptr) {
    if (!inst.has_sink()) throw std::invalid_argument("lam1 needs a common-sink instance");
    const Graph& g = inst.graph();
    auto raw = ball_cuts(inst, metric, Rational(1), true);
    long big_n = static_cast<long>(inst.num_vertices()) * inst.num_commodities();
    auto q = quantize(raw, big_n * big_n);
    std::vector<Vertex> roots;
    for (TerminalId t = 0; t < inst.num_terminals(); ++t) roots.push_back(inst.root(t));
    FractionalLaminarFamily before;
    before.cuts = q.cuts;
    auto fam = uncross_cscp(q.cuts, *inst.sink(), roots, stats);
    auto load_before = load_vector(before, g);
    auto load_after = load_vector(fam, g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        ensure(load_after[e] <= load_before[e], "uncrossing increased the load on edge " + std::to_string(e));
    }
    return fam;
}

/// One cut per terminal, with the terminal's vertex and commodity.
struct TerminalCuts {
    std::vector<Vertex> root;
    std::vector<int> commodity;
    std::vector<VertexSet> cut;

    int size() const { return static_cast<int>(root.size()); }
};

struct IntegerLam2Stats {
    long rule_disjoint = 0;
    long rule_triangle = 0;
    long rule_same_commodity = 0;
    long rule_both_inside = 0;
    long rule_chain = 0;
    long blue_cycles = 0;
    long peeled = 0;
};

namespace detail {

/// Packed bit rows for the terminal relations used by the rule search.
class BitMatrix {
public:
    explicit BitMatrix(int n) : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0) {}
    void set(int r, int c) { bits_[r * words_ + (c >> 6)] |= std::uint64_t{1} << (c & 63); }
    bool get(int r, int c) const { return (bits_[r * words_ + (c >> 6)] >> (c & 63)) & 1U; }
    const std::uint64_t* row(int r) const { return &bits_[r * words_]; }
    int words() const { return words_; }

private:
    int n_;
    int words_;
    std::vector<std::uint64_t> bits_;
};

class IntegerLam2 {
public:
    // With strict == false the input only has to satisfy what the rules
    // maintain: no two terminals of one commodity hold each other's vertex.
    IntegerLam2(const Graph& g, TerminalCuts tc, IntegerLam2Stats* stats, bool strict = true)
        : g_(g), tc_(std::move(tc)), stats_(stats ? stats : &local_stats_) {
        const int t = tc_.size();
        if (static_cast<int>(tc_.commodity.size()) != t || static_cast<int>(tc_.cut.size()) != t) {
            throw std::invalid_argument("integer_lam2: terminal vectors differ in length");
        }
        int k = 0;
        for (int c : tc_.commodity) k = std::max(k, c + 1);
        members_.assign(k, {});
        for (int i = 0; i < t; ++i) members_[tc_.commodity[i]].push_back(i);
        for (int i = 0; i < t; ++i) {
            if (tc_.cut[i].universe() != g_.num_vertices()) throw std::invalid_argument("integer_lam2: cut over wrong universe");
            if (!tc_.cut[i].contains(tc_.root[i])) {
                throw std::invalid_argument("integer_lam2: terminal " + std::to_string(i) + " lies outside its cut");
            }
            for (int j : members_[tc_.commodity[i]]) {
                if (j == i || !tc_.cut[i].contains(tc_.root[j])) continue;
                if (strict || tc_.cut[j].contains(tc_.root[i])) {
                    throw std::invalid_argument("integer_lam2: cut of terminal " + std::to_string(i) +
                                                " contains another terminal of its commodity");
                }
            }
        }
        input_load_ = loads(tc_.cut);
    }

    TerminalCuts run() {
        const long t = tc_.size();
        const long cap = 8 * t * t + 1000;
        long iterations = 0;
        for (;;) {
            if (++iterations > cap) throw BudgetExceeded("integer_lam2 uncrossing exceeded its step limit");
            if (step_one()) continue;
            if (blue_cycle_step()) continue;
            break;
        }
        auto after = loads(tc_.cut);
        for (EdgeId e = 0; e < g_.num_edges(); ++e) {
            ensure(after[e] <= input_load_[e], "integer_lam2 uncrossing increased the load on edge " + std::to_string(e));
        }
        peel();
        check_output();
        return std::move(tc_);
    }

private:
    const VertexSet& C(int i) const { return tc_.cut[i]; }
    Vertex r(int i) const { return tc_.root[i]; }

    std::vector<long> loads(const std::vector<VertexSet>& cuts) const {
        std::vector<long> out(g_.num_edges(), 0);
        for (const auto& c : cuts) {
            for (EdgeId e = 0; e < g_.num_edges(); ++e) {
                if (in_boundary(c, g_.edge(e))) ++out[e];
            }
        }
        return out;
    }

    // Replaces the cuts of `who` (all at once, computed from the old sets)
    // and checks the invariants every rule must keep: roots stay inside, no
    // edge is crossed by more of the new cuts than of the old ones, the
    // number of crossing pairs drops, and two terminals of one commodity
    // never share both of their vertices.
    void replace(const std::vector<int>& who, std::vector<VertexSet> fresh, const char* rule) {
        std::vector<bool> changed(tc_.size(), false);
        for (int i : who) changed[i] = true;
        auto crossing_count = [&]() {
            long total = 0;
            for (std::size_t x = 0; x < who.size(); ++x) {
                for (int y = 0; y < tc_.size(); ++y) {
                    if (changed[y] && y <= who[x]) continue;
                    if (crosses(C(who[x]), C(y))) ++total;
                }
            }
            return total;
        };
        long before = crossing_count();
        std::vector<long> old_load(g_.num_edges(), 0);
        for (int i : who) {
            for (EdgeId e = 0; e < g_.num_edges(); ++e) old_load[e] += in_boundary(C(i), g_.edge(e));
        }
        for (std::size_t x = 0; x < who.size(); ++x) tc_.cut[who[x]] = std::move(fresh[x]);
        long after = crossing_count();
        std::string where = std::string("integer_lam2 rule ") + rule;
        for (int i : who) {
            ensure(C(i).contains(r(i)), where + " dropped the vertex of terminal " + std::to_string(i));
            for (int j : members_[tc_.commodity[i]]) {
                if (j != i) {
                    ensure(!(C(i).contains(r(j)) && C(j).contains(r(i))),
                           where + " let terminals " + std::to_string(i) + " and " + std::to_string(j) +
                               " of one commodity both reach each other");
                }
            }
        }
        for (EdgeId e = 0; e < g_.num_edges(); ++e) {
            long now = 0;
            for (int i : who) now += in_boundary(C(i), g_.edge(e));
            ensure(now <= old_load[e], where + " increased the load on edge " + std::to_string(e));
        }
        ensure(after < before, where + " did not reduce the number of crossing pairs");
    }

    bool step_one() {
        const int t = tc_.size();
        // (a) roots on their own sides: take the differences.
        for (int i = 0; i < t; ++i) {
            for (int j = i + 1; j < t; ++j) {
                if (!crosses(C(i), C(j)) || C(j).contains(r(i)) || C(i).contains(r(j))) continue;
                replace({i, j}, {C(i) - C(j), C(j) - C(i)}, "disjoint-roots");
                ++stats_->rule_disjoint;
                return true;
            }
        }
        // (a') three terminals whose vertices sit pairwise in the
        // intersections of consecutive cuts: a 3-cycle of the relation
        // Q(x, y) = r_x in C_y and r_y not in C_x.
        BitMatrix q_out(t), q_in(t);
        for (int x = 0; x < t; ++x) {
            for (int y = 0; y < t; ++y) {
                if (x != y && C(y).contains(r(x)) && !C(x).contains(r(y))) {
                    q_out.set(x, y);
                    q_in.set(y, x);
                }
            }
        }
        for (int i1 = 0; i1 < t; ++i1) {
            for (int i2 = 0; i2 < t; ++i2) {
                if (!q_out.get(i1, i2)) continue;
                const std::uint64_t* a = q_out.row(i2);
                const std::uint64_t* b = q_in.row(i1);
                for (int w = 0; w < q_out.words(); ++w) {
                    std::uint64_t both = a[w] & b[w];
                    if (both == 0) continue;
                    int i3 = w * 64 + __builtin_ctzll(both);
                    // Each terminal keeps the part of its intersection
                    // outside the third cut; plain intersections can
                    // load an edge from a vertex in all three cuts.
                    replace({i1, i2, i3}, {(C(i1) & C(i2)) - C(i3), (C(i2) & C(i3)) - C(i1), (C(i3) & C(i1)) - C(i2)},
                            "three-cycle");
                    ++stats_->rule_triangle;
                    return true;
                }
            }
        }
        // (b) same commodity, one root inside both cuts.
        for (const auto& group : members_) {
            for (std::size_t x = 0; x < group.size(); ++x) {
                for (std::size_t y = x + 1; y < group.size(); ++y) {
                    int i = group[x], j = group[y];
                    if (!crosses(C(i), C(j))) continue;
                    bool i_in_j = C(j).contains(r(i));
                    bool j_in_i = C(i).contains(r(j));
                    if (i_in_j == j_in_i) continue;
                    if (!i_in_j) std::swap(i, j);
                    replace({i, j}, {C(i) & C(j), C(i) | C(j)}, "same-commodity");
                    ++stats_->rule_same_commodity;
                    return true;
                }
            }
        }
        // (c) different commodities, both roots inside both cuts.
        for (int i = 0; i < t; ++i) {
            for (int j = i + 1; j < t; ++j) {
                if (tc_.commodity[i] == tc_.commodity[j] || !crosses(C(i), C(j))) continue;
                if (!C(j).contains(r(i)) || !C(i).contains(r(j))) continue;
                apply_both_inside(i, j);
                return true;
            }
        }
        return false;
    }

    // Terminals of i's commodity sitting in `other` whose cuts strictly
    // contain C_i, innermost first.
    std::vector<int> enclosing_chain(int i, const VertexSet& other) const {
        std::vector<int> chain;
        for (int x : members_[tc_.commodity[i]]) {
            if (x != i && other.contains(r(x)) && C(i).is_proper_subset_of(C(x))) chain.push_back(x);
        }
        std::sort(chain.begin(), chain.end(), [&](int x, int y) {
            if (C(x).size() != C(y).size()) return C(x).size() < C(y).size();
            return x < y;
        });
        for (std::size_t z = 0; z + 1 < chain.size(); ++z) {
            ensure(C(chain[z]).is_proper_subset_of(C(chain[z + 1])), "enclosing cuts of one commodity are not nested");
        }
        return chain;
    }

    void apply_both_inside(int i, int j) {
        auto chain_i = enclosing_chain(i, C(j));
        if (chain_i.empty()) {
            replace({i, j}, {C(i) | C(j), C(i) & C(j)}, "both-inside");
            ++stats_->rule_both_inside;
            return;
        }
        auto chain_j = enclosing_chain(j, C(i));
        if (chain_j.empty()) {
            replace({i, j}, {C(i) & C(j), C(i) | C(j)}, "both-inside");
            ++stats_->rule_both_inside;
            return;
        }
        // Chain rule: i_0 = i, i_1..i_x the enclosing chain; likewise for j.
        std::vector<int> who;
        std::vector<VertexSet> fresh;
        auto rewrite = [&](int head, const std::vector<int>& rest, const VertexSet& other) {
            std::vector<int> seq{head};
            seq.insert(seq.end(), rest.begin(), rest.end());
            const std::size_t x = seq.size() - 1;
            for (std::size_t s = 0; s + 2 <= x; ++s) {
                who.push_back(seq[s]);
                fresh.push_back((C(seq[s + 1]) - other) | C(seq[s]));
            }
            who.push_back(seq[x - 1]);
            fresh.push_back(C(seq[x]) | other);
            who.push_back(seq[x]);
            fresh.push_back((C(seq[x]) & other) - C(seq[x - 1]));
        };
        VertexSet ci = C(i), cj = C(j);
        rewrite(i, chain_i, cj);
        rewrite(j, chain_j, ci);
        replace(who, std::move(fresh), "chain");
        ++stats_->rule_chain;
    }

    bool blue(int i, int j) const {
        return i != j && C(i).contains(r(j)) && !C(j).contains(r(i)) && !C(j).is_subset_of(C(i));
    }
    bool red(int i, int j) const { return i != j && C(j).is_proper_subset_of(C(i)); }

    // Shortest directed blue cycle; among equally short ones the one found
    // from the lowest starting terminal.
    bool blue_cycle_step() {
        const int t = tc_.size();
        std::vector<std::vector<int>> out(t);
        for (int i = 0; i < t; ++i) {
            for (int j = 0; j < t; ++j) {
                if (blue(i, j)) out[i].push_back(j);
            }
        }
        std::vector<int> best;
        std::vector<int> dist(t), parent(t);
        for (int s = 0; s < t; ++s) {
            std::fill(dist.begin(), dist.end(), -1);
            std::deque<int> queue{s};
            dist[s] = 0;
            int closing = -1;
            while (!queue.empty() && closing < 0) {
                int u = queue.front();
                queue.pop_front();
                if (!best.empty() && dist[u] + 1 >= static_cast<int>(best.size())) break;
                for (int v : out[u]) {
                    if (v == s) {
                        closing = u;
                        break;
                    }
                    if (dist[v] < 0) {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if (closing < 0) continue;
            std::vector<int> cycle;
            for (int u = closing; u != s; u = parent[u]) cycle.push_back(u);
            cycle.push_back(s);
            std::reverse(cycle.begin(), cycle.end());
            if (best.empty() || cycle.size() < best.size()) best = std::move(cycle);
        }
        if (best.empty()) return false;
        const std::size_t x = best.size();
        std::vector<VertexSet> fresh;
        for (std::size_t z = 0; z < x; ++z) fresh.push_back(C(best[z]) & C(best[(z + x - 1) % x]));
        replace(best, std::move(fresh), "blue-cycle");
        ++stats_->blue_cycles;
        return true;
    }

    void peel() {
        const int t = tc_.size();
        const int m = g_.num_edges();
        std::vector<std::vector<int>> out(t);
        std::vector<int> indegree(t, 0);
        std::vector<int> comp(t);
        std::iota(comp.begin(), comp.end(), 0);
        auto find = [&](int v) {
            while (comp[v] != v) v = comp[v] = comp[comp[v]];
            return v;
        };
        for (int i = 0; i < t; ++i) {
            for (int j = 0; j < t; ++j) {
                if (i == j) continue;
                // Red uses a strict-subset test; equal cuts of different
                // terminals are linked red from the lower id to the higher.
                bool is_red = red(i, j) || (C(i) == C(j) && i < j);
                if (is_red || blue(i, j)) {
                    out[i].push_back(j);
                    ++indegree[j];
                    comp[find(i)] = find(j);
                } else if (i < j && crosses(C(i), C(j)) && !blue(j, i)) {
                    throw InvariantViolation("integer_lam2: crossing pair left without a red or blue edge");
                }
            }
        }
        {
            std::vector<int> deg = indegree;
            std::vector<int> queue;
            for (int i = 0; i < t; ++i) {
                if (deg[i] == 0) queue.push_back(i);
            }
            std::size_t seen = 0;
            while (seen < queue.size()) {
                int u = queue[seen++];
                for (int v : out[u]) {
                    if (--deg[v] == 0) queue.push_back(v);
                }
            }
            ensure(seen == static_cast<std::size_t>(t), "integer_lam2: red/blue conflict graph has a cycle");
        }

        std::map<int, std::vector<int>> components;
        for (int i = 0; i < t; ++i) components[find(i)].push_back(i);
        std::vector<std::vector<int>> ordered;
        for (auto& [rep, group] : components) ordered.push_back(group);
        std::sort(ordered.begin(), ordered.end());

        std::vector<VertexSet> result = tc_.cut;
        for (const auto& group : ordered) {
            if (group.size() < 2) continue;
            std::vector<long> p(m, 0);
            for (int i : group) {
                for (EdgeId e = 0; e < m; ++e) p[e] += 2 * in_boundary(C(i), g_.edge(e));
            }
            std::vector<bool> alive(t, false);
            for (int i : group) alive[i] = true;
            for (std::size_t left = group.size(); left > 0; --left) {
                int leaf = -1;
                for (int i : group) {
                    if (!alive[i]) continue;
                    bool has_out = false;
                    for (int j : out[i]) {
                        if (alive[j]) {
                            has_out = true;
                            break;
                        }
                    }
                    if (!has_out) {
                        leaf = i;
                        break;
                    }
                }
                ensure(leaf >= 0, "integer_lam2: no leaf terminal left to peel");
                VertexSet meta = zero_capacity_component(p, r(leaf));
                ensure(meta.is_subset_of(C(leaf)), "integer_lam2: peeled meta-node leaves the terminal's cut");
                for (EdgeId e = 0; e < m; ++e) {
                    if (in_boundary(meta, g_.edge(e))) {
                        ensure(p[e] >= 1, "integer_lam2: peeling through an exhausted edge");
                        --p[e];
                    }
                }
                result[leaf] = std::move(meta);
                alive[leaf] = false;
                ++stats_->peeled;
            }
        }
        tc_.cut = std::move(result);
    }

    VertexSet zero_capacity_component(const std::vector<long>& p, Vertex start) const {
        VertexSet seen(g_.num_vertices());
        std::vector<Vertex> stack{start};
        seen.insert(start);
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (EdgeId e : g_.incident(u)) {
                if (p[e] != 0) continue;
                Vertex v = g_.other(e, u);
                if (!seen.contains(v)) {
                    seen.insert(v);
                    stack.push_back(v);
                }
            }
        }
        return seen;
    }

    void check_output() const {
        const int t = tc_.size();
        for (int i = 0; i < t; ++i) {
            ensure(C(i).contains(r(i)), "integer_lam2 output misses a terminal");
            for (int j = i + 1; j < t; ++j) {
                ensure(!crosses(C(i), C(j)), "integer_lam2 output is not laminar");
            }
        }
        for (const auto& group : members_) {
            for (std::size_t x = 0; x < group.size(); ++x) {
                for (std::size_t y = x + 1; y < group.size(); ++y) {
                    int i = group[x], j = group[y];
                    ensure(!C(i).contains(r(j)) || !C(j).contains(r(i)),
                           "integer_lam2 output leaves a same-commodity pair unseparated");
                }
            }
        }
        auto after = loads(tc_.cut);
        for (EdgeId e = 0; e < g_.num_edges(); ++e) {
            ensure(after[e] <= 2 * input_load_[e], "integer_lam2 output more than doubles the load on an edge");
        }
    }

    const Graph& g_;
    TerminalCuts tc_;
    IntegerLam2Stats local_stats_;
    IntegerLam2Stats* stats_;
    std::vector<std::vector<int>> members_;
    std::vector<long> input_load_;
};

} // namespace detail

/// Turns one cut per terminal (each containing its own terminal and no other
/// terminal of its commodity) into a laminar family in which every
/// same-commodity pair is separated by one of its two cuts, with at most
/// twice the input load on every edge.
inline TerminalCuts integer_lam2(const Graph& g, TerminalCuts input, IntegerLam2Stats* stats = nullptr) {
    return detail::IntegerLam2(g, std::move(input), stats).run();
}

/// Cut-inclusion order: i dominates j when O_i is a proper subset of O_j,
/// O being the outermost cut; equal outermost cuts are ordered by id.
class CutInclusionOrder {
public:
    explicit CutInclusionOrder(const FractionalLaminarFamily& fam) {
        for (const auto& c : fam.cuts) {
            auto it = outer_.find(c.owner);
            if (it == outer_.end()) {
                outer_.emplace(c.owner, c.cut);
            } else if (it->second.is_subset_of(c.cut)) {
                it->second = c.cut;
            }
        }
    }
    const VertexSet& outermost(TerminalId t) const { return outer_.at(t); }
    bool dominates(TerminalId i, TerminalId j) const {
        if (i == j) return false;
        const auto& oi = outer_.at(i);
        const auto& oj = outer_.at(j);
        if (oi == oj) return i < j;
        return oi.is_proper_subset_of(oj);
    }

private:
    std::map<TerminalId, VertexSet> outer_;
};

inline CutInclusionOrder cut_inclusion_order(const FractionalLaminarFamily& fam) { return CutInclusionOrder(fam); }

/// Reassigns cuts so that whenever i dominates j and cuts C_i, C_j both hold
/// r_i and r_j, C_i is inside C_j. A violating pair has C_j strictly inside
/// C_i; equal-weight portions of the two cuts swap owners. The order is
/// recomputed after every swap.
inline FractionalLaminarFamily inclusion_invariant_preprocess(FractionalLaminarFamily fam, const Instance& inst,
                                                              long* swaps = nullptr) {
    fam.canonicalize();
    const long cap = 64L * static_cast<long>(fam.cuts.size() + 4) * static_cast<long>(fam.cuts.size() + 4) *
                     static_cast<long>(inst.num_terminals() + 1);
    long count = 0;
    for (;;) {
        CutInclusionOrder ci(fam);
        std::optional<std::pair<std::size_t, std::size_t>> hit;
        for (std::size_t x = 0; x < fam.cuts.size() && !hit; ++x) {
            for (std::size_t y = 0; y < fam.cuts.size(); ++y) {
                const auto& a = fam.cuts[x];
                const auto& b = fam.cuts[y];
                if (a.owner == b.owner || !ci.dominates(a.owner, b.owner)) continue;
                Vertex ri = inst.root(a.owner), rj = inst.root(b.owner);
                if (!(a.cut.contains(ri) && a.cut.contains(rj) && b.cut.contains(ri) && b.cut.contains(rj))) continue;
                if (a.cut.is_subset_of(b.cut)) continue;
                ensure(b.cut.is_proper_subset_of(a.cut), "inclusion preprocessing on a non-laminar family");
                hit = std::make_pair(x, y);
                break;
            }
        }
        if (!hit) break;
        if (++count > cap) throw BudgetExceeded("inclusion invariant preprocessing exceeded its step limit");
        auto [x, y] = *hit;
        WeightedCut a = fam.cuts[x];
        WeightedCut b = fam.cuts[y];
        Rational w = std::min(a.weight, b.weight);
        fam.cuts[x].weight -= w;
        fam.cuts[y].weight -= w;
        fam.cuts.push_back({b.cut, w, a.owner});
        fam.cuts.push_back({a.cut, w, b.owner});
        fam.canonicalize();
    }
    if (swaps) *swaps = count;
    return fam;
}

struct Lam2Stats {
    long grid = 0;
    int copies_terminals = 0;
    IntegerLam2Stats integer;
};

/// Lam-2 for general instances: ball cuts of radius 1/2 quantized to 1/D^2,
/// one copy of every commodity per unit cut (copy c takes the c-th innermost
/// unit cut of each terminal), laminarized by integer_lam2, and for every
/// terminal the D^2/2 innermost resulting cuts kept at weight 2/D^2.
/// Feasible for capacities 4(2 lambda c_e + 1/D) when the quantization adds
/// at most 1/D to any edge.
inline FractionalLaminarFamily lam2(const Instance& inst, const MetricSolution& metric, long grid_param,
                                    Lam2Stats* stats = nullptr) {
    if (grid_param < 2 || grid_param % 2 != 0) throw std::invalid_argument("lam2 grid parameter must be even and >= 2");
    const Graph& g = inst.graph();
    const long units = grid_param * grid_param;
    auto raw = ball_cuts(inst, metric, Rational(1, 2), false);
    for (const auto& c : raw) {
        for (TerminalId other : inst.commodity_terminals(inst.terminal(c.owner).commodity)) {
            ensure(other == c.owner || !c.cut.contains(inst.root(other)),
                   "half-radius ball reaches another terminal of its commodity");
        }
    }
    auto q = quantize(raw, units);
    std::map<TerminalId, std::vector<VertexSet>> unit_cuts;
    for (const auto& c : q.expand()) unit_cuts[c.owner].push_back(c.cut);

    TerminalCuts tc;
    std::vector<TerminalId> origin;
    for (int a = 0; a < inst.num_commodities(); ++a) {
        for (long copy = 0; copy < units; ++copy) {
            for (TerminalId t : inst.commodity_terminals(a)) {
                tc.root.push_back(inst.root(t));
                tc.commodity.push_back(static_cast<int>(a * units + copy));
                tc.cut.push_back(unit_cuts.at(t).at(copy));
                origin.push_back(t);
            }
        }
    }
    Lam2Stats local;
    Lam2Stats* st = stats ? stats : &local;
    st->grid = grid_param;
    st->copies_terminals = tc.size();
    auto laminar = integer_lam2(g, std::move(tc), &st->integer);

    std::map<TerminalId, std::vector<VertexSet>> per_terminal;
    for (int x = 0; x < laminar.size(); ++x) per_terminal[origin[x]].push_back(laminar.cut[x]);
    FractionalLaminarFamily fam;
    Rational w(2, units);
    w.canonicalize();
    for (auto& [t, sets] : per_terminal) {
        std::sort(sets.begin(), sets.end(), [](const VertexSet& x, const VertexSet& y) { return x.size() < y.size(); });
        for (std::size_t z = 0; z + 1 < sets.size(); ++z) {
            ensure(sets[z].is_subset_of(sets[z + 1]), "copies of one terminal are not nested after laminarization");
        }
        for (long z = 0; z < units / 2; ++z) fam.cuts.push_back({sets[z], w, t});
    }
    fam.canonicalize();
    return fam;
}

} // namespace cutpack
