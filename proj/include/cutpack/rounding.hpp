#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/laminar.hpp"
#include "cutpack/rational.hpp"
#include "cutpack/vertex_set.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace cutpack {

/// Union-find over vertices that remembers when each merge happened, so
/// the meta-node of a vertex can be recovered for any earlier iteration.
class MetaNodeHistory {
public:
    explicit MetaNodeHistory(int n) : n_(n), parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int num_vertices() const { return n_; }

    bool merge(Vertex u, Vertex v, int iteration) {
        Vertex a = find(parent_, u), b = find(parent_, v);
        if (a == b) return false;
        parent_[a] = b;
        events_.push_back({iteration, u, v});
        return true;
    }

    bool same(Vertex u, Vertex v) const { return find(parent_, u) == find(parent_, v); }

    VertexSet members(Vertex v) const { return collect(parent_, v); }

    /// Meta-node of v as it was before any merge of `iteration` or later.
    VertexSet members_before(Vertex v, int iteration) const { return collect(replay(iteration), v); }

    /// Iteration in which u and v first shared a meta-node (nullopt if they
    /// never did; -1 if u == v).
    std::optional<int> joined_at(Vertex u, Vertex v) const {
        if (u == v) return -1;
        std::vector<Vertex> p(n_);
        std::iota(p.begin(), p.end(), 0);
        for (const auto& ev : events_) {
            Vertex a = find(p, ev.u), b = find(p, ev.v);
            if (a != b) p[a] = b;
            if (find(p, u) == find(p, v)) return ev.iteration;
        }
        return std::nullopt;
    }

private:
    struct Event {
        int iteration;
        Vertex u, v;
    };

    static Vertex find(const std::vector<Vertex>& p, Vertex v) {
        while (p[v] != v) v = p[v];
        return v;
    }

    std::vector<Vertex> replay(int iteration) const {
        std::vector<Vertex> p(n_);
        std::iota(p.begin(), p.end(), 0);
        for (const auto& ev : events_) {
            if (ev.iteration >= iteration) break;
            Vertex a = find(p, ev.u), b = find(p, ev.v);
            if (a != b) p[a] = b;
        }
        return p;
    }

    VertexSet collect(const std::vector<Vertex>& p, Vertex v) const {
        VertexSet out(n_);
        Vertex root = find(p, v);
        for (Vertex x = 0; x < n_; ++x) {
            if (find(p, x) == root) out.insert(x);
        }
        return out;
    }

    int n_;
    std::vector<Vertex> parent_;
    std::vector<Event> events_;
};

/// Total weight of the cuts containing v.
inline Rational depth(Vertex v, const std::vector<WeightedCut>& cuts) {
    Rational d = 0;
    for (const auto& c : cuts) {
        if (c.cut.contains(v)) d += c.weight;
    }
    return d;
}

inline Rational depth(Vertex v, const FractionalLaminarFamily& family) { return depth(v, family.cuts); }

/// Takes the innermost cuts of `chain` (indices into `cuts`, innermost
/// first) up to total weight exactly x. When the last cut is only partly
/// needed it is split in place: the remainder keeps its index and the taken
/// part is appended to `cuts`. Returns the indices of the taken pieces.
inline std::vector<std::size_t> innermost_slice(std::vector<WeightedCut>& cuts, const std::vector<std::size_t>& chain,
                                                const Rational& x) {
    std::vector<std::size_t> taken;
    Rational need = x;
    for (std::size_t idx : chain) {
        if (need <= 0) break;
        if (cuts[idx].weight <= need) {
            need -= cuts[idx].weight;
            taken.push_back(idx);
        } else {
            cuts[idx].weight -= need;
            cuts.push_back({cuts[idx].cut, need, cuts[idx].owner});
            taken.push_back(cuts.size() - 1);
            need = 0;
        }
    }
    ensure(need == 0, "innermost slice asks for more weight than the chain holds");
    return taken;
}

struct RoundStats {
    int iterations = 0;
    int reassigned = 0;
    int defaults = 0;
    int contracted = 0;
    long invariant_checks = 0;
};

namespace detail {

inline std::vector<Rational> rational_capacities(const std::vector<long>& caps) {
    return std::vector<Rational>(caps.begin(), caps.end());
}

inline void check_capacities(const Graph& g, const std::vector<long>& caps) {
    if (static_cast<int>(caps.size()) != g.num_edges()) {
        throw std::invalid_argument("capacity vector has " + std::to_string(caps.size()) + " entries for " +
                                    std::to_string(g.num_edges()) + " edges");
    }
    for (std::size_t e = 0; e < caps.size(); ++e) {
        if (caps[e] < 1) throw std::invalid_argument("capacity of edge " + std::to_string(e) + " is not positive");
    }
}

/// The live part of a fractional family while a rounder runs. Removed cuts
/// get weight zero and are skipped.
struct Working {
    const Graph& g;
    std::vector<WeightedCut> cuts;

    Working(const Graph& graph, std::vector<WeightedCut> c) : g(graph), cuts(std::move(c)) {}

    bool live(std::size_t x) const { return cuts[x].weight > 0; }

    std::vector<Rational> load() const {
        std::vector<Rational> out(g.num_edges(), Rational(0));
        for (const auto& c : cuts) {
            if (c.weight == 0) continue;
            for (EdgeId e = 0; e < g.num_edges(); ++e) {
                if (in_boundary(c.cut, g.edge(e))) out[e] += c.weight;
            }
        }
        return out;
    }

    Rational depth_of(Vertex v) const { return depth(v, cuts); }

    std::vector<std::size_t> owned_by(TerminalId t) const {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < cuts.size(); ++x) {
            if (live(x) && cuts[x].owner == t) out.push_back(x);
        }
        sort_inner_first(out, t);
        return out;
    }

    // Live cuts containing v, innermost first. Equal sets: the cut of
    // `favoured` first, then by owner id.
    std::vector<std::size_t> containing(Vertex v, TerminalId favoured) const {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < cuts.size(); ++x) {
            if (live(x) && cuts[x].cut.contains(v)) out.push_back(x);
        }
        sort_inner_first(out, favoured);
        return out;
    }

    void sort_inner_first(std::vector<std::size_t>& xs, TerminalId favoured) const {
        std::stable_sort(xs.begin(), xs.end(), [&](std::size_t a, std::size_t b) {
            const auto& ca = cuts[a];
            const auto& cb = cuts[b];
            if (ca.cut.size() != cb.cut.size()) return ca.cut.size() < cb.cut.size();
            if ((ca.owner == favoured) != (cb.owner == favoured)) return ca.owner == favoured;
            return ca.owner < cb.owner;
        });
    }

    FractionalLaminarFamily family() const {
        FractionalLaminarFamily f;
        for (const auto& c : cuts) {
            if (c.weight > 0) f.cuts.push_back(c);
        }
        return f;
    }

    void compact() {
        cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [](const WeightedCut& c) { return c.weight == 0; }),
                   cuts.end());
    }
};

inline std::vector<long> integral_load(const Graph& g, const std::vector<VertexSet>& assigned) {
    std::vector<long> out(g.num_edges(), 0);
    for (const auto& a : assigned) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) out[e] += in_boundary(a, g.edge(e));
    }
    return out;
}

inline std::string edge_name(const Graph& g, EdgeId e) {
    return "edge " + std::to_string(e) + " (" + std::to_string(g.edge(e).u) + "," + std::to_string(g.edge(e).v) + ")";
}

} // namespace detail

/// Round-1 for common-sink instances: repeatedly assign the deepest
/// terminal its current meta-node, pay with the innermost unit weight of
/// cuts around it, hand freed cuts of that terminal to the owners of the
/// other cuts used, and contract edges whose fractional load reaches 0.
/// Loads end within capacity + 1.
inline IntegralCutFamily round1(const Instance& inst, const std::vector<long>& capacities,
                                const FractionalLaminarFamily& family, RoundStats* stats = nullptr) {
    if (!inst.has_sink()) throw std::invalid_argument("round1 needs a common-sink instance");
    const Graph& g = inst.graph();
    detail::check_capacities(g, capacities);
    auto report = verify_fractional_feasible(family, inst, detail::rational_capacities(capacities), Mode::Cscp);
    if (!report.ok) throw std::invalid_argument("round1 input is not feasible: " + report.clause + ": " + report.witness);
    const Vertex sink = *inst.sink();
    const int m = g.num_edges();

    RoundStats local;
    RoundStats& st = stats ? *stats : local;
    detail::Working w(g, family.cuts);
    MetaNodeHistory meta(g.num_vertices());
    std::vector<TerminalId> remaining = inst.cut_terminals(true);
    std::vector<VertexSet> assigned;
    std::vector<bool> contracted(m, false);
    IntegralCutFamily out;

    for (int iteration = 0; !remaining.empty(); ++iteration) {
        ++st.iterations;
        // Deepest terminal, lowest id among ties.
        std::size_t pick = 0;
        Rational best = -1;
        for (std::size_t x = 0; x < remaining.size(); ++x) {
            Rational d = w.depth_of(inst.root(remaining[x]));
            if (d > best) {
                best = d;
                pick = x;
            }
        }
        const TerminalId i = remaining[pick];
        remaining.erase(remaining.begin() + static_cast<long>(pick));
        const Vertex ri = inst.root(i);

        VertexSet a = meta.members(ri);
        for (std::size_t x : w.owned_by(i)) {
            ensure(a.is_subset_of(w.cuts[x].cut), "round1: meta-node of terminal " + std::to_string(i) +
                                                      " is not inside its cut " + describe(w.cuts[x].cut));
        }
        ensure(!a.contains(sink), "round1: assigned cut contains the sink");
        for (EdgeId e = 0; e < m; ++e) {
            if (contracted[e] && in_boundary(a, g.edge(e))) {
                throw InvariantViolation("round1: contracted " + detail::edge_name(g, e) + " loaded again");
            }
        }
        assigned.push_back(a);
        out.assignment.emplace(i, Cut(a));

        auto k = w.containing(ri, i);
        k = innermost_slice(w.cuts, k, Rational(1));
        std::vector<std::size_t> others;
        for (std::size_t x : k) {
            if (w.cuts[x].owner == i) {
                w.cuts[x].weight = 0;
            } else {
                others.push_back(x);
            }
        }
        for (std::size_t x : others) {
            TerminalId j = w.cuts[x].owner;
            Rational weight = w.cuts[x].weight;
            w.cuts[x].weight = 0;
            auto mine = w.owned_by(i);
            for (std::size_t y : innermost_slice(w.cuts, mine, weight)) {
                ensure(w.cuts[y].cut.contains(inst.root(j)), "round1: reassigned cut misses its new terminal");
                w.cuts[y].owner = j;
            }
            ++st.reassigned;
        }
        ensure(w.owned_by(i).empty(), "round1: terminal " + std::to_string(i) + " kept fractional cuts");
        w.compact();

        auto frac = w.load();
        for (EdgeId e = 0; e < m; ++e) {
            if (frac[e] == 0 && !contracted[e]) {
                contracted[e] = true;
                meta.merge(g.edge(e).u, g.edge(e).v, iteration);
                ++st.contracted;
            }
        }

        // Running invariants on every edge.
        auto integral = detail::integral_load(g, assigned);
        for (EdgeId e = 0; e < m; ++e) {
            ++st.invariant_checks;
            const long c = capacities[e];
            const long la = integral[e];
            const auto where = "round1: " + detail::edge_name(g, e);
            if (la <= c - 1) {
                ensure(la + frac[e] <= c, where + " has integral plus fractional load above capacity");
            } else if (la == c) {
                ensure(frac[e] <= 1, where + " at capacity still carries fractional load above 1");
                const Edge& ed = g.edge(e);
                bool from_u = false, from_v = false;
                for (const auto& cut : w.cuts) {
                    if (!in_boundary(cut.cut, ed)) continue;
                    (cut.cut.contains(ed.u) ? from_u : from_v) = true;
                }
                ensure(!(from_u && from_v), where + " at capacity is crossed from both sides");
            } else {
                ensure(la == c + 1, where + " exceeds capacity + 1");
                ensure(frac[e] == 0, where + " above capacity still carries fractional load");
            }
        }
        for (TerminalId j : remaining) {
            ensure(w.family().total_weight(j) == 1, "round1: terminal " + std::to_string(j) + " lost weight");
        }
        for (const auto& cut : w.cuts) {
            ensure(cut.cut.contains(inst.root(cut.owner)) && !cut.cut.contains(sink),
                   "round1: working family lost a terminal or gained the sink");
        }
    }
    return out;
}

/// Round-2 for general instances. After the inclusion-invariant
/// preprocessing, repeatedly take the deepest terminal not dominated in the
/// cut-inclusion order among the deepest. It gets its meta-node unless
/// that would load an edge already 2 over capacity, in which case it gets
/// the meta-node of its vertex from just before the first endpoint of such
/// an edge joined it. The other owners' cuts in the innermost unit weight
/// around it lose the meta-node. Loads end within capacity + 3.
inline IntegralCutFamily round2(const Instance& inst, const std::vector<long>& capacities,
                                const FractionalLaminarFamily& family, RoundStats* stats = nullptr) {
    const Graph& g = inst.graph();
    detail::check_capacities(g, capacities);
    auto report = verify_fractional_feasible(family, inst, detail::rational_capacities(capacities), Mode::Mcp);
    if (!report.ok) throw std::invalid_argument("round2 input is not feasible: " + report.clause + ": " + report.witness);
    const int m = g.num_edges();

    RoundStats local;
    RoundStats& st = stats ? *stats : local;
    detail::Working w(g, inclusion_invariant_preprocess(family, inst).cuts);
    MetaNodeHistory meta(g.num_vertices());
    std::vector<TerminalId> remaining = inst.cut_terminals(false);
    std::vector<VertexSet> assigned;
    IntegralCutFamily out;

    // Edge classes, in the only order an edge may move through them.
    enum Class { XMinus = 0, X0 = 1, X1 = 2, Y = 3, Z = 4 };
    std::vector<int> cls(m, XMinus);
    std::vector<int> z_loads(m, 0);

    for (int iteration = 0; !remaining.empty(); ++iteration) {
        ++st.iterations;
        Rational best = -1;
        for (TerminalId t : remaining) best = std::max(best, w.depth_of(inst.root(t)));
        std::vector<TerminalId> deepest;
        for (TerminalId t : remaining) {
            if (w.depth_of(inst.root(t)) == best) deepest.push_back(t);
        }
        CutInclusionOrder ci(w.family());
        TerminalId i = -1;
        for (TerminalId t : deepest) {
            bool dominated = false;
            for (TerminalId o : deepest) {
                if (ci.dominates(o, t)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) {
                i = t;
                break;
            }
        }
        ensure(i >= 0, "round2: every deepest terminal is dominated");
        remaining.erase(std::find(remaining.begin(), remaining.end(), i));
        const Vertex ri = inst.root(i);
        const VertexSet mi = meta.members(ri);

        VertexSet a = mi;
        std::vector<EdgeId> defaulted;
        for (EdgeId e = 0; e < m; ++e) {
            if (cls[e] == Y && in_boundary(mi, g.edge(e))) defaulted.push_back(e);
        }
        if (!defaulted.empty()) {
            ++st.defaults;
            std::optional<int> first;
            for (EdgeId e : defaulted) {
                Vertex u = mi.contains(g.edge(e).u) ? g.edge(e).u : g.edge(e).v;
                if (u == ri) {
                    throw InvariantViolation("round2: terminal " + std::to_string(i) + " sits on the endpoint of " +
                                             detail::edge_name(g, e) + " it defaults on");
                }
                auto t = meta.joined_at(u, ri);
                ensure(t.has_value() && *t >= 0, "round2: defaulted endpoint never joined the meta-node");
                if (!first || *t < *first) first = t;
            }
            a = meta.members_before(ri, *first);
        }
        ensure(a.contains(ri), "round2: assigned cut misses its terminal");
        ensure(a.is_subset_of(ci.outermost(i)), "round2: assigned cut leaves the outermost cut of terminal " +
                                                    std::to_string(i));
        for (EdgeId e = 0; e < m; ++e) {
            if (!in_boundary(a, g.edge(e))) continue;
            if (cls[e] == Y) throw InvariantViolation("round2: " + detail::edge_name(g, e) + " in Y was loaded");
            if (cls[e] == Z && ++z_loads[e] > 1) {
                throw InvariantViolation("round2: contracted " + detail::edge_name(g, e) + " loaded twice");
            }
        }
        assigned.push_back(a);
        out.assignment.emplace(i, Cut(a));

        // Equal sets go in cut-inclusion order so that shrinking never puts
        // a dominated terminal's cut inside a dominating terminal's.
        auto k = w.containing(ri, i);
        std::stable_sort(k.begin(), k.end(), [&](std::size_t a, std::size_t b) {
            const auto& ca = w.cuts[a];
            const auto& cb = w.cuts[b];
            if (ca.cut.size() != cb.cut.size()) return ca.cut.size() < cb.cut.size();
            return ci.dominates(ca.owner, cb.owner);
        });
        k = innermost_slice(w.cuts, k, Rational(1));
        for (std::size_t x : k) {
            if (w.cuts[x].owner == i) continue;
            w.cuts[x].cut = w.cuts[x].cut - mi;
            ensure(w.cuts[x].cut.contains(inst.root(w.cuts[x].owner)),
                   "round2: shrinking a cut of terminal " + std::to_string(w.cuts[x].owner) + " dropped its vertex");
        }
        for (std::size_t x = 0; x < w.cuts.size(); ++x) {
            if (w.cuts[x].owner == i) w.cuts[x].weight = 0;
        }
        w.compact();

        auto frac = w.load();
        auto integral = detail::integral_load(g, assigned);
        for (EdgeId e = 0; e < m; ++e) {
            ++st.invariant_checks;
            const long c = capacities[e];
            int next;
            if (frac[e] == 0) {
                next = Z;
            } else if (cls[e] == Y || integral[e] >= c + 2) {
                next = Y;
            } else if (integral[e] == c + 1) {
                next = X1;
            } else if (integral[e] == c) {
                next = X0;
            } else {
                next = XMinus;
            }
            const auto where = "round2: " + detail::edge_name(g, e);
            ensure(next >= cls[e], where + " moved back to an earlier class");
            if (next == Z && cls[e] != Z) {
                meta.merge(g.edge(e).u, g.edge(e).v, iteration);
                ++st.contracted;
            }
            cls[e] = next;
            if (next == XMinus) ensure(integral[e] + frac[e] <= c, where + " exceeds capacity in total");
            if (next == X0 || next == X1 || next == Y) ensure(frac[e] <= 1, where + " carries fractional load above 1");
            if (next == Y) ensure(integral[e] == c + 2, where + " in Y is not exactly 2 over capacity");
        }
        for (TerminalId j : remaining) {
            ensure(w.family().total_weight(j) == 1, "round2: terminal " + std::to_string(j) + " lost weight");
        }
    }
    for (EdgeId e = 0; e < m; ++e) {
        long la = 0;
        for (const auto& a : assigned) la += in_boundary(a, g.edge(e));
        ensure(la <= capacities[e] + 3, "round2: " + detail::edge_name(g, e) + " ends above capacity + 3");
    }
    return out;
}

} // namespace cutpack
