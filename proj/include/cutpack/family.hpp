#pragma once

#include "cutpack/instance.hpp"
#include "cutpack/rational.hpp"
#include "cutpack/vertex_set.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace cutpack {

struct WeightedCut {
    VertexSet cut;
    Rational weight;
    TerminalId owner = 0;
};

/// Weighted cuts, each owned by one terminal. In a valid family the sets are
/// pairwise non-crossing, every cut contains its owner's vertex and each
/// owner's weights sum to one (see verify_fractional_feasible).
struct FractionalLaminarFamily {
    std::vector<WeightedCut> cuts;

    std::map<TerminalId, std::vector<std::size_t>> by_terminal() const {
        std::map<TerminalId, std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            out[cuts[i].owner].push_back(i);
        }
        return out;
    }

    std::set<TerminalId> terminals() const {
        std::set<TerminalId> out;
        for (const auto& c : cuts) out.insert(c.owner);
        return out;
    }

    Rational total_weight(TerminalId t) const {
        Rational sum = 0;
        for (const auto& c : cuts) {
            if (c.owner == t) sum += c.weight;
        }
        return sum;
    }

    /// Merges entries with equal owner and set, drops zero weights and sorts
    /// by (owner, set) so equal families compare equal.
    void canonicalize() {
        std::sort(cuts.begin(), cuts.end(), [](const WeightedCut& a, const WeightedCut& b) {
            if (a.owner != b.owner) return a.owner < b.owner;
            return a.cut < b.cut;
        });
        std::vector<WeightedCut> merged;
        for (auto& c : cuts) {
            if (c.weight == 0) continue;
            if (!merged.empty() && merged.back().owner == c.owner && merged.back().cut == c.cut) {
                merged.back().weight += c.weight;
            } else {
                merged.push_back(std::move(c));
            }
        }
        cuts = std::move(merged);
    }
};

/// One cut per terminal (terminals may be absent, e.g. common-sink sinks).
struct IntegralCutFamily {
    std::map<TerminalId, Cut> assignment;
};

inline std::vector<Rational> load_vector(const FractionalLaminarFamily& family, const Graph& g) {
    std::vector<Rational> load(g.num_edges(), Rational(0));
    for (const auto& c : family.cuts) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            if (in_boundary(c.cut, g.edge(e))) load[e] += c.weight;
        }
    }
    return load;
}

/// Per-edge count of terminal cuts whose boundary contains the edge.
inline std::vector<long> load_vector(const IntegralCutFamily& family, const Graph& g) {
    std::vector<long> load(g.num_edges(), 0);
    for (const auto& [t, c] : family.assignment) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            if (in_boundary(c.members(), g.edge(e))) ++load[e];
        }
    }
    return load;
}

/// Per-edge count of commodities whose multiway cut (the union of the
/// boundaries of its terminals' cuts) contains the edge.
inline std::vector<long> commodity_load_vector(const IntegralCutFamily& family, const Instance& inst) {
    const Graph& g = inst.graph();
    std::vector<long> load(g.num_edges(), 0);
    for (int a = 0; a < inst.num_commodities(); ++a) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            for (TerminalId t : inst.commodity_terminals(a)) {
                auto it = family.assignment.find(t);
                if (it != family.assignment.end() && in_boundary(it->second.members(), g.edge(e))) {
                    ++load[e];
                    break;
                }
            }
        }
    }
    return load;
}

inline std::string describe(const VertexSet& s) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (Vertex v : s.members()) {
        os << (first ? "" : ",") << v;
        first = false;
    }
    os << "}";
    return os.str();
}

struct FeasibilityReport {
    bool ok = true;
    std::string clause;
    std::string witness;

    static FeasibilityReport failure(std::string clause, std::string witness) {
        return {false, std::move(clause), std::move(witness)};
    }
};

/// Checks the fractional laminar family definition (positive weights, root
/// containment, unit weight per terminal, laminarity) and then feasibility
/// for the instance: terminal coverage, separation (MCP: for each
/// same-commodity pair at least one side's cuts avoid the other's vertex;
/// CSCP: the sink lies in no cut) and per-edge load within `capacities`.
/// Reports the first failed clause.
inline FeasibilityReport verify_fractional_feasible(const FractionalLaminarFamily& family, const Instance& inst,
                                                    const std::vector<Rational>& capacities, Mode mode) {
    const Graph& g = inst.graph();
    if (static_cast<int>(capacities.size()) != g.num_edges()) {
        return FeasibilityReport::failure("capacities", "capacity vector length differs from edge count");
    }
    for (std::size_t i = 0; i < family.cuts.size(); ++i) {
        const auto& c = family.cuts[i];
        if (c.owner < 0 || c.owner >= inst.num_terminals()) {
            return FeasibilityReport::failure("def1-owner", "cut " + std::to_string(i) + " has unknown owner");
        }
        if (c.weight <= 0) {
            return FeasibilityReport::failure("def1-weight", "cut " + std::to_string(i) + " has weight " + to_string(c.weight));
        }
        if (!c.cut.contains(inst.root(c.owner))) {
            return FeasibilityReport::failure("def1-root", "cut " + std::to_string(i) + " " + describe(c.cut) +
                                                               " misses vertex of terminal " + std::to_string(c.owner));
        }
    }
    auto groups = family.by_terminal();
    for (const auto& [t, idx] : groups) {
        Rational sum = 0;
        for (auto i : idx) sum += family.cuts[i].weight;
        if (sum != 1) {
            return FeasibilityReport::failure("def1-unit-weight",
                                              "terminal " + std::to_string(t) + " has total weight " + to_string(sum));
        }
    }
    for (std::size_t i = 0; i < family.cuts.size(); ++i) {
        for (std::size_t j = i + 1; j < family.cuts.size(); ++j) {
            if (crosses(family.cuts[i].cut, family.cuts[j].cut)) {
                return FeasibilityReport::failure("def1-laminar", "cuts " + std::to_string(i) + " and " + std::to_string(j) +
                                                                      " cross");
            }
        }
    }

    const bool cscp = mode == Mode::Cscp;
    if (cscp && !inst.has_sink()) {
        return FeasibilityReport::failure("def2-coverage", "common-sink mode on an instance without a sink");
    }
    std::set<TerminalId> expected;
    for (TerminalId t : inst.cut_terminals(cscp)) expected.insert(t);
    for (TerminalId t : expected) {
        if (!groups.count(t)) {
            return FeasibilityReport::failure("def2-coverage", "terminal " + std::to_string(t) + " has no cuts");
        }
    }
    for (const auto& [t, idx] : groups) {
        if (!expected.count(t)) {
            return FeasibilityReport::failure("def2-coverage", "terminal " + std::to_string(t) + " should have no cuts");
        }
    }

    if (cscp) {
        for (std::size_t i = 0; i < family.cuts.size(); ++i) {
            if (family.cuts[i].cut.contains(*inst.sink())) {
                return FeasibilityReport::failure("def2-sink", "cut " + std::to_string(i) + " contains the sink");
            }
        }
    } else {
        std::map<TerminalId, VertexSet> unions;
        for (const auto& [t, idx] : groups) {
            VertexSet u(g.num_vertices());
            for (auto i : idx) u |= family.cuts[i].cut;
            unions.emplace(t, std::move(u));
        }
        for (int a = 0; a < inst.num_commodities(); ++a) {
            const auto& ts = inst.commodity_terminals(a);
            for (std::size_t x = 0; x < ts.size(); ++x) {
                for (std::size_t y = x + 1; y < ts.size(); ++y) {
                    TerminalId i = ts[x];
                    TerminalId j = ts[y];
                    bool i_avoids = !unions.at(i).contains(inst.root(j));
                    bool j_avoids = !unions.at(j).contains(inst.root(i));
                    if (!i_avoids && !j_avoids) {
                        return FeasibilityReport::failure("def2-separation", "terminals " + std::to_string(i) + " and " +
                                                                                 std::to_string(j) + " reach each other");
                    }
                }
            }
        }
    }

    auto load = load_vector(family, g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (load[e] > capacities[e]) {
            return FeasibilityReport::failure("def2-capacity", "edge " + std::to_string(e) + " load " + to_string(load[e]) +
                                                                   " exceeds " + to_string(capacities[e]));
        }
    }
    return {};
}

struct IntegralReport {
    bool ok = true;
    std::vector<std::string> violations;
    long max_load = 0;
    Rational max_relative_load = 0;
};

/// Every cut contains its terminal; for each same-commodity pair i != j,
/// A_i or A_j holds exactly one of the two vertices.
inline IntegralReport verify_integral_solution(const IntegralCutFamily& family, const Instance& inst) {
    IntegralReport report;
    const Graph& g = inst.graph();
    for (const auto& [t, c] : family.assignment) {
        if (t < 0 || t >= inst.num_terminals()) {
            report.violations.push_back("unknown terminal " + std::to_string(t));
            continue;
        }
        if (c.members().universe() != g.num_vertices()) {
            report.violations.push_back("terminal " + std::to_string(t) + ": cut over wrong vertex universe");
            continue;
        }
        if (!c.contains(inst.root(t))) {
            report.violations.push_back("root: terminal " + std::to_string(t) + " lies outside its own cut");
        }
    }
    if (!report.violations.empty()) {
        report.ok = false;
        return report;
    }
    auto separates = [&](TerminalId owner, TerminalId other) {
        auto it = family.assignment.find(owner);
        if (it == family.assignment.end()) return false;
        return it->second.contains(inst.root(owner)) != it->second.contains(inst.root(other));
    };
    for (int a = 0; a < inst.num_commodities(); ++a) {
        const auto& ts = inst.commodity_terminals(a);
        for (std::size_t x = 0; x < ts.size(); ++x) {
            for (std::size_t y = x + 1; y < ts.size(); ++y) {
                if (!separates(ts[x], ts[y]) && !separates(ts[y], ts[x])) {
                    report.violations.push_back("separation: terminals " + std::to_string(ts[x]) + " and " +
                                                std::to_string(ts[y]) + " are not separated");
                }
            }
        }
    }
    auto load = load_vector(family, g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        report.max_load = std::max(report.max_load, load[e]);
        Rational rel(load[e], g.edge(e).capacity);
        rel.canonicalize();
        if (rel > report.max_relative_load) report.max_relative_load = rel;
    }
    report.ok = report.violations.empty();
    return report;
}

} // namespace cutpack
