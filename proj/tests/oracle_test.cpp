#include "cutpack/generators.hpp"
#include "cutpack/lp.hpp"
#include "cutpack/oracle.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <functional>

using namespace cutpack;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

// Plain enumeration of every colouring and uncut side, for cross-checking
// small cases.
Rational enumerate_all(const Instance& inst, Mode mode) {
    const int n = inst.num_vertices();
    std::vector<std::vector<int>> side(inst.num_commodities(), std::vector<int>(n, -1));
    std::vector<int> uncut(inst.num_commodities(), -1);
    Rational best = -1;
    std::function<void(int, Vertex)> rec = [&](int a, Vertex v) {
        if (a == inst.num_commodities()) {
            IntegralCutFamily fam;
            for (int b = 0; b < inst.num_commodities(); ++b) {
                const auto& ts = inst.commodity_terminals(b);
                for (std::size_t s = 0; s < ts.size(); ++s) {
                    if (static_cast<int>(s) == uncut[b]) continue;
                    VertexSet m(n);
                    for (Vertex x = 0; x < n; ++x) {
                        if (side[b][x] == static_cast<int>(s)) m.insert(x);
                    }
                    fam.assignment.emplace(ts[s], Cut(m));
                }
            }
            auto r = verify_integral_solution(fam, inst);
            if (best < 0 || r.max_relative_load < best) best = r.max_relative_load;
            return;
        }
        const auto& ts = inst.commodity_terminals(a);
        if (v == 0 && uncut[a] < 0) {
            for (std::size_t s = 0; s < ts.size(); ++s) {
                if (mode == Mode::Cscp && !inst.is_sink_terminal(ts[s])) continue;
                uncut[a] = static_cast<int>(s);
                rec(a, 0);
            }
            uncut[a] = -1;
            return;
        }
        if (v == n) {
            rec(a + 1, 0);
            return;
        }
        for (std::size_t s = 0; s < ts.size(); ++s) {
            if (inst.root(ts[s]) == v) {
                side[a][v] = static_cast<int>(s);
                rec(a, v + 1);
                return;
            }
        }
        for (std::size_t s = 0; s < ts.size(); ++s) {
            side[a][v] = static_cast<int>(s);
            rec(a, v + 1);
        }
    };
    rec(0, 0);
    return best;
}

} // namespace

TEST(Oracle, SingleEdge) {
    Instance inst(Graph(2, {{0, 1, 1}}), {{0, 1}});
    auto r = brute_force_opt(inst, Mode::Mcp);
    EXPECT_EQ(r.optimum, q(1));
    EXPECT_EQ(r.witness.assignment.size(), 1u);
    Instance sink(Graph(2, {{0, 1, 1}}), {{0, 1}}, 1);
    auto rs = brute_force_opt(sink);
    EXPECT_EQ(rs.optimum, q(1));
    EXPECT_TRUE(verify_integral_solution(rs.witness, sink).ok);
}

TEST(Oracle, TwoIdenticalCommoditiesOnPath) {
    // s = 0, t = 2; each commodity cuts a different edge.
    Instance inst(Graph(3, {{0, 1, 1}, {1, 2, 1}}), {{0, 2}, {0, 2}}, 2);
    auto r = brute_force_opt(inst);
    EXPECT_EQ(r.optimum, q(1));
    auto load = load_vector(r.witness, inst.graph());
    EXPECT_EQ(load, (std::vector<long>{1, 1}));
}

TEST(Oracle, CliqueChainGap) {
    Instance inst = clique_chain(4);
    auto r = brute_force_opt(inst);
    EXPECT_GE(r.optimum, q(2));
    EXPECT_TRUE(verify_integral_solution(r.witness, inst).ok);
    EXPECT_EQ(verify_integral_solution(r.witness, inst).max_relative_load, r.optimum);
}

TEST(Oracle, CliqueChainSixWithinAMinute) {
    auto start = std::chrono::steady_clock::now();
    auto r = brute_force_opt(clique_chain(6));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_GE(r.optimum, q(2));
    EXPECT_LT(secs, 60.0);
}

TEST(Oracle, RejectsOverBudget) {
    Instance inst = clique_chain(4);
    EXPECT_THROW(brute_force_opt(inst, 10.0), BudgetExceeded);
}

TEST(Oracle, MatchesPlainEnumeration) {
    RandomParams p;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        p.n = 4 + static_cast<int>(seed % 3);
        p.k = 1 + static_cast<int>(seed % 3);
        p.common_sink = seed % 2;
        Instance inst = random_instance(p, seed);
        Mode mode = inst.has_sink() ? Mode::Cscp : Mode::Mcp;
        auto r = brute_force_opt(inst, mode);
        EXPECT_EQ(r.optimum, enumerate_all(inst, mode)) << "seed " << seed;
        auto check = verify_integral_solution(r.witness, inst);
        EXPECT_TRUE(check.ok) << "seed " << seed;
        EXPECT_EQ(check.max_relative_load, r.optimum) << "seed " << seed;
    }
}

TEST(Oracle, AtLeastLpOptimum) {
    RandomParams p;
    p.n = 6;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        p.common_sink = seed % 2;
        Instance inst = random_instance(p, seed);
        EXPECT_GE(brute_force_opt(inst).optimum, solve_mcp_lp(inst).lambda) << "seed " << seed;
    }
}

TEST(Guarantee, WithinBounds) {
    Graph g(3, {{0, 1, 1}, {1, 2, 1}});
    IntegralCutFamily fam;
    fam.assignment.emplace(0, Cut(VertexSet(3, {0})));
    auto r = check_guarantee(fam, g, {1, 1}, Mode::Cscp);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.bound, "c+2");
    EXPECT_EQ(r.min_slack, 2);
    EXPECT_EQ(r.max_slack, 3);
}

TEST(Guarantee, ListsViolatingEdge) {
    Graph g(2, {{0, 1, 1}});
    IntegralCutFamily fam;
    for (TerminalId t = 0; t < 4; ++t) fam.assignment.emplace(t, Cut(VertexSet(2, {0})));
    auto r = check_guarantee(fam, g, {1}, Mode::Cscp);
    EXPECT_FALSE(r.ok);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_NE(r.violations[0].find("edge 0"), std::string::npos);
    EXPECT_TRUE(check_guarantee(fam, g, {1}, Mode::Mcp).ok);
}
