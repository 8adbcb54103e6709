// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include "cutpack/cutpack.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cutpack;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void fail(const std::string& what) {
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

struct Case {
    std::string name;
    Instance inst;
    PipelineOptions opts;
};

struct Run {
    std::string name;
    Mode mode = Mode::Mcp;
    long grid = 0;
    Rational lambda;
    bool laminar_ok = false;
    std::string laminar_failure;
    std::vector<long> capacities;
    std::vector<long> loads;
    IntegralCutFamily cuts;
    std::vector<std::string> violations;
    std::string bytes;
    std::string error;
};

Run run_case(const Case& c) {
    Run out;
    out.name = c.name;
    try {
        auto r = run_pipeline(c.inst, c.opts);
        out.mode = r.mode;
        out.grid = r.grid;
        out.lambda = r.lp.lambda;
        out.laminar_ok = r.laminar_check.ok;
        out.laminar_failure = r.laminar_check.clause + ": " + r.laminar_check.witness;
        out.capacities = r.capacities;
        out.loads = load_vector(r.cuts, c.inst.graph());
        out.cuts = r.cuts;
        out.violations = r.violations;
        out.bytes = dump_json(solution_to_json(to_solution_file(r, c.inst.graph()), c.inst.graph()));
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

// n <= 12, k <= 4, |S_a| <= 3, c_e <= 3.
std::vector<Case> random_cases(bool common_sink, std::uint64_t first_seed, int count) {
    std::mt19937_64 rng(first_seed * 7919);
    std::vector<Case> out;
    for (int x = 0; x < count; ++x) {
        RandomParams p;
        p.n = 4 + static_cast<int>(rng() % 9);
        p.k = 1 + static_cast<int>(rng() % 4);
        p.max_terminals = 3;
        p.max_capacity = 3;
        p.density_permille = 250 + static_cast<int>(rng() % 450);
        p.common_sink = common_sink;
        std::uint64_t seed = first_seed + static_cast<std::uint64_t>(x);
        Case c{(common_sink ? "cscp-" : "mcp-") + std::to_string(seed), random_instance(p, seed), {}};
        c.opts.mode = common_sink ? Mode::Cscp : Mode::Mcp;
        if (!common_sink) c.opts.grid = x % 2 == 0 ? 4 : 6;
        out.push_back(std::move(c));
    }
    return out;
}

struct Suite {
    std::vector<Case> mcp = random_cases(false, 1, 100);
    std::vector<Case> cscp = random_cases(true, 1001, 100);
    std::vector<Run> mcp_runs, cscp_runs;
    double mcp_seconds = 0, cscp_seconds = 0;

    void solve_all() {
        auto t = Clock::now();
        for (const auto& c : mcp) mcp_runs.push_back(run_case(c));
        mcp_seconds = seconds_since(t);
        t = Clock::now();
        for (const auto& c : cscp) cscp_runs.push_back(run_case(c));
        cscp_seconds = seconds_since(t);
    }
};

std::string fmt(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

Outcome end_to_end(const std::vector<Case>& cases, const std::vector<Run>& runs, Mode mode, double secs) {
    Outcome o;
    long edges = 0;
    double worst = 0;
    for (std::size_t x = 0; x < runs.size(); ++x) {
        const Run& r = runs[x];
        if (!r.error.empty()) {
            o.fail(r.name + ": " + r.error);
            continue;
        }
        for (std::size_t e = 0; e < r.loads.size(); ++e) {
            ++edges;
            long bound = guarantee_bound(r.capacities[e], mode);
            worst = std::max(worst, static_cast<double>(r.loads[e]) / static_cast<double>(bound));
            if (r.loads[e] > bound) {
                o.fail(r.name + ": edge " + std::to_string(e) + " load " + std::to_string(r.loads[e]) + " > " +
                       std::to_string(bound));
            }
        }
        if (!verify_integral_solution(r.cuts, cases[x].inst).ok) o.fail(r.name + ": cuts do not separate");
        for (const auto& v : r.violations) o.fail(r.name + ": " + v);
    }
    if (mode == Mode::Mcp && secs >= 600) o.fail("took " + fmt(secs) + " s, limit 600 s");
    o.detail = std::to_string(runs.size()) + " instances, " + std::to_string(edges) + " edges, worst load/bound " +
               fmt(worst) + ", " + fmt(secs) + " s";
    return o;
}

std::vector<Rational> as_rational(const std::vector<long>& xs) { return {xs.begin(), xs.end()}; }

Outcome round1_synthetic() {
    Outcome o;
    std::mt19937_64 rng(31);
    RoundStats stats;
    long edges = 0;
    for (int x = 0; x < 200; ++x) {
        RandomParams p;
        p.n = 4 + static_cast<int>(rng() % 9);
        p.k = 1 + static_cast<int>(rng() % 5);
        p.density_permille = 250 + static_cast<int>(rng() % 500);
        p.common_sink = true;
        std::uint64_t seed = rng();
        Instance inst = random_instance(p, seed);
        auto syn = synthetic_family(inst, Mode::Cscp, seed ^ 0x5bd1e995, 2 + 2 * static_cast<long>(rng() % 4));
        std::string name = "family " + std::to_string(x);
        try {
            auto report = verify_fractional_feasible(syn.family, inst, as_rational(syn.capacities), Mode::Cscp);
            if (!report.ok) {
                o.fail(name + ": synthetic family not feasible");
                continue;
            }
            auto cuts = round1(inst, syn.capacities, syn.family, &stats);
            auto load = load_vector(cuts, inst.graph());
            for (std::size_t e = 0; e < load.size(); ++e) {
                ++edges;
                if (load[e] > syn.capacities[e] + 1) o.fail(name + ": edge " + std::to_string(e) + " over c+1");
            }
            if (!verify_integral_solution(cuts, inst).ok) o.fail(name + ": cuts do not separate");
        } catch (const std::exception& e) {
            o.fail(name + ": " + e.what());
        }
    }
    o.detail = "200 families, " + std::to_string(edges) + " edges, " + std::to_string(stats.iterations) +
               " iterations, " + std::to_string(stats.invariant_checks) + " invariant checks";
    return o;
}

Outcome round2_synthetic() {
    Outcome o;
    std::mt19937_64 rng(47);
    RoundStats stats;
    long edges = 0;
    for (int x = 0; x < 200; ++x) {
        RandomParams p;
        p.n = 4 + static_cast<int>(rng() % 9);
        p.k = 1 + static_cast<int>(rng() % 5);
        p.max_terminals = std::min(4, p.n);
        p.density_permille = 250 + static_cast<int>(rng() % 500);
        std::uint64_t seed = rng();
        Instance inst = random_instance(p, seed);
        auto syn = synthetic_family(inst, Mode::Mcp, seed ^ 0x5bd1e995, 2 + 2 * static_cast<long>(rng() % 4));
        std::string name = "family " + std::to_string(x);
        try {
            auto report = verify_fractional_feasible(syn.family, inst, as_rational(syn.capacities), Mode::Mcp);
            if (!report.ok) {
                o.fail(name + ": synthetic family not feasible");
                continue;
            }
            auto cuts = round2(inst, syn.capacities, syn.family, &stats);
            auto load = load_vector(cuts, inst.graph());
            for (std::size_t e = 0; e < load.size(); ++e) {
                ++edges;
                if (load[e] > syn.capacities[e] + 3) o.fail(name + ": edge " + std::to_string(e) + " over c+3");
            }
            if (!verify_integral_solution(cuts, inst).ok) o.fail(name + ": cuts do not separate");
        } catch (const std::exception& e) {
            o.fail(name + ": " + e.what());
        }
    }
    o.detail = "200 families, " + std::to_string(edges) + " edges, " + std::to_string(stats.iterations) +
               " iterations, " + std::to_string(stats.defaults) + " defaults, " +
               std::to_string(stats.invariant_checks) + " invariant checks";
    return o;
}

// Each terminal gets a random set around its vertex avoiding the rest of its
// commodity.
TerminalCuts random_terminal_cuts(std::mt19937_64& rng, const Instance& inst) {
    TerminalCuts tc;
    const int n = inst.num_vertices();
    for (TerminalId t = 0; t < inst.num_terminals(); ++t) {
        int a = inst.terminal(t).commodity;
        VertexSet s(n, {inst.root(t)});
        int density = static_cast<int>(rng() % 4);
        for (Vertex v = 0; v < n; ++v) {
            if (static_cast<int>(rng() % 6) <= density) s.insert(v);
        }
        for (TerminalId other : inst.commodity_terminals(a)) {
            if (other != t) s.erase(inst.root(other));
        }
        tc.root.push_back(inst.root(t));
        tc.commodity.push_back(a);
        tc.cut.push_back(s);
    }
    return tc;
}

std::vector<long> set_loads(const std::vector<VertexSet>& cuts, const Graph& g) {
    std::vector<long> out(g.num_edges(), 0);
    for (const auto& c : cuts) {
        for (EdgeId e = 0; e < g.num_edges(); ++e) out[e] += in_boundary(c, g.edge(e));
    }
    return out;
}

Outcome integer_lam2_random() {
    Outcome o;
    std::mt19937_64 rng(59);
    IntegerLam2Stats stats;
    for (int x = 0; x < 500; ++x) {
        RandomParams p;
        p.n = 4 + static_cast<int>(rng() % 7);
        p.k = 1 + static_cast<int>(rng() % 5);
        p.max_terminals = std::min(4, p.n);
        p.density_permille = 250 + static_cast<int>(rng() % 500);
        Instance inst = random_instance(p, rng());
        TerminalCuts in = random_terminal_cuts(rng, inst);
        std::string name = "input " + std::to_string(x);
        try {
            auto out = integer_lam2(inst.graph(), in, &stats);
            if (!is_laminar(out.cut)) o.fail(name + ": output not laminar");
            for (int i = 0; i < out.size(); ++i) {
                if (!out.cut[i].contains(out.root[i])) o.fail(name + ": terminal outside its cut");
                for (int j = i + 1; j < out.size(); ++j) {
                    if (out.commodity[i] == out.commodity[j] && out.cut[i].contains(out.root[j]) &&
                        out.cut[j].contains(out.root[i])) {
                        o.fail(name + ": terminals " + std::to_string(i) + " and " + std::to_string(j) +
                               " not separated");
                    }
                }
            }
            auto before = set_loads(in.cut, inst.graph());
            auto after = set_loads(out.cut, inst.graph());
            for (std::size_t e = 0; e < before.size(); ++e) {
                if (after[e] > 2 * before[e]) o.fail(name + ": edge " + std::to_string(e) + " more than doubled");
            }
        } catch (const std::exception& e) {
            o.fail(name + ": " + e.what());
        }
    }
    o.detail = "500 inputs; rules fired: disjoint " + std::to_string(stats.rule_disjoint) + ", three-cycle " +
               std::to_string(stats.rule_triangle) + ", same-commodity " + std::to_string(stats.rule_same_commodity) +
               ", both-inside " + std::to_string(stats.rule_both_inside) + ", chain " +
               std::to_string(stats.rule_chain) + ", peeled " + std::to_string(stats.peeled);
    return o;
}

Outcome laminar_feasibility(const Suite& s) {
    Outcome o;
    int checked = 0;
    for (const auto* runs : {&s.mcp_runs, &s.cscp_runs}) {
        for (const auto& r : *runs) {
            if (!r.error.empty()) {
                o.fail(r.name + ": " + r.error);
                continue;
            }
            ++checked;
            if (!r.laminar_ok) {
                o.fail(r.name + ": " + r.laminar_failure);
            }
        }
    }
    o.detail = std::to_string(checked) + " families checked against the laminar-stage capacities";
    return o;
}

Outcome integrality_gap() {
    Outcome o;
    std::ostringstream detail;
    for (int n : {4, 6}) {
        Instance inst = clique_chain(n);
        Rational lambda = solve_mcp_lp(inst).lambda;
        auto t = Clock::now();
        auto opt = brute_force_opt(inst);
        double secs = seconds_since(t);
        if (lambda > 1) o.fail("n=" + std::to_string(n) + ": lambda " + to_string(lambda) + " > 1");
        if (opt.optimum < 2) o.fail("n=" + std::to_string(n) + ": optimum " + to_string(opt.optimum) + " < 2");
        if (n == 6 && secs >= 60) o.fail("n=6 oracle took " + fmt(secs) + " s");
        detail << (n == 4 ? "" : "; ") << "n=" << n << " lambda " << to_string(lambda) << " optimum "
               << to_string(opt.optimum) << " (" << fmt(secs, 3) << " s)";
    }
    o.detail = detail.str();
    return o;
}

Outcome oracle_sandwich(const Suite& s) {
    Outcome o;
    std::vector<Case> cases;
    for (const auto* list : {&s.mcp, &s.cscp}) {
        for (const auto& c : *list) {
            if (c.inst.num_vertices() <= 7) cases.push_back(c);
        }
    }
    std::mt19937_64 rng(71);
    for (int x = 0; x < 60; ++x) {
        RandomParams p;
        p.n = 3 + static_cast<int>(rng() % 5);
        p.k = 1 + static_cast<int>(rng() % 4);
        p.max_terminals = std::min(3, p.n);
        p.density_permille = 300 + static_cast<int>(rng() % 500);
        p.common_sink = x % 2 == 1;
        std::uint64_t seed = rng();
        cases.push_back({"small-" + std::to_string(x), random_instance(p, seed), {}});
    }
    int above = 0;
    auto t = Clock::now();
    for (const auto& c : cases) {
        Run r = run_case(c);
        if (!r.error.empty()) {
            o.fail(c.name + ": " + r.error);
            continue;
        }
        auto opt = brute_force_opt(c.inst, r.mode);
        if (r.lambda > opt.optimum) {
            o.fail(c.name + ": lambda " + to_string(r.lambda) + " > optimum " + to_string(opt.optimum));
        }
        auto witness = verify_integral_solution(r.cuts, c.inst);
        if (!witness.ok) o.fail(c.name + ": pipeline witness infeasible");
        auto g = check_guarantee(r.cuts, c.inst.graph(), r.capacities, r.mode);
        if (!g.ok) o.fail(c.name + ": " + g.violations.front());
        if (witness.max_relative_load >= opt.optimum) ++above;
    }
    o.detail = std::to_string(cases.size()) + " instances with n <= 7, " + std::to_string(above) +
               " pipeline results at or above the optimum, " + fmt(seconds_since(t)) + " s";
    return o;
}

Outcome determinism(const Suite& s) {
    Outcome o;
    int compared = 0;
    for (const auto& [cases, runs] : {std::pair{&s.mcp, &s.mcp_runs}, std::pair{&s.cscp, &s.cscp_runs}}) {
        for (std::size_t x = 0; x < cases->size(); ++x) {
            Run again = run_case((*cases)[x]);
            ++compared;
            if (again.bytes != (*runs)[x].bytes || again.error != (*runs)[x].error) {
                o.fail((*runs)[x].name + ": solution bytes differ between runs");
            }
        }
    }
    for (int n : {4, 6}) {
        Case c{"clique-chain-" + std::to_string(n), clique_chain(n), {}};
        ++compared;
        if (run_case(c).bytes != run_case(c).bytes) o.fail(c.name + ": solution bytes differ between runs");
    }
    o.detail = std::to_string(compared) + " solution files compared";
    return o;
}

} // namespace

int main() {
    Suite suite;
    suite.solve_all();

    struct Criterion {
        const char* title;
        std::function<Outcome()> check;
    };
    std::vector<Criterion> criteria = {
        {"general bound 8c+4 on random instances",
         [&] { return end_to_end(suite.mcp, suite.mcp_runs, Mode::Mcp, suite.mcp_seconds); }},
        {"common-sink bound c+2 on random instances",
         [&] { return end_to_end(suite.cscp, suite.cscp_runs, Mode::Cscp, suite.cscp_seconds); }},
        {"Round-1 within c+1 on synthetic families", round1_synthetic},
        {"Round-2 within c+3 on synthetic families", round2_synthetic},
        {"Integer-Lam-2 laminar, separating, at most doubling", integer_lam2_random},
        {"Lam-1/Lam-2 outputs feasible", [&] { return laminar_feasibility(suite); }},
        {"clique-chain integrality gap", integrality_gap},
        {"oracle sandwich on small instances", [&] { return oracle_sandwich(suite); }},
        {"deterministic solution files", [&] { return determinism(suite); }},
    };

    int failed = 0;
    for (std::size_t x = 0; x < criteria.size(); ++x) {
        Outcome o;
        try {
            o = criteria[x].check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << x + 1 << ": " << criteria[x].title;
        if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
        std::cout << "\n";
        for (const auto& f : o.failures) std::cout << "    " << f << "\n";
        failed += !o.pass;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
