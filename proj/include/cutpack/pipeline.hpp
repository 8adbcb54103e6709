#pragma once

#include "cutpack/family.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/laminar.hpp"
#include "cutpack/lp.hpp"
#include "cutpack/oracle.hpp"
#include "cutpack/rounding.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace cutpack {

/// Largest total copy count Lam-2 is allowed (sum of |S_a| times D^2).
inline constexpr long kAutoGridCopies = 640;

/// Lam-2 grid for `--grid auto`: N = n * sum |S_a| (made even) when the copy
/// count allows it, else the largest even D within the copy limit, at least 4.
inline long auto_grid(const Instance& inst) {
    long terminals = inst.num_terminals();
    long n_grid = static_cast<long>(inst.num_vertices()) * terminals;
    n_grid += n_grid % 2;
    if (terminals * n_grid * n_grid <= kAutoGridCopies) return n_grid;
    long d = 4;
    while (terminals * (d + 2) * (d + 2) <= kAutoGridCopies) d += 2;
    return d;
}

/// max(1, ceil(x)) per entry.
inline std::vector<long> integral_capacities(const std::vector<Rational>& xs) {
    std::vector<long> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(std::max(1L, ceil_to_long(x)));
    return out;
}

/// c^_e = max(1, ceil(lambda c_e)).
inline std::vector<long> scaled_capacities(const Graph& g, const Rational& lambda) {
    std::vector<Rational> xs;
    for (const auto& e : g.edges()) xs.push_back(lambda * e.capacity);
    return integral_capacities(xs);
}

/// Capacities the laminar stage is proven feasible for: lambda c_e + 1/N with
/// N = n k (common sink), 4(2 lambda c_e + 1/D) otherwise.
inline std::vector<Rational> laminar_capacities(const Instance& inst, const Rational& lambda, Mode mode, long grid) {
    std::vector<Rational> caps;
    if (mode == Mode::Cscp) {
        Rational slack(1, static_cast<long>(inst.num_vertices()) * inst.num_commodities());
        for (const auto& e : inst.graph().edges()) caps.push_back(lambda * e.capacity + slack);
    } else {
        for (const auto& e : inst.graph().edges()) caps.push_back(4 * (2 * lambda * e.capacity + Rational(1, grid)));
    }
    return caps;
}

struct PipelineOptions {
    std::optional<Mode> mode;
    long grid = 0; // 0 picks auto_grid
};

struct StageTimes {
    double lp_ms = 0;
    double laminar_ms = 0;
    double rounding_ms = 0;
    double verify_ms = 0;
};

/// Filled in as the pipeline advances, so a failure can be reported with the
/// state reached so far.
struct PipelineTrace {
    std::string stage;
    std::optional<MetricSolution> lp;
    std::optional<FractionalLaminarFamily> family;
    std::vector<long> working;
};

struct PipelineResult {
    Mode mode = Mode::Mcp;
    long grid = 0;
    MetricSolution lp;
    FractionalLaminarFamily family;
    FeasibilityReport laminar_check;
    std::vector<long> capacities; // c^
    std::vector<long> working;    // rounding capacities
    IntegralCutFamily cuts;
    RoundStats rounding;
    IntegralReport integral;
    GuaranteeReport guarantee;
    std::vector<std::string> violations;
    StageTimes times;

    bool ok() const { return violations.empty(); }
    long rounding_slack() const { return mode == Mode::Mcp ? 3 : 1; }
};

inline Mode resolve_mode(const Instance& inst, std::optional<Mode> mode) {
    Mode m = mode.value_or(inst.has_sink() ? Mode::Cscp : Mode::Mcp);
    if (m == Mode::Cscp && !inst.has_sink()) throw std::invalid_argument("common-sink mode needs an instance with a sink");
    return m;
}

/// LP, laminar family, rounding, verification. Rounding runs against the
/// laminar family's own rounded-up loads (never above the proven laminar
/// capacities); the result is judged against c^ = max(1, ceil(lambda c_e)):
/// c^ + 2 for common sink, 8 c^ + 4 otherwise.
inline PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& options = {},
                                   PipelineTrace* trace = nullptr) {
    using Clock = std::chrono::steady_clock;
    auto ms_since = [](Clock::time_point t) {
        return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
    };
    PipelineTrace local;
    PipelineTrace& tr = trace ? *trace : local;
    PipelineResult r;
    const Graph& g = inst.graph();
    r.mode = resolve_mode(inst, options.mode);
    if (r.mode == Mode::Mcp) {
        r.grid = options.grid == 0 ? auto_grid(inst) : options.grid;
        if (r.grid < 2 || r.grid % 2 != 0) throw std::invalid_argument("grid must be even and at least 2");
    } else {
        r.grid = static_cast<long>(inst.num_vertices()) * inst.num_commodities();
    }

    tr.stage = "lp";
    auto t = Clock::now();
    r.lp = solve_mcp_lp(inst);
    r.times.lp_ms = ms_since(t);
    tr.lp = r.lp;

    tr.stage = r.mode == Mode::Mcp ? "lam2" : "lam1";
    t = Clock::now();
    r.family = r.mode == Mode::Mcp ? lam2(inst, r.lp, r.grid) : lam1(inst, r.lp);
    r.times.laminar_ms = ms_since(t);
    tr.family = r.family;
    r.laminar_check = verify_fractional_feasible(r.family, inst, laminar_capacities(inst, r.lp.lambda, r.mode, r.grid), r.mode);

    r.capacities = scaled_capacities(g, r.lp.lambda);
    r.working = integral_capacities(load_vector(r.family, g));
    tr.working = r.working;

    tr.stage = r.mode == Mode::Mcp ? "round2" : "round1";
    t = Clock::now();
    r.cuts = r.mode == Mode::Mcp ? round2(inst, r.working, r.family, &r.rounding)
                                 : round1(inst, r.working, r.family, &r.rounding);
    r.times.rounding_ms = ms_since(t);

    tr.stage = "verify";
    t = Clock::now();
    r.integral = verify_integral_solution(r.cuts, inst);
    r.guarantee = check_guarantee(r.cuts, g, r.capacities, r.mode);
    r.violations = r.integral.violations;
    r.violations.insert(r.violations.end(), r.guarantee.violations.begin(), r.guarantee.violations.end());
    auto load = load_vector(r.cuts, g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (load[e] > r.working[e] + r.rounding_slack()) {
            r.violations.push_back("edge " + std::to_string(e) + " load " + std::to_string(load[e]) +
                                   " exceeds rounding capacity " + std::to_string(r.working[e]) + " + " +
                                   std::to_string(r.rounding_slack()));
        }
    }
    r.times.verify_ms = ms_since(t);
    tr.stage = "done";
    return r;
}

inline SolutionFile to_solution_file(const PipelineResult& r, const Graph& g) {
    SolutionFile s;
    s.mode = r.mode;
    s.lambda = r.lp.lambda;
    if (r.mode == Mode::Mcp) s.grid = r.grid;
    s.capacities = r.capacities;
    s.cuts = r.cuts;
    s.loads = load_vector(r.cuts, g);
    s.bound = r.guarantee.bound;
    s.violations = r.violations;
    return s;
}

struct VerifyReport {
    IntegralReport integral;
    GuaranteeReport guarantee;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks a solution file against its instance: separation, every terminal
/// (but the sink's in common-sink mode) cut, recorded loads, and the bound
/// against c^ recomputed from the recorded lambda.
inline VerifyReport verify_solution(const SolutionFile& s, const Instance& inst) {
    const Graph& g = inst.graph();
    VerifyReport r;
    r.integral = verify_integral_solution(s.cuts, inst);
    r.violations = r.integral.violations;
    if (s.mode == Mode::Cscp && !inst.has_sink()) r.violations.push_back("mode: common-sink bound on an instance without sink");
    for (TerminalId t : inst.cut_terminals(s.mode == Mode::Cscp && inst.has_sink())) {
        if (!s.cuts.assignment.count(t)) r.violations.push_back("coverage: terminal " + std::to_string(t) + " has no cut");
    }
    auto caps = scaled_capacities(g, s.lambda);
    if (!s.capacities.empty() && s.capacities != caps) {
        r.violations.push_back("capacities: recorded capacities differ from max(1, ceil(lambda c))");
    }
    auto load = load_vector(s.cuts, g);
    if (!s.loads.empty() && s.loads != load) r.violations.push_back("loads: recorded loads differ from the cuts");
    r.guarantee = check_guarantee(s.cuts, g, caps, s.mode);
    r.violations.insert(r.violations.end(), r.guarantee.violations.begin(), r.guarantee.violations.end());
    return r;
}

} // namespace cutpack
