#include "cutpack/cutpack.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace cutpack;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kBadInput = 2, kInternal = 3, kBudget = 4 };

std::optional<Mode> parse_mode(const std::string& s) {
    if (s == "auto") return std::nullopt;
    if (s == "mcp") return Mode::Mcp;
    if (s == "cscp") return Mode::Cscp;
    throw std::invalid_argument("mode must be auto, mcp or cscp");
}

long parse_grid(const std::string& s) {
    if (s == "auto") return 0;
    try {
        std::size_t used = 0;
        long d = std::stol(s, &used);
        if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("grid must be auto or an even integer");
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

std::string fixed(double x, int digits = 6) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << x;
    return out.str();
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string dump_path(const std::string& output) { return output.empty() ? "cutpack-dump.json" : output + ".dump.json"; }

void write_dump(const std::string& path, const Instance& inst, const PipelineTrace& trace, const std::string& error) {
    Json j;
    j["stage"] = trace.stage;
    j["error"] = error;
    j["instance"] = instance_to_json(inst);
    if (trace.lp) j["lambda"] = to_string(trace.lp->lambda);
    if (trace.family) j["family"] = family_to_json(*trace.family);
    if (!trace.working.empty()) j["working_capacities"] = trace.working;
    write_text(path, dump_json(j));
}

struct GenArgs {
    std::string kind = "random";
    RandomParams params;
    std::uint64_t seed = 1;
    std::string output;
};

int cmd_gen(const GenArgs& a) {
    Instance inst;
    if (a.kind == "random") {
        inst = random_instance(a.params, a.seed);
    } else if (a.kind == "clique-chain") {
        inst = clique_chain(a.params.n);
    } else {
        throw std::invalid_argument("kind must be random or clique-chain");
    }
    emit(a.output, dump_json(instance_to_json(inst)));
    return kOk;
}

struct SolveArgs {
    std::string input, output, mode = "auto", grid = "auto";
};

int cmd_solve(const SolveArgs& a) {
    Instance inst = read_instance(a.input);
    PipelineOptions opts;
    opts.mode = parse_mode(a.mode);
    opts.grid = parse_grid(a.grid);
    PipelineTrace trace;
    PipelineResult r;
    try {
        r = run_pipeline(inst, opts, &trace);
    } catch (const InvariantViolation& e) {
        std::string path = dump_path(a.output);
        write_dump(path, inst, trace, e.what());
        std::cerr << "state dump: " << path << "\n";
        throw;
    }
    emit(a.output, dump_json(solution_to_json(to_solution_file(r, inst.graph()), inst.graph())));
    std::cerr << to_string(r.mode) << " lambda " << to_string(r.lp.lambda) << " max load " << r.integral.max_load
              << " bound " << r.guarantee.bound << " min slack " << r.guarantee.min_slack << " violations "
              << r.violations.size() << " (lp " << fixed(r.times.lp_ms, 1) << " ms, laminar "
              << fixed(r.times.laminar_ms, 1) << " ms, rounding " << fixed(r.times.rounding_ms, 1) << " ms)\n";
    for (const auto& v : r.violations) std::cerr << "violation: " << v << "\n";
    return r.ok() ? kOk : kVerifyFail;
}

struct VerifyArgs {
    std::string input, solution;
};

int cmd_verify(const VerifyArgs& a) {
    Instance inst = read_instance(a.input);
    SolutionFile s = read_solution(a.solution, inst);
    auto r = verify_solution(s, inst);
    std::cout << (r.ok() ? "ok" : "fail") << ": max load " << r.integral.max_load << ", bound " << r.guarantee.bound
              << ", min slack " << r.guarantee.min_slack << "\n";
    for (const auto& v : r.violations) std::cout << "violation: " << v << "\n";
    return r.ok() ? kOk : kVerifyFail;
}

struct OracleArgs {
    std::string input, output, mode = "auto";
    double budget = kDefaultOracleBudget;
};

int cmd_oracle(const OracleArgs& a) {
    Instance inst = read_instance(a.input);
    Mode mode = resolve_mode(inst, parse_mode(a.mode));
    auto r = brute_force_opt(inst, mode, a.budget);
    Json j;
    j["mode"] = to_string(mode);
    j["optimum"] = to_string(r.optimum);
    j["nodes"] = r.nodes;
    Json cuts = Json::object();
    for (const auto& [t, c] : r.witness.assignment) cuts[std::to_string(t)] = detail::vertex_list(c.members());
    j["cuts"] = cuts;
    j["note"] = "optimum over partition-form solutions (each commodity a vertex colouring)";
    emit(a.output, dump_json(j));
    return kOk;
}

struct BenchArgs {
    std::string input, output, mode = "auto", grid = "auto";
};

int cmd_bench(const BenchArgs& a) {
    if (!fs::is_directory(a.input)) throw std::invalid_argument(a.input + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    PipelineOptions opts;
    opts.mode = parse_mode(a.mode);
    opts.grid = parse_grid(a.grid);

    std::ostringstream csv;
    csv << "instance,n,m,k,lambda,max_load_ratio,bound_ratio,lp_ms,laminar_ms,rounding_ms,verify_ms,status\n";
    int worst = kOk;
    for (const auto& file : files) {
        std::string name = file.filename().string();
        try {
            Instance inst = read_instance(file.string());
            auto r = run_pipeline(inst, opts);
            auto load = load_vector(r.cuts, inst.graph());
            Rational bound_ratio = 0;
            for (EdgeId e = 0; e < inst.graph().num_edges(); ++e) {
                Rational x(load[e], guarantee_bound(r.capacities[e], r.mode));
                x.canonicalize();
                bound_ratio = std::max(bound_ratio, x);
            }
            csv << csv_field(name) << "," << inst.num_vertices() << "," << inst.graph().num_edges() << ","
                << inst.num_commodities() << "," << to_string(r.lp.lambda) << ","
                << fixed(to_double(r.integral.max_relative_load)) << "," << fixed(to_double(bound_ratio)) << ","
                << fixed(r.times.lp_ms, 3) << "," << fixed(r.times.laminar_ms, 3) << ","
                << fixed(r.times.rounding_ms, 3) << "," << fixed(r.times.verify_ms, 3) << ","
                << (r.ok() ? "ok" : "violation") << "\n";
            if (!r.ok()) worst = std::max<int>(worst, kVerifyFail);
        } catch (const std::exception& e) {
            int code = dynamic_cast<const InvariantViolation*>(&e) ? kInternal
                       : dynamic_cast<const BudgetExceeded*>(&e) ? kBudget
                       : dynamic_cast<const std::invalid_argument*>(&e) ? kBadInput
                                                                         : kInternal;
            worst = std::max(worst, code);
            csv << csv_field(name) << ",,,,,,,,,,," << csv_field(std::string("error: ") + e.what()) << "\n";
        }
    }
    emit(a.output, csv.str());
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiway cut packing: LP, laminar cut families, rounding, verification"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate an instance");
    g->add_option("--kind", gen.kind, "random or clique-chain")->capture_default_str();
    g->add_option("--n", gen.params.n, "Vertices (random) or clique size (clique-chain)")->capture_default_str();
    g->add_option("--k", gen.params.k, "Commodities")->capture_default_str();
    g->add_option("--min-terminals", gen.params.min_terminals, "Fewest terminals per commodity")->capture_default_str();
    g->add_option("--max-terminals", gen.params.max_terminals, "Most terminals per commodity")->capture_default_str();
    g->add_option("--max-capacity", gen.params.max_capacity, "Largest edge capacity")->capture_default_str();
    g->add_option("--density", gen.params.density_permille, "Edge probability in permille")->capture_default_str();
    g->add_flag("--common-sink", gen.params.common_sink, "Pair every commodity with one sink");
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--output", gen.output, "Instance file (stdout if omitted)");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run the full pipeline on an instance");
    s->add_option("--input", solve.input, "Instance file")->required();
    s->add_option("--output", solve.output, "Solution file (stdout if omitted)");
    s->add_option("--mode", solve.mode, "auto, mcp or cscp")->capture_default_str();
    s->add_option("--grid", solve.grid, "Lam-2 grid D (even) or auto")->capture_default_str();

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check a solution file against its instance");
    v->add_option("--input", verify.input, "Instance file")->required();
    v->add_option("--solution", verify.solution, "Solution file")->required();

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Exact optimum by exhaustive search");
    o->add_option("--input", oracle.input, "Instance file")->required();
    o->add_option("--output", oracle.output, "Report file (stdout if omitted)");
    o->add_option("--mode", oracle.mode, "auto, mcp or cscp")->capture_default_str();
    o->add_option("--budget", oracle.budget, "Largest search space to attempt")->capture_default_str();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run the pipeline on every .json instance in a directory");
    b->add_option("--input", bench.input, "Instance directory")->required();
    b->add_option("--output", bench.output, "CSV file (stdout if omitted)");
    b->add_option("--mode", bench.mode, "auto, mcp or cscp")->capture_default_str();
    b->add_option("--grid", bench.grid, "Lam-2 grid D (even) or auto")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*g) return cmd_gen(gen);
        if (*s) return cmd_solve(solve);
        if (*v) return cmd_verify(verify);
        if (*o) return cmd_oracle(oracle);
        if (*b) return cmd_bench(bench);
    } catch (const InvariantViolation& e) {
        std::cerr << "internal invariant violated: " << e.what() << "\n";
        return kInternal;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kBadInput;
}
