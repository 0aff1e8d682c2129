// Command line driver: compile, solve, refine, bench, slack.
//
// Exit codes: 0 success, 2 input error, 3 solver/verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <soskit/chordal.hpp>
#include <soskit/compile.hpp>
#include <soskit/io.hpp>
#include <soskit/lifts.hpp>
#include <soskit/polynomial.hpp>
#include <soskit/refine.hpp>
#include <soskit/solver.hpp>

namespace {

using namespace soskit;
using nlohmann::json;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void print_table(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.first.size());
    for (const auto& r : rows)
        std::cout << "  " << std::left << std::setw(static_cast<int>(w) + 2) << r.first
                  << r.second << "\n";
}

// Reports go to --out when given, to stdout otherwise.
void emit_json(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << "\n" << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << j.dump(2) << "\n";
}

bool has_ext(const std::string& path, std::initializer_list<const char*> exts) {
    std::string e = std::filesystem::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* x : exts)
        if (e == x) return true;
    return false;
}

Solution run_solver(const ConicProgram& prog, const std::string& solver,
                    const AdmmOptions& opts) {
    if (solver == "rowsparse") return admm_solve_rowsparse(prog, make_selector_split(prog), opts);
    return admm_solve(prog, opts);
}

double max_abs_coef(const Polynomial& p) {
    double m = 0.0;
    for (const auto& [e, c] : p.terms()) m = std::max(m, std::abs(c));
    return m;
}

// ---- compile ----------------------------------------------------------------

struct CompileCfg {
    std::string input, out, cone = "sos";
    bool chordal = false;
    bool feasibility = false;
};

int run_compile(const CompileCfg& cfg) {
    const auto t0 = Clock::now();
    const Polynomial p = load_polynomial(cfg.input);
    ConeSpec spec{cone_tag_from_name(cfg.cone), {}};
    if (cfg.chordal) spec.clique_bases = correlative_clique_bases(p);
    const CompiledProblem cp =
        cfg.feasibility ? compile_feasibility(p, spec) : compile_pop(p, spec);

    const std::string base =
        cfg.out.empty() ? std::filesystem::path(cfg.input).replace_extension("").string()
                        : cfg.out;
    save_conic_json(cp.program, base + ".json");

    // Stage through a buffer so an unrepresentable cone leaves no partial file.
    std::string sdpa_note;
    try {
        std::ostringstream buf;
        write_sdpa(cp.program, buf);
        std::ofstream f(base + ".dat-s");
        if (!f) throw std::runtime_error("cannot open " + base + ".dat-s");
        f << buf.str();
        sdpa_note = base + ".dat-s";
    } catch (const std::invalid_argument& e) {
        sdpa_note = std::string("skipped: ") + e.what();
    }

    print_table({{"input", cfg.input},
                 {"cone", cfg.cone},
                 {"form", cfg.feasibility ? "feasibility" : "lower bound"},
                 {"variables n", std::to_string(cp.sizing.n)},
                 {"degree", std::to_string(p.degree())},
                 {"gram blocks", std::to_string(cp.blocks.size())},
                 {"largest side N", std::to_string(cp.sizing.N)},
                 {"matching rows m", std::to_string(cp.sizing.m)},
                 {"density", fmt("%.6e", cp.sizing.density)},
                 {"program vars", std::to_string(cp.program.num_vars)},
                 {"program rows", std::to_string(cp.program.num_rows())},
                 {"json", base + ".json"},
                 {"sdpa", sdpa_note},
                 {"time", fmt("%.3f s", seconds_since(t0))}});
    return 0;
}

// ---- solve ------------------------------------------------------------------

struct SolveCfg {
    std::string input, out, cone = "sos", solver = "dense";
    double tol = 1e-4;
    int max_iters = 2000;
    double rho = 1.0;
    bool no_adapt = false;
    bool feasibility = false;
    std::uint64_t seed = 42;
};

int run_solve(const SolveCfg& cfg) {
    AdmmOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;
    opts.rho = cfg.rho;
    opts.adapt_rho = !cfg.no_adapt;

    ConicProgram prog;
    std::optional<Polynomial> poly;
    std::optional<CompiledProblem> cp;
    std::string solver_label = cfg.solver;

    auto t0 = Clock::now();
    if (has_ext(cfg.input, {".json"})) {
        prog = load_conic_json(cfg.input);
    } else if (has_ext(cfg.input, {".dat-s", ".dats", ".sdpa"})) {
        prog = load_sdpa(cfg.input);
    } else {
        poly = load_polynomial(cfg.input);
        ConeSpec spec{cone_tag_from_name(cfg.cone), {}};
        if (cfg.solver == "chordal") spec.clique_bases = correlative_clique_bases(*poly);
        cp = cfg.feasibility ? compile_feasibility(*poly, spec) : compile_pop(*poly, spec);
        prog = cp->program;
    }
    if (!poly && cfg.solver == "chordal") {
        // Program-level route: split the PSD block along a clique tree.
        const CliqueTree ct = chordal_extend(aggregate_graph(prog));
        Decomposition dec = decompose_psd(prog, ct);
        prog = std::move(dec.program);
        solver_label = "chordal (" + std::to_string(ct.cliques.size()) + " cliques)";
    }
    const double compile_s = seconds_since(t0);

    t0 = Clock::now();
    const std::string engine = cfg.solver == "rowsparse" ? "rowsparse" : "dense";
    const Solution sol = run_solver(prog, engine, opts);
    const double solve_s = seconds_since(t0);

    double bound = std::numeric_limits<double>::quiet_NaN();
    if (cp && !cfg.feasibility) bound = sol.x[cp->gamma_index];

    t0 = Clock::now();
    json verification;
    std::string verify_note = "n/a (no polynomial)";
    if (cp) {
        const GramCertificate cert = extract_gram(*cp, sol.x_cone);
        Polynomial target = *poly;
        if (!cfg.feasibility) target.add_term(Exponent::zero(poly->vars()), -bound);
        const double vtol = 10.0 * cfg.tol * std::max(1.0, max_abs_coef(*poly));
        const VerifyReport vr = verify_certificate(target, cert, vtol);
        double mineig = 0.0;
        for (double e : vr.min_eigenvalues) mineig = std::min(mineig, e);
        verification = {{"max_mismatch", vr.max_mismatch},
                        {"min_eigenvalue", mineig},
                        {"tolerance", vtol},
                        {"certified", vr.certified}};
        verify_note = std::string(vr.certified ? "certified" : "NOT certified") +
                      " (mismatch " + fmt("%.3e", vr.max_mismatch) + ", min eig " +
                      fmt("%.3e", mineig) + ")";
    }
    const double verify_s = seconds_since(t0);

    std::vector<std::pair<std::string, std::string>> rows{
        {"input", cfg.input},
        {"solver", solver_label},
        {"status", solve_status_name(sol.status)}};
    json j{{"input", cfg.input},
           {"solver", solver_label},
           {"status", solve_status_name(sol.status)},
           {"seed", cfg.seed}};
    if (cp) {
        rows.insert(rows.begin() + 1, {"cone", cfg.cone});
        j["cone"] = cfg.cone;
        j["n"] = cp->sizing.n;
        j["degree"] = poly->degree();
        j["N"] = cp->sizing.N;
        j["m"] = cp->sizing.m;
        j["density"] = cp->sizing.density;
        rows.push_back({"variables n", std::to_string(cp->sizing.n)});
        rows.push_back({"degree", std::to_string(poly->degree())});
        rows.push_back({"largest side N", std::to_string(cp->sizing.N)});
        rows.push_back({"matching rows m", std::to_string(cp->sizing.m)});
        rows.push_back({"density", fmt("%.6e", cp->sizing.density)});
    }
    if (!std::isnan(bound)) {
        rows.push_back({"lower bound", fmt("%.10g", bound)});
        j["bound"] = bound;
    } else {
        j["bound"] = nullptr;
    }
    j["objective"] = sol.objective;
    j["iterations"] = sol.iterations;
    j["residuals"] = {{"primal", sol.residuals.primal},
                      {"dual", sol.residuals.dual},
                      {"gap", sol.residuals.gap}};
    j["times"] = {{"compile_s", compile_s}, {"solve_s", solve_s}, {"verify_s", verify_s}};
    j["verification"] = verification.is_null() ? json(nullptr) : verification;
    rows.push_back({"objective", fmt("%.10g", sol.objective)});
    rows.push_back({"iterations", std::to_string(sol.iterations)});
    rows.push_back({"primal residual", fmt("%.3e", sol.residuals.primal)});
    rows.push_back({"dual residual", fmt("%.3e", sol.residuals.dual)});
    rows.push_back({"gap", fmt("%.3e", sol.residuals.gap)});
    rows.push_back({"compile time", fmt("%.3f s", compile_s)});
    rows.push_back({"solve time", fmt("%.3f s", solve_s)});
    rows.push_back({"verify time", fmt("%.3f s", verify_s)});
    rows.push_back({"verification", verify_note});
    rows.push_back({"seed", std::to_string(cfg.seed)});
    print_table(rows);
    emit_json(j, cfg.out);

    if (sol.status == SolveStatus::Solved) return 0;
    std::cerr << "solver: " << solve_status_name(sol.status) << " after " << sol.iterations
              << " iterations (primal " << fmt("%.3e", sol.residuals.primal) << ", dual "
              << fmt("%.3e", sol.residuals.dual) << ", gap " << fmt("%.3e", sol.residuals.gap)
              << ")\n";
    if (sol.residuals.primal > 100.0 * cfg.tol && sol.residuals.dual < cfg.tol)
        std::cerr << "solver: primal residual stalled while the dual residual vanished; "
                     "the problem is likely infeasible over this cone\n";
    return 3;
}

// ---- refine -----------------------------------------------------------------

struct RefineCfg {
    std::string input, out, method = "colgen", cone = "sdsos";
    int max_iters = 20;
    double budget_s = 600.0;
    double tol = 1e-8;
    int solver_max_iters = 400000;
    double pricing_tol = 1e-6;
    int atlas_k = 2, pool_k = 3;
    std::uint64_t seed = 42;
};

int run_refine(const RefineCfg& cfg) {
    const Polynomial p = load_polynomial(cfg.input);
    RefineOptions ro;
    ro.max_iters = cfg.max_iters;
    ro.budget_s = cfg.budget_s;
    ro.pricing_tol = cfg.pricing_tol;
    ro.atlas_k = cfg.atlas_k;
    ro.pool_k = cfg.pool_k;
    ro.solver.tol = cfg.tol;
    ro.solver.max_iters = cfg.solver_max_iters;

    const bool colgen = cfg.method == "colgen";
    const std::string cone = colgen ? "dsos" : cfg.cone;
    const auto t0 = Clock::now();
    const RefinementTrace tr =
        colgen ? column_generation(p, ro)
               : basis_pursuit(p, cone_tag_from_name(cfg.cone), ro);
    const double total_s = seconds_since(t0);

    std::printf("  %-5s %-16s %-12s %-9s %-9s %-10s %s\n", "iter", "bound", "delta", "time_s",
                "iters", "status", "note");
    double prev = 0.0;
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const auto& s = tr.steps[i];
        std::printf("  %-5zu %-16.10g %-12s %-9.3f %-9d %-10s %s\n", i, s.bound,
                    i == 0 ? "--" : fmt("%+.3e", s.bound - prev).c_str(), s.time_s,
                    s.solver_iterations, solve_status_name(s.status).c_str(), s.note.c_str());
        prev = s.bound;
    }
    std::printf("  terminal: %s after %.3f s\n", tr.terminal_status.c_str(), total_s);

    json j = refinement_trace_json(tr);
    j["input"] = cfg.input;
    j["method"] = cfg.method;
    j["cone"] = cone;
    j["seed"] = cfg.seed;
    j["n"] = p.vars();
    j["degree"] = p.degree();
    j["final_bound"] = tr.steps.empty() ? json(nullptr) : json(tr.final_bound());
    j["total_s"] = total_s;
    emit_json(j, cfg.out);

    // Later steps may legitimately stall; no usable bound at all is a failure.
    if (tr.steps.empty() || tr.steps.front().status != SolveStatus::Solved) return 3;
    return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchCfg {
    std::vector<int> ns{2, 3, 4};
    int degree = 4;
    int instances = 3;
    std::vector<std::string> methods{"dsos", "sdsos", "sos"};
    std::string solver = "dense";
    double tol = 1e-4;
    int max_iters = 2000;
    std::uint64_t seed = 42;
    std::string out;
};

int run_bench(const BenchCfg& cfg) {
    if (cfg.degree < 2 || cfg.degree % 2 != 0)
        throw std::invalid_argument("bench: --degree must be even and >= 2");

    AdmmOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;

    std::vector<std::string> lines;
    std::vector<std::string> failures;
    std::cerr << "bench: base seed " << cfg.seed << ", instance seed = base + 1000*n + index\n";
    for (int n : cfg.ns) {
        for (int i = 0; i < cfg.instances; ++i) {
            const std::uint64_t s = cfg.seed + 1000ull * static_cast<std::uint64_t>(n) +
                                    static_cast<std::uint64_t>(i);
            const Polynomial p = random_pop_instance(n, cfg.degree / 2, s);
            for (const auto& method : cfg.methods) {
                const std::string cell =
                    "n=" + std::to_string(n) + " seed=" + std::to_string(s) + " " + method;
                try {
                    ConeSpec spec{cone_tag_from_name(method), {}};
                    if (cfg.solver == "chordal") spec.clique_bases = correlative_clique_bases(p);
                    const CompiledProblem cp = compile_pop(p, spec);
                    const auto t0 = Clock::now();
                    const Solution sol = run_solver(
                        cp.program, cfg.solver == "rowsparse" ? "rowsparse" : "dense", opts);
                    const double dt = seconds_since(t0);
                    if (sol.status == SolveStatus::NumericalTrouble) {
                        failures.push_back(cell + ": NumericalTrouble");
                        continue;
                    }
                    lines.push_back(std::to_string(n) + "," + std::to_string(cp.sizing.N) + "," +
                                    std::to_string(cp.sizing.m) + "," + method + "," +
                                    fmt("%.10g", sol.x[cp.gamma_index]) + "," +
                                    fmt("%.3f", dt) + "," + std::to_string(sol.iterations) +
                                    "," + solve_status_name(sol.status));
                } catch (const std::exception& e) {
                    failures.push_back(cell + ": " + e.what());
                }
            }
        }
    }

    std::ostringstream csv;
    csv << "n,N,m,method,bound,time_s,iters,status\n";
    for (const auto& l : lines) csv << l << "\n";
    if (cfg.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot open " + cfg.out);
        f << csv.str();
    }
    for (const auto& f : failures) std::cerr << "bench cell failed: " << f << "\n";
    std::cerr << "bench: " << lines.size() << " rows, " << failures.size() << " failures ("
              << cfg.ns.size() * cfg.instances * cfg.methods.size() << " cells)\n";
    return lines.empty() ? 3 : 0;
}

// ---- slack ------------------------------------------------------------------

struct SlackCfg {
    int k = 0;
    std::string out, witness;
    double tol = 1e-9;
};

int run_slack(const SlackCfg& cfg) {
    if (!cfg.witness.empty()) {
        std::ifstream f(cfg.witness);
        if (!f) throw std::runtime_error("cannot open " + cfg.witness);
        json j;
        f >> j;
        const auto [A, B] = s2_witness_from_json(j);
        const int k = static_cast<int>(B.size());
        if (cfg.k > 0 && cfg.k != k)
            throw std::invalid_argument("slack: witness is for k=" + std::to_string(k) +
                                        ", but --k " + std::to_string(cfg.k) + " was given");
        const FactorizationReport rep =
            verify_s2_factorization(slack_matrix(k).values, A, B, cfg.tol);
        std::vector<std::pair<std::string, std::string>> rows{
            {"witness", cfg.witness},
            {"k", std::to_string(k)},
            {"accepted", rep.accepted ? "yes" : "no"},
            {"min eigenvalue", fmt("%.3e", rep.min_eigenvalue)},
            {"max entry error", fmt("%.3e", rep.max_entry_error)}};
        for (std::size_t i = 0; i < rep.violations.size() && i < 5; ++i)
            rows.push_back({i == 0 ? "violations" : "", rep.violations[i]});
        if (rep.violations.size() > 5)
            rows.push_back({"", "... " + std::to_string(rep.violations.size() - 5) + " more"});
        print_table(rows);
        return rep.accepted ? 0 : 3;
    }

    const SlackMatrix s = slack_matrix(cfg.k);
    std::ostringstream csv;
    csv << "i1,i2";
    for (int t = 1; t <= s.k; ++t) csv << ",j" << t;
    csv << "\n";
    for (std::size_t r = 0; r < s.row_pairs.size(); ++r) {
        csv << s.row_pairs[r].first << "," << s.row_pairs[r].second;
        for (int t = 0; t < s.k; ++t) csv << "," << fmt("%.17g", s.values(r, t));
        csv << "\n";
    }
    if (cfg.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot open " + cfg.out);
        f << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "soskit: sum-of-squares certificates and bounds over the SOS, SDSOS and DSOS cones.\n"
        "Exit codes: 0 success, 2 input error, 3 solver/verification failure."};
    app.require_subcommand(1);

    const auto cone_names = CLI::IsMember({"sos", "sdsos", "dsos"});
    const auto solver_names = CLI::IsMember({"dense", "rowsparse", "chordal"});

    CompileCfg cc;
    CLI::App* compile = app.add_subcommand(
        "compile", "Compile a polynomial into a conic program (JSON and, when the cones allow, "
                   "SDPA sparse) and report sizing");
    compile->add_option("input", cc.input, "polynomial text file")->required();
    compile->add_option("--cone", cc.cone, "gram cone")->check(cone_names);
    compile->add_flag("--chordal", cc.chordal, "per-clique bases from correlative sparsity");
    compile->add_flag("--feasibility", cc.feasibility,
                      "certify p itself instead of bounding p - gamma");
    compile->add_option("--out", cc.out, "output path base (default: input stem)");

    SolveCfg sc;
    CLI::App* solve = app.add_subcommand(
        "solve", "Solve a polynomial bound/feasibility problem or a stored conic program "
                 "(.json, .dat-s) and report the result");
    solve->add_option("input", sc.input, "polynomial, .json or .dat-s file")->required();
    solve->add_option("--cone", sc.cone, "gram cone (polynomial input)")->check(cone_names);
    solve->add_option("--solver", sc.solver,
                      "dense | rowsparse | chordal (clique bases for polynomials, PSD-block "
                      "splitting for stored programs)")
        ->check(solver_names);
    solve->add_option("--tol", sc.tol, "solver tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iters", sc.max_iters, "solver iteration cap")
        ->check(CLI::PositiveNumber);
    solve->add_option("--rho", sc.rho, "initial penalty")->check(CLI::PositiveNumber);
    solve->add_flag("--no-adapt", sc.no_adapt, "freeze the penalty parameter");
    solve->add_flag("--feasibility", sc.feasibility,
                    "certify p itself instead of bounding p - gamma");
    solve->add_option("--seed", sc.seed, "seed recorded in the report");
    solve->add_option("--out", sc.out, "write the JSON report here (default: stdout)");

    RefineCfg rc;
    CLI::App* refine = app.add_subcommand(
        "refine", "Iteratively tighten a lower bound by column generation or basis pursuit; "
                  "writes the trace as JSON");
    refine->add_option("input", rc.input, "polynomial text file")->required();
    refine->add_option("--method", rc.method, "colgen | basispursuit")
        ->check(CLI::IsMember({"colgen", "basispursuit"}));
    refine->add_option("--cone", rc.cone, "basis-pursuit cone (dsos or sdsos)")
        ->check(CLI::IsMember({"dsos", "sdsos"}));
    refine->add_option("--max-iters", rc.max_iters, "refinement iterations beyond the first")
        ->check(CLI::NonNegativeNumber);
    refine->add_option("--budget-s", rc.budget_s, "wall clock budget in seconds")
        ->check(CLI::PositiveNumber);
    refine->add_option("--tol", rc.tol, "inner solver tolerance")->check(CLI::PositiveNumber);
    refine->add_option("--solver-max-iters", rc.solver_max_iters, "inner solver iteration cap")
        ->check(CLI::PositiveNumber);
    refine->add_option("--pricing-tol", rc.pricing_tol, "minimum ray violation worth adding")
        ->check(CLI::PositiveNumber);
    refine->add_option("--atlas-k", rc.atlas_k, "support size of the initial ray atlas")
        ->check(CLI::PositiveNumber);
    refine->add_option("--pool-k", rc.pool_k, "support size of the pricing pool")
        ->check(CLI::PositiveNumber);
    refine->add_option("--seed", rc.seed, "seed recorded in the report");
    refine->add_option("--out", rc.out, "write the JSON trace here (default: stdout)");

    BenchCfg bc;
    CLI::App* bench = app.add_subcommand(
        "bench", "Sweep random minimization instances over a grid and emit CSV "
                 "(n,N,m,method,bound,time_s,iters,status)");
    bench->add_option("--n", bc.ns, "variable counts, comma separated")->delimiter(',');
    bench->add_option("--degree", bc.degree, "polynomial degree (even)");
    bench->add_option("--instances", bc.instances, "instances per n")
        ->check(CLI::PositiveNumber);
    bench->add_option("--methods", bc.methods, "cones to run, comma separated")
        ->delimiter(',')
        ->check(cone_names);
    bench->add_option("--solver", bc.solver, "dense | rowsparse | chordal")->check(solver_names);
    bench->add_option("--tol", bc.tol, "solver tolerance")->check(CLI::PositiveNumber);
    bench->add_option("--max-iters", bc.max_iters, "solver iteration cap")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bc.seed, "base seed for instance generation");
    bench->add_option("--out", bc.out, "write the CSV here (default: stdout)");

    SlackCfg kc;
    CLI::App* slack = app.add_subcommand(
        "slack", "Emit the pairwise-product slack matrix as CSV, or verify a 2x2 PSD "
                 "factorization witness from JSON");
    slack->add_option("--k", kc.k, "matrix parameter (rows are pairs from 1..k)");
    slack->add_option("--witness", kc.witness, "witness JSON with A and B block lists");
    slack->add_option("--tol", kc.tol, "witness acceptance tolerance")
        ->check(CLI::PositiveNumber);
    slack->add_option("--out", kc.out, "write the CSV here (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        if (compile->parsed()) return run_compile(cc);
        if (solve->parsed()) return run_solve(sc);
        if (refine->parsed()) return run_refine(rc);
        if (bench->parsed()) return run_bench(bc);
        if (slack->parsed()) {
            if (kc.witness.empty() && kc.k < 2)
                throw std::invalid_argument("slack: need --k >= 2 or --witness");
            return run_slack(kc);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
