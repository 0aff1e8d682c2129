// Shared test fixtures: instance families, feasibility classification, and
// sampled objective minima.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <soskit/compile.hpp>
#include <soskit/polynomial.hpp>
#include <soskit/solver.hpp>

namespace testutil {

using namespace soskit;

// Random quartic plus amp*(sum x_i^2)^2. The squared-norm term puts mass on
// every diagonal Gram entry, keeping the instance inside the DSOS cone, so
// all three methods produce finite bounds.
inline Polynomial shifted_instance(int n, std::uint64_t seed, double amp = 8.0) {
    Polynomial p = random_pop_instance(n, 2, seed);
    Polynomial norm2(n);
    for (int i = 0; i < n; ++i) norm2.add_term(Exponent::unit(n, i, 2), 1.0);
    return p + Polynomial::constant(n, amp) * norm2 * norm2;
}

// Homogeneous 2-variable quartic slice 2x^4 + 2y^4 + a x^3y + (1-a) x^2y^2
// + xy^3. Feasibility flips cone by cone as a grows: DSOS near a = 1.80,
// SDSOS and SOS together near a = 1.98.
inline Polynomial quartic_family(double a) {
    Polynomial p(2);
    p.add_term(Exponent(std::vector<int>{4, 0}), 2.0);
    p.add_term(Exponent(std::vector<int>{0, 4}), 2.0);
    p.add_term(Exponent(std::vector<int>{3, 1}), a);
    p.add_term(Exponent(std::vector<int>{2, 2}), 1.0 - a);
    p.add_term(Exponent(std::vector<int>{1, 3}), 1.0);
    return p;
}

// p(x + t) via term-by-term expansion.
inline Polynomial shift_vars(const Polynomial& p, double t) {
    const int n = p.vars();
    Polynomial q(n);
    const Polynomial offset = Polynomial::constant(n, t);
    for (const auto& [e, c] : p.terms()) {
        Polynomial term = Polynomial::constant(n, c);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < e[i]; ++k) {
                Polynomial xi(n);
                xi.add_term(Exponent::unit(n, i, 1), 1.0);
                term = term * (xi + offset);
            }
        q += term;
    }
    return q;
}

enum class Feas { Feasible, Infeasible, Unclear };

// A stalled primal residual with a vanished dual residual is the ADMM
// infeasibility signature; anything else unresolved stays Unclear.
inline Feas classify_feasibility(const Polynomial& p, ConeTag tag, double tol = 1e-7,
                                 int max_iters = 30000) {
    const CompiledProblem cp = compile_feasibility(p, {tag, {}});
    AdmmOptions opts;
    opts.tol = tol;
    opts.max_iters = max_iters;
    const Solution s = admm_solve(cp.program, opts);
    if (s.status == SolveStatus::Solved) return Feas::Feasible;
    if (s.residuals.primal > 100 * tol && s.residuals.dual < tol) return Feas::Infeasible;
    return Feas::Unclear;
}

struct PopResult {
    double bound = 0.0;
    SolveStatus status = SolveStatus::NumericalTrouble;
    bool infeasible_signature = false;
    int iterations = 0;
};

inline PopResult pop_bound(const Polynomial& p, ConeTag tag, double tol = 1e-6,
                           int max_iters = 200000) {
    const CompiledProblem cp = compile_pop(p, {tag, {}});
    AdmmOptions opts;
    opts.tol = tol;
    opts.max_iters = max_iters;
    const Solution s = admm_solve(cp.program, opts);
    PopResult r;
    r.bound = s.x[cp.gamma_index];
    r.status = s.status;
    r.iterations = s.iterations;
    r.infeasible_signature = s.status != SolveStatus::Solved &&
                             s.residuals.primal > 100 * tol && s.residuals.dual < tol;
    return r;
}

inline double sampled_min(const Polynomial& p, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::vector<double> x(static_cast<std::size_t>(p.vars()));
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < count; ++s) {
        for (auto& xi : x) xi = normal(rng);
        best = std::min(best, p.eval(x));
    }
    return best;
}

}  // namespace testutil
