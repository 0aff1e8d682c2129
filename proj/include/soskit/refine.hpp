#pragma once

// Iterative tightening of DSOS/SDSOS lower bounds toward the SOS optimum:
// column generation over dd extreme rays, and Cholesky basis pursuit. Both
// produce a RefinementTrace whose bound sequence can only go up (the previous
// optimum stays feasible at every iteration), up to solver slack.

#include "soskit/compile.hpp"
#include "soskit/solver.hpp"

#include <json.hpp>

#include <chrono>
#include <optional>
#include <set>
#include <string>

namespace soskit {

// ---- dd extreme rays ---------------------------------------------------------

/// Sign-canonical +-1 vectors with bounded support. For k=2 these are exactly
/// the extreme rays of the dd cone: Q is dd iff Q = sum_i alpha_i v_i v_i^T
/// with alpha >= 0 over this set.
struct RayAtlas {
    int n = 0;                           // ambient dimension
    int k = 0;                           // sparsity cap
    std::vector<std::vector<int>> rays;  // entries in {-1,0,+1}, first nonzero +1
};

/// All nonzero vectors with <= k entries in {-1,+1} (rest zero), one per sign
/// class (first nonzero is +1). Ordered by support size, then support, then
/// sign pattern. k=2 gives n singletons plus n(n-1) signed pairs: n^2 rays.
inline RayAtlas dd_extreme_rays(int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("dd_extreme_rays: need 1 <= k <= n");
    RayAtlas atlas;
    atlas.n = n;
    atlas.k = k;
    for (int s = 1; s <= k; ++s) {
        std::vector<int> sup(s);
        for (int i = 0; i < s; ++i) sup[i] = i;
        while (true) {
            for (int mask = 0; mask < (1 << (s - 1)); ++mask) {
                std::vector<int> v(n, 0);
                v[sup[0]] = 1;
                for (int b = 1; b < s; ++b) v[sup[b]] = ((mask >> (b - 1)) & 1) ? -1 : 1;
                atlas.rays.push_back(std::move(v));
            }
            int i = s - 1;
            while (i >= 0 && sup[i] == n - s + i) --i;
            if (i < 0) break;
            ++sup[i];
            for (int j = i + 1; j < s; ++j) sup[j] = sup[j - 1] + 1;
        }
    }
    return atlas;
}

/// Exact conic combination of a dd matrix over the k=2 atlas, or nullopt when
/// Q is not dd. Closed form: the pair ray with the sign of Q_ab absorbs each
/// off-diagonal entry, and the singletons pick up the leftover diagonal,
/// which is nonnegative exactly when Q is dd.
inline std::optional<Eigen::VectorXd> reconstruct_dd(const Eigen::MatrixXd& Q,
                                                     const RayAtlas& atlas,
                                                     double tol = 1e-12) {
    const int n = static_cast<int>(Q.rows());
    if (Q.cols() != n || atlas.n != n)
        throw std::invalid_argument("reconstruct_dd: dimension mismatch");
    if (atlas.k != 2) throw std::invalid_argument("reconstruct_dd: atlas must have k=2");

    // locate each ray by its support and sign pattern
    Eigen::MatrixXi diag_idx = Eigen::MatrixXi::Constant(n, 1, -1);
    Eigen::MatrixXi plus_idx = Eigen::MatrixXi::Constant(n, n, -1);
    Eigen::MatrixXi minus_idx = Eigen::MatrixXi::Constant(n, n, -1);
    for (int r = 0; r < static_cast<int>(atlas.rays.size()); ++r) {
        const auto& v = atlas.rays[r];
        int a = -1, b = -1;
        for (int i = 0; i < n; ++i)
            if (v[i] != 0) (a < 0 ? a : b) = i;
        if (b < 0)
            diag_idx(a, 0) = r;
        else
            (v[a] * v[b] > 0 ? plus_idx : minus_idx)(a, b) = r;
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(atlas.rays.size()));
    for (int a = 0; a < n; ++a) {
        double off = 0.0;
        for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            off += std::abs(Q(a, b));
            if (b < a) continue;
            const double q = Q(a, b);
            const int r = q >= 0 ? plus_idx(a, b) : minus_idx(a, b);
            if (r < 0) throw std::invalid_argument("reconstruct_dd: atlas is missing a pair ray");
            alpha[r] = std::abs(q);
        }
        const double leftover = Q(a, a) - off;
        if (leftover < -tol) return std::nullopt;  // not dd
        const int r = diag_idx(a, 0);
        if (r < 0) throw std::invalid_argument("reconstruct_dd: atlas is missing a singleton ray");
        alpha[r] = std::max(leftover, 0.0);
    }
    return alpha;
}

// ---- refinement traces -------------------------------------------------------

struct RefinementStep {
    double bound = 0.0;
    std::string note;  // added ray, or basis condition number
    double time_s = 0.0;
    SolveStatus status = SolveStatus::MaxIters;
    int solver_iterations = 0;
};

struct RefinementTrace {
    std::vector<RefinementStep> steps;
    std::string terminal_status;

    double final_bound() const {
        return steps.empty() ? -std::numeric_limits<double>::infinity() : steps.back().bound;
    }
};

struct RefineOptions {
    int atlas_k = 2;            // initial ray sparsity
    int pool_k = 3;             // pricing pool sparsity
    double pricing_tol = 1e-6;  // add a ray only when v'Xv < -pricing_tol
    int max_iters = 20;         // refinement iterations beyond iteration 0
    double budget_s = 600.0;    // wall-clock budget
    double improvement_floor = 1e-4;
    AdmmOptions solver{.tol = 1e-8, .max_iters = 400000};
};

inline nlohmann::json refinement_trace_json(const RefinementTrace& trace) {
    nlohmann::json j;
    j["terminal_status"] = trace.terminal_status;
    j["iterations"] = nlohmann::json::array();
    for (const auto& s : trace.steps)
        j["iterations"].push_back({{"bound", s.bound},
                                   {"note", s.note},
                                   {"time_s", s.time_s},
                                   {"status", solve_status_name(s.status)},
                                   {"solver_iterations", s.solver_iterations}});
    return j;
}

// ---- column generation -------------------------------------------------------

namespace detail {

inline std::string ray_str(const std::vector<int>& v) {
    std::string s;
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        if (v[i] == 0) continue;
        s += v[i] > 0 ? "+e" : "-e";
        s += std::to_string(i + 1);
    }
    return s;
}

/// Bound-form LP over a fixed ray set: maximize gamma subject to the matching
/// rows with Q = sum_i alpha_i v_i v_i^T, alpha >= 0. Column i's coefficient
/// in row beta is v_i' A_beta v_i.
inline ConicProgram ray_form_lp(const MatchingSystem& ms,
                                const std::vector<std::vector<int>>& rays) {
    ProgramBuilder pb;
    const int R = static_cast<int>(rays.size());
    const int a0 = pb.add_block(ConeKind::NonNeg, R);
    const int gamma = pb.add_block(ConeKind::Free, 1);
    const Exponent zero = Exponent::zero(ms.n);
    for (int r = 0; r < ms.m(); ++r) {
        const int row = pb.begin_row(ms.rhs[r]);
        for (int i = 0; i < R; ++i) {
            double coef = 0.0;
            for (const auto& e : ms.rows[r].entries)
                coef += e.weight * rays[i][e.i] * rays[i][e.j];
            pb.add_entry(row, a0 + i, coef);
        }
        if (ms.rows[r].alpha == zero) pb.add_entry(row, gamma, 1.0);
    }
    pb.set_objective(gamma, -1.0);
    return pb.finish();
}

/// Dual matrix of the Gram-matching equality block, assembled symmetric so
/// that every ray in the current set satisfies v' X v >= 0 at optimality.
inline Eigen::MatrixXd pricing_dual(const MatchingSystem& ms, const Eigen::VectorXd& y, int N) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, N);
    for (int r = 0; r < ms.m(); ++r) {
        for (const auto& e : ms.rows[r].entries) {
            if (e.i == e.j) {
                X(e.i, e.i) -= y[r] * e.weight;
            } else {
                X(e.i, e.j) -= y[r] * e.weight / 2.0;
                X(e.j, e.i) -= y[r] * e.weight / 2.0;
            }
        }
    }
    return X;
}

inline double quad_form(const Eigen::MatrixXd& X, const std::vector<int>& v) {
    double q = 0.0;
    for (int a = 0; a < static_cast<int>(v.size()); ++a) {
        if (v[a] == 0) continue;
        for (int b = 0; b < static_cast<int>(v.size()); ++b)
            if (v[b] != 0) q += v[a] * v[b] * X(a, b);
    }
    return q;
}

}  // namespace detail

/// Lower-bound tightening by column generation. Iteration 0 solves the DSOS
/// bound program in ray form (k=2 atlas); every later iteration prices the
/// <= pool_k-sparse +-1 pool against the matching dual X, adds the single
/// most negative v'Xv ray if it beats -pricing_tol, and re-solves. The
/// previous alpha stays feasible, so the bound never moves down.
inline RefinementTrace column_generation(const Polynomial& p, const RefineOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    if (p.degree() % 2 != 0)
        throw std::invalid_argument("column_generation: polynomial degree must be even");
    const MonomialBasis basis = monomials_up_to(p.vars(), p.degree() / 2);
    const MatchingSystem ms = matching_system(p, basis);
    const int N = basis.size();

    std::vector<std::vector<int>> rays = dd_extreme_rays(N, std::min(opts.atlas_k, N)).rays;
    std::set<std::vector<int>> have(rays.begin(), rays.end());
    const RayAtlas pool = dd_extreme_rays(N, std::min(opts.pool_k, N));

    RefinementTrace trace;
    std::string note = "initial atlas, " + std::to_string(rays.size()) + " rays";
    for (int it = 0; ; ++it) {
        const double ts = elapsed();
        const ConicProgram lp = detail::ray_form_lp(ms, rays);
        const Solution sol = admm_solve(lp, opts.solver);
        const double bound = sol.x.size() > 0 ? sol.x[sol.x.size() - 1] : 0.0;
        trace.steps.push_back({bound, note, elapsed() - ts, sol.status, sol.iterations});
        if (sol.status != SolveStatus::Solved) {
            trace.terminal_status = "solver_" + solve_status_name(sol.status);
            return trace;
        }
        if (it > 0 &&
            bound - trace.steps[trace.steps.size() - 2].bound < opts.improvement_floor) {
            trace.terminal_status = "improvement_floor";
            return trace;
        }
        if (it >= opts.max_iters) {
            trace.terminal_status = "max_iters";
            return trace;
        }
        if (elapsed() > opts.budget_s) {
            trace.terminal_status = "budget_exhausted";
            return trace;
        }

        const Eigen::MatrixXd X = detail::pricing_dual(ms, sol.y, N);
        double best = 0.0;
        const std::vector<int>* best_v = nullptr;
        for (const auto& v : pool.rays) {
            if (have.count(v)) continue;
            const double q = detail::quad_form(X, v);
            if (q < best) {
                best = q;
                best_v = &v;
            }
        }
        if (best_v == nullptr || best >= -opts.pricing_tol) {
            trace.terminal_status = "no_improving_ray";
            return trace;
        }
        rays.push_back(*best_v);
        have.insert(*best_v);
        char buf[64];
        std::snprintf(buf, sizeof buf, " (v'Xv=%.2e)", best);
        note = "added ray " + detail::ray_str(*best_v) + buf;
    }
}

// ---- basis pursuit -----------------------------------------------------------

/// Lower-bound tightening by Gram basis reparameterization. Iteration 0
/// solves the plain DSOS/SDSOS bound program; each later iteration factors
/// the optimal Gram as U'U (after clamping stray negative eigenvalues and
/// adding eps*I), accumulates L <- U*L, recompiles the matching conditions
/// over the transformed basis polynomials L*z(x), and re-solves in the same
/// cheap cone. Q = I recovers the previous optimum, so the bound is
/// non-decreasing and capped by the SOS value.
inline RefinementTrace basis_pursuit(const Polynomial& p, ConeTag tag,
                                     const RefineOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    if (tag == ConeTag::SOS)
        throw std::invalid_argument("basis_pursuit: cone must be dsos or sdsos");
    if (p.degree() % 2 != 0)
        throw std::invalid_argument("basis_pursuit: polynomial degree must be even");
    const MonomialBasis basis = monomials_up_to(p.vars(), p.degree() / 2);
    const int N = basis.size();

    RefinementTrace trace;
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(N, N);
    Eigen::MatrixXd Q;

    {
        const double ts = elapsed();
        const CompiledProblem cp = compile_pop(p, {tag, {}});
        const Solution sol = admm_solve(cp.program, opts.solver);
        const double bound = cp.gamma_index >= 0 ? sol.x[cp.gamma_index] : 0.0;
        trace.steps.push_back({bound, "initial " + cone_tag_name(tag) + " solve",
                               elapsed() - ts, sol.status, sol.iterations});
        if (sol.status != SolveStatus::Solved) {
            trace.terminal_status = "solver_" + solve_status_name(sol.status);
            return trace;
        }
        Q = extract_gram(cp, sol.x).blocks.at(0).Q;
    }

    for (int it = 1; it <= opts.max_iters; ++it) {
        if (elapsed() > opts.budget_s) {
            trace.terminal_status = "budget_exhausted";
            return trace;
        }
        const double ts = elapsed();

        // First-order solvers return Grams with tiny negative eigenvalues;
        // clamp them before the eps*I shift so the factorization is well
        // posed without distorting the basis.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Q + Q.transpose()));
        Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        Eigen::MatrixXd Qhat =
            eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
        const double eps = 1e-9 * Qhat.trace() / N;
        Qhat += eps * Eigen::MatrixXd::Identity(N, N);
        Eigen::LLT<Eigen::MatrixXd> llt(Qhat);
        if (llt.info() != Eigen::Success) {
            trace.terminal_status = "cholesky_failure";
            return trace;
        }
        L = llt.matrixU() * L;

        std::vector<Polynomial> w(N, Polynomial(p.vars()));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (L(i, j) != 0.0) w[i].add_term(basis[j], L(i, j));

        const MatchingSystem ms = matching_system_poly(p, w);
        const CompiledProblem cp = compile_from_matching(ms, tag, true);
        const Solution sol = admm_solve(cp.program, opts.solver);
        const double bound = cp.gamma_index >= 0 ? sol.x[cp.gamma_index] : 0.0;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        char buf[64];
        std::snprintf(buf, sizeof buf, "basis update, cond(L)=%.3e",
                      smin > 0 ? svd.singularValues()(0) / smin
                               : std::numeric_limits<double>::infinity());
        trace.steps.push_back({bound, buf, elapsed() - ts, sol.status, sol.iterations});
        if (sol.status != SolveStatus::Solved) {
            trace.terminal_status = "solver_" + solve_status_name(sol.status);
            return trace;
        }
        if (bound - trace.steps[trace.steps.size() - 2].bound < opts.improvement_floor) {
            trace.terminal_status = "improvement_floor";
            return trace;
        }
        Q = extract_gram(cp, sol.x).blocks.at(0).Q;
    }
    trace.terminal_status = "max_iters";
    return trace;
}

}  // namespace soskit
