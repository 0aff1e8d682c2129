#pragma once

// First-order ADMM solver for standard-form conic programs.
//
// The dense variant splits min c'x + I{Ax=b}(x) + I_K(z) with x = z. The
// affine step is a Euclidean projection onto {Ax = b}, computed from one
// cached Cholesky factorization of A*A' that is reused every iteration (and
// stays valid when the penalty parameter adapts). The row-sparse variant
// keeps one local copy of the touched entries per constraint row, so every
// step is a closed-form update and no matrix is ever factorized.

#include "soskit/conic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace soskit {

struct AdmmOptions {
    double tol = 1e-4;
    int max_iters = 2000;
    double rho = 1.0;
    bool adapt_rho = true;      // residual balancing, factor 2 at ratio 10
    double over_relax = 1.5;
    bool scale_rows = true;     // equilibrate rows of A to unit norm
    Eigen::VectorXd warm_x_cone;  // optional warm start (cone-side point)
    Eigen::VectorXd warm_dual;    // optional warm start (scaled dual u)
};

// ---- cone projections ------------------------------------------------------

namespace detail {

inline void project_soc_span(Eigen::Ref<Eigen::VectorXd> v) {
    const int n = static_cast<int>(v.size()) - 1;
    const double t = v[0];
    const double a = n > 0 ? v.tail(n).norm() : 0.0;
    if (a <= t) return;        // inside
    if (a <= -t) {             // polar cone: nearest point is the origin
        v.setZero();
        return;
    }
    const double c = 0.5 * (1.0 + t / a);
    v[0] = c * a;
    v.tail(n) *= c;
}

inline void project_rotsoc_span(Eigen::Ref<Eigen::VectorXd> v) {
    // (p, q, u): p,q >= 0 and 2pq >= ||u||^2. The orthogonal change of basis
    // t = (p+q)/sqrt2, s = (p-q)/sqrt2 turns the block into the plain SOC
    // (t, (s, u)), and Euclidean projection commutes with the rotation.
    const double inv_r2 = 1.0 / std::numbers::sqrt2;
    const double p = v[0], q = v[1];
    v[0] = inv_r2 * (p + q);
    v[1] = inv_r2 * (p - q);
    project_soc_span(v);
    const double t = v[0], s = v[1];
    v[0] = inv_r2 * (t + s);
    v[1] = inv_r2 * (t - s);
}

inline void project_psd_span(Eigen::Ref<Eigen::VectorXd> v, int side) {
    if (side == 1) {
        v[0] = std::max(v[0], 0.0);
        return;
    }
    Eigen::MatrixXd M = smat(v, side);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    M.noalias() = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    v = svec(M);
}

}  // namespace detail

/// Euclidean projection of one cone block, in place.
inline void project_cone_span(Eigen::Ref<Eigen::VectorXd> v, const ConeBlock& blk) {
    switch (blk.kind) {
        case ConeKind::Zero: v.setZero(); return;
        case ConeKind::Free: return;
        case ConeKind::NonNeg: v = v.cwiseMax(0.0); return;
        case ConeKind::SOC: detail::project_soc_span(v); return;
        case ConeKind::RotSOC: detail::project_rotsoc_span(v); return;
        case ConeKind::PSD: detail::project_psd_span(v, blk.size); return;
    }
}

inline Eigen::VectorXd project_cone(const Eigen::VectorXd& v, const ConeBlock& blk) {
    if (static_cast<int>(v.size()) != blk.dim())
        throw std::invalid_argument("project_cone: length does not match block dimension");
    Eigen::VectorXd out = v;
    project_cone_span(out, blk);
    return out;
}

/// Projection onto the full product cone of a program's block list.
inline void project_cones_span(Eigen::Ref<Eigen::VectorXd> v, const std::vector<ConeBlock>& cones) {
    int off = 0;
    for (const auto& blk : cones) {
        project_cone_span(v.segment(off, blk.dim()), blk);
        off += blk.dim();
    }
}

/// Distance from v to the product cone.
inline double cone_distance(const Eigen::VectorXd& v, const std::vector<ConeBlock>& cones) {
    Eigen::VectorXd p = v;
    project_cones_span(p, cones);
    return (v - p).norm();
}

/// Recompute constraint residuals of a candidate point from scratch.
/// primal = ||Ax - b|| / (1 + ||b||), dual = distance of x_cone to the cone.
inline Residuals residuals_recheck(const ConicProgram& prog, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& x_cone) {
    Residuals r;
    r.primal = (prog.A * x - prog.b).norm() / (1.0 + prog.b.norm());
    r.dual = cone_distance(x_cone, prog.cones);
    r.gap = 0.0;
    return r;
}

// ---- dense ADMM ------------------------------------------------------------

namespace detail {

inline void equilibrate_rows(Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                             Eigen::VectorXd& b, Eigen::VectorXd& scale, bool enabled) {
    scale = Eigen::VectorXd::Ones(A.rows());
    if (!enabled) return;
    for (int r = 0; r < A.outerSize(); ++r) {
        double nrm2 = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it)
            nrm2 += it.value() * it.value();
        if (nrm2 > 0.0) scale[r] = 1.0 / std::sqrt(nrm2);
    }
    for (int r = 0; r < A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it)
            it.valueRef() *= scale[r];
    b.array() *= scale.array();
}

inline Eigen::VectorXd dense_objective(const ConicProgram& prog) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(prog.num_vars);
    for (Eigen::SparseVector<double>::InnerIterator it(prog.objective); it; ++it)
        c[it.index()] = it.value();
    return c;
}

}  // namespace detail

inline Solution admm_solve(const ConicProgram& prog, const AdmmOptions& opts = {}) {
    const int nv = prog.num_vars;
    const int m = prog.num_rows();

    Eigen::SparseMatrix<double, Eigen::RowMajor> A = prog.A;
    Eigen::VectorXd b = prog.b;
    Eigen::VectorXd rowscale;
    detail::equilibrate_rows(A, b, rowscale, opts.scale_rows);
    Eigen::SparseMatrix<double> At = A.transpose();
    Eigen::VectorXd c = detail::dense_objective(prog);

    // Cached normal-equation factorization: projection onto {Ax=b} is
    // x = v - A'(AA')^{-1}(Av - b), independent of rho.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
    if (m > 0) {
        Eigen::SparseMatrix<double> AAt = (A * At).pruned();
        Eigen::SparseMatrix<double> eye(m, m);
        eye.setIdentity();
        AAt += 1e-12 * eye;  // keeps the factorization alive on dependent rows
        chol.compute(AAt);
        if (chol.info() != Eigen::Success) {
            Solution bad;
            bad.status = SolveStatus::NumericalTrouble;
            return bad;
        }
    }
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    auto affine_project = [&](const Eigen::VectorXd& v) {
        if (m == 0) return v;
        Eigen::VectorXd r = A * v - b;
        lambda = chol.solve(r);
        lambda += chol.solve(r - A * (At * lambda));  // one refinement step
        return Eigen::VectorXd(v - At * lambda);
    };

    double rho = opts.rho;
    const double alpha = opts.over_relax;
    Eigen::VectorXd z = opts.warm_x_cone.size() == nv ? opts.warm_x_cone
                                                      : Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd u = opts.warm_dual.size() == nv ? opts.warm_dual
                                                    : Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd x = z, xh(nv), znew(nv);

    Solution sol;
    sol.status = SolveStatus::MaxIters;

    int iters = 0;
    int next_check = 100;
    for (int it = 0; it < opts.max_iters; ++it) {
        iters = it + 1;
        x = affine_project(z - u - c / rho);
        xh = alpha * x + (1.0 - alpha) * z;
        znew = xh + u;
        project_cones_span(znew, prog.cones);
        u += xh - znew;

        const double r_prim = (x - znew).norm() / std::max({1.0, x.norm(), znew.norm()});
        const double r_dual = rho * (znew - z).norm() / std::max(1.0, rho * u.norm());
        z.swap(znew);
        sol.residuals.primal = r_prim;
        sol.residuals.dual = r_dual;

        if (!std::isfinite(r_prim) || !std::isfinite(r_dual)) {
            sol.status = SolveStatus::NumericalTrouble;
            break;
        }
        if (std::max(r_prim, r_dual) <= opts.tol) {
            sol.status = SolveStatus::Solved;
            break;
        }
        // Residual balancing with exponential backoff. Each change perturbs
        // the duals, and periodic checks can lock into a limit cycle where
        // rho hunts forever; a doubling check interval guarantees arbitrarily
        // long fixed-rho stretches, where plain ADMM convergence applies.
        if (opts.adapt_rho && iters == next_check) {
            next_check *= 2;
            const double ratio = (r_prim + 1e-16) / (r_dual + 1e-16);
            if (ratio > 5.0 || ratio < 0.2) {
                const double f = std::clamp(std::sqrt(ratio), 0.5, 2.0);
                const double next = std::clamp(rho * f, 1e-6, 1e6);
                u *= rho / next;  // unscaled dual rho*u stays continuous
                rho = next;
            }
        }
    }

    sol.iterations = iters;
    sol.x = x;
    sol.x_cone = z;
    sol.y = m > 0 ? Eigen::VectorXd(-rho * rowscale.asDiagonal() * lambda)
                  : Eigen::VectorXd(0);
    sol.objective = c.dot(x);
    const double dobj = prog.b.dot(sol.y);
    sol.residuals.gap =
        std::abs(sol.objective - dobj) / (1.0 + std::abs(sol.objective) + std::abs(dobj));
    if (!x.allFinite() || !z.allFinite()) sol.status = SolveStatus::NumericalTrouble;
    return sol;
}

// ---- row-sparse ADMM --------------------------------------------------------

/// Same solution contract as admm_solve, but built for programs whose rows
/// each touch a handful of variables. One local copy of the touched entries
/// is kept per row; the x-update is a diagonal consensus average and each
/// row's update is a closed-form hyperplane projection, so the per-iteration
/// cost is linear in the number of nonzeros.
///
/// After the hyperplane step the row's scaled dual is always a multiple of
/// the row vector, so it is stored as one scalar theta_i (u_i = theta_i a_i).
inline Solution admm_solve_rowsparse(const ConicProgram& prog, const SelectorSplit& split,
                                     const AdmmOptions& opts = {}) {
    const int nv = prog.num_vars;
    const int m = prog.num_rows();
    if (static_cast<int>(split.cols.size()) != m || static_cast<int>(split.vals.size()) != m)
        throw std::invalid_argument("admm_solve_rowsparse: split row count mismatch");

    Eigen::VectorXd c = detail::dense_objective(prog);

    std::vector<std::vector<double>> vals = split.vals;
    Eigen::VectorXd b = prog.b;
    Eigen::VectorXd rowscale = Eigen::VectorXd::Ones(m);
    std::vector<double> norm2(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double n2 = 0.0;
        for (double v : vals[i]) n2 += v * v;
        if (n2 == 0.0) throw std::invalid_argument("admm_solve_rowsparse: empty row");
        if (opts.scale_rows) {
            const double s = 1.0 / std::sqrt(n2);
            for (double& v : vals[i]) v *= s;
            b[i] *= s;
            rowscale[i] = s;
            n2 = 1.0;
        }
        norm2[i] = n2;
    }

    Eigen::VectorXd count = Eigen::VectorXd::Ones(nv);  // the cone copy counts once
    for (int i = 0; i < m; ++i)
        for (int j : split.cols[i]) count[j] += 1.0;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd w = opts.warm_x_cone.size() == nv ? opts.warm_x_cone
                                                      : Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd vd = opts.warm_dual.size() == nv ? opts.warm_dual
                                                     : Eigen::VectorXd::Zero(nv);
    std::vector<std::vector<double>> zi(m);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) zi[i].assign(split.cols[i].size(), 0.0);

    double rho = opts.rho;
    const double alpha = opts.over_relax;
    const double bnorm = prog.b.norm();
    Eigen::VectorXd acc(nv), dzsum(nv), wh(nv), wprev(nv);

    Solution sol;
    sol.status = SolveStatus::MaxIters;

    int iters = 0;
    int next_check = 100;
    for (int it = 0; it < opts.max_iters; ++it) {
        iters = it + 1;

        // consensus x-update over all copies (diagonal least squares)
        acc = w - vd;
        for (int i = 0; i < m; ++i) {
            const auto& cols = split.cols[i];
            const auto& a = vals[i];
            for (std::size_t k = 0; k < cols.size(); ++k)
                acc[cols[k]] += zi[i][k] - theta[i] * a[k];
        }
        x = (rho * acc - c).cwiseQuotient(rho * count);

        // per-row relaxed hyperplane projections
        double prim2 = 0.0, unorm2 = 0.0, eq2 = 0.0;
        dzsum.setZero();
        for (int i = 0; i < m; ++i) {
            const auto& cols = split.cols[i];
            const auto& a = vals[i];
            double dot_x = 0.0, dot_h = 0.0;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                const double xj = x[cols[k]];
                dot_x += a[k] * xj;
                dot_h += a[k] * (alpha * xj + (1.0 - alpha) * zi[i][k]);
            }
            const double d = dot_x - b[i];
            eq2 += (d / rowscale[i]) * (d / rowscale[i]);  // unscaled row residual
            // p = h + theta*a, so a'p = dot_h + theta*n2 and z = p - theta_new*a
            const double theta_new = (dot_h + theta[i] * norm2[i] - b[i]) / norm2[i];
            for (std::size_t k = 0; k < cols.size(); ++k) {
                const double h = alpha * x[cols[k]] + (1.0 - alpha) * zi[i][k];
                const double znew = h + (theta[i] - theta_new) * a[k];
                dzsum[cols[k]] += znew - zi[i][k];
                const double pr = x[cols[k]] - znew;
                prim2 += pr * pr;
                zi[i][k] = znew;
            }
            theta[i] = theta_new;
            unorm2 += theta_new * theta_new * norm2[i];
        }

        // cone copy
        wprev = w;
        wh = alpha * x + (1.0 - alpha) * w + vd;
        w = wh;
        project_cones_span(w, prog.cones);
        vd = wh - w;
        prim2 += (x - w).squaredNorm();
        unorm2 += vd.squaredNorm();
        dzsum += w - wprev;

        const double scale_p = std::max({1.0, x.norm(), w.norm()});
        const double r_prim = std::max(std::sqrt(prim2) / scale_p,
                                       std::sqrt(eq2) / (1.0 + bnorm));
        const double r_dual = rho * dzsum.norm() / std::max(1.0, rho * std::sqrt(unorm2));
        sol.residuals.primal = r_prim;
        sol.residuals.dual = r_dual;

        if (!std::isfinite(r_prim) || !std::isfinite(r_dual)) {
            sol.status = SolveStatus::NumericalTrouble;
            break;
        }
        if (std::max(r_prim, r_dual) <= opts.tol) {
            sol.status = SolveStatus::Solved;
            break;
        }
        // same backoff schedule as the dense solver, for the same reason
        if (opts.adapt_rho && iters == next_check) {
            next_check *= 2;
            const double ratio = (r_prim + 1e-16) / (r_dual + 1e-16);
            if (ratio > 5.0 || ratio < 0.2) {
                const double f = std::clamp(std::sqrt(ratio), 0.5, 2.0);
                const double next = std::clamp(rho * f, 1e-6, 1e6);
                theta *= rho / next;
                vd *= rho / next;
                rho = next;
            }
        }
    }

    sol.iterations = iters;
    sol.x = x;
    sol.x_cone = w;
    sol.y.resize(m);
    for (int i = 0; i < m; ++i) sol.y[i] = -rho * theta[i] * rowscale[i];
    sol.objective = c.dot(x);
    const double dobj = prog.b.dot(sol.y);
    sol.residuals.gap =
        std::abs(sol.objective - dobj) / (1.0 + std::abs(sol.objective) + std::abs(dobj));
    if (!x.allFinite() || !w.allFinite()) sol.status = SolveStatus::NumericalTrouble;
    return sol;
}

}  // namespace soskit
