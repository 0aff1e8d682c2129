#pragma once

// Desk-scale slack-matrix constructions: the univariate-quartic slack
// matrices S^(k), pairing of explicit cone points against moment vectors,
// and verification of claimed factorizations through products of 2x2 PSD
// blocks. Slack entries are exact integers; they are computed in integer
// arithmetic and only converted to floating point at the boundary.

#include "soskit/polynomial.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace soskit {

// ---- slack matrices ------------------------------------------------------------

struct SlackMatrix {
    int k = 0;
    std::vector<std::pair<int, int>> row_pairs;  // {i1, i2}, 1-based, i1 < i2, lex order
    Eigen::MatrixXd values;                      // C(k,2) x k
};

/// S_{{i1,i2},j} = [(i1-i2)(i1-j)(i2-j)]^2 over 1 <= i1 < i2 <= k, j = 1..k.
/// An entry is zero exactly when j lies in {i1, i2}.
inline SlackMatrix slack_matrix(int k) {
    if (k < 2) throw std::invalid_argument("slack_matrix: need k >= 2");
    SlackMatrix s;
    s.k = k;
    for (int i1 = 1; i1 <= k; ++i1)
        for (int i2 = i1 + 1; i2 <= k; ++i2) s.row_pairs.emplace_back(i1, i2);
    s.values.resize(static_cast<Eigen::Index>(s.row_pairs.size()), k);
    for (int r = 0; r < static_cast<int>(s.row_pairs.size()); ++r) {
        const auto [i1, i2] = s.row_pairs[r];
        for (int j = 1; j <= k; ++j) {
            const long long prod = static_cast<long long>(i1 - i2) * (i1 - j) * (i2 - j);
            s.values(r, j - 1) = static_cast<double>(prod * prod);
        }
    }
    return s;
}

// ---- cone-point pairing ---------------------------------------------------------

/// The dual point (1, t, t^2, t^3, t^4).
inline Eigen::VectorXd moment_point(double t) {
    Eigen::VectorXd l(5);
    l << 1.0, t, t * t, t * t * t, t * t * t * t;
    return l;
}

/// The univariate quartics v_{i1,i2}(t) = [(i1-i2)(i1-t)(i2-t)]^2 in
/// lexicographic pair order; nonnegative by construction, and evaluating
/// them at the integer points 1..k recovers slack_matrix(k).
inline std::vector<Polynomial> fawzi_quartics(int k) {
    if (k < 2) throw std::invalid_argument("fawzi_quartics: need k >= 2");
    std::vector<Polynomial> vs;
    for (int i1 = 1; i1 <= k; ++i1)
        for (int i2 = i1 + 1; i2 <= k; ++i2) {
            Polynomial lin1(1), lin2(1);  // (i1 - t), (i2 - t)
            lin1.add_term(Exponent::zero(1), static_cast<double>(i1));
            lin1.add_term(Exponent::unit(1, 0), -1.0);
            lin2.add_term(Exponent::zero(1), static_cast<double>(i2));
            lin2.add_term(Exponent::unit(1, 0), -1.0);
            const Polynomial cubic =
                Polynomial::constant(1, static_cast<double>(i1 - i2)) * lin1 * lin2;
            vs.push_back(cubic * cubic);
        }
    return vs;
}

/// Pairing matrix S(r, c) = <ls[c], vs[r]> = sum_d coeff_d(vs[r]) * ls[c][d]:
/// rows follow the cone points, columns the dual moment vectors. Each v is
/// spot-checked for nonnegativity by sampling; an entry below -tol means the
/// inputs do not form a valid slack pairing and raises an error.
inline Eigen::MatrixXd slack_from_cone_points(const std::vector<Polynomial>& vs,
                                              const std::vector<Eigen::VectorXd>& ls,
                                              double tol = 1e-9) {
    if (vs.empty() || ls.empty())
        throw std::invalid_argument("slack_from_cone_points: empty input");
    for (const auto& v : vs) {
        if (v.vars() != 1 || v.degree() > 4)
            throw std::invalid_argument("slack_from_cone_points: expect univariate quartics");
        for (int s = 0; s <= 256; ++s) {
            const double t = -32.0 + 64.0 * s / 256.0;
            if (v.eval(std::vector<double>{t}) < -tol)
                throw std::invalid_argument("slack_from_cone_points: cone point is negative");
        }
    }
    Eigen::MatrixXd S(static_cast<Eigen::Index>(vs.size()), static_cast<Eigen::Index>(ls.size()));
    for (int r = 0; r < static_cast<int>(vs.size()); ++r)
        for (int c = 0; c < static_cast<int>(ls.size()); ++c) {
            const Eigen::VectorXd& l = ls[c];
            double val = 0.0;
            for (const auto& [e, coef] : vs[r].terms()) {
                if (e[0] >= l.size())
                    throw std::invalid_argument("slack_from_cone_points: dual point too short");
                val += coef * l[e[0]];
            }
            if (val < -tol)
                throw std::domain_error("slack_from_cone_points: negative pairing entry");
            S(r, c) = std::max(val, 0.0);
        }
    return S;
}

// ---- factorization verification -------------------------------------------------

struct FactorizationReport {
    bool accepted = false;
    double min_eigenvalue = 0.0;   // over all blocks
    double max_entry_error = 0.0;  // worst |S_ij - sum_k <A_ik, B_jk>|
    std::vector<std::string> violations;
};

namespace detail {

inline double min_eig_2x2(const Eigen::Matrix2d& M) {
    const double a = M(0, 0), d = M(1, 1), b = 0.5 * (M(0, 1) + M(1, 0));
    const double tr = a + d;
    const double disc = std::sqrt(std::max((a - d) * (a - d) + 4.0 * b * b, 0.0));
    return 0.5 * (tr - disc);
}

inline double frob2(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
    return A.cwiseProduct(B).sum();
}

}  // namespace detail

/// Checks a claimed factorization S_ij = sum_k <A_ik, B_jk> with every block
/// 2x2 PSD: min eigenvalues >= -tol and entry reproduction within tol, the
/// sums re-verified in an independent (reversed) summation order. Violations
/// are reported, not thrown; shape inconsistencies are errors.
inline FactorizationReport verify_s2_factorization(
    const Eigen::MatrixXd& S, const std::vector<std::vector<Eigen::Matrix2d>>& A,
    const std::vector<std::vector<Eigen::Matrix2d>>& B, double tol = 1e-9) {
    const int rows = static_cast<int>(S.rows()), cols = static_cast<int>(S.cols());
    if (static_cast<int>(A.size()) != rows || static_cast<int>(B.size()) != cols)
        throw std::invalid_argument("verify_s2_factorization: block count mismatch");
    if (rows == 0 || cols == 0 || A[0].empty())
        throw std::invalid_argument("verify_s2_factorization: empty factorization");
    const std::size_t p = A[0].size();
    for (const auto& blocks : A)
        if (blocks.size() != p)
            throw std::invalid_argument("verify_s2_factorization: ragged A");
    for (const auto& blocks : B)
        if (blocks.size() != p)
            throw std::invalid_argument("verify_s2_factorization: ragged B");

    FactorizationReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    char buf[96];
    auto check_psd = [&](const char* name, int idx, const std::vector<Eigen::Matrix2d>& blocks) {
        for (std::size_t t = 0; t < blocks.size(); ++t) {
            const double e = detail::min_eig_2x2(blocks[t]);
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, e);
            if (e < -tol) {
                std::snprintf(buf, sizeof buf, "%s[%d][%zu] not PSD (min eig %.3e)", name, idx,
                              t, e);
                rep.violations.emplace_back(buf);
            }
        }
    };
    for (int i = 0; i < rows; ++i) check_psd("A", i, A[i]);
    for (int j = 0; j < cols; ++j) check_psd("B", j, B[j]);

    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double fwd = 0.0, rev = 0.0;
            for (std::size_t t = 0; t < p; ++t) fwd += detail::frob2(A[i][t], B[j][t]);
            for (std::size_t t = p; t-- > 0;)
                rev += (A[i][t].transpose() * B[j][t]).trace();
            const double err = std::max(std::abs(fwd - S(i, j)), std::abs(rev - S(i, j)));
            rep.max_entry_error = std::max(rep.max_entry_error, err);
            if (err > tol) {
                std::snprintf(buf, sizeof buf, "S(%d,%d) mismatch: %.6g vs %.6g", i, j, S(i, j),
                              fwd);
                rep.violations.emplace_back(buf);
            }
        }
    rep.accepted = rep.violations.empty();
    return rep;
}

/// Witness layout: {"p": 2, "A": [[[..2x2..], ...p blocks], ...rows],
/// "B": [[...], ...cols]} with each 2x2 block as [[a,b],[c,d]].
inline std::pair<std::vector<std::vector<Eigen::Matrix2d>>,
                 std::vector<std::vector<Eigen::Matrix2d>>>
s2_witness_from_json(const nlohmann::json& j) {
    auto parse_side = [](const nlohmann::json& side) {
        std::vector<std::vector<Eigen::Matrix2d>> out;
        for (const auto& row : side) {
            std::vector<Eigen::Matrix2d> blocks;
            for (const auto& blk : row) {
                Eigen::Matrix2d M;
                M << blk.at(0).at(0).get<double>(), blk.at(0).at(1).get<double>(),
                    blk.at(1).at(0).get<double>(), blk.at(1).at(1).get<double>();
                blocks.push_back(M);
            }
            out.push_back(std::move(blocks));
        }
        return out;
    };
    return {parse_side(j.at("A")), parse_side(j.at("B"))};
}

}  // namespace soskit
