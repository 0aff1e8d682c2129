#pragma once

// Coefficient-matching compiler. A polynomial membership question
// "p = z'Qz with Q in some cone" becomes a standard-form conic program: one
// equality row per monomial (the matching conditions), one variable group
// per Gram block encoding the requested cone:
//
//   SOS    one PSD block of side N
//   DSOS   Q diagonally dominant: off-diagonals split into differences of
//          nonnegatives, one slack per dd row; nonnegative orthant only
//   SDSOS  Q = sum of pairwise 2x2 pieces, each a rotated SOC
//
// The lower-bound form (maximize gamma with p - gamma in the cone) adds one
// free variable entering only the constant matching row. The sparse variant
// matches jointly over per-clique bases of the correlative sparsity graph.

#include "soskit/chordal.hpp"
#include "soskit/conic.hpp"
#include "soskit/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace soskit {

enum class ConeTag { SOS, SDSOS, DSOS };

inline std::string cone_tag_name(ConeTag t) {
    switch (t) {
        case ConeTag::SOS: return "sos";
        case ConeTag::SDSOS: return "sdsos";
        case ConeTag::DSOS: return "dsos";
    }
    return "?";
}

inline ConeTag cone_tag_from_name(const std::string& s) {
    if (s == "sos") return ConeTag::SOS;
    if (s == "sdsos") return ConeTag::SDSOS;
    if (s == "dsos") return ConeTag::DSOS;
    throw std::invalid_argument("unknown cone tag: " + s);
}

struct ConeSpec {
    ConeTag tag = ConeTag::SOS;
    std::vector<MonomialBasis> clique_bases;  // empty: single full basis
};

struct UncoverableMonomial : std::runtime_error {
    Exponent alpha;
    explicit UncoverableMonomial(const Exponent& a)
        : std::runtime_error("uncoverable monomial " + a.str()), alpha(a) {}
};

// ---- matching system ---------------------------------------------------------

struct MatchingEntry {
    int block;      // Gram block index
    int i, j;       // position, i <= j
    double weight;  // contribution of Q_ij to the row (2 off-diagonal, 1 diagonal)
};

struct MatchingRow {
    Exponent alpha;
    std::vector<MatchingEntry> entries;
};

struct MatchingSystem {
    int n = 0;                         // ambient variable count
    std::vector<MonomialBasis> bases;  // empty for polynomial-basis systems
    std::vector<int> sides;            // Gram side per block
    std::vector<MatchingRow> rows;     // sorted by alpha, graded lex
    Eigen::VectorXd rhs;               // p_alpha per row

    int m() const { return static_cast<int>(rows.size()); }
    int num_blocks() const { return static_cast<int>(sides.size()); }
    const MonomialBasis& basis() const { return bases.at(0); }
};

namespace detail {

inline MatchingSystem finish_matching(int n, std::map<Exponent, std::vector<MatchingEntry>>&& cells,
                                      const Polynomial& p) {
    for (const auto& [alpha, coef] : p.terms()) {
        (void)coef;
        if (!cells.count(alpha)) throw UncoverableMonomial(alpha);
    }
    MatchingSystem ms;
    ms.n = n;
    ms.rhs.resize(static_cast<Eigen::Index>(cells.size()));
    int r = 0;
    for (auto& [alpha, entries] : cells) {
        ms.rhs[r++] = p.coeff(alpha);
        ms.rows.push_back({alpha, std::move(entries)});
    }
    return ms;
}

}  // namespace detail

/// Matching conditions of p over a joint list of monomial bases: one row per
/// monomial expressible as a sum of two same-block basis exponents, equating
/// the Gram expansion with p's coefficient (zero when absent).
inline MatchingSystem matching_system_multi(const Polynomial& p,
                                            const std::vector<MonomialBasis>& bases) {
    if (bases.empty()) throw std::invalid_argument("matching_system: no bases");
    const int n = p.vars();
    std::map<Exponent, std::vector<MatchingEntry>> cells;
    for (int k = 0; k < static_cast<int>(bases.size()); ++k) {
        const auto& basis = bases[k];
        if (basis.n != n)
            throw std::invalid_argument("matching_system: basis variable count != polynomial's");
        for (int j = 0; j < basis.size(); ++j)
            for (int i = 0; i <= j; ++i)
                cells[basis[i] + basis[j]].push_back({k, i, j, i == j ? 1.0 : 2.0});
    }
    MatchingSystem ms = detail::finish_matching(n, std::move(cells), p);
    ms.bases = bases;
    for (const auto& b : bases) ms.sides.push_back(b.size());
    return ms;
}

inline MatchingSystem matching_system(const Polynomial& p, const MonomialBasis& basis) {
    return matching_system_multi(p, {basis});
}

/// Matching conditions over an explicit polynomial basis w (used when the
/// basis has been transformed away from plain monomials): the row for alpha
/// carries the alpha-coefficient of w_i w_j, doubled off the diagonal.
inline MatchingSystem matching_system_poly(const Polynomial& p,
                                           const std::vector<Polynomial>& w) {
    if (w.empty()) throw std::invalid_argument("matching_system_poly: empty basis");
    const int n = p.vars();
    std::map<Exponent, std::vector<MatchingEntry>> cells;
    for (int j = 0; j < static_cast<int>(w.size()); ++j)
        for (int i = 0; i <= j; ++i) {
            const Polynomial prod = w[i] * w[j];
            for (const auto& [alpha, coef] : prod.terms())
                cells[alpha].push_back({0, i, j, i == j ? coef : 2.0 * coef});
        }
    MatchingSystem ms = detail::finish_matching(n, std::move(cells), p);
    ms.sides.push_back(static_cast<int>(w.size()));
    return ms;
}

/// Nonzero density of the stacked matching matrix in the full vectorization
/// (each off-diagonal position counted twice): nnz / (m * sum of N_k^2).
inline double matching_density(const MatchingSystem& ms) {
    if (ms.m() == 0) throw std::invalid_argument("matching_density: empty system");
    double nnz = 0;
    for (const auto& row : ms.rows)
        for (const auto& e : row.entries) nnz += (e.i == e.j) ? 1.0 : 2.0;
    double cells = 0;
    for (int s : ms.sides) cells += static_cast<double>(s) * s;
    return nnz / (static_cast<double>(ms.m()) * cells);
}

// ---- conic compilation -------------------------------------------------------

struct CompiledBlock {
    MonomialBasis basis;  // empty for polynomial-basis compiles
    ConeTag tag;
    int side;    // Gram side N
    int offset;  // first program variable of this block's encoding
};

struct SizingReport {
    int n = 0;
    int N = 0;  // largest Gram side
    int m = 0;  // matching rows (minus the constant row in the bound form)
    double density = 0.0;
};

struct CompiledProblem {
    ConicProgram program;
    std::vector<CompiledBlock> blocks;
    int gamma_index = -1;  // bound-form free variable; -1 for feasibility
    SizingReport sizing;
};

namespace detail {

// strict upper triangle, column-major: pair (a,b), a < b
inline int pair_index(int a, int b) { return b * (b - 1) / 2 + a; }

struct BlockCoder {
    ConeTag tag;
    int side;
    int offset;

    int pair_count() const { return side * (side - 1) / 2; }

    int var_count() const {
        switch (tag) {
            case ConeTag::SOS: return svec_dim(side);
            case ConeTag::DSOS: return 2 * side + 2 * pair_count();
            case ConeTag::SDSOS: return side == 1 ? 1 : 3 * pair_count();
        }
        return 0;
    }

    // program columns carrying weight * Q_ij for this block
    void gram_cols(int i, int j, double weight,
                   std::vector<std::pair<int, double>>& out) const {
        const int P = pair_count();
        switch (tag) {
            case ConeTag::SOS:
                out.emplace_back(offset + svec_index(i, j),
                                 i == j ? weight : weight / std::numbers::sqrt2);
                return;
            case ConeTag::DSOS:
                if (i == j) {
                    out.emplace_back(offset + i, weight);
                } else {
                    out.emplace_back(offset + side + pair_index(i, j), weight);
                    out.emplace_back(offset + side + P + pair_index(i, j), -weight);
                }
                return;
            case ConeTag::SDSOS:
                if (side == 1) {
                    out.emplace_back(offset, weight);
                } else if (i == j) {
                    // Q_ii collects the (i,i) corner of every pair touching i
                    for (int b = 0; b < side; ++b) {
                        if (b == i) continue;
                        const int p = pair_index(std::min(i, b), std::max(i, b));
                        out.emplace_back(offset + 3 * p + (i < b ? 0 : 1), weight);
                    }
                } else {
                    // the rotated-cone u slot stores sqrt2 * M_ij
                    out.emplace_back(offset + 3 * pair_index(i, j) + 2,
                                     weight / std::numbers::sqrt2);
                }
                return;
        }
    }
};

}  // namespace detail

/// Shared lowering: matching rows against cone-encoded Gram blocks, plus the
/// dd bookkeeping rows for DSOS blocks and, in the bound form, the free
/// gamma variable entering the constant row with objective -gamma.
inline CompiledProblem compile_from_matching(const MatchingSystem& ms, ConeTag tag,
                                             bool bound_form) {
    ProgramBuilder pb;
    std::vector<detail::BlockCoder> coders;
    CompiledProblem cp;

    for (int k = 0; k < ms.num_blocks(); ++k) {
        const int N = ms.sides[k];
        detail::BlockCoder coder{tag, N, 0};
        switch (tag) {
            case ConeTag::SOS:
                coder.offset = pb.add_block(ConeKind::PSD, N);
                break;
            case ConeTag::DSOS:
                coder.offset = pb.add_block(ConeKind::NonNeg, coder.var_count());
                break;
            case ConeTag::SDSOS:
                if (N == 1) {
                    coder.offset = pb.add_block(ConeKind::NonNeg, 1);
                } else {
                    coder.offset = pb.add_block(ConeKind::RotSOC, 3);
                    for (int p = 1; p < coder.pair_count(); ++p)
                        pb.add_block(ConeKind::RotSOC, 3);
                }
                break;
        }
        coders.push_back(coder);
        cp.blocks.push_back({k < static_cast<int>(ms.bases.size()) ? ms.bases[k]
                                                                   : MonomialBasis{},
                             tag, N, coder.offset});
    }

    int gamma = -1;
    if (bound_form) gamma = pb.add_block(ConeKind::Free, 1);

    const Exponent zero = Exponent::zero(ms.n);
    bool saw_constant_row = false;
    std::vector<std::pair<int, double>> cols;
    for (int r = 0; r < ms.m(); ++r) {
        const int row = pb.begin_row(ms.rhs[r]);
        cols.clear();
        for (const auto& e : ms.rows[r].entries)
            coders[e.block].gram_cols(e.i, e.j, e.weight, cols);
        for (const auto& [col, val] : cols) pb.add_entry(row, col, val);
        if (bound_form && ms.rows[r].alpha == zero) {
            pb.add_entry(row, gamma, 1.0);
            saw_constant_row = true;
        }
    }
    if (bound_form && !saw_constant_row)
        throw std::invalid_argument("compile: basis cannot express a constant offset");

    for (const auto& coder : coders) {
        if (coder.tag != ConeTag::DSOS) continue;
        const int N = coder.side, P = coder.pair_count();
        for (int i = 0; i < N; ++i) {  // Q_ii - sum_j (pos+neg) - slack = 0
            const int row = pb.begin_row(0.0);
            pb.add_entry(row, coder.offset + i, 1.0);
            for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                const int p = detail::pair_index(std::min(i, j), std::max(i, j));
                pb.add_entry(row, coder.offset + N + p, -1.0);
                pb.add_entry(row, coder.offset + N + P + p, -1.0);
            }
            pb.add_entry(row, coder.offset + N + 2 * P + i, -1.0);
        }
    }

    if (bound_form) pb.set_objective(gamma, -1.0);  // maximize gamma

    cp.program = pb.finish();
    cp.gamma_index = gamma;
    cp.sizing.n = ms.n;
    cp.sizing.N = *std::max_element(ms.sides.begin(), ms.sides.end());
    cp.sizing.m = bound_form ? ms.m() - 1 : ms.m();
    cp.sizing.density = matching_density(ms);
    return cp;
}

namespace detail {

inline std::vector<MonomialBasis> default_bases(const Polynomial& p, const ConeSpec& spec) {
    if (p.degree() % 2 != 0)
        throw std::invalid_argument("compile: polynomial degree must be even");
    if (!spec.clique_bases.empty()) return spec.clique_bases;
    return {monomials_up_to(p.vars(), p.degree() / 2)};
}

}  // namespace detail

/// Feasibility: does p admit a Gram certificate in the requested cone?
inline CompiledProblem compile_feasibility(const Polynomial& p, const ConeSpec& spec) {
    return compile_from_matching(matching_system_multi(p, detail::default_bases(p, spec)),
                                 spec.tag, false);
}

/// Lower bound: maximize gamma with p - gamma in the requested cone. The
/// returned program minimizes -gamma; the bound is x[gamma_index].
inline CompiledProblem compile_pop(const Polynomial& p, const ConeSpec& spec) {
    return compile_from_matching(matching_system_multi(p, detail::default_bases(p, spec)),
                                 spec.tag, true);
}

/// Per-clique monomial bases of the chordally extended correlative sparsity
/// graph: clique C of size k yields the C(k+d,d) monomials in C's variables
/// up to degree d, lifted back to the ambient variable positions.
inline std::vector<MonomialBasis> correlative_clique_bases(const Polynomial& p,
                                                           const ChordalOptions& copts = {}) {
    if (p.degree() % 2 != 0)
        throw std::invalid_argument("compile: polynomial degree must be even");
    const int n = p.vars();
    const int d = p.degree() / 2;
    const CliqueTree ct = chordal_extend(correlative_graph(p), copts);

    std::vector<MonomialBasis> bases;
    for (const auto& clique : ct.cliques) {
        const MonomialBasis local = monomials_up_to(static_cast<int>(clique.size()), d);
        MonomialBasis lifted;
        lifted.n = n;
        for (const auto& e : local.entries) {
            std::vector<int> a(n, 0);
            for (int l = 0; l < static_cast<int>(clique.size()); ++l) a[clique[l]] = e[l];
            lifted.entries.emplace_back(std::move(a));
        }
        bases.push_back(std::move(lifted));
    }
    return bases;
}

/// Sparse SOS feasibility: chordal-extend the correlative sparsity graph and
/// match jointly over per-clique bases (monomials in clique variables up to
/// half the degree).
inline CompiledProblem compile_sparse_sos(const Polynomial& p,
                                          const ChordalOptions& copts = {}) {
    return compile_feasibility(p, {ConeTag::SOS, correlative_clique_bases(p, copts)});
}

// ---- certificates --------------------------------------------------------------

struct GramCertificate {
    struct Block {
        MonomialBasis basis;
        Eigen::MatrixXd Q;
    };
    std::vector<Block> blocks;
};

/// Pull the Gram blocks out of a solver point for a compiled problem.
inline GramCertificate extract_gram(const CompiledProblem& cp, const Eigen::VectorXd& x) {
    GramCertificate cert;
    for (const auto& blk : cp.blocks) {
        const int N = blk.side, off = blk.offset;
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
        switch (blk.tag) {
            case ConeTag::SOS:
                Q = smat(x.segment(off, svec_dim(N)), N);
                break;
            case ConeTag::DSOS: {
                const int P = N * (N - 1) / 2;
                for (int i = 0; i < N; ++i) Q(i, i) = x[off + i];
                for (int b = 0; b < N; ++b)
                    for (int a = 0; a < b; ++a) {
                        const int p = detail::pair_index(a, b);
                        Q(a, b) = Q(b, a) = x[off + N + p] - x[off + N + P + p];
                    }
                break;
            }
            case ConeTag::SDSOS:
                if (N == 1) {
                    Q(0, 0) = x[off];
                } else {
                    for (int b = 0; b < N; ++b)
                        for (int a = 0; a < b; ++a) {
                            const int p = off + 3 * detail::pair_index(a, b);
                            Q(a, a) += x[p];
                            Q(b, b) += x[p + 1];
                            const double mab = x[p + 2] / std::numbers::sqrt2;
                            Q(a, b) += mab;
                            Q(b, a) += mab;
                        }
                }
                break;
        }
        cert.blocks.push_back({blk.basis, std::move(Q)});
    }
    return cert;
}

struct VerifyReport {
    double max_mismatch = 0.0;
    std::vector<double> min_eigenvalues;
    bool certified = false;
};

/// Expand the certificate symbolically and compare coefficients against p;
/// report the worst mismatch and each block's minimum eigenvalue.
inline VerifyReport verify_certificate(const Polynomial& p, const GramCertificate& cert,
                                       double tol) {
    VerifyReport rep;
    Polynomial recon(p.vars());
    for (const auto& blk : cert.blocks) {
        if (blk.basis.size() != static_cast<int>(blk.Q.rows()) || blk.Q.rows() != blk.Q.cols())
            throw std::invalid_argument("verify_certificate: block shape mismatch");
        if (blk.basis.n != p.vars())
            throw std::invalid_argument("verify_certificate: basis variable count mismatch");
        for (int j = 0; j < blk.basis.size(); ++j)
            for (int i = 0; i <= j; ++i) {
                const double w = (i == j ? 1.0 : 2.0) * blk.Q(i, j);
                if (w != 0.0) recon.add_term(blk.basis[i] + blk.basis[j], w);
            }
        if (blk.Q.size() == 0) {
            rep.min_eigenvalues.push_back(0.0);
            continue;
        }
        Eigen::MatrixXd sym = 0.5 * (blk.Q + blk.Q.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
        rep.min_eigenvalues.push_back(eig.eigenvalues().minCoeff());
    }
    Polynomial diff = recon;
    diff -= p;
    for (const auto& [e, c] : diff.terms()) {
        (void)e;
        rep.max_mismatch = std::max(rep.max_mismatch, std::abs(c));
    }
    rep.certified = rep.max_mismatch <= tol;
    for (double ev : rep.min_eigenvalues) rep.certified = rep.certified && ev >= -tol;
    return rep;
}

}  // namespace soskit
