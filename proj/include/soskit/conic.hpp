#pragma once

// Standard-form conic program data: min c'x  s.t.  Ax = b,  x in K, where K
// is an ordered product of Zero / Free / NonNeg / SOC / RotSOC / PSD blocks.
// PSD blocks are stored in the scaled symmetric vectorization (off-diagonals
// multiplied by sqrt(2)), so the Euclidean inner product on x matches the
// Frobenius product on the matrix side.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace soskit {

enum class ConeKind { Zero, Free, NonNeg, SOC, RotSOC, PSD };

struct ConeBlock {
    ConeKind kind = ConeKind::Free;
    int size = 0;  // vector dimension, except PSD where it is the matrix side

    int dim() const { return kind == ConeKind::PSD ? size * (size + 1) / 2 : size; }
};

inline std::string cone_kind_name(ConeKind k) {
    switch (k) {
        case ConeKind::Zero: return "zero";
        case ConeKind::Free: return "free";
        case ConeKind::NonNeg: return "nonneg";
        case ConeKind::SOC: return "soc";
        case ConeKind::RotSOC: return "rotsoc";
        case ConeKind::PSD: return "psd";
    }
    return "?";
}

inline ConeKind cone_kind_from_name(const std::string& s) {
    if (s == "zero") return ConeKind::Zero;
    if (s == "free") return ConeKind::Free;
    if (s == "nonneg") return ConeKind::NonNeg;
    if (s == "soc") return ConeKind::SOC;
    if (s == "rotsoc") return ConeKind::RotSOC;
    if (s == "psd") return ConeKind::PSD;
    throw std::invalid_argument("unknown cone kind: " + s);
}

// ---- scaled symmetric vectorization -------------------------------------

/// Length of svec for a side-s symmetric matrix.
inline int svec_dim(int side) { return side * (side + 1) / 2; }

/// Index of entry (i,j), i <= j, in the column-major upper-triangle layout.
inline int svec_index(int i, int j) { return j * (j + 1) / 2 + i; }

/// Inverse of svec_index: the (i, j) pair, i <= j, stored at position k.
inline std::pair<int, int> svec_position(int k) {
    int j = static_cast<int>((std::sqrt(8.0 * k + 1.0) - 1.0) / 2.0);
    while (j * (j + 1) / 2 > k) --j;
    while ((j + 1) * (j + 2) / 2 <= k) ++j;
    return {k - j * (j + 1) / 2, j};
}

inline Eigen::VectorXd svec(const Eigen::MatrixXd& M) {
    const int s = static_cast<int>(M.rows());
    const double r2 = std::numbers::sqrt2;
    Eigen::VectorXd v(svec_dim(s));
    for (int j = 0; j < s; ++j)
        for (int i = 0; i <= j; ++i) v[svec_index(i, j)] = (i == j) ? M(i, j) : r2 * M(i, j);
    return v;
}

inline Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int side) {
    const double inv_r2 = 1.0 / std::numbers::sqrt2;
    Eigen::MatrixXd M(side, side);
    for (int j = 0; j < side; ++j)
        for (int i = 0; i <= j; ++i) {
            double x = v[svec_index(i, j)];
            if (i == j)
                M(i, j) = x;
            else
                M(i, j) = M(j, i) = inv_r2 * x;
        }
    return M;
}

// ---- program -------------------------------------------------------------

struct ConicProgram {
    int num_vars = 0;
    Eigen::SparseVector<double> objective;          // c
    Eigen::SparseMatrix<double, Eigen::RowMajor> A; // m x num_vars
    Eigen::VectorXd b;
    std::vector<ConeBlock> cones;

    int num_rows() const { return static_cast<int>(A.rows()); }

    int cone_dim() const {
        int d = 0;
        for (const auto& blk : cones) d += blk.dim();
        return d;
    }

    void validate() const {
        if (cone_dim() != num_vars)
            throw std::logic_error("ConicProgram: cone dimensions sum to " +
                                   std::to_string(cone_dim()) + ", expected " +
                                   std::to_string(num_vars));
        if (A.cols() != num_vars) throw std::logic_error("ConicProgram: A column count mismatch");
        if (b.size() != A.rows()) throw std::logic_error("ConicProgram: b length mismatch");
        for (int r = 0; r < A.outerSize(); ++r) {
            if (!Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator(A, r))
                throw std::logic_error("ConicProgram: all-zero row " + std::to_string(r));
        }
    }
};

/// Small builder so compilation code can emit triplets without touching
/// Eigen sparse internals everywhere.
class ProgramBuilder {
public:
    void set_num_vars(int nv) { num_vars_ = nv; }
    int num_vars() const { return num_vars_; }

    int add_block(ConeKind kind, int size) {
        int offset = next_var_;
        cones_.push_back({kind, size});
        next_var_ += cones_.back().dim();
        return offset;
    }

    void set_objective(int var, double coef) { obj_.emplace_back(var, coef); }

    int begin_row(double rhs) {
        rhs_.push_back(rhs);
        return static_cast<int>(rhs_.size()) - 1;
    }

    void add_entry(int row, int var, double coef) {
        if (coef != 0.0) triplets_.emplace_back(row, var, coef);
    }

    ConicProgram finish() {
        ConicProgram p;
        p.num_vars = num_vars_ ? num_vars_ : next_var_;
        p.cones = cones_;
        p.objective.resize(p.num_vars);
        for (auto& [v, c] : obj_) p.objective.coeffRef(v) += c;
        p.A.resize(static_cast<int>(rhs_.size()), p.num_vars);
        p.A.setFromTriplets(triplets_.begin(), triplets_.end());
        p.A.makeCompressed();
        p.b.resize(static_cast<Eigen::Index>(rhs_.size()));
        for (std::size_t i = 0; i < rhs_.size(); ++i) p.b[static_cast<Eigen::Index>(i)] = rhs_[i];
        p.validate();
        return p;
    }

private:
    int num_vars_ = 0;
    int next_var_ = 0;
    std::vector<ConeBlock> cones_;
    std::vector<std::pair<int, double>> obj_;
    std::vector<double> rhs_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

// ---- solver result -------------------------------------------------------

enum class SolveStatus { Solved, MaxIters, NumericalTrouble };

inline std::string solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solved: return "Solved";
        case SolveStatus::MaxIters: return "MaxIters";
        case SolveStatus::NumericalTrouble: return "NumericalTrouble";
    }
    return "?";
}

struct Residuals {
    double primal = 0.0;  // max of relative consensus gap and ||Ax-b||/(1+||b||)
    double dual = 0.0;
    double gap = 0.0;
};

struct Solution {
    Eigen::VectorXd x;       // affine-feasible primal point
    Eigen::VectorXd x_cone;  // cone-feasible copy of x from the projection step
    Eigen::VectorXd y;       // multipliers for Ax = b
    SolveStatus status = SolveStatus::NumericalTrouble;
    double objective = 0.0;
    Residuals residuals;
    int iterations = 0;
};

// ---- entry-selector split -------------------------------------------------

/// Per-row nonzero column lists; the row-sparse solver keeps one local copy of
/// the selected entries per constraint.
struct SelectorSplit {
    std::vector<std::vector<int>> cols;      // H_i: column indices of row i
    std::vector<std::vector<double>> vals;   // H_i a_i: the nonzero values
};

inline SelectorSplit make_selector_split(const ConicProgram& p) {
    SelectorSplit s;
    s.cols.resize(p.num_rows());
    s.vals.resize(p.num_rows());
    for (int r = 0; r < p.A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.A, r); it; ++it) {
            s.cols[r].push_back(static_cast<int>(it.col()));
            s.vals[r].push_back(it.value());
        }
    return s;
}

}  // namespace soskit
