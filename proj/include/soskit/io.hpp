#pragma once

// Serialization of conic programs: SDPA sparse format (.dat-s) for programs
// over PSD and nonnegative blocks, and a lossless JSON form covering the
// full cone list. SOC/RotSOC blocks have no SDPA representation here and
// round-trip through JSON only.

#include "soskit/conic.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace soskit {

// ---- SDPA sparse format --------------------------------------------------------
//
// The file encodes   min b'y  s.t.  sum_i y_i F_i - F0 in the block cone,
// whose conic dual is our standard form: rows <F_i, X> = b_i with cost -F0.
// Writing maps row r to F_r, the objective to -F0, and the right-hand side
// to the c line; reading inverts this. PSD blocks keep their side, NonNeg
// blocks appear as negative (diagonal) block sizes, and Free variables are
// written as differences of two nonnegative halves.

namespace detail {

inline bool sdpa_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == ' ' || ch == '\t') continue;
        return ch == '"' || ch == '*';
    }
    return true;  // blank
}

}  // namespace detail

inline void write_sdpa(const ConicProgram& prog, std::ostream& out) {
    // column -> (block number, i, j, scale) for matrix-entry emission
    struct Cell {
        int blk, i, j;
        double scale;  // program coefficient -> matrix entry value
        bool negate;   // second half of a free split
    };
    std::vector<Cell> cells;
    std::vector<int> block_sizes;
    const double inv_r2 = 1.0 / std::numbers::sqrt2;

    for (const auto& blk : prog.cones) {
        const int bno = static_cast<int>(block_sizes.size()) + 1;
        switch (blk.kind) {
            case ConeKind::PSD:
                block_sizes.push_back(blk.size);
                for (int j = 0; j < blk.size; ++j)
                    for (int i = 0; i <= j; ++i)
                        cells.push_back({bno, i + 1, j + 1, i == j ? 1.0 : inv_r2, false});
                break;
            case ConeKind::NonNeg:
                block_sizes.push_back(-blk.size);
                for (int i = 0; i < blk.size; ++i) cells.push_back({bno, i + 1, i + 1, 1.0, false});
                break;
            case ConeKind::Free:
                // x = u - v with u, v >= 0 in one diagonal block
                block_sizes.push_back(-2 * blk.size);
                for (int i = 0; i < blk.size; ++i)
                    cells.push_back({bno, 2 * i + 1, 2 * i + 1, 1.0, false});
                break;
            default:
                throw std::invalid_argument("write_sdpa: only PSD, NonNeg and Free blocks "
                                            "are representable; use JSON for " +
                                            cone_kind_name(blk.kind));
        }
    }

    const int m = prog.num_rows();
    out << "\" soskit conic program, SDPA sparse format\n";
    out << m << "\n" << block_sizes.size() << "\n";
    for (std::size_t i = 0; i < block_sizes.size(); ++i)
        out << block_sizes[i] << (i + 1 < block_sizes.size() ? ' ' : '\n');
    char buf[128];
    for (int r = 0; r < m; ++r) {
        std::snprintf(buf, sizeof buf, "%.17g%c", prog.b[r], r + 1 < m ? ' ' : '\n');
        out << buf;
    }
    if (m == 0) out << "\n";

    auto emit = [&](int matno, int col, double coef) {
        const Cell& c = cells[col];
        double v = coef * c.scale;
        std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", matno, c.blk, c.i, c.j, v);
        out << buf;
        if (c.negate) {  // mirrored entry of the free split
            std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", matno, c.blk, c.i + 1,
                          c.j + 1, -v);
            out << buf;
        }
    };
    // free splits carry their negated twin one diagonal slot down
    {
        int col = 0;
        for (const auto& blk : prog.cones) {
            if (blk.kind == ConeKind::Free)
                for (int i = 0; i < blk.size; ++i) cells[col + i].negate = true;
            col += blk.dim();
        }
    }

    for (Eigen::SparseVector<double>::InnerIterator it(prog.objective); it; ++it)
        emit(0, static_cast<int>(it.index()), -it.value());  // F0 = -cost
    for (int r = 0; r < prog.A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(prog.A, r); it; ++it)
            emit(r + 1, static_cast<int>(it.col()), it.value());
}

inline void save_sdpa(const ConicProgram& prog, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_sdpa: cannot open " + path);
    write_sdpa(prog, out);
}

inline ConicProgram read_sdpa(std::istream& in) {
    std::vector<std::string> tokens;
    std::vector<int> token_line;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::sdpa_comment(line)) continue;
        for (char& ch : line)
            if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            tokens.push_back(tok);
            token_line.push_back(lineno);
        }
    }

    std::size_t pos = 0;
    auto fail = [&](const std::string& what) -> std::runtime_error {
        const int at = pos < token_line.size() ? token_line[pos] : lineno;
        return std::runtime_error("sdpa line " + std::to_string(at) + ": " + what);
    };
    auto next_int = [&]() {
        if (pos >= tokens.size()) throw fail("unexpected end of file");
        try {
            return std::stoi(tokens[pos++]);
        } catch (const std::exception&) {
            --pos;
            throw fail("expected an integer, got '" + tokens[pos] + "'");
        }
    };
    auto next_double = [&]() {
        if (pos >= tokens.size()) throw fail("unexpected end of file");
        try {
            return std::stod(tokens[pos++]);
        } catch (const std::exception&) {
            --pos;
            throw fail("expected a number, got '" + tokens[pos] + "'");
        }
    };

    const int m = next_int();
    const int nblocks = next_int();
    if (m < 0 || nblocks <= 0) throw fail("invalid dimensions");
    std::vector<int> sizes(nblocks);
    for (int& s : sizes) {
        s = next_int();
        if (s == 0) throw fail("zero block size");
    }
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) b[r] = next_double();

    ProgramBuilder pb;
    std::vector<int> offsets;
    for (int s : sizes)
        offsets.push_back(s > 0 ? pb.add_block(ConeKind::PSD, s)
                                : pb.add_block(ConeKind::NonNeg, -s));

    // accumulate entries per matrix, then lay rows out in order
    struct Entry {
        int blk, i, j;
        double v;
    };
    std::vector<std::vector<Entry>> mats(static_cast<std::size_t>(m) + 1);
    while (pos < tokens.size()) {
        const int matno = next_int();
        const int blkno = next_int();
        const int i = next_int();
        const int j = next_int();
        const double v = next_double();
        if (matno < 0 || matno > m) throw fail("matrix index out of range");
        if (blkno < 1 || blkno > nblocks) throw fail("block index out of range");
        const int side = std::abs(sizes[blkno - 1]);
        if (i < 1 || j < 1 || i > side || j > side) throw fail("entry index out of range");
        if (sizes[blkno - 1] < 0 && i != j) throw fail("off-diagonal entry in a diagonal block");
        mats[matno].push_back({blkno - 1, std::min(i, j) - 1, std::max(i, j) - 1, v});
    }

    auto col_of = [&](const Entry& e) {
        return sizes[e.blk] > 0 ? offsets[e.blk] + svec_index(e.i, e.j) : offsets[e.blk] + e.i;
    };
    auto coef_of = [&](const Entry& e) {
        return (sizes[e.blk] > 0 && e.i != e.j) ? e.v * std::numbers::sqrt2 : e.v;
    };
    for (const auto& e : mats[0]) pb.set_objective(col_of(e), -coef_of(e));
    for (int r = 1; r <= m; ++r) {
        const int row = pb.begin_row(b[r - 1]);
        for (const auto& e : mats[r]) pb.add_entry(row, col_of(e), coef_of(e));
    }
    return pb.finish();
}

inline ConicProgram load_sdpa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_sdpa: cannot open " + path);
    return read_sdpa(in);
}

// ---- JSON form -----------------------------------------------------------------

inline nlohmann::json conic_json(const ConicProgram& prog) {
    nlohmann::json j;
    j["num_vars"] = prog.num_vars;
    j["objective"] = nlohmann::json::array();
    for (Eigen::SparseVector<double>::InnerIterator it(prog.objective); it; ++it)
        j["objective"].push_back({it.index(), it.value()});
    j["cones"] = nlohmann::json::array();
    for (const auto& blk : prog.cones)
        j["cones"].push_back({{"kind", cone_kind_name(blk.kind)}, {"size", blk.size}});
    j["rows"] = nlohmann::json::array();
    for (int r = 0; r < prog.num_rows(); ++r) {
        nlohmann::json row;
        row["rhs"] = prog.b[r];
        row["entries"] = nlohmann::json::array();
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(prog.A, r); it; ++it)
            row["entries"].push_back({it.col(), it.value()});
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline ConicProgram conic_from_json(const nlohmann::json& j) {
    ProgramBuilder pb;
    for (const auto& blk : j.at("cones"))
        pb.add_block(cone_kind_from_name(blk.at("kind").get<std::string>()),
                     blk.at("size").get<int>());
    for (const auto& entry : j.at("objective"))
        pb.set_objective(entry.at(0).get<int>(), entry.at(1).get<double>());
    for (const auto& row : j.at("rows")) {
        const int r = pb.begin_row(row.at("rhs").get<double>());
        for (const auto& entry : row.at("entries"))
            pb.add_entry(r, entry.at(0).get<int>(), entry.at(1).get<double>());
    }
    ConicProgram prog = pb.finish();
    if (prog.num_vars != j.at("num_vars").get<int>())
        throw std::invalid_argument("conic_from_json: num_vars does not match the cone list");
    return prog;
}

inline void save_conic_json(const ConicProgram& prog, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_conic_json: cannot open " + path);
    out << conic_json(prog).dump(2) << "\n";
}

inline ConicProgram load_conic_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_conic_json: cannot open " + path);
    return conic_from_json(nlohmann::json::parse(in));
}

}  // namespace soskit
