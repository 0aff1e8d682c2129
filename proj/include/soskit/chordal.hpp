#pragma once

// Sparsity-graph machinery: correlative/aggregate sparsity graphs, greedy
// chordal extension with clique-tree construction, clique decomposition of
// PSD constraints, and completability of partial matrices on chordal
// patterns (all maximal-clique submatrices PSD).

#include "soskit/conic.hpp"
#include "soskit/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace soskit {

struct SparsityGraph {
    int n = 0;
    std::set<std::pair<int, int>> edges;  // normalized i < j, zero-based

    SparsityGraph() = default;
    explicit SparsityGraph(int nvert) : n(nvert) {
        if (nvert < 0) throw std::invalid_argument("SparsityGraph: negative vertex count");
    }

    void add_edge(int i, int j) {
        if (i == j) return;  // self-loops are implicit
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::out_of_range("SparsityGraph::add_edge: vertex out of range");
        edges.insert(std::minmax(i, j));
    }

    bool has_edge(int i, int j) const {
        if (i == j) return true;
        return edges.count(std::minmax(i, j)) > 0;
    }

    std::vector<std::set<int>> adjacency() const {
        std::vector<std::set<int>> adj(n);
        for (auto [i, j] : edges) {
            adj[i].insert(j);
            adj[j].insert(i);
        }
        return adj;
    }
};

/// Variable-interaction graph of a polynomial: i ~ j iff some term contains
/// both x_i and x_j.
inline SparsityGraph correlative_graph(const Polynomial& p) {
    SparsityGraph g(p.vars());
    for (const auto& [e, coef] : p.terms()) {
        (void)coef;
        std::vector<int> present;
        for (int i = 0; i < p.vars(); ++i)
            if (e[i] > 0) present.push_back(i);
        for (std::size_t a = 0; a < present.size(); ++a)
            for (std::size_t b = a + 1; b < present.size(); ++b)
                g.add_edge(present[a], present[b]);
    }
    return g;
}

/// Nonzero-position union over the objective and all constraint rows of a
/// program with exactly one PSD block.
inline SparsityGraph aggregate_graph(const ConicProgram& prog) {
    int psd_count = 0, off = 0, psd_off = -1, side = 0;
    for (const auto& blk : prog.cones) {
        if (blk.kind == ConeKind::PSD) {
            ++psd_count;
            psd_off = off;
            side = blk.size;
        }
        off += blk.dim();
    }
    if (psd_count != 1)
        throw std::invalid_argument("aggregate_graph: program must have exactly one PSD block");

    SparsityGraph g(side);
    const int dim = svec_dim(side);
    auto touch = [&](int col) {
        if (col < psd_off || col >= psd_off + dim) return;
        const auto [i, j] = svec_position(col - psd_off);
        g.add_edge(i, j);
    };
    for (Eigen::SparseVector<double>::InnerIterator it(prog.objective); it; ++it)
        touch(static_cast<int>(it.index()));
    for (int r = 0; r < prog.A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(prog.A, r); it; ++it)
            touch(static_cast<int>(it.col()));
    return g;
}

struct CliqueTree {
    int n = 0;
    std::vector<std::vector<int>> cliques;        // sorted vertex lists, maximal
    std::vector<std::pair<int, int>> tree_edges;  // clique-index pairs (forest)
    std::vector<std::pair<int, int>> fill_edges;  // vertex pairs added by extension
};

struct ChordalOptions {
    bool merge_cliques = true;
    double merge_threshold = 0.75;  // overlap / min clique size
};

namespace detail {

inline std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t cnt = 0, ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] < b[ib]) ++ia;
        else if (a[ia] > b[ib]) ++ib;
        else { ++cnt; ++ia; ++ib; }
    }
    return cnt;
}

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
    return a.size() <= b.size() && intersection_size(a, b) == a.size();
}

// max-weight spanning forest over clique intersections (Kruskal)
inline std::vector<std::pair<int, int>> clique_forest(const std::vector<std::vector<int>>& cliques) {
    const int p = static_cast<int>(cliques.size());
    struct Cand { int w, i, j; };
    std::vector<Cand> cands;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const int w = static_cast<int>(intersection_size(cliques[i], cliques[j]));
            if (w > 0) cands.push_back({w, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.w != b.w) return a.w > b.w;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<int> parent(p);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<std::pair<int, int>> edges;
    for (const auto& c : cands) {
        const int ri = find(c.i), rj = find(c.j);
        if (ri == rj) continue;
        parent[ri] = rj;
        edges.emplace_back(c.i, c.j);
    }
    return edges;
}

inline void prune_non_maximal(std::vector<std::vector<int>>& cliques) {
    std::stable_sort(cliques.begin(), cliques.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    std::vector<std::vector<int>> kept;
    for (auto& c : cliques) {
        bool contained = false;
        for (const auto& k : kept)
            if (is_subset(c, k)) { contained = true; break; }
        if (!contained) kept.push_back(std::move(c));
    }
    cliques = std::move(kept);
}

}  // namespace detail

/// Greedy minimum-degree elimination: returns the maximal cliques of the
/// chordal extension, the fill edges added, and a clique forest satisfying
/// the running-intersection property. Cliques whose overlap exceeds the
/// merge threshold are fused (fewer, slightly larger blocks).
inline CliqueTree chordal_extend(const SparsityGraph& g, const ChordalOptions& opts = {}) {
    CliqueTree ct;
    ct.n = g.n;
    if (g.n == 0) return ct;

    auto adj = g.adjacency();
    std::vector<bool> done(g.n, false);
    std::vector<std::vector<int>> cliques;

    for (int step = 0; step < g.n; ++step) {
        int v = -1, best = g.n + 1;
        for (int u = 0; u < g.n; ++u) {
            if (done[u]) continue;
            const int deg = static_cast<int>(adj[u].size());
            if (deg < best) { best = deg; v = u; }
        }
        std::vector<int> nb(adj[v].begin(), adj[v].end());
        std::vector<int> clique = nb;
        clique.push_back(v);
        std::sort(clique.begin(), clique.end());
        cliques.push_back(std::move(clique));

        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const auto e = std::minmax(nb[a], nb[b]);
                if (adj[e.first].insert(e.second).second) {
                    adj[e.second].insert(e.first);
                    ct.fill_edges.push_back(e);
                }
            }
        done[v] = true;
        for (int u : nb) adj[u].erase(v);
        adj[v].clear();
    }

    detail::prune_non_maximal(cliques);

    if (opts.merge_cliques) {
        for (;;) {
            auto edges = detail::clique_forest(cliques);
            int pick = -1;
            double best_ratio = opts.merge_threshold;
            for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
                const auto& [i, j] = edges[e];
                const double overlap = static_cast<double>(
                    detail::intersection_size(cliques[i], cliques[j]));
                const double ratio = overlap /
                    static_cast<double>(std::min(cliques[i].size(), cliques[j].size()));
                if (ratio > best_ratio) { best_ratio = ratio; pick = e; }
            }
            if (pick < 0) break;
            const auto [i, j] = edges[pick];
            std::vector<int> merged;
            std::set_union(cliques[i].begin(), cliques[i].end(),
                           cliques[j].begin(), cliques[j].end(), std::back_inserter(merged));
            cliques[i] = std::move(merged);
            cliques.erase(cliques.begin() + j);
            detail::prune_non_maximal(cliques);
        }
    }

    std::sort(cliques.begin(), cliques.end());
    ct.tree_edges = detail::clique_forest(cliques);
    ct.cliques = std::move(cliques);
    return ct;
}

/// Independent chordality test: maximum cardinality search followed by the
/// perfect-elimination-ordering verification.
inline bool is_chordal(const SparsityGraph& g) {
    if (g.n == 0) return true;
    auto adj = g.adjacency();
    std::vector<int> weight(g.n, 0), order;
    std::vector<bool> seen(g.n, false);
    std::vector<int> pos(g.n, -1);
    order.reserve(g.n);
    for (int step = 0; step < g.n; ++step) {
        int v = -1, best = -1;
        for (int u = 0; u < g.n; ++u)
            if (!seen[u] && weight[u] > best) { best = weight[u]; v = u; }
        seen[v] = true;
        pos[v] = step;
        order.push_back(v);
        for (int u : adj[v])
            if (!seen[u]) ++weight[u];
    }
    // MCS order reversed is a PEO iff chordal: earlier neighbors of each
    // vertex, minus the latest of them, must all be adjacent to that latest.
    for (int v : order) {
        std::vector<int> earlier;
        for (int u : adj[v])
            if (pos[u] < pos[v]) earlier.push_back(u);
        if (earlier.size() < 2) continue;
        int p = earlier[0];
        for (int u : earlier)
            if (pos[u] > pos[p]) p = u;
        for (int u : earlier)
            if (u != p && !adj[p].count(u)) return false;
    }
    return true;
}

inline nlohmann::json clique_tree_json(const CliqueTree& ct) {
    nlohmann::json j;
    j["n"] = ct.n;
    j["cliques"] = ct.cliques;
    j["fill_edges"] = nlohmann::json::array();
    for (auto [a, b] : ct.fill_edges) j["fill_edges"].push_back({a, b});
    j["tree_edges"] = nlohmann::json::array();
    for (auto [a, b] : ct.tree_edges) j["tree_edges"].push_back({a, b});
    return j;
}

// ---- clique decomposition of a PSD constraint -------------------------------

struct Decomposition {
    ConicProgram program;
    std::vector<std::vector<int>> cliques;
    // pattern entry (i <= j) of the original matrix -> variable index of the
    // owning clique copy in the decomposed program
    std::map<std::pair<int, int>, int> entry_var;
    int consensus_rows = 0;
};

/// Replace the single side-n PSD block with one PSD block per maximal clique
/// plus consensus equalities on entries shared along the clique tree. Data
/// entries outside the extended pattern are an error (dropping them would
/// change the problem); matrix entries outside the pattern cease to exist.
inline Decomposition decompose_psd(const ConicProgram& prog, const CliqueTree& ct) {
    int psd_count = 0, psd_block = -1, psd_off = -1, off = 0, side = 0;
    for (int k = 0; k < static_cast<int>(prog.cones.size()); ++k) {
        if (prog.cones[k].kind == ConeKind::PSD) {
            ++psd_count;
            psd_block = k;
            psd_off = off;
            side = prog.cones[k].size;
        }
        off += prog.cones[k].dim();
    }
    if (psd_count != 1)
        throw std::invalid_argument("decompose_psd: program must have exactly one PSD block");
    if (side != ct.n)
        throw std::invalid_argument("decompose_psd: PSD side does not match clique-tree vertex count");

    const int old_dim = svec_dim(side);

    Decomposition dec;
    dec.cliques = ct.cliques;

    // clique variable layout, inserted where the PSD block sat
    std::vector<int> clique_off(ct.cliques.size());
    int insert_dim = 0;
    for (std::size_t k = 0; k < ct.cliques.size(); ++k) {
        clique_off[k] = psd_off + insert_dim;
        insert_dim += svec_dim(static_cast<int>(ct.cliques[k].size()));
    }
    const int shift = insert_dim - old_dim;  // applied to variables after the block

    // first containing clique owns each pattern entry
    std::vector<std::vector<int>> local(ct.cliques.size());  // global -> local index
    for (std::size_t k = 0; k < ct.cliques.size(); ++k) {
        local[k].assign(ct.n, -1);
        for (int l = 0; l < static_cast<int>(ct.cliques[k].size()); ++l)
            local[k][ct.cliques[k][l]] = l;
    }
    auto copy_var = [&](std::size_t k, int i, int j) {
        const int li = local[k][i], lj = local[k][j];
        const auto [a, b] = std::minmax(li, lj);
        return clique_off[k] + svec_index(a, b);
    };
    for (std::size_t k = 0; k < ct.cliques.size(); ++k)
        for (std::size_t a = 0; a < ct.cliques[k].size(); ++a)
            for (std::size_t b = a; b < ct.cliques[k].size(); ++b) {
                const std::pair<int, int> key{ct.cliques[k][a], ct.cliques[k][b]};
                if (!dec.entry_var.count(key))
                    dec.entry_var[key] = copy_var(k, key.first, key.second);
            }

    auto map_col = [&](int col) -> int {
        if (col < psd_off) return col;
        if (col >= psd_off + old_dim) return col + shift;
        const auto [i, j] = svec_position(col - psd_off);
        auto it = dec.entry_var.find({i, j});
        if (it == dec.entry_var.end())
            throw std::invalid_argument("decompose_psd: data entry outside the extended pattern");
        return it->second;
    };

    ConicProgram out;
    out.num_vars = prog.num_vars + shift;
    for (int k = 0; k < static_cast<int>(prog.cones.size()); ++k) {
        if (k == psd_block) {
            for (const auto& c : ct.cliques)
                out.cones.push_back({ConeKind::PSD, static_cast<int>(c.size())});
        } else {
            out.cones.push_back(prog.cones[k]);
        }
    }

    out.objective.resize(out.num_vars);
    for (Eigen::SparseVector<double>::InnerIterator it(prog.objective); it; ++it)
        out.objective.coeffRef(map_col(static_cast<int>(it.index()))) += it.value();

    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < prog.A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(prog.A, r); it; ++it)
            trips.emplace_back(r, map_col(static_cast<int>(it.col())), it.value());

    // consensus rows: shared entries along tree edges agree across copies
    int row = prog.num_rows();
    for (auto [ci, cj] : ct.tree_edges) {
        std::vector<int> shared;
        std::set_intersection(ct.cliques[ci].begin(), ct.cliques[ci].end(),
                              ct.cliques[cj].begin(), ct.cliques[cj].end(),
                              std::back_inserter(shared));
        for (std::size_t a = 0; a < shared.size(); ++a)
            for (std::size_t b = a; b < shared.size(); ++b) {
                trips.emplace_back(row, copy_var(ci, shared[a], shared[b]), 1.0);
                trips.emplace_back(row, copy_var(cj, shared[a], shared[b]), -1.0);
                ++row;
            }
    }
    dec.consensus_rows = row - prog.num_rows();

    out.A.resize(row, out.num_vars);
    out.A.setFromTriplets(trips.begin(), trips.end());
    out.b.resize(row);
    out.b.head(prog.num_rows()) = prog.b;
    out.b.tail(dec.consensus_rows).setZero();
    out.validate();
    dec.program = std::move(out);
    return dec;
}

/// A partial symmetric matrix on a chordal pattern admits a PSD completion
/// iff every maximal-clique submatrix is PSD. Entries outside the pattern
/// are ignored; NaN inside the pattern is an error.
inline bool completable(const Eigen::MatrixXd& X, const CliqueTree& ct, double tol) {
    if (X.rows() != ct.n || X.cols() != ct.n)
        throw std::invalid_argument("completable: matrix side does not match pattern");
    for (const auto& c : ct.cliques) {
        const int s = static_cast<int>(c.size());
        Eigen::MatrixXd sub(s, s);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) {
                const double v = X(c[a], c[b]);
                if (std::isnan(v))
                    throw std::invalid_argument("completable: unspecified pattern entry");
                sub(a, b) = v;
            }
        sub = 0.5 * (sub + sub.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -tol) return false;
    }
    return true;
}

}  // namespace soskit
