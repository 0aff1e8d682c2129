#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <soskit/chordal.hpp>
#include <soskit/compile.hpp>
#include <soskit/solver.hpp>

#include "helpers.hpp"

using namespace soskit;
using namespace testutil;

namespace {

SparsityGraph path_graph(int n) {
    SparsityGraph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

SparsityGraph cycle_graph(int n) {
    SparsityGraph g = path_graph(n);
    g.add_edge(0, n - 1);
    return g;
}

SparsityGraph random_graph(int n, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SparsityGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (u(rng) < density) g.add_edge(i, j);
    return g;
}

SparsityGraph with_fill(const SparsityGraph& g, const CliqueTree& ct) {
    SparsityGraph e = g;
    for (auto [a, b] : ct.fill_edges) e.add_edge(a, b);
    return e;
}

// running-intersection property: the cliques containing any vertex form a
// connected piece of the clique forest
bool rip_holds(const CliqueTree& ct) {
    const int p = static_cast<int>(ct.cliques.size());
    std::vector<std::vector<int>> adj(p);
    for (auto [a, b] : ct.tree_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (int v = 0; v < ct.n; ++v) {
        std::vector<int> owners;
        for (int k = 0; k < p; ++k)
            if (std::binary_search(ct.cliques[k].begin(), ct.cliques[k].end(), v))
                owners.push_back(k);
        if (owners.size() <= 1) continue;
        std::set<int> want(owners.begin(), owners.end()), got;
        std::vector<int> stack{owners.front()};
        got.insert(owners.front());
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            for (int d : adj[c])
                if (want.count(d) && got.insert(d).second) stack.push_back(d);
        }
        if (got != want) return false;
    }
    return true;
}

std::vector<std::pair<int, int>> pattern_pairs(const CliqueTree& ct) {
    std::set<std::pair<int, int>> s;
    for (const auto& c : ct.cliques)
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a; b < c.size(); ++b) s.insert({c[a], c[b]});
    return {s.begin(), s.end()};
}

// min <C, X> over PSD X with tr X and a few pattern entries pinned; C lives
// on the pattern, so the clique-decomposed program has the same optimum
ConicProgram pattern_sdp(const CliqueTree& ct, std::uint64_t seed) {
    const int s = ct.n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd B(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) B(i, j) = normal(rng);
    const Eigen::MatrixXd X0 =
        B * B.transpose() / s + 0.5 * Eigen::MatrixXd::Identity(s, s);

    ProgramBuilder pb;
    pb.add_block(ConeKind::PSD, s);
    const auto pairs = pattern_pairs(ct);
    for (const auto& [i, j] : pairs)
        pb.set_objective(svec_index(i, j), normal(rng));

    const int trace = pb.begin_row(X0.trace());
    for (int i = 0; i < s; ++i) pb.add_entry(trace, svec_index(i, i), 1.0);
    int pinned = 0;
    for (const auto& [i, j] : pairs) {
        if (i == j || pinned == 3) continue;
        const int r = pb.begin_row(std::sqrt(2.0) * X0(i, j));
        pb.add_entry(r, svec_index(i, j), 1.0);
        ++pinned;
    }
    return pb.finish();
}

// pin every pattern entry of X and ask the solver whether a PSD completion
// exists; decisive by construction (margins are far from zero)
Feas program_feasible(const Eigen::MatrixXd& X, const CliqueTree& ct) {
    ProgramBuilder pb;
    pb.add_block(ConeKind::PSD, ct.n);
    for (const auto& [i, j] : pattern_pairs(ct)) {
        const double scale = (i == j) ? 1.0 : std::sqrt(2.0);
        const int r = pb.begin_row(scale * X(i, j));
        pb.add_entry(r, svec_index(i, j), 1.0);
    }
    AdmmOptions opts;
    opts.tol = 1e-7;
    opts.max_iters = 30000;
    const Solution sol = admm_solve(pb.finish(), opts);
    if (sol.status == SolveStatus::Solved) return Feas::Feasible;
    if (sol.residuals.primal > 100 * opts.tol && sol.residuals.dual < opts.tol)
        return Feas::Infeasible;
    return Feas::Unclear;
}

}  // namespace

TEST_CASE("correlative graphs connect variables sharing a term") {
    Polynomial p(4);
    p.add_term(Exponent(std::vector<int>{2, 2, 0, 0}), 1.0);
    p.add_term(Exponent(std::vector<int>{0, 1, 1, 1}), -2.0);
    p.add_term(Exponent(std::vector<int>{0, 0, 0, 4}), 3.0);  // no new edges
    const SparsityGraph g = correlative_graph(p);
    const std::set<std::pair<int, int>> want{{0, 1}, {1, 2}, {1, 3}, {2, 3}};
    REQUIRE(g.edges == want);
    REQUIRE(g.has_edge(2, 2));  // self-loops implicit
    REQUIRE_FALSE(g.has_edge(0, 3));
}

TEST_CASE("chordality test agrees with known graphs") {
    REQUIRE(is_chordal(path_graph(6)));
    REQUIRE(is_chordal(random_graph(5, 1.1, 0)));  // complete
    REQUIRE_FALSE(is_chordal(cycle_graph(4)));
    REQUIRE_FALSE(is_chordal(cycle_graph(7)));
    SparsityGraph chorded = cycle_graph(4);
    chorded.add_edge(0, 2);
    REQUIRE(is_chordal(chorded));
}

TEST_CASE("paths and complete graphs extend without fill") {
    const CliqueTree path = chordal_extend(path_graph(6));
    REQUIRE(path.fill_edges.empty());
    REQUIRE(path.cliques.size() == 5);
    for (const auto& c : path.cliques) REQUIRE(c.size() == 2);
    REQUIRE(path.tree_edges.size() == 4);
    REQUIRE(rip_holds(path));

    const CliqueTree full = chordal_extend(random_graph(5, 1.1, 0));
    REQUIRE(full.fill_edges.empty());
    REQUIRE(full.cliques == std::vector<std::vector<int>>{{0, 1, 2, 3, 4}});
    REQUIRE(full.tree_edges.empty());
}

TEST_CASE("cycles triangulate with the expected fill") {
    for (int n : {4, 5, 6, 8}) {
        const SparsityGraph g = cycle_graph(n);
        const CliqueTree ct = chordal_extend(g);
        REQUIRE(static_cast<int>(ct.fill_edges.size()) == n - 3);
        REQUIRE(static_cast<int>(ct.cliques.size()) == n - 2);
        for (const auto& c : ct.cliques) REQUIRE(c.size() == 3);
        REQUIRE(is_chordal(with_fill(g, ct)));
        REQUIRE(rip_holds(ct));
    }
}

TEST_CASE("random graphs get valid chordal extensions") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const SparsityGraph g = random_graph(10, 0.3, 701 + seed);
        const CliqueTree ct = chordal_extend(g);
        const SparsityGraph ext = with_fill(g, ct);
        REQUIRE(is_chordal(ext));
        REQUIRE(rip_holds(ct));

        // every extended edge inside some clique, every clique a real clique
        for (auto [a, b] : ext.edges) {
            bool covered = false;
            for (const auto& c : ct.cliques)
                covered = covered ||
                          (std::binary_search(c.begin(), c.end(), a) &&
                           std::binary_search(c.begin(), c.end(), b));
            REQUIRE(covered);
        }
        for (const auto& c : ct.cliques)
            for (std::size_t x = 0; x < c.size(); ++x)
                for (std::size_t y = x + 1; y < c.size(); ++y)
                    REQUIRE(ext.has_edge(c[x], c[y]));

        // no clique contains another
        for (std::size_t i = 0; i < ct.cliques.size(); ++i)
            for (std::size_t j = 0; j < ct.cliques.size(); ++j)
                if (i != j)
                    REQUIRE_FALSE(detail::is_subset(ct.cliques[i], ct.cliques[j]));
    }
}

TEST_CASE("clique merging trades block count for block size") {
    // two triangles sharing an edge: overlap 2 / min size 3 > 0.6
    SparsityGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.add_edge(1, 3);
    g.add_edge(2, 3);
    ChordalOptions eager;
    eager.merge_threshold = 0.6;
    REQUIRE(chordal_extend(g, eager).cliques.size() == 1);
    ChordalOptions off;
    off.merge_cliques = false;
    REQUIRE(chordal_extend(g, off).cliques.size() == 2);
}

TEST_CASE("aggregate graph reads the nonzero pattern of one psd block") {
    ProgramBuilder pb;
    pb.add_block(ConeKind::NonNeg, 2);
    const int off = pb.add_block(ConeKind::PSD, 4);
    pb.set_objective(off + svec_index(2, 3), 1.0);
    int r = pb.begin_row(1.0);
    pb.add_entry(r, off + svec_index(0, 1), 1.0);
    pb.add_entry(r, off + svec_index(1, 1), 0.5);  // diagonal: no edge
    pb.add_entry(r, 0, 2.0);                       // outside the block: ignored
    r = pb.begin_row(0.0);
    pb.add_entry(r, off + svec_index(1, 2), -1.0);
    pb.add_entry(r, 1, 1.0);
    const ConicProgram prog = pb.finish();

    const SparsityGraph g = aggregate_graph(prog);
    REQUIRE(g.n == 4);
    REQUIRE(g.edges == std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});

    ProgramBuilder two;
    two.add_block(ConeKind::PSD, 2);
    two.add_block(ConeKind::PSD, 2);
    const int row = two.begin_row(1.0);
    two.add_entry(row, 0, 1.0);
    REQUIRE_THROWS_AS(aggregate_graph(two.finish()), std::invalid_argument);
}

TEST_CASE("clique decomposition preserves the optimum") {
    for (std::uint64_t seed : {3, 4, 5}) {
        const CliqueTree ct = chordal_extend(random_graph(6, 0.35, 40 + seed));
        const ConicProgram dense = pattern_sdp(ct, seed);
        const Decomposition dec = decompose_psd(dense, ct);

        REQUIRE(dec.program.cones.size() == ct.cliques.size());
        for (std::size_t k = 0; k < ct.cliques.size(); ++k) {
            REQUIRE(dec.program.cones[k].kind == ConeKind::PSD);
            REQUIRE(dec.program.cones[k].size ==
                    static_cast<int>(ct.cliques[k].size()));
        }
        REQUIRE(dec.program.num_rows() == dense.num_rows() + dec.consensus_rows);

        AdmmOptions opts;
        opts.tol = 1e-8;
        opts.max_iters = 200000;
        const Solution a = admm_solve(dense, opts);
        const Solution b = admm_solve(dec.program, opts);
        REQUIRE(a.status == SolveStatus::Solved);
        REQUIRE(b.status == SolveStatus::Solved);
        REQUIRE(a.objective ==
                Catch::Approx(b.objective).margin(2e-5 * (1.0 + std::abs(a.objective))));
    }
}

TEST_CASE("decomposition rejects offside data and mismatched trees") {
    const CliqueTree ct = chordal_extend(path_graph(4));

    ProgramBuilder pb;
    pb.add_block(ConeKind::PSD, 4);
    const int r = pb.begin_row(1.0);
    pb.add_entry(r, svec_index(0, 3), 1.0);  // (0,3) is not a path-pattern entry
    REQUIRE_THROWS_WITH(decompose_psd(pb.finish(), ct),
                        Catch::Matchers::ContainsSubstring("outside the extended pattern"));

    ProgramBuilder wrong;
    wrong.add_block(ConeKind::PSD, 5);
    const int r2 = wrong.begin_row(1.0);
    wrong.add_entry(r2, svec_index(0, 1), 1.0);
    REQUIRE_THROWS_AS(decompose_psd(wrong.finish(), ct), std::invalid_argument);
}

TEST_CASE("completability matches an independent feasibility solve") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const int s = 5 + static_cast<int>(seed % 3);
        const CliqueTree ct = chordal_extend(random_graph(s, 0.4, 900 + seed));

        Eigen::MatrixXd B(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) B(i, j) = normal(rng);
        Eigen::MatrixXd X = B * B.transpose() / s + 0.5 * Eigen::MatrixXd::Identity(s, s);
        REQUIRE(completable(X, ct, 1e-9));
        const Feas feas = program_feasible(X, ct);
        if (feas != Feas::Unclear) {
            REQUIRE(feas == Feas::Feasible);
            ++checked;
        }

        // wreck one principal 2x2 minor inside a clique
        Eigen::MatrixXd Y = X;
        const auto& c = ct.cliques.front();
        if (c.size() >= 2) {
            const int i = c[0], j = c[1];
            Y(i, j) = Y(j, i) = 2.0 * std::sqrt(Y(i, i) * Y(j, j)) + 1.0;
            REQUIRE_FALSE(completable(Y, ct, 1e-9));
            const Feas bad = program_feasible(Y, ct);
            if (bad != Feas::Unclear) {
                REQUIRE(bad == Feas::Infeasible);
                ++checked;
            }
        }
    }
    REQUIRE(checked >= 12);  // the solver must be decisive most of the time
}

TEST_CASE("completability validates its inputs") {
    const CliqueTree ct = chordal_extend(path_graph(4));
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(4, 4);
    X(0, 3) = X(3, 0) = std::nan("");  // outside the path pattern: ignored
    REQUIRE(completable(X, ct, 1e-9));
    X(0, 1) = X(1, 0) = std::nan("");
    REQUIRE_THROWS_AS(completable(X, ct, 1e-9), std::invalid_argument);
    REQUIRE_THROWS_AS(completable(Eigen::MatrixXd::Identity(3, 3), ct, 1e-9),
                      std::invalid_argument);
}

TEST_CASE("clique trees serialize completely") {
    const CliqueTree ct = chordal_extend(cycle_graph(5));
    const nlohmann::json j = clique_tree_json(ct);
    REQUIRE(j["n"] == 5);
    REQUIRE(j["cliques"].size() == ct.cliques.size());
    REQUIRE(j["fill_edges"].size() == ct.fill_edges.size());
    REQUIRE(j["tree_edges"].size() == ct.tree_edges.size());
    for (std::size_t k = 0; k < ct.cliques.size(); ++k)
        REQUIRE(j["cliques"][k].get<std::vector<int>>() == ct.cliques[k]);
}
