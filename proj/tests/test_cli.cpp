#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>
#include <soskit/chordal.hpp>
#include <soskit/conic.hpp>
#include <soskit/io.hpp>
#include <soskit/lifts.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string text;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(SOSKIT_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Run r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.text.append(buf, got);
    const int st = pclose(pipe);
    if (WIFEXITED(st)) r.code = WEXITSTATUS(st);
    return r;
}

std::string data(const std::string& name) {
    return (fs::path(SOSKIT_TEST_DATA_DIR) / name).string();
}

const fs::path& tmp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("soskit_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string tmp(const std::string& name) { return (tmp_dir() / name).string(); }

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << body;
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    return json::parse(f);
}

std::vector<std::vector<std::string>> load_csv(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> fields;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) fields.push_back(cell);
        rows.push_back(std::move(fields));
    }
    return rows;
}

json selector_witness_json(int k) {
    const Eigen::MatrixXd S = soskit::slack_matrix(k).values;
    auto zero_block = [] { return json::array({{0.0, 0.0}, {0.0, 0.0}}); };
    auto scaled_e11 = [&](double v) { return json::array({{v, 0.0}, {0.0, 0.0}}); };
    json A = json::array(), B = json::array();
    for (int i = 0; i < S.rows(); ++i) {
        json row = json::array();
        for (int t = 0; t < k; ++t) row.push_back(scaled_e11(S(i, t)));
        A.push_back(row);
    }
    for (int j = 0; j < k; ++j) {
        json row = json::array();
        for (int t = 0; t < k; ++t) row.push_back(t == j ? scaled_e11(1.0) : zero_block());
        B.push_back(row);
    }
    return json{{"p", k}, {"A", A}, {"B", B}};
}

}  // namespace

TEST_CASE("compile reports closed-form sizing and writes both formats") {
    const std::string base = tmp("n10");
    const Run r = run_cli("compile " + data("n10.poly") + " --out " + base);
    INFO(r.text);
    REQUIRE(r.code == 0);
    REQUIRE(r.text.find("largest side N   66") != std::string::npos);
    REQUIRE(r.text.find("matching rows m  1000") != std::string::npos);

    const json prog = load_json(base + ".json");
    REQUIRE(prog["num_vars"] == 66 * 67 / 2 + 1);  // svec of the gram block + gamma
    REQUIRE(prog["cones"][0]["kind"] == "psd");
    REQUIRE(fs::exists(base + ".dat-s"));
    REQUIRE_NOTHROW(soskit::load_sdpa(base + ".dat-s"));
}

TEST_CASE("compile skips sdpa when the target cones do not fit the format") {
    const std::string base = tmp("q2_sdsos");
    const Run r = run_cli("compile " + data("quartic2.poly") + " --cone sdsos --out " + base);
    INFO(r.text);
    REQUIRE(r.code == 0);
    REQUIRE(r.text.find("skipped:") != std::string::npos);
    REQUIRE(r.text.find("use JSON") != std::string::npos);
    REQUIRE(fs::exists(base + ".json"));
    REQUIRE_FALSE(fs::exists(base + ".dat-s"));
}

TEST_CASE("solve certifies an obvious square") {
    const Run r = run_cli("solve " + data("square1.poly") +
                          " --feasibility --cone dsos --tol 1e-6 --max-iters 50000");
    INFO(r.text);
    REQUIRE(r.code == 0);
    REQUIRE(r.text.find("status") != std::string::npos);
    REQUIRE(r.text.find("Solved") != std::string::npos);
    REQUIRE(r.text.find("certified") != std::string::npos);
    REQUIRE(r.text.find("NOT certified") == std::string::npos);
}

TEST_CASE("clique bases and the dense compilation bound the same value") {
    const std::string a = tmp("chain_chordal.json"), b = tmp("chain_dense.json");
    const std::string common =
        " --cone sos --tol 1e-6 --max-iters 300000 --out ";
    const Run rc = run_cli("solve " + data("chain6.poly") + " --solver chordal" + common + a);
    INFO(rc.text);
    REQUIRE(rc.code == 0);
    const Run rd = run_cli("solve " + data("chain6.poly") + " --solver dense" + common + b);
    INFO(rd.text);
    REQUIRE(rd.code == 0);

    const json ja = load_json(a), jb = load_json(b);
    REQUIRE(ja["status"] == "Solved");
    REQUIRE(jb["status"] == "Solved");
    REQUIRE(ja["N"] == 6);   // largest clique basis
    REQUIRE(jb["N"] == 28);  // full monomial basis
    REQUIRE(ja["verification"]["certified"] == true);
    REQUIRE(jb["verification"]["certified"] == true);
    const double ba = ja["bound"], bb = jb["bound"];
    REQUIRE(ba == Catch::Approx(bb).margin(1e-3 * (1.0 + std::abs(bb))));
    REQUIRE(ja["seed"] == 42);  // default seed is recorded
}

TEST_CASE("the row-sparse engine reproduces the dense bound") {
    const std::string out = tmp("chain_rowsparse.json");
    const Run r = run_cli("solve " + data("chain6.poly") +
                          " --cone sos --solver rowsparse --tol 1e-6 --max-iters 300000 --out " +
                          out);
    INFO(r.text);
    REQUIRE(r.code == 0);
    const json j = load_json(out);
    REQUIRE(j["status"] == "Solved");
    // dense reference from the previous case sits near the same value
    const std::string dense = tmp("chain_dense.json");
    if (fs::exists(dense)) {
        const double bd = load_json(dense)["bound"];
        REQUIRE(double(j["bound"]) == Catch::Approx(bd).margin(1e-3 * (1.0 + std::abs(bd))));
    }
}

TEST_CASE("stored programs solve with and without psd-block splitting") {
    // band pattern: objective and rows live on a path, so the split is exact
    using namespace soskit;
    const int s = 5;
    ProgramBuilder pb;
    pb.add_block(ConeKind::PSD, s);
    for (int i = 0; i + 1 < s; ++i) pb.set_objective(svec_index(i, i + 1), i % 2 ? 1.0 : -1.0);
    int r0 = pb.begin_row(double(s));
    for (int i = 0; i < s; ++i) pb.add_entry(r0, svec_index(i, i), 1.0);
    for (int i = 0; i + 1 < s; ++i) {
        const int r = pb.begin_row(0.25 * std::numbers::sqrt2);
        pb.add_entry(r, svec_index(i, i + 1), 1.0);
    }
    const std::string prog_path = tmp("band.json");
    save_conic_json(pb.finish(), prog_path);

    const std::string a = tmp("band_dense_report.json"), b = tmp("band_chordal_report.json");
    const Run rd = run_cli("solve " + prog_path + " --tol 1e-7 --max-iters 200000 --out " + a);
    INFO(rd.text);
    REQUIRE(rd.code == 0);
    const Run rc = run_cli("solve " + prog_path +
                           " --solver chordal --tol 1e-7 --max-iters 200000 --out " + b);
    INFO(rc.text);
    REQUIRE(rc.code == 0);
    REQUIRE(rc.text.find("chordal (4 cliques)") != std::string::npos);

    const json ja = load_json(a), jb = load_json(b);
    REQUIRE(ja["bound"].is_null());  // stored programs carry no polynomial bound
    REQUIRE(ja["verification"].is_null());
    const double oa = ja["objective"], ob = jb["objective"];
    REQUIRE(oa == Catch::Approx(ob).margin(1e-4 * (1.0 + std::abs(oa))));
}

TEST_CASE("input errors exit with code 2") {
    REQUIRE(run_cli("solve " + tmp("missing.poly")).code == 2);

    const std::string odd = tmp("odd.poly");
    write_file(odd, "vars 1 degree 3\n1.0 3\n");
    const Run r = run_cli("compile " + odd);
    REQUIRE(r.code == 2);
    REQUIRE(r.text.find("must be even") != std::string::npos);

    REQUIRE(run_cli("solve " + data("square1.poly") + " --cone bogus").code == 2);
    REQUIRE(run_cli("").code == 2);            // a subcommand is required
    REQUIRE(run_cli("slack --k 1").code == 2);  // too small to have pair rows
    REQUIRE(run_cli("--help").code == 0);
}

TEST_CASE("infeasible certification requests exit with code 3") {
    const std::string indef = tmp("indef.poly");
    write_file(indef, "vars 2 degree 2\n1.0 2 0\n3.0 1 1\n1.0 0 2\n");
    const Run r = run_cli("solve " + indef +
                          " --feasibility --cone dsos --tol 1e-6 --max-iters 30000");
    INFO(r.text);
    REQUIRE(r.code == 3);
    REQUIRE(r.text.find("likely infeasible") != std::string::npos);
}

TEST_CASE("bench grids rerun to identical bounds") {
    const std::string c1 = tmp("bench1.csv"), c2 = tmp("bench2.csv");
    const std::string args =
        "bench --n 2 --instances 2 --methods dsos,sos --tol 1e-5 --max-iters 100000 --seed 7";
    const Run r1 = run_cli(args + " --out " + c1);
    INFO(r1.text);
    REQUIRE(r1.code == 0);
    REQUIRE(r1.text.find("base seed 7") != std::string::npos);
    REQUIRE(r1.text.find(", 0 failures") != std::string::npos);
    const Run r2 = run_cli(args + " --out " + c2);
    REQUIRE(r2.code == 0);

    const auto a = load_csv(c1), b = load_csv(c2);
    REQUIRE(a.size() == 1 + 2 * 2);  // header + |grid| x |methods|
    REQUIRE(a.size() == b.size());
    REQUIRE(a[0] == std::vector<std::string>{"n", "N", "m", "method", "bound", "time_s",
                                             "iters", "status"});
    for (std::size_t i = 1; i < a.size(); ++i) {
        REQUIRE(a[i].size() == 8);
        REQUIRE(a[i][0] == "2");
        REQUIRE(a[i][1] == "6");
        REQUIRE(a[i][2] == "14");
        for (std::size_t f : {3u, 4u, 6u, 7u}) REQUIRE(a[i][f] == b[i][f]);  // not time_s
        REQUIRE((a[i][7] == "Solved" || a[i][7] == "MaxIters"));
    }
}

TEST_CASE("slack emits the exact integer csv") {
    const std::string out = tmp("s3.csv");
    REQUIRE(run_cli("slack --k 3 --out " + out).code == 0);
    const auto rows = load_csv(out);
    REQUIRE(rows.size() == 4);
    REQUIRE(rows[0] == std::vector<std::string>{"i1", "i2", "j1", "j2", "j3"});
    REQUIRE(rows[1] == std::vector<std::string>{"1", "2", "0", "0", "4"});
    REQUIRE(rows[2] == std::vector<std::string>{"1", "3", "0", "4", "0"});
    REQUIRE(rows[3] == std::vector<std::string>{"2", "3", "4", "0", "0"});
}

TEST_CASE("witness verification accepts honest factorizations and flags broken ones") {
    const std::string good = tmp("w3.json"), bad = tmp("w3_bad.json");
    json w = selector_witness_json(3);
    write_file(good, w.dump());
    w["A"][0][2][0][0] = double(w["A"][0][2][0][0]) + 0.5;
    write_file(bad, w.dump());

    const Run ok = run_cli("slack --witness " + good);
    INFO(ok.text);
    REQUIRE(ok.code == 0);
    REQUIRE(ok.text.find("accepted         yes") != std::string::npos);

    const Run no = run_cli("slack --witness " + bad);
    INFO(no.text);
    REQUIRE(no.code == 3);
    REQUIRE(no.text.find("accepted         no") != std::string::npos);
    REQUIRE(no.text.find("mismatch") != std::string::npos);

    const Run clash = run_cli("slack --witness " + good + " --k 4");
    REQUIRE(clash.code == 2);
    REQUIRE(clash.text.find("witness is for k=3") != std::string::npos);
}

TEST_CASE("refine traces serialize with status per step") {
    const std::string out = tmp("colgen.json");
    const Run r = run_cli("refine " + data("square1.poly") + " --method colgen --max-iters 3 --out " +
                          out);
    INFO(r.text);
    REQUIRE(r.code == 0);
    const json j = load_json(out);
    REQUIRE(j["method"] == "colgen");
    REQUIRE(j["cone"] == "dsos");
    REQUIRE(j["iterations"].size() >= 1);
    for (const auto& step : j["iterations"]) {
        REQUIRE(step.contains("bound"));
        REQUIRE(step.contains("note"));
        REQUIRE(step.contains("time_s"));
        REQUIRE(step["status"] == "Solved");
    }
    REQUIRE(double(j["final_bound"]) == Catch::Approx(0.0).margin(1e-5));
    const std::string t = j["terminal_status"];
    REQUIRE((t == "no_improving_ray" || t == "improvement_floor" || t == "max_iters"));
}

TEST_CASE("basis pursuit lifts a weak dd bound from the command line") {
    const std::string out = tmp("bp.json");
    const Run r = run_cli("refine " + data("quartic2.poly") +
                          " --method basispursuit --cone dsos --max-iters 3 --out " + out);
    INFO(r.text);
    REQUIRE(r.code == 0);
    const json j = load_json(out);
    const auto& steps = j["iterations"];
    REQUIRE(steps.size() >= 2);
    const double first = steps[0]["bound"], last = steps[steps.size() - 1]["bound"];
    REQUIRE(last > first + 0.05);
    for (std::size_t i = 1; i < steps.size(); ++i)
        REQUIRE(double(steps[i]["bound"]) >= double(steps[i - 1]["bound"]) - 1e-6);
}
