#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exitCode;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(MFDIM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

long countLines(const std::string& text, const std::string& prefix) {
    long count = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) ++count;
    return count;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate writes the declared node count") {
    const RunResult r =
        run("generate --bernoulli 0.3,0.7 --depth 10 -o /tmp/mfdim_test_b10.tree");
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("nodes=2047") != std::string::npos);  // 2^11 - 1
    const std::string text = slurp("/tmp/mfdim_test_b10.tree");
    CHECK(countLines(text, "node ") == 2047);
}

TEST_CASE("generate requires a depth") {
    const RunResult r = run("generate --bernoulli 0.5,0.5 -o /tmp/mfdim_test_nodepth.tree");
    CHECK(r.exitCode == 2);
}

TEST_CASE("cantor generation and leaf length") {
    const RunResult r = run("generate --cantor 0.2 --depth 6 -o /tmp/mfdim_test_c.tree");
    CHECK(r.exitCode == 0);
    const std::string text = slurp("/tmp/mfdim_test_c.tree");
    // leaf length 0.2^6 = 6.4e-05 appears on leaf node lines
    CHECK(text.find("node 000000 0.20000000000000001 0.015625 0 6.4000000000000024e-05") !=
          std::string::npos);
}

TEST_CASE("estimate on the uniform measure yields exact unit dimensions") {
    run("generate --bernoulli 0.5,0.5 --depth 12 -o /tmp/mfdim_test_u.tree");
    const RunResult r =
        run("estimate --measure /tmp/mfdim_test_u.tree --q 0 --samples 200 --seed 5 "
            "--out /tmp/mfdim_test_u.csv");
    CHECK(r.exitCode == 0);
    const std::string csv = slurp("/tmp/mfdim_test_u.csv");
    CHECK(csv.find("# mfdim-csv v1 dimension-report") == 0);
    CHECK(csv.find("q,lowerH,upperH,lowerP,upperP,N,seed") != std::string::npos);
    CHECK(csv.find("0,1,1,1,1,200,") != std::string::npos);
}

TEST_CASE("outputs are reproducible from the same config and seed") {
    run("generate --bernoulli 0.3,0.7 --depth 12 -o /tmp/mfdim_test_r.tree");
    const std::string args =
        "estimate --measure /tmp/mfdim_test_r.tree --q 0,2 --samples 300 --seed 11 --out "
        "/tmp/mfdim_test_r.csv";
    run(args);
    const std::string first = slurp("/tmp/mfdim_test_r.csv");
    run(args);
    CHECK(first == slurp("/tmp/mfdim_test_r.csv"));

    // worker count must not change the bytes either; the verdict file name is
    // kept identical so the config echo matches too
    const RunResult t1 =
        run("--threads 1 verify quasi-bernoulli --p 0.3,0.7 --depth 16 -N 500 --seed 3 "
            "--format json --out /tmp/mfdim_test_v.json");
    CHECK(t1.exitCode == 0);
    const std::string one = slurp("/tmp/mfdim_test_v.json");
    const RunResult t8 =
        run("--threads 8 verify quasi-bernoulli --p 0.3,0.7 --depth 16 -N 500 --seed 3 "
            "--format json --out /tmp/mfdim_test_v.json");
    CHECK(t8.exitCode == 0);
    CHECK(one == slurp("/tmp/mfdim_test_v.json"));
}

TEST_CASE("project: row count, determinism, and usage errors") {
    run("generate --cantor-square 0.2 --depth 5 -o /tmp/mfdim_test_sq.csv");
    const std::string args =
        "project --measure /tmp/mfdim_test_sq.csv --m 1 --subspaces 12 "
        "--base 2 --kmin 3 --kmax 8 --window 2 --samples 150 --seed 7 --out "
        "/tmp/mfdim_test_p.csv";
    const RunResult p1 = run(args);
    CHECK(p1.exitCode == 0);
    CHECK(p1.output.find("pass fraction") != std::string::npos);
    const std::string csv = slurp("/tmp/mfdim_test_p.csv");
    CHECK(countLines(csv, "0,") + countLines(csv, "1,") >= 1);
    long rows = 0;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.find("v_index") == std::string::npos) ++rows;
    CHECK(rows == 12);

    run(args);
    CHECK(csv == slurp("/tmp/mfdim_test_p.csv"));

    const RunResult bad = run(
        "project --measure /tmp/mfdim_test_sq.csv --m 2 --subspaces 4 --out /dev/null");
    CHECK(bad.exitCode == 2);
}

TEST_CASE("verify: pass path, unknown experiment, and report rendering") {
    const RunResult ok = run(
        "verify quasi-bernoulli --p 0.5,0.5 --depth 12 --q 0,2 -N 300 --seed 1 "
        "--format json --out /tmp/mfdim_test_verdict.json");
    CHECK(ok.exitCode == 0);

    const RunResult rendered = run("report --in /tmp/mfdim_test_verdict.json");
    CHECK(rendered.exitCode == 0);
    CHECK(rendered.output.find("overall: PASS") != std::string::npos);

    const RunResult unknown = run("verify nosuch");
    CHECK(unknown.exitCode == 2);
    CHECK(unknown.output.find("quasi-bernoulli") != std::string::npos);
    CHECK(unknown.output.find("kernel-lemmas") != std::string::npos);
}

TEST_CASE("corrupt measure files surface parse errors with a line number") {
    std::ofstream out("/tmp/mfdim_test_corrupt.tree");
    out << "# mfdim-measure v1\nmode symbolic\narity 2\ndepth 1\nnodes 3\n"
        << "node - 1 1\nnode 0 0.5 oops\nnode 1 0.5 0.5\n";
    out.close();
    const RunResult r = run("estimate --measure /tmp/mfdim_test_corrupt.tree --q 0");
    CHECK(r.exitCode == 1);
    CHECK(r.output.find("line 7") != std::string::npos);
}

}  // TEST_SUITE
