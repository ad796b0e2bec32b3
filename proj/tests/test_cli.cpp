#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kBase = fs::temp_directory_path() / "efp-cli-tests";

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(EFP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string config(const std::string& name) {
    return std::string(EFP_CONFIG_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = kBase / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("certify: exit 0 on pass, 2 on failure, report always emitted") {
    const fs::path pass_dir = fresh_dir("certify-pass");
    CHECK(run_cli("certify --config " + config("reciprocal_ene_certify.json") + " --out " +
                  pass_dir.string()) == 0);
    const std::string cert = slurp(pass_dir / "certificate.txt");
    CHECK(cert.find("ENRICHED_NONEXPANSIVE") != std::string::npos);
    CHECK(cert.rfind("# generated", 0) == 0);

    const fs::path fail_dir = fresh_dir("certify-fail");
    CHECK(run_cli("certify --config " + config("reciprocal_ne_certify.json") + " --out " +
                  fail_dir.string()) == 2);
    CHECK(fs::exists(fail_dir / "certificate.txt"));

    const fs::path infeasible = fresh_dir("certify-infeasible");
    CHECK(run_cli("certify --config " + config("translation_certify.json") + " --out " +
                  infeasible.string()) == 2);
}

TEST_CASE("solve: artifacts and the frozen trace layout") {
    const fs::path dir = fresh_dir("solve-reflection");
    CHECK(run_cli("solve --config " + config("reflection_solve.json") + " --out " +
                  dir.string()) == 0);
    CHECK(fs::exists(dir / "certificate.txt"));
    CHECK(fs::exists(dir / "solve.txt"));

    const auto rows = lines_of(slurp(dir / "trace.csv"));
    REQUIRE(rows.size() == 4);  // stamp, header, x0 row, one moved row
    CHECK(rows[0].rfind("# generated", 0) == 0);
    CHECK(rows[1] == "n,coord_0,residual,bound_apriori,bound_aposteriori");
    CHECK(rows[2].rfind("0,", 0) == 0);
    CHECK(rows[3].rfind("1,0.5,", 0) == 0);  // lands on the fixed point in one step
}

TEST_CASE("solve: lambda override is accepted") {
    const fs::path dir = fresh_dir("solve-lambda");
    CHECK(run_cli("solve --config " + config("reflection_solve.json") + " --lambda 0.25 --out " +
                  dir.string()) == 0);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("verify: stored certificates re-check from disk") {
    const fs::path dir = fresh_dir("verify-pass");
    REQUIRE(run_cli("certify --config " + config("reciprocal_ene_certify.json") + " --out " +
                    dir.string()) == 0);
    CHECK(run_cli("verify --config " + config("reciprocal_ene_certify.json") + " --out " +
                  dir.string()) == 0);

    // a failed certificate still verifies: its witness must reproduce
    const fs::path fail_dir = fresh_dir("verify-fail-cert");
    REQUIRE(run_cli("certify --config " + config("translation_certify.json") + " --out " +
                    fail_dir.string()) == 2);
    CHECK(run_cli("verify --config " + config("translation_certify.json") + " --out " +
                  fail_dir.string()) == 0);

    // no stored certificate: config error
    const fs::path empty = fresh_dir("verify-empty");
    CHECK(run_cli("verify --config " + config("reciprocal_ene_certify.json") + " --out " +
                  empty.string()) == 1);
}

TEST_CASE("atlas: membership table lands on disk") {
    const fs::path dir = fresh_dir("atlas");
    CHECK(run_cli("atlas --config " + config("two_branch_atlas.json") + " --out " +
                  dir.string()) == 0);
    const std::string table = slurp(dir / "membership.txt");
    CHECK(table.find("fail") != std::string::npos);
}

TEST_CASE("solve: cyclic, presic and quasi-norm configs run end to end") {
    const fs::path cyc = fresh_dir("solve-cyclic");
    CHECK(run_cli("solve --config " + config("cyclic_solve.json") + " --out " + cyc.string()) ==
          0);
    CHECK(fs::exists(cyc / "solve.txt"));

    const fs::path pre = fresh_dir("solve-presic");
    CHECK(run_cli("solve --config " + config("presic_solve.json") + " --out " + pre.string()) ==
          0);
    CHECK(fs::exists(pre / "trace.csv"));

    const fs::path qb = fresh_dir("solve-quasibanach");
    CHECK(run_cli("solve --config " + config("quasibanach_solve.json") + " --out " +
                  qb.string()) == 0);
    const std::string report = slurp(qb / "solve.txt");
    CHECK(report.find("heuristic") != std::string::npos);
}

TEST_CASE("config and usage errors exit 1") {
    CHECK(run_cli("certify --config /nonexistent/nope.json --out " +
                  fresh_dir("missing").string()) == 1);

    const fs::path dir = fresh_dir("malformed");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("certify --config " + bad.string() + " --out " + dir.string()) == 1);

    const fs::path incomplete = dir / "incomplete.json";
    std::ofstream(incomplete) << "{\"task\": {\"kind\": \"atlas\"}}";
    CHECK(run_cli("certify --config " + incomplete.string() + " --out " + dir.string()) == 1);

    CHECK(run_cli("bench --suite no-such-suite --out " + fresh_dir("bench-bad").string()) == 1);
}
