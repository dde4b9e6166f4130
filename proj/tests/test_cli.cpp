// End-to-end tests for the command-line tool: JSON reports, CSV output,
// exit-code mapping, manifest reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

using json = nlohmann::json;

#ifndef QLS_CLI_PATH
#error "QLS_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& workdir) {
    std::string err_file = workdir + "/stderr.txt";
    std::string cmd = "cd " + workdir + " && " + QLS_CLI_PATH + " " + args + " 2>" +
                      err_file;
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int st = pclose(p);
    r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    std::ifstream ef(err_file);
    std::stringstream ss;
    ss << ef.rdbuf();
    r.err = ss.str();
    return r;
}

std::string make_tmpdir() {
    char tmpl[] = "/tmp/qls_cli_test_XXXXXX";
    char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return d;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("criterion subcommand emits the documented JSON") {
    std::string dir = make_tmpdir();
    auto r = run_cli("criterion --case 1 --r0 1 --kappa 0 --method integral --json", dir);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(std::fabs(j["p_prime_0"].get<double>() + 2.8284271247) <= 1e-3);
    CHECK(j["verdict"] == "StableSlope");
}

TEST_CASE("closed-form sign-change root via the CLI") {
    std::string dir = make_tmpdir();
    auto r = run_cli("criterion --case gp-closed-form --kappa0 --json", dir);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(std::fabs(j["kappa0"].get<double>() - 3.636) <= 0.01);
}

TEST_CASE("profile CSV matches the analytic kink") {
    std::string dir = make_tmpdir();
    auto r = run_cli("profile --case 1 --kappa 0 --c 0 --xmax 10 --n 2001 --out kink.csv",
                     dir);
    CHECK(r.exit_code == 0);
    auto rows = read_csv(dir + "/kink.csv");
    REQUIRE(rows.size() == 2002);
    CHECK(rows[0] == std::vector<std::string>{"x", "re_u", "im_u", "abs_u", "eta",
                                              "phase"});
    double sup = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        double x = std::stod(rows[i][0]), re = std::stod(rows[i][1]);
        sup = std::max(sup, std::fabs(re - std::tanh(x / std::sqrt(2.0))));
        CHECK(std::stod(rows[i][2]) == 0.0);
    }
    CHECK(sup <= 1e-8);
}

TEST_CASE("functionals subcommand reads a field CSV back") {
    std::string dir = make_tmpdir();
    REQUIRE(run_cli("profile --case 1 --kappa 0 --c 0 --out kink.csv", dir).exit_code ==
            0);
    auto r = run_cli("functionals --case 1 --kappa 0 --in kink.csv --M-lyap 0.7071", dir);
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(std::fabs(j["energy"].get<double>() - 4.0 * std::sqrt(2.0) / 3.0) <= 1e-5);
    CHECK(std::fabs(j["momentum_untwisted"].get<double>() - M_PI) <= 1e-6);
}

TEST_CASE("sweep subcommand writes increasing slopes") {
    std::string dir = make_tmpdir();
    auto r = run_cli(
        "sweep --case 1 --kappa-min 0 --kappa-max 2 --steps 5 --out sweep.csv", dir);
    CHECK(r.exit_code == 0);
    auto rows = read_csv(dir + "/sweep.csv");
    REQUIRE(rows.size() == 6);
    for (size_t i = 2; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][1]) > std::stod(rows[i - 1][1]));
}

TEST_CASE("exit codes and machine-readable errors") {
    std::string dir = make_tmpdir();
    SUBCASE("validation error is exit 2") {
        auto r = run_cli("profile --case 9", dir);
        CHECK(r.exit_code == 2);
        json j = json::parse(r.err);
        CHECK(j["error"] == "validation");
    }
    SUBCASE("numerical failure is exit 3") {
        // coupling below the ellipticity threshold: the slope integrand
        // degenerates
        auto r = run_cli("criterion --case 1 --kappa -0.8 --method integral --json", dir);
        CHECK(r.exit_code == 3);
        json j = json::parse(r.err);
        CHECK(j["error"] == "numerical");
    }
    SUBCASE("missing subcommand is exit 2") {
        auto r = run_cli("", dir);
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("manifest records reproducible digests") {
    std::string dir = make_tmpdir();
    std::string flags =
        "--manifest man.json --seed 42 potential --case 2 --kappa 1 --c 0.3 "
        "--xi-grid 32 --out pot.csv";
    REQUIRE(run_cli(flags, dir).exit_code == 0);
    json m1 = json::parse(slurp(dir + "/man.json"));
    CHECK(m1["seed"] == 42);
    REQUIRE(m1["outputs"].size() == 1);
    CHECK(m1["outputs"][0]["path"] == "pot.csv");
    std::string digest = m1["outputs"][0]["fnv1a64"];
    CHECK(digest.size() == 16);
    REQUIRE(run_cli(flags, dir).exit_code == 0);
    json m2 = json::parse(slurp(dir + "/man.json"));
    CHECK(m2["outputs"][0]["fnv1a64"] == digest);
}
