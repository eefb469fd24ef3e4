#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string tmp = "cli_test_out.json";
    const std::string cmd = std::string(CUBELAB_CLI_PATH) + " " + args + " > " + tmp + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return RunResult{WEXITSTATUS(status), ss.str()};
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("witness --n 14 --m 2").exit_code == 2);  // even n rejected
    CHECK(run_cli("witness --n 13 --m 2 --no-such-flag 1").exit_code == 2);
    CHECK(run_cli("nonsense").exit_code == 2);
    CHECK(run_cli("witness --m 2").exit_code == 2);  // missing required
}

TEST_CASE("witness subcommand emits a passing report") {
    RunResult r = run_cli("witness --n 13 --m 2 --rho 1/2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("schema_version") == "1");
    CHECK(j.at("command") == "witness");
    CHECK(j.at("results").at("kappa") == "90996435399/5484379635712");
    REQUIRE(j.at("checks").is_array());
    REQUIRE(!j.at("checks").empty());
    for (const auto& c : j.at("checks")) {
        CHECK(c.at("pass") == true);
        CHECK(c.contains("lhs"));
        CHECK(c.contains("rhs"));
        CHECK(c.contains("margin"));
    }
    CHECK(j.contains("wall_ms"));
}

TEST_CASE("witness float mode via the environment default") {
    RunResult r = run_cli("witness --n 13 --m 2 --mode float");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("results").at("sup_norm").is_number());
    CHECK(j.at("results").at("kappa").is_number());
}

TEST_CASE("l1 subcommand certifies weak duality") {
    RunResult r = run_cli("l1 --n 9 --m 1 --rho 1/2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("results").contains("optimum"));
    CHECK(j.at("results").contains("kappa_lower_bound"));
    CHECK(j.at("results").contains("gap"));
    CHECK(j.at("results").at("coefficients").size() == 2);
}

TEST_CASE("family subcommand") {
    RunResult r = run_cli("family --n 15 --m 2 --delta 0.47 --size 25 --seed 3");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("results").at("directions").size() == 25);
    const std::string first = j.at("results").at("directions")[0];
    CHECK(first.size() == 15);
}

TEST_CASE("reports are byte-identical for the same seed, wall time aside") {
    RunResult a = run_cli("sq --n 15 --m 2 --family-size 20 --delta 0.47 --seed 5");
    RunResult b = run_cli("sq --n 15 --m 2 --family-size 20 --delta 0.47 --seed 5");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    auto ja = nlohmann::json::parse(a.out);
    auto jb = nlohmann::json::parse(b.out);
    ja.erase("wall_ms");
    jb.erase("wall_ms");
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("sweep runs a one-cell grid and resumes without recomputation") {
    const std::string grid = "cli_test_grid.txt";
    {
        std::ofstream g(grid);
        g << "command: l1\n";
        g << "n: 9\n";
        g << "m: 1\n";
        g << "rho: 1/2\n";
    }
    std::remove("cli_sweep.csv");
    std::remove("cli_sweep.csv.done");
    const std::string cmd = std::string(CUBELAB_CLI_PATH) + " sweep " + grid +
                            " --output cli_sweep.csv > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::ifstream csv("cli_sweep.csv");
    std::string header, row, extra;
    REQUIRE(std::getline(csv, header));
    REQUIRE(std::getline(csv, row));
    CHECK(!std::getline(csv, extra));
    CHECK(header.rfind("cell,command,params,pass,results", 0) == 0);
    CHECK(row.find("l1") != std::string::npos);

    // resume: the done log marks the cell; a second run adds nothing
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::ifstream csv2("cli_sweep.csv");
    int lines = 0;
    std::string l;
    while (std::getline(csv2, l)) ++lines;
    CHECK(lines == 2);

    std::remove(grid.c_str());
    std::remove("cli_sweep.csv");
    std::remove("cli_sweep.csv.done");
}

TEST_CASE("identities subcommand passes all checks") {
    RunResult r = run_cli("identities");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("results").at("checks_passed") == j.at("results").at("checks_total"));
}
