#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support/cli_runner.hpp"

using testsupport::CliResult;
using testsupport::require_env;
using testsupport::run_cli;
using testsupport::run_command;

namespace {

std::string cli() { return require_env("MENUFORGE_CLI_BIN"); }

std::string fixture(const std::string& name) {
    return require_env("MENUFORGE_FIXTURES") + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open " << path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string scratch(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "menuforge_cli_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    REQUIRE(bool(out));
}

}  // namespace

TEST_CASE("solve certifies the revealing-signal instance") {
    CliResult r = run_cli(cli(), {"solve", fixture("ia_uniform.json")});
    REQUIRE(r.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["objective"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["menu"].size() == 2);
    CHECK(doc["certificate"]["verdict"] == "pass");
}

TEST_CASE("solve output is byte-stable") {
    CliResult first = run_cli(cli(), {"solve", fixture("ia_uniform.json")});
    CliResult second = run_cli(cli(), {"solve", fixture("ia_uniform.json")});
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out == slurp(fixture("golden/solve_ia_uniform.json")));
}

TEST_CASE("a solved menu verifies, a corrupted one is rejected") {
    std::string report_path = scratch("ia_report.json");
    CliResult solved =
        run_cli(cli(), {"solve", fixture("ia_uniform.json"), "-o", report_path});
    REQUIRE(solved.exit_code == 0);

    CliResult ok = run_cli(cli(), {"verify", fixture("ia_uniform.json"), report_path});
    CHECK(ok.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(ok.out);
    CHECK(doc["certificate"]["verdict"] == "pass");

    std::string bad_path = scratch("ia_corrupt.json");
    spit(bad_path, R"([{"payments": [0.9, 0]}, {"payments": [0, 1]}])");
    CliResult bad = run_cli(cli(), {"verify", fixture("ia_uniform.json"), bad_path});
    CHECK(bad.exit_code == 2);
    CHECK(nlohmann::json::parse(bad.out)["certificate"]["verdict"] == "fail");

    // A looser tolerance turns the same verdict around.
    CliResult loose =
        run_cli(cli(), {"verify", fixture("ia_uniform.json"), bad_path, "--tol", "10"});
    CHECK(loose.exit_code == 0);
}

TEST_CASE("the hidden-action fixtures solve and fail as designed") {
    CliResult good = run_cli(cli(), {"solve", fixture("contract_two_action.json")});
    REQUIRE(good.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(good.out);
    CHECK(doc["objective"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["certificate"]["verdict"] == "pass");

    CliResult bad = run_cli(cli(), {"solve", fixture("contract_not_elicitable.json")});
    CHECK(bad.exit_code == 2);
    nlohmann::json err = nlohmann::json::parse(bad.out);
    CHECK(err["error"].get<std::string>().find("not on lower boundary") != std::string::npos);
}

TEST_CASE("schema problems exit 1 with an error report") {
    CliResult r = run_cli(cli(), {"solve", fixture("malformed_q.json")});
    CHECK(r.exit_code == 1);
    nlohmann::json err = nlohmann::json::parse(r.out);
    CHECK(err["error"].get<std::string>().find("/q") != std::string::npos);
}

TEST_CASE("tolerance can come from the environment and must parse") {
    std::string cmd = "MENUFORGE_TOL='abc' " +
                      testsupport::cli_command(cli(), {"solve", fixture("ia_uniform.json")});
    CliResult junk = run_command(cmd);
    CHECK(junk.exit_code == 1);
    CHECK(nlohmann::json::parse(junk.out)["error"].get<std::string>().find("MENUFORGE_TOL") !=
          std::string::npos);

    std::string ok_cmd = "MENUFORGE_TOL='1e-6' " +
                         testsupport::cli_command(cli(), {"solve", fixture("ia_uniform.json")});
    CHECK(run_command(ok_cmd).exit_code == 0);
}

TEST_CASE("the general fixture solves under both formulations") {
    CliResult p6 = run_cli(cli(), {"solve", fixture("general_producer.json")});
    REQUIRE(p6.exit_code == 0);
    nlohmann::json doc6 = nlohmann::json::parse(p6.out);
    CHECK(doc6["certificate"]["verdict"] == "pass");

    CliResult p5 =
        run_cli(cli(), {"solve", fixture("general_producer.json"), "--formulation", "p5"});
    REQUIRE(p5.exit_code == 0);
    nlohmann::json doc5 = nlohmann::json::parse(p5.out);
    CHECK(doc5["objective"].get<double>() ==
          doctest::Approx(doc6["objective"].get<double>()).epsilon(1e-6));
}

TEST_CASE("forcing the general solver on special regimes reproduces them") {
    CliResult r =
        run_cli(cli(), {"solve", fixture("ia_uniform.json"), "--regime", "general"});
    REQUIRE(r.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["objective"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(doc["certificate"]["verdict"] == "pass");

    CliResult mismatch =
        run_cli(cli(), {"solve", fixture("contract_two_action.json"), "--regime", "ia"});
    CHECK(mismatch.exit_code == 1);
}

TEST_CASE("epsilon mode buys strict incentives for at most epsilon") {
    CliResult r = run_cli(
        cli(), {"solve", fixture("contract_two_action.json"), "--epsilon", "0.25"});
    REQUIRE(r.exit_code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    double objective = doc["objective"].get<double>();
    CHECK(objective >= 1.0 - 1e-9);
    CHECK(objective <= 1.25 + 1e-9);
    CHECK(doc["menu"].size() == 1);
    CHECK(doc["note"].get<std::string>().find("strictly worse") != std::string::npos);
}

TEST_CASE("plots match the golden SVG and reject ternary instances") {
    std::string svg_path = scratch("ia_plot.svg");
    CliResult via_solve = run_cli(
        cli(), {"solve", fixture("ia_uniform.json"), "--plot", svg_path, "-o", "/dev/null"});
    REQUIRE(via_solve.exit_code == 0);
    CHECK(slurp(svg_path) == slurp(fixture("golden/plot_ia_uniform.svg")));

    CliResult via_plot = run_cli(cli(), {"plot", fixture("ia_uniform.json"),
                                         fixture("golden/solve_ia_uniform.json")});
    REQUIRE(via_plot.exit_code == 0);
    CHECK(via_plot.out == slurp(fixture("golden/plot_ia_uniform.svg")));

    std::string menu3 = scratch("menu3.json");
    spit(menu3, R"([{"payments": [0, 0, 0]}])");
    CliResult ternary = run_cli(cli(), {"plot", fixture("ia_ternary.json"), menu3});
    CHECK(ternary.exit_code == 1);
    CHECK(nlohmann::json::parse(ternary.out)["error"].get<std::string>().find(
              "plotting requires binary outcome") != std::string::npos);
}

TEST_CASE("usage errors and help behave like a normal tool") {
    CHECK(run_cli(cli(), {"frobnicate"}).exit_code == 1);
    CHECK(run_cli(cli(), {"solve"}).exit_code == 1);
    CHECK(run_cli(cli(), {"--help"}).exit_code == 0);
}
