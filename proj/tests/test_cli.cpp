#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "hitchin/rational.hpp"

namespace {

// Runs the installed binary through the shell; returns its exit code.
// `capture` collects stdout, `env` prepends variable assignments.
int run_cli(const std::string& args, const std::string& capture = "", const std::string& env = "") {
    std::string cmd;
    if (!env.empty()) cmd += env + " ";
    cmd += std::string(CLI_BIN) + " " + args;
    cmd += capture.empty() ? " > /dev/null" : " > " + capture;
    cmd += " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json slurp_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

} // namespace

TEST_CASE("usage errors exit with code 2", "[cli]") {
    CHECK(run_cli("verify lagrange --n 0") == 2);
    CHECK(run_cli("verify lagrange --n 9") == 2);
    CHECK(run_cli("verify bogus-target") == 2);
    CHECK(run_cli("verify") == 2);
    CHECK(run_cli("integrate") == 2);
    CHECK(run_cli("integrate --scenario g5-heroic") == 2);
    CHECK(run_cli("verify factorization --genus 3 --p1 1 --trials 1") == 2);
    CHECK(run_cli("verify lagrange --point nowhere.json --trials 1") == 2);
    CHECK(run_cli("verify relations --trials 1 --seed 1", "", "HITCHIN_SEED=abc") == 2);
}

TEST_CASE("the full verification battery passes at the documented seed", "[cli]") {
    REQUIRE(run_cli("verify all --seed 7 --out cli_all.json") == 0);
    const nlohmann::json doc = slurp_json("cli_all.json");
    CHECK(doc.at("schema") == 1);
    CHECK(doc.at("target") == "all");
    CHECK(doc.at("verdict") == "pass");
    CHECK(doc.at("config").at("seed") == 7);
    REQUIRE(doc.at("checks").is_array());
    CHECK(doc.at("checks").size() >= 10);
    for (const auto& check : doc.at("checks")) CHECK(check.at("verdict") == "pass");
}

TEST_CASE("reports are byte-identical for a fixed seed and the environment overrides it", "[cli]") {
    REQUIRE(run_cli("verify factorization --genus 2 --trials 2 --seed 11 --out cli_f1.json") == 0);
    REQUIRE(run_cli("verify factorization --genus 2 --trials 2 --seed 11 --out cli_f2.json") == 0);
    CHECK(slurp("cli_f1.json") == slurp("cli_f2.json"));
    // A different --seed is irrelevant once HITCHIN_SEED pins the run.
    REQUIRE(run_cli("verify factorization --genus 2 --trials 2 --seed 3 --out cli_f3.json", "",
                    "HITCHIN_SEED=11") == 0);
    CHECK(slurp("cli_f3.json") == slurp("cli_f1.json"));
}

TEST_CASE("check failures exit with code 1 and embed a replayable counterexample", "[cli]") {
    REQUIRE(run_cli("verify factorization --genus 2 --trials 2 --seed 5 --p1 3/2 --out cli_red.json") == 1);
    const nlohmann::json doc = slurp_json("cli_red.json");
    CHECK(doc.at("verdict") == "fail");
    const nlohmann::json& check = doc.at("checks").at(0);
    CHECK(check.at("verdict") == "fail");
    CHECK(check.contains("counterexample"));
    CHECK(check.at("recorded").at("p1_shift_measured") == "-1/4");
    CHECK(check.at("counterexample").at("curve").at("genus") == 2);
}

TEST_CASE("the trajectory dump has one data row per sample plus a header", "[cli]") {
    REQUIRE(run_cli("integrate --scenario g3-equal-kappa --t1 1 --steps 10000 --out cli_traj.csv") == 0);
    const std::string csv = slurp("cli_traj.csv");
    CHECK(csv.rfind("t,re_a1,im_a1,", 0) == 0);
    std::size_t lines = 0;
    for (const char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 10002);
}

TEST_CASE("the Hamiltonian evaluator is exact, scales with the weight, and replays", "[cli]") {
    REQUIRE(run_cli("hamiltonian --genus 2 --seed 3", "cli_ham1.json") == 0);
    const nlohmann::json one = slurp_json("cli_ham1.json");
    CHECK(one.at("schema") == 1);
    CHECK(one.at("genus") == 2);
    CHECK(one.at("locus") == "canonical");
    REQUIRE(one.contains("H"));
    REQUIRE(one.at("flow").is_object());
    CHECK(one.at("flow").size() >= 10);

    // Halving the weight factor halves the (linear) residue value.
    REQUIRE(run_cli("hamiltonian --genus 2 --seed 3 --dx-factor 1/2", "cli_ham2.json") == 0);
    const nlohmann::json two = slurp_json("cli_ham2.json");
    const hitchin::Rational h1 = hitchin::rat_parse(one.at("H").get<std::string>());
    const hitchin::Rational h2 = hitchin::rat_parse(two.at("H").get<std::string>());
    CHECK(h2 * 2 == h1);

    // The embedded point replays through the whole identity battery.
    {
        std::ofstream out("cli_point.json");
        out << one.at("point").dump(2) << "\n";
    }
    REQUIRE(run_cli("verify all --point cli_point.json --out cli_replay.json") == 0);
    const nlohmann::json rep = slurp_json("cli_replay.json");
    CHECK(rep.at("verdict") == "pass");
    REQUIRE(rep.at("checks").size() == 1);
    CHECK(rep.at("checks").at(0).at("check") == "reduction.point-replay");
    CHECK(rep.at("checks").at(0).contains("sigma_H"));

    CHECK(run_cli("hamiltonian --genus 3 --point cli_point.json") == 2);
}
